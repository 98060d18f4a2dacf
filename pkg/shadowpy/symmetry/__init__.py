from shadowpy.symmetry.warp import (
    K_SIGMA, WarpField, concat_mirrored, dense_weights, facial_input, mirror_difference,
    mirror_targets, mirror_warp, vertex_sigmas, weight_matrix)
