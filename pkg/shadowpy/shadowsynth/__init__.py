from shadowpy.shadowsynth.color import ColorJitter, apply_ccm, sample_ccm
from shadowpy.shadowsynth.scatter import ScatterProfile, ss_blur
from shadowpy.shadowsynth.spatial import (
    SpatialVariation, apply_spatial_variation, blur_stack, spatial_variation_fields)
from shadowpy.shadowsynth.synth import (
    ABLATIONS, ForeignSample, blend, check_ablation, synth_foreign)
