from shadowpy.olat.rig import LightRig, load_rig, make_geodesic_rig, save_rig
from shadowpy.olat.scan import (
    OlatScan, load_scan, render_synthetic_face, render_synthetic_scan, save_scan,
    synthetic_head)
from shadowpy.olat.weights import (
    FILL_RATIO, FILL_SIZE, LIGHT_SIZES, fill_direction, harsh_weights, neighbors,
    relight, soft_weights)
from shadowpy.olat.pairs import FacialPair, knob_image, make_pair
