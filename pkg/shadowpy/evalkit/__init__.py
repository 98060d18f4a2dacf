from shadowpy.evalkit.affine import AffineOutput, apply_affine
from shadowpy.evalkit.homography import (
    Homography, dlt_homography, select_counterpart, warp_homography, warp_overlap)
from shadowpy.evalkit.metrics import (
    PSNR_CAP, image_metrics, l1_pixel, psnr, ssim, training_loss)
