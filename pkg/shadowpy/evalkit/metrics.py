"""
Pixel metrics reported in the evaluation tables

All metrics take linear-light images of the same shape.
"""
import numpy as np
from skimage.metrics import structural_similarity

from shadowpy.common.errors import DataError
from shadowpy.imgcore.image import check_same_shape, luminance


PSNR_CAP = 99.0

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


def _pair(image, truth):
    image = np.asarray(image, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    check_same_shape(('image', image), ('truth', truth))
    return image, truth


def l1_pixel(image, truth):
    """ mean absolute difference over every sample """
    image, truth = _pair(image, truth)
    return float(np.mean(np.abs(image - truth)))


def training_loss(pred, truth):
    """
    Pixel reconstruction loss of the shadow models

    Only the L1 pixel term.  The perceptual feature term needs a pretrained
    network and is not computed here.
    """
    return l1_pixel(pred, truth)


def psnr(image, truth, peak=1.0):
    """
    10 log10(peak^2 / MSE), in dB

    Identical images return PSNR_CAP rather than infinity.
    """
    image, truth = _pair(image, truth)
    mse = float(np.mean((image - truth) ** 2))
    if mse == 0:
        return PSNR_CAP
    return float(min(PSNR_CAP, 10.0 * np.log10(peak ** 2 / mse)))


def ssim(image, truth):
    """
    Mean SSIM of the Rec. 709 luma, 11x11 Gaussian window with sigma 1.5

    returns
        ssim (float) in [-1, 1]
    """
    image, truth = _pair(image, truth)
    if image.shape[0] < SSIM_WINDOW or image.shape[1] < SSIM_WINDOW:
        raise DataError('ssim needs at least {0}x{0} pixels, got {1}x{2}'.format(
            SSIM_WINDOW, image.shape[1], image.shape[0]))

    if image.ndim == 3:
        image, truth = luminance(image), luminance(truth)

    return float(structural_similarity(
        image, truth,
        data_range=1.0,
        gaussian_weights=True,
        sigma=SSIM_SIGMA,
        use_sample_covariance=False,
        K1=SSIM_K1,
        K2=SSIM_K2,
    ))


def image_metrics(image, truth):
    """ the metric row of one image pair """
    return {
        'psnr': psnr(image, truth),
        'ssim': ssim(image, truth),
        'l1': l1_pixel(image, truth),
    }
