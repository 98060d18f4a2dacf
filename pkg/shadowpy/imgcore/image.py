"""
Image buffers and colour conversion

An ImageBuf is a float64 numpy array of shape (height, width, 3) holding
linear-light RGB.  A ShadowMask has the same shape with every sample in
[0, 1], M=1 meaning fully shadowed.
"""
import numpy as np

from shadowpy.common.errors import DataError


#  Rec. 709 luma weights for linear RGB
LUMA_WEIGHTS = np.array([0.2126, 0.7152, 0.0722])

#  stages keep headroom above 1 until encode
MAX_LINEAR_VALUE = 4.0


def _check_finite(data, name):
    if not np.all(np.isfinite(data)):
        bad = np.argwhere(~np.isfinite(data))[0]
        raise DataError(
            '{} has a non-finite sample at {}'.format(name, tuple(bad)))


def as_image(data, name='image', channels=3, max_value=MAX_LINEAR_VALUE):
    """
    Validates and converts to an ImageBuf

    args
        data (array like) shape=(height, width, channels)
        name (str) used in error messages
        max_value (float or None) upper bound on samples

    returns
        image (np.array) float64
    """
    image = np.asarray(data, dtype=np.float64)
    if image.ndim != 3 or image.shape[2] != channels:
        raise DataError('{} must have shape (H, W, {}), got {}'.format(
            name, channels, image.shape))
    if image.shape[0] < 1 or image.shape[1] < 1:
        raise DataError('{} has zero size {}'.format(name, image.shape))

    _check_finite(image, name)

    if max_value is not None:
        low, high = image.min(), image.max()
        if low < 0 or high > max_value:
            raise DataError('{} samples outside [0, {}]: min {} max {}'.format(
                name, max_value, low, high))

    return image


def as_mask(data, name='mask'):
    """ validates a ShadowMask, every sample in [0, 1] """
    return as_image(data, name=name, max_value=1.0)


def check_same_shape(*named_arrays):
    """ args are (name, array) pairs """
    (first_name, first), *rest = named_arrays
    for name, arr in rest:
        if arr.shape != first.shape:
            raise DataError('shape mismatch: {} {} vs {} {}'.format(
                first_name, first.shape, name, arr.shape))


def replicate_channels(field, channels=3):
    """ (H, W) -> (H, W, channels) """
    return np.repeat(np.asarray(field, dtype=np.float64)[..., None], channels, axis=2)


def luminance(image):
    """ Rec. 709 luma of a linear RGB image, shape (H, W) """
    return np.asarray(image, dtype=np.float64) @ LUMA_WEIGHTS


def srgb_to_linear(encoded):
    """
    IEC 61966-2-1 decode

    args
        encoded (np.array) sRGB samples in [0, 1]

    returns
        linear (np.array) same shape, in [0, 1]
    """
    encoded = np.asarray(encoded, dtype=np.float64)
    _check_finite(encoded, 'sRGB input')
    if encoded.size and (encoded.min() < 0 or encoded.max() > 1):
        raise DataError('sRGB input outside [0, 1]: min {} max {}'.format(
            encoded.min(), encoded.max()))

    return np.where(
        encoded <= 0.04045,
        encoded / 12.92,
        ((encoded + 0.055) / 1.055) ** 2.4
    )


def linear_to_srgb(linear):
    """ IEC 61966-2-1 encode, clamping to [0, 1] first """
    linear = np.asarray(linear, dtype=np.float64)
    _check_finite(linear, 'linear input')
    linear = np.clip(linear, 0.0, 1.0)

    return np.where(
        linear <= 0.0031308,
        linear * 12.92,
        1.055 * linear ** (1 / 2.4) - 0.055
    )
