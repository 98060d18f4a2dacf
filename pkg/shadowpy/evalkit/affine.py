from collections import namedtuple

import numpy as np

from shadowpy.common.errors import DataError
from shadowpy.imgcore.image import as_image, check_same_shape


class AffineOutput(namedtuple('AffineOutput', ['scale', 'offset'])):
    """ per-pixel, per-channel scale A and offset B of the model output """
    __slots__ = ()

    def __new__(cls, scale, offset):
        scale = np.asarray(scale, dtype=np.float64)
        offset = np.asarray(offset, dtype=np.float64)
        if scale.shape != offset.shape:
            raise DataError('scale {} and offset {} shapes differ'.format(
                scale.shape, offset.shape))
        if not (np.all(np.isfinite(scale)) and np.all(np.isfinite(offset))):
            raise DataError('affine output must be finite')
        return super().__new__(cls, scale, offset)

    @classmethod
    def identity(cls, shape):
        return cls(np.ones(shape), np.zeros(shape))


def apply_affine(image, out):
    """ I_out = I_in * A + B, elementwise """
    image = as_image(image, name='input image', max_value=None)
    check_same_shape(('input image', image), ('scale', out.scale))
    return image * out.scale + out.offset
