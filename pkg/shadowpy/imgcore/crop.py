from collections import namedtuple

import numpy as np

from shadowpy.common.errors import DataError
from shadowpy.common.np_utils import bilinear_sample
from shadowpy.common.utils import load_json
from shadowpy.imgcore.image import as_image


#  network input resolution
FACE_SIZE = 256


class FaceCrop(namedtuple('FaceCrop', ['x', 'y', 'w', 'h'])):
    """
    Face bounding box in source pixels, covering columns x .. x+w-1
    and rows y .. y+h-1
    """
    __slots__ = ()

    def __new__(cls, x, y, w, h):
        x, y, w, h = int(x), int(y), int(w), int(h)
        if w < 1 or h < 1:
            raise DataError('crop must be at least 1x1, got w={} h={}'.format(w, h))
        return super().__new__(cls, x, y, w, h)

    @classmethod
    def from_dict(cls, d):
        return cls(d['x'], d['y'], d['w'], d['h'])

    @classmethod
    def full_frame(cls, image):
        return cls(0, 0, image.shape[1], image.shape[0])

    def check_inside(self, width, height):
        """ raises naming the first violated bound """
        bounds = [
            ('x >= 0', self.x >= 0),
            ('y >= 0', self.y >= 0),
            ('x + w <= image width {}'.format(width), self.x + self.w <= width),
            ('y + h <= image height {}'.format(height), self.y + self.h <= height),
        ]
        for bound, ok in bounds:
            if not ok:
                raise DataError('crop {} violates {}'.format(tuple(self), bound))


def load_crops(path):
    """ JSON {image name: {"x", "y", "w", "h"}} -> {name: FaceCrop} """
    return {name: FaceCrop.from_dict(box) for name, box in load_json(path).items()}


def resize_crop_face(image, crop, size=FACE_SIZE):
    """
    Bilinear resample of the crop box to size x size

    Corner pixels of the box land exactly on the corner pixels of the output,
    so a box already size x size is copied untouched.

    args
        image (np.array) ImageBuf
        crop (FaceCrop)

    returns
        face (np.array) shape=(size, size, 3)
    """
    image = as_image(image)
    crop.check_inside(image.shape[1], image.shape[0])

    def axis(start, length):
        if size == 1 or length == 1:
            return np.full(size, start + (length - 1) / 2.0)
        return start + np.arange(size) * ((length - 1) / (size - 1))

    xs, ys = np.meshgrid(axis(crop.x, crop.w), axis(crop.y, crop.h))
    return bilinear_sample(image, xs, ys)
