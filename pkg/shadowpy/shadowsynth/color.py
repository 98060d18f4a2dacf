""" colour jitter turning the lit image into the shadowed image """
from collections import namedtuple

import numpy as np

from shadowpy.common.errors import DataError
from shadowpy.common.seeding import make_rng
from shadowpy.imgcore.image import LUMA_WEIGHTS, as_image


class ColorJitter(namedtuple('ColorJitter', ['ccm', 'gains'])):
    """
    3x3 colour correction matrix applied to linear RGB column vectors

    gains is the diagonal the matrix was built from, kept for provenance
    """
    __slots__ = ()

    def __new__(cls, ccm, gains=None):
        ccm = np.asarray(ccm, dtype=np.float64)
        if ccm.shape != (3, 3):
            raise DataError('ccm must be 3x3, got {}'.format(ccm.shape))
        if not np.all(np.isfinite(ccm)):
            raise DataError('ccm entries must be finite')
        gains = np.diag(ccm).copy() if gains is None else np.asarray(gains, dtype=np.float64)
        return super().__new__(cls, ccm, gains)

    @classmethod
    def identity(cls, gain=1.0):
        return cls(gain * np.eye(3))

    def to_dict(self):
        return {'ccm': self.ccm.tolist(), 'gains': self.gains.tolist()}


def sample_ccm(seed, luminance_gain=(0.25, 0.75), blue_tint=(0.0, 0.3), perturbation=0.05):
    """
    Random shadow colour jitter, ccm = D (I + E)

    D is a diagonal gain whose luminance is drawn from luminance_gain, tinted
    so blue gain >= green gain >= red gain.  E has entries ~ U[-p, p].

    Shadows are darker and often bluer than the lit region (sky fill).
    """
    rng = make_rng(seed, 'ccm')
    gain = rng.uniform(*luminance_gain)
    tint = rng.uniform(*blue_tint)
    perturb = rng.uniform(-perturbation, perturbation, size=(3, 3))

    raw = np.array([1.0, 1.0 + tint / 2.0, 1.0 + tint])
    diagonal = gain * raw / (LUMA_WEIGHTS @ raw)

    return ColorJitter(np.diag(diagonal) @ (np.eye(3) + perturb), gains=diagonal)


def apply_ccm(lit, jitter):
    """ per-pixel matrix multiply then clamp to [0, 1] """
    lit = as_image(lit, name='lit image')
    return np.clip(lit @ jitter.ccm.T, 0.0, 1.0)
