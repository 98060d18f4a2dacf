"""
Subsurface scattering approximation

Each mask channel is blurred by its own sum of Gaussians.  Red light
scatters furthest in skin so the red kernel is the widest.
"""
import numpy as np

from shadowpy.common.errors import DataError
from shadowpy.common.np_utils import gaussian_blur
from shadowpy.imgcore.image import as_mask


CHANNELS = ('red', 'green', 'blue')

#  sigmas in pixels at 256x256
DEFAULT_SIGMAS = {
    'red': (2.0, 6.0, 12.0),
    'green': (2.0, 4.0, 8.0),
    'blue': (2.0, 3.0, 6.0),
}


class ScatterProfile:
    """
    Per-channel Gaussian mixture

    args
        sigmas (dict) channel -> sequence of sigmas in pixels
        weights (dict) channel -> sequence of weights, normalized to sum to 1
            per channel, uniform when omitted
    """
    def __init__(self, sigmas=None, weights=None):
        sigmas = sigmas or DEFAULT_SIGMAS
        weights = weights or {}

        self.sigmas, self.weights = {}, {}
        for channel in CHANNELS:
            s = np.asarray(sigmas[channel], dtype=np.float64)
            w = np.asarray(weights.get(channel, np.ones_like(s)), dtype=np.float64)
            if s.ndim != 1 or len(s) < 1 or s.shape != w.shape:
                raise DataError('{} channel needs matching sigma and weight lists'.format(channel))
            if np.any(s <= 0):
                raise DataError('{} sigmas must be positive, got {}'.format(channel, s))
            if np.any(w < 0) or w.sum() <= 0:
                raise DataError('{} weights must be non-negative and not all zero'.format(channel))
            self.sigmas[channel] = s
            self.weights[channel] = w / w.sum()

        radii = [self.effective_radius(c) for c in CHANNELS]
        if not radii[0] >= radii[1] >= radii[2]:
            raise DataError(
                'effective radii must satisfy red >= green >= blue, got {}'.format(radii))

    def __repr__(self):
        return '<shadowpy ScatterProfile {}>'.format(self.to_dict())

    def effective_radius(self, channel):
        """ rms radius of the channel's mixture in one axis """
        return float(np.sqrt(np.sum(self.weights[channel] * self.sigmas[channel] ** 2)))

    def to_dict(self):
        return {
            c: {'sigmas': self.sigmas[c].tolist(), 'weights': self.weights[c].tolist()}
            for c in CHANNELS
        }

    @classmethod
    def from_config(cls, cfg):
        """ {'red': {'sigmas': [...], 'weights': [...]}, ...} """
        if cfg is None:
            return cls()
        try:
            return cls(
                sigmas={c: cfg[c]['sigmas'] for c in CHANNELS},
                weights={c: cfg[c]['weights'] for c in CHANNELS if 'weights' in cfg[c]},
            )
        except (KeyError, TypeError) as err:
            raise DataError('malformed scatter profile: {}'.format(err))


def ss_blur(mask_in, profile=None):
    """
    M_c = sum_k (M_in * G(sigma_ck)) w_ck, per channel, edge clamped

    args
        mask_in (np.array) ShadowMask
        profile (ScatterProfile)

    returns
        mask_ss (np.array) ShadowMask
    """
    mask_in = as_mask(mask_in, name='input mask')
    profile = profile or ScatterProfile()

    out = np.empty_like(mask_in)
    for c, channel in enumerate(CHANNELS):
        acc = np.zeros(mask_in.shape[:2])
        for sigma, weight in zip(profile.sigmas[channel], profile.weights[channel]):
            acc += weight * gaussian_blur(mask_in[..., c], sigma)
        out[..., c] = acc

    return np.clip(out, 0.0, 1.0)
