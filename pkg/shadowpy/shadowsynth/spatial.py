"""
Spatially varying blur and intensity of the shadow mask

The local blur is approximated with a stack of globally blurred copies at
evenly spaced sigmas, linearly interpolated per pixel in sigma.
"""
from collections import namedtuple

import numpy as np

from shadowpy.common.errors import DataError
from shadowpy.common.np_utils import gaussian_blur
from shadowpy.common.seeding import derive_seed
from shadowpy.imgcore.image import as_mask
from shadowpy.maskgen.perlin import normalize_field, perlin_octaves, sample_perlin_spec


SpatialVariation = namedtuple(
    'SpatialVariation', ['sigma', 'intensity', 'sigma_spec', 'intensity_spec'])


def spatial_variation_fields(seed, width, height, sigma_range=(0.0, 8.0),
                             intensity_floor=0.4, persistence_range=(0.05, 0.25),
                             octaves=2, base_frequency=4.0):
    """
    Blur-sigma and intensity fields from two independent Perlin draws

    returns
        variation (SpatialVariation)
            sigma (np.array) shape=(height, width), in sigma_range
            intensity (np.array) shape=(height, width), in [intensity_floor, 1]
    """
    sigma_low, sigma_high = sigma_range
    if not 0 <= sigma_low <= sigma_high:
        raise DataError('sigma_range must satisfy 0 <= low <= high, got {}'.format(sigma_range))
    if not 0 <= intensity_floor <= 1:
        raise DataError('intensity_floor must lie in [0, 1], got {}'.format(intensity_floor))

    def field(stream):
        spec = sample_perlin_spec(
            derive_seed(seed, stream), persistence_range=persistence_range, octaves=octaves,
            base_frequency=base_frequency)
        raw, _ = perlin_octaves(spec, width, height)
        return normalize_field(raw), spec

    sigma, sigma_spec = field('sv-blur')
    intensity, intensity_spec = field('sv-intensity')

    return SpatialVariation(
        sigma=sigma_low + (sigma_high - sigma_low) * sigma,
        intensity=intensity_floor + (1.0 - intensity_floor) * intensity,
        sigma_spec=sigma_spec,
        intensity_spec=intensity_spec,
    )


def blur_stack(mask, max_sigma, step):
    """ copies of mask blurred at sigma = 0, step, 2 step, ... >= max_sigma """
    levels = int(np.ceil(max_sigma / step - 1e-12)) + 1
    return np.stack([gaussian_blur(mask, k * step) for k in range(levels)])


def apply_spatial_variation(mask_ss, variation, sigma_step=0.5):
    """
    Per-pixel blur with the local sigma, then per-pixel intensity scaling

    args
        mask_ss (np.array) ShadowMask
        variation (SpatialVariation)
        sigma_step (float) spacing of the blur stack in pixels

    returns
        mask (np.array) ShadowMask
    """
    mask_ss = as_mask(mask_ss, name='scattered mask')
    sigma = np.asarray(variation.sigma, dtype=np.float64)
    intensity = np.asarray(variation.intensity, dtype=np.float64)
    if sigma.shape != mask_ss.shape[:2] or intensity.shape != mask_ss.shape[:2]:
        raise DataError('variation fields {} / {} do not match mask {}'.format(
            sigma.shape, intensity.shape, mask_ss.shape))
    if np.any(sigma < 0):
        raise DataError('blur sigma field must be non-negative')

    stack = blur_stack(mask_ss, sigma.max(), sigma_step)

    position = sigma / sigma_step
    lower = np.minimum(np.floor(position).astype(int), len(stack) - 1)
    upper = np.minimum(lower + 1, len(stack) - 1)
    t = (position - lower)[..., None]

    rows, cols = np.indices(sigma.shape)
    blurred = (1.0 - t) * stack[lower, rows, cols] + t * stack[upper, rows, cols]

    return np.clip(blurred * intensity[..., None], 0.0, 1.0)
