"""
Foreign shadow synthesis

    M_in -> ss_blur -> spatial variation -> M
    I_l  -> colour jitter -> I_s
    I = I_l (1 - M) + I_s M

Each stage draws from its own seed stream, so switching a stage off for an
ablation leaves every other stage's draws unchanged.
"""
from collections import namedtuple
import logging

import numpy as np

from shadowpy.common.errors import DataError
from shadowpy.imgcore.image import as_image, as_mask, check_same_shape
from shadowpy.maskgen.register import sample_input_mask
from shadowpy.shadowsynth.color import ColorJitter, apply_ccm, sample_ccm
from shadowpy.shadowsynth.scatter import ScatterProfile, ss_blur
from shadowpy.shadowsynth.spatial import apply_spatial_variation, spatial_variation_fields


logger = logging.getLogger(__name__)

ABLATIONS = ('no_sv', 'no_ss', 'no_color')


def blend(lit, shadowed, mask):
    """ I = I_l (1 - M) + I_s M, per pixel and channel """
    check_same_shape(('lit', lit), ('shadowed', shadowed), ('mask', mask))
    return lit * (1.0 - mask) + shadowed * mask


class ForeignSample(namedtuple(
        'ForeignSample', ['composite', 'lit', 'mask', 'jitter', 'provenance'])):
    """
    One training triple plus everything needed to rebuild it

    args
        composite (np.array) I, the network input
        lit (np.array) I_l, the ground truth
        mask (np.array) M, the final shadow mask
        jitter (ColorJitter) turns I_l into I_s
        provenance (dict) seeds and stage specs, json serializable
    """
    __slots__ = ()

    @property
    def shadowed(self):
        return apply_ccm(self.lit, self.jitter)

    def reconstruct(self):
        return blend(self.lit, self.shadowed, self.mask)


def check_ablation(ablation):
    ablation = tuple(sorted(set(ablation or ())))
    unknown = [a for a in ablation if a not in ABLATIONS]
    if unknown:
        raise DataError('unknown ablation {}, expected a subset of {}'.format(
            unknown, ABLATIONS))
    return ablation


def synth_foreign(
        lit,
        seed,
        ablation=(),
        corpus=None,
        mask_in=None,

        mask_persistence=(0.0, 0.85),
        mask_octaves=4,
        base_frequency=4.0,
        silhouette_scale=(0.3, 1.0),
        silhouette_spacing=(1.0, 2.0),

        scatter_profile=None,

        sv_persistence=(0.05, 0.25),
        sv_octaves=2,
        sigma_range=(0.0, 8.0),
        intensity_floor=0.4,
        sigma_step=0.5,

        luminance_gain=(0.25, 0.75),
        blue_tint=(0.0, 0.3),
        ccm_perturbation=0.05,
        no_color_gain=0.5,
):
    """
    Renders a foreign shadow onto a shadow-free face

    args
        lit (np.array) I_l, linear-light face crop
        seed (int) per-sample seed
        ablation (iterable) subset of ('no_sv', 'no_ss', 'no_color')
        corpus (list) binary silhouettes, Perlin only when empty
        mask_in (np.array) optional fixed M_in instead of a sampled one

    returns
        sample (ForeignSample)
    """
    lit = as_image(lit, name='lit image', max_value=1.0)
    ablation = check_ablation(ablation)
    height, width = lit.shape[:2]

    provenance = {'seed': int(seed), 'ablation': list(ablation)}

    if mask_in is None:
        mask_in, source, spec = sample_input_mask(
            seed, width, height, corpus=corpus,
            perlin={'persistence_range': tuple(mask_persistence),
                    'octaves': mask_octaves,
                    'base_frequency': base_frequency},
            silhouette={'scale_range': tuple(silhouette_scale),
                        'spacing_range': tuple(silhouette_spacing)},
        )
        provenance['mask_source'] = source
        provenance['mask_spec'] = spec._asdict()
    else:
        mask_in = as_mask(mask_in, name='given mask')
        check_same_shape(('lit', lit), ('given mask', mask_in))
        provenance['mask_source'] = 'given'
        provenance['mask_spec'] = None

    mask = mask_in
    if 'no_ss' in ablation:
        provenance['scatter_profile'] = None
    else:
        if not isinstance(scatter_profile, ScatterProfile):
            scatter_profile = ScatterProfile.from_config(scatter_profile)
        mask = ss_blur(mask, scatter_profile)
        provenance['scatter_profile'] = scatter_profile.to_dict()

    if 'no_sv' in ablation:
        provenance['spatial_variation'] = None
    else:
        variation = spatial_variation_fields(
            seed, width, height, sigma_range=tuple(sigma_range),
            intensity_floor=intensity_floor, persistence_range=tuple(sv_persistence),
            octaves=sv_octaves, base_frequency=base_frequency)
        mask = apply_spatial_variation(mask, variation, sigma_step=sigma_step)
        provenance['spatial_variation'] = {
            'sigma_range': list(sigma_range),
            'intensity_floor': intensity_floor,
            'sigma_step': sigma_step,
            'sigma_spec': variation.sigma_spec._asdict(),
            'intensity_spec': variation.intensity_spec._asdict(),
        }

    if 'no_color' in ablation:
        #  neutral chroma but still darker, otherwise the shadow disappears
        jitter = ColorJitter.identity(no_color_gain)
    else:
        jitter = sample_ccm(
            seed, luminance_gain=tuple(luminance_gain), blue_tint=tuple(blue_tint),
            perturbation=ccm_perturbation)
    provenance['color_jitter'] = jitter.to_dict()

    #  stored as float32 PFM, so blend with exactly the values written
    mask = mask.astype(np.float32).astype(np.float64)

    composite = blend(lit, apply_ccm(lit, jitter), mask)
    logger.debug('seed {} source {} ablation {}'.format(
        seed, provenance['mask_source'], ablation))

    return ForeignSample(composite, lit, mask, jitter, provenance)
