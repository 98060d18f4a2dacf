""" register for input shadow mask sources """

import logging

from shadowpy.common.seeding import make_rng
from shadowpy.maskgen.perlin import sample_perlin_mask
from shadowpy.maskgen.silhouette import sample_silhouette_spec, silhouette_mask


logger = logging.getLogger(__name__)


def sample_silhouette_mask(seed, width, height, corpus=None, **kwargs):
    spec = sample_silhouette_spec(seed, corpus, width, height, **kwargs)
    return silhouette_mask(corpus, spec, width, height), spec


mask_register = {
    'silhouette': sample_silhouette_mask,
    'perlin': sample_perlin_mask,
}


def make_mask(source, seed, width, height, **kwargs):
    """ grabs the generator from the register and draws a mask and its spec """
    return mask_register[str(source)](seed, width, height, **kwargs)


def sample_mask_source(seed):
    """ half 'regular' silhouettes, half 'irregular' Perlin masks """
    rng = make_rng(seed, 'mask-source')
    return 'silhouette' if rng.random() < 0.5 else 'perlin'


def sample_input_mask(seed, width, height, corpus=None, perlin=None, silhouette=None):
    """
    Draws M_in from either source

    Without a silhouette corpus every mask comes from Perlin noise.

    args
        perlin (dict) kwargs for sample_perlin_mask
        silhouette (dict) kwargs for sample_silhouette_spec

    returns
        mask (np.array) ShadowMask
        source (str)
        spec (namedtuple)
    """
    source = sample_mask_source(seed)
    if source == 'silhouette' and not corpus:
        logger.debug('no silhouette corpus, falling back to perlin')
        source = 'perlin'

    if source == 'silhouette':
        kwargs = dict(silhouette or {}, corpus=corpus)
    else:
        kwargs = dict(perlin or {})

    mask, spec = make_mask(source, seed, width, height, **kwargs)
    return mask, source, spec
