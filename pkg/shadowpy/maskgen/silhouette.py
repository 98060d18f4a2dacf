"""
Tiled natural-object silhouettes

A silhouette is rotated about its center, scaled, placed at the top-left of
a period x period cell and the cell is repeated over the frame with a phase
offset.  Output is hard {0, 1} coverage; softening happens downstream.
"""
from collections import namedtuple
import glob
import logging
from os.path import basename, exists, join

import numpy as np
from scipy import ndimage

from shadowpy.common.errors import DataError
from shadowpy.common.seeding import make_rng
from shadowpy.common.utils import load_json
from shadowpy.imgcore.image import replicate_channels
from shadowpy.imgcore.io import load_gray_png


logger = logging.getLogger(__name__)


class SilhouetteSpec(namedtuple(
        'SilhouetteSpec',
        ['seed', 'silhouette_id', 'scale', 'period', 'rotation', 'offset_x', 'offset_y'])):
    """
    args
        silhouette_id (int) index into the corpus
        scale (float) > 0
        period (int) tile period in pixels, >= 1
        rotation (float) degrees, counter-clockwise
        offset_x, offset_y (int) phase of the tiling
    """
    __slots__ = ()

    def __new__(cls, seed, silhouette_id, scale=1.0, period=None, rotation=0.0,
                offset_x=0, offset_y=0):
        if not scale > 0:
            raise DataError('silhouette scale must be positive, got {}'.format(scale))
        if period is None or int(period) < 1:
            raise DataError('tile period must be >= 1, got {}'.format(period))
        return super().__new__(
            cls, int(seed), int(silhouette_id), float(scale), int(period),
            float(rotation), int(offset_x), int(offset_y))


def load_silhouette_corpus(directory):
    """
    Binary coverage maps from a directory of PNGs

    An optional index.json (list of file names) fixes the order, otherwise
    files are taken in sorted name order.

    returns
        corpus (list) of (H, W) arrays in {0, 1}
    """
    index = join(directory, 'index.json')
    if exists(index):
        files = [join(directory, name) for name in load_json(index)]
    else:
        files = sorted(glob.glob(join(directory, '*.png')))

    if not files:
        raise DataError('silhouette corpus {} is empty'.format(directory))

    corpus = [(load_gray_png(f) >= 0.5).astype(np.float64) for f in files]
    logger.debug('loaded {} silhouettes: {}'.format(
        len(corpus), [basename(f) for f in files[:5]]))
    return corpus


def make_synthetic_silhouettes(count=16, size=128, seed=0):
    """
    Procedural natural-object-like shapes (lobed blobs and leaves)

    Stands in for a silhouette corpus at desk scale.
    """
    corpus = []
    ys, xs = np.mgrid[0:size, 0:size]
    c = (size - 1) / 2.0
    for i in range(count):
        rng = make_rng(seed, 'silhouette', i)
        theta = np.arctan2(ys - c, xs - c)
        r = np.hypot(xs - c, ys - c) / (size / 2.0)

        if i % 2 == 0:
            #  lobed blob - foliage, clouds
            lobes = rng.integers(3, 9)
            radius = 0.6 + 0.25 * np.sin(lobes * theta + rng.uniform(0, 2 * np.pi))
            radius += 0.1 * np.sin((lobes + 3) * theta + rng.uniform(0, 2 * np.pi))
        else:
            #  leaf - pointed ellipse
            tilt = rng.uniform(0, np.pi)
            radius = 0.9 * np.abs(np.cos(theta - tilt)) ** 0.5 * rng.uniform(0.7, 1.0) + 0.15
        corpus.append((r <= radius).astype(np.float64))

    return corpus


def tile_cell(silhouette, spec):
    """ the period x period cell holding the rotated, scaled silhouette """
    h, w = silhouette.shape
    p = spec.period
    rows, cols = np.mgrid[0:p, 0:p].astype(np.float64)

    #  transformed silhouette occupies an (h*s, w*s) box at the cell origin
    s = spec.scale
    cy_t, cx_t = (h * s - 1) / 2.0, (w * s - 1) / 2.0
    cy_s, cx_s = (h - 1) / 2.0, (w - 1) / 2.0

    angle = np.deg2rad(spec.rotation)
    cos, sin = np.cos(angle), np.sin(angle)
    dy, dx = (rows - cy_t) / s, (cols - cx_t) / s
    src_x = cos * dx + sin * dy + cx_s
    src_y = -sin * dx + cos * dy + cy_s

    cell = ndimage.map_coordinates(
        silhouette, [src_y, src_x], order=0, mode='constant', cval=0.0,
        prefilter=False)
    return (cell >= 0.5).astype(np.float64)


def silhouette_mask(corpus, spec, width, height):
    """
    Hard coverage mask from a tiled silhouette, shape=(height, width, 3)

    args
        corpus (list) binary (H, W) silhouettes
        spec (SilhouetteSpec)
    """
    if not corpus:
        raise DataError('silhouette corpus is empty')
    if not 0 <= spec.silhouette_id < len(corpus):
        raise DataError('silhouette id {} outside corpus of {}'.format(
            spec.silhouette_id, len(corpus)))

    cell = tile_cell(np.asarray(corpus[spec.silhouette_id], dtype=np.float64), spec)
    rows = (np.arange(height) + spec.offset_y) % spec.period
    cols = (np.arange(width) + spec.offset_x) % spec.period
    return replicate_channels(cell[np.ix_(rows, cols)])


def sample_silhouette_spec(seed, corpus, width, height,
                           scale_range=(0.3, 1.0), spacing_range=(1.0, 2.0)):
    """
    Draws the silhouette, scale, tile period, rotation and phase

    scale_range is relative to the frame: a scale of 1 makes the silhouette's
    longest side span the shorter frame edge.  spacing_range multiplies the
    scaled silhouette size to give the tile period.
    """
    if not corpus:
        raise DataError('silhouette corpus is empty')
    rng = make_rng(seed, 'silhouette-spec')

    silhouette_id = int(rng.integers(len(corpus)))
    extent = max(np.asarray(corpus[silhouette_id]).shape)
    scale = rng.uniform(*scale_range) * min(width, height) / extent
    period = max(1, int(np.ceil(extent * scale * rng.uniform(*spacing_range))))

    return SilhouetteSpec(
        seed=seed,
        silhouette_id=silhouette_id,
        scale=scale,
        period=period,
        rotation=rng.uniform(0.0, 360.0),
        offset_x=int(rng.integers(period)),
        offset_y=int(rng.integers(period)),
    )
