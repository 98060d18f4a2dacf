"""
Classic 2D Perlin noise

Random unit gradients on an integer lattice, quintic fade between the four
surrounding corners.  Octave k runs at base_frequency * 2**k cycles per
image edge with amplitude initial_amplitude * persistence**k.
"""
from collections import namedtuple

import numpy as np

from shadowpy.common.errors import DataError
from shadowpy.common.seeding import derive_seed, make_rng
from shadowpy.imgcore.image import replicate_channels


class PerlinSpec(namedtuple(
        'PerlinSpec',
        ['seed', 'octaves', 'persistence', 'initial_amplitude', 'base_frequency'])):
    __slots__ = ()

    def __new__(cls, seed, octaves=4, persistence=0.5, initial_amplitude=1.0,
                base_frequency=4.0):
        octaves, persistence = int(octaves), float(persistence)
        if octaves < 1:
            raise DataError('octaves must be >= 1, got {}'.format(octaves))
        if not 0.0 <= persistence <= 1.0:
            raise DataError('persistence must lie in [0, 1], got {}'.format(persistence))
        if base_frequency <= 0:
            raise DataError('base_frequency must be positive, got {}'.format(base_frequency))
        return super().__new__(
            cls, int(seed), octaves, persistence, float(initial_amplitude),
            float(base_frequency))


def _fade(t):
    """Perlin fade function: 6t^5 - 15t^4 + 10t^3."""
    return t * t * t * (t * (t * 6 - 15) + 10)


def random_gradients(rng, rows, cols):
    """ unit gradient vectors, shape=(rows, cols, 2) """
    angles = rng.uniform(0.0, 2.0 * np.pi, size=(rows, cols))
    return np.stack([np.cos(angles), np.sin(angles)], axis=-1)


def gradient_noise(x, y, gradients):
    """
    Raw gradient noise at lattice coordinates (x, y)

    Exactly zero whenever x and y are both integers.

    args
        x, y (np.array) lattice-space coordinates, x < cols - 1, y < rows - 1
        gradients (np.array) shape=(rows, cols, 2)
    """
    x0 = np.floor(x).astype(int)
    y0 = np.floor(y).astype(int)
    fx, fy = x - x0, y - y0

    def corner(dx, dy):
        g = gradients[y0 + dy, x0 + dx]
        return g[..., 0] * (fx - dx) + g[..., 1] * (fy - dy)

    u, v = _fade(fx), _fade(fy)
    top = corner(0, 0) + u * (corner(1, 0) - corner(0, 0))
    bottom = corner(0, 1) + u * (corner(1, 1) - corner(0, 1))
    return top + v * (bottom - top)


def octave_amplitudes(spec):
    return [spec.initial_amplitude * spec.persistence ** k for k in range(spec.octaves)]


def perlin_octaves(spec, width, height):
    """
    Sum of octaves before normalization

    returns
        raw (np.array) shape=(height, width)
        amplitudes (list) amplitude used for each octave
    """
    if width < 1 or height < 1:
        raise DataError('noise field must be at least 1x1, got {}x{}'.format(width, height))

    edge = float(max(width, height))
    xs = np.arange(width, dtype=np.float64)
    ys = np.arange(height, dtype=np.float64)

    raw = np.zeros((height, width))
    amplitudes = octave_amplitudes(spec)
    for k, amplitude in enumerate(amplitudes):
        frequency = spec.base_frequency * 2 ** k
        #  one generator per octave so octave k never depends on the octave count
        rng = make_rng(spec.seed, 'octave', k)
        lx = xs * (frequency / edge)
        ly = ys * (frequency / edge)
        gradients = random_gradients(
            rng, int(np.floor(ly[-1])) + 2, int(np.floor(lx[-1])) + 2)
        lx, ly = np.meshgrid(lx, ly)
        raw += amplitude * gradient_noise(lx, ly, gradients)

    return raw, amplitudes


def normalize_field(raw):
    """ affine map of the field's own min / max onto [0, 1] """
    low, high = raw.min(), raw.max()
    if high == low:
        return np.zeros_like(raw)
    return np.clip((raw - low) / (high - low), 0.0, 1.0)


def perlin_field(spec, width, height):
    """ multi-octave Perlin mask, shape=(height, width, 3), values in [0, 1] """
    raw, _ = perlin_octaves(spec, width, height)
    return replicate_channels(normalize_field(raw))


def sample_perlin_spec(seed, persistence_range=(0.0, 0.85), octaves=4,
                       initial_amplitude=1.0, base_frequency=4.0):
    rng = make_rng(seed, 'perlin-spec')
    low, high = persistence_range
    return PerlinSpec(
        seed=derive_seed(seed, 'perlin-noise'),
        octaves=octaves,
        persistence=rng.uniform(low, high),
        initial_amplitude=initial_amplitude,
        base_frequency=base_frequency,
    )


def sample_perlin_mask(seed, width, height, **kwargs):
    """
    Irregular shadow mask, persistence ~ U[0, 0.85] at 4 octaves by default

    returns
        mask (np.array) ShadowMask
        spec (PerlinSpec) recorded in the manifest
    """
    spec = sample_perlin_spec(seed, **kwargs)
    return perlin_field(spec, width, height), spec
