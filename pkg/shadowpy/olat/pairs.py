""" harsh / soft facial shadow training pairs """
from collections import namedtuple

import numpy as np

from shadowpy.common.errors import DataError
from shadowpy.common.seeding import make_rng
from shadowpy.olat.weights import (
    FILL_RATIO, FILL_SIZE, LIGHT_SIZES, harsh_weights, relight, soft_weights)


FacialPair = namedtuple(
    'FacialPair',
    ['harsh', 'soft', 'm', 'p_fill', 'p_key', 'key', 'epsilon', 'seed'])


def make_pair(
        scan,
        rig,
        seed,
        p_key=(0.7, 1.3),
        epsilon_ratio=0.005,
        light_sizes=LIGHT_SIZES,
        fill_ratio=FILL_RATIO,
        fill_size=FILL_SIZE,
):
    """
    Samples a key light and renders the harsh input and soft target

    key ~ uniform over active lights, P_key ~ U[p_key], m ~ uniform over
    light_sizes, P_fill ~ U[0, fill_ratio * P_key], epsilon = epsilon_ratio * P_key

    returns
        pair (FacialPair) m and p_fill are the two knob values of the target
    """
    scan.check_rig(rig)
    light_sizes = tuple(int(m) for m in light_sizes)
    if not light_sizes:
        raise DataError('light_sizes must not be empty')
    if max(light_sizes) > rig.num_active:
        raise DataError('light size {} exceeds the {} active lights'.format(
            max(light_sizes), rig.num_active))

    rng = make_rng(seed, 'facial-pair')
    key = int(rng.choice(rig.active_indices))
    key_power = float(rng.uniform(*p_key))
    m = int(rng.choice(light_sizes))
    p_fill = float(rng.uniform(0.0, fill_ratio * key_power))
    epsilon = epsilon_ratio * key_power

    harsh = relight(scan, harsh_weights(rig, key, key_power, epsilon))
    soft = relight(scan, soft_weights(
        rig, key, key_power, m, p_fill, epsilon,
        light_sizes=light_sizes, fill_size=fill_size, fill_ratio=fill_ratio))

    return FacialPair(harsh, soft, m, p_fill, key_power, key, epsilon, int(seed))


def knob_image(m, p_fill, height, width):
    """ 2-channel image, fill intensity in channel 0 and light size m in channel 1 """
    knobs = np.empty((height, width, 2))
    knobs[..., 0] = p_fill
    knobs[..., 1] = m
    return knobs
