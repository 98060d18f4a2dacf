"""
OLAT weight vectors and relighting

Weight vectors are indexed by position among the rig's active lights, the
same order as the images of an OlatScan.
"""
import numpy as np

from shadowpy.common.errors import DataError


LIGHT_SIZES = (5, 10, 20, 30, 40)
FILL_SIZE = 20
FILL_RATIO = 0.1


def relight(scan, weights):
    """
    I = sum_i I_i w_i in linear light, no clamping

    Accumulated in fixed light order so the result never depends on how
    work is scheduled.

    args
        scan (OlatScan)
        weights (np.array) shape=(num_images,)
    """
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != (len(scan),):
        raise DataError('weight vector has shape {}, scan has {} lights'.format(
            weights.shape, len(scan)))
    if not np.all(np.isfinite(weights)) or np.any(weights < 0):
        raise DataError('weights must be finite and non-negative')

    out = np.zeros(scan.shape)
    for image, w in zip(scan.images, weights):
        if w:
            out += w * image
    return out


def neighbors(rig, center, m):
    """
    The m active lights angularly nearest to center

    Ranked by dot product with center, ties to the lower index.

    returns
        indices (np.array) rig indices, nearest first
    """
    m = int(m)
    if not 1 <= m <= rig.num_active:
        raise DataError('m must lie in [1, {}], got {}'.format(rig.num_active, m))

    center = np.asarray(center, dtype=np.float64)
    candidates = rig.active_indices
    scores = rig.directions[candidates] @ center
    order = np.lexsort((candidates, -scores))
    return candidates[order[:m]]


def fill_direction(key, n, tol=1e-6):
    """ l_fill = 2 (l_key . n) n - l_key, the reflection of the key about n """
    key = np.asarray(key, dtype=np.float64)
    n = np.asarray(n, dtype=np.float64)
    for name, v in (('key direction', key), ('camera axis', n)):
        if v.shape != (3,) or abs(np.linalg.norm(v) - 1.0) > tol:
            raise DataError('{} must be a unit 3-vector, got {}'.format(name, v))
    return 2.0 * (key @ n) * n - key


def harsh_weights(rig, key, p_key, epsilon):
    """ P_key on the key light, epsilon ambient on every other active light """
    rig.check_active(key)
    if not p_key > epsilon > 0:
        raise DataError('need P_key > epsilon > 0, got P_key={} epsilon={}'.format(
            p_key, epsilon))

    weights = np.full(rig.num_active, float(epsilon))
    weights[rig.positions(key)] = p_key
    return weights


def soft_weights(rig, key, p_key, m, p_fill, epsilon,
                 light_sizes=LIGHT_SIZES, fill_size=FILL_SIZE, fill_ratio=FILL_RATIO):
    """
    Key energy splatted over its m neighbours plus an opposing fill light

        P_key / m              on the m lights nearest the key
        max(P_fill, epsilon)   on the fill_size lights nearest the reflected key
        epsilon                elsewhere

    The key branch wins where the two neighbourhoods overlap.  Fill lights
    never drop below the epsilon ambient, so P_fill = 0 leaves the pure
    key splat.
    """
    rig.check_active(key)
    if int(m) not in light_sizes:
        raise DataError('light size m={} not in {}'.format(m, tuple(light_sizes)))
    if not 0 <= p_fill <= fill_ratio * p_key:
        raise DataError('P_fill={} outside [0, {} * P_key = {}]'.format(
            p_fill, fill_ratio, fill_ratio * p_key))
    if not p_key > epsilon > 0:
        raise DataError('need P_key > epsilon > 0, got P_key={} epsilon={}'.format(
            p_key, epsilon))

    key_direction = rig.directions[key]
    key_set = neighbors(rig, key_direction, m)
    fill_set = neighbors(
        rig, fill_direction(key_direction, rig.camera_axis), min(fill_size, rig.num_active))

    weights = np.full(rig.num_active, float(epsilon))
    weights[rig.positions(fill_set)] = max(float(p_fill), float(epsilon))
    weights[rig.positions(key_set)] = p_key / int(m)
    return weights
