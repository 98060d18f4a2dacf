"""
Facial landmark sets

Landmarks are ingested, never detected.  The JSON document is
{"version": 1, "points": [[u, v] x 468], "mirror": [j_bar x 468]} with points
in pixel coordinates of the 256x256 face crop.
"""
import numpy as np
from scipy.spatial import cKDTree

from shadowpy.common.errors import DataError
from shadowpy.common.seeding import make_rng
from shadowpy.common.utils import dump_json, load_json


NUM_FACE_LANDMARKS = 468
LANDMARK_FORMAT_VERSION = 1


class LandmarkSet:
    """
    2D facial vertices plus the bilateral mirror-index table

    args
        points (array like) shape=(num_vertices, 2), (u, v) pixel coordinates
        mirror (array like) shape=(num_vertices,), j -> j_bar
    """
    def __init__(self, points, mirror):
        points = np.asarray(points, dtype=np.float64)
        mirror = np.asarray(mirror)

        if points.ndim != 2 or points.shape[1] != 2 or len(points) < 1:
            raise DataError('landmark points must have shape (N, 2), got {}'.format(
                points.shape))
        if not np.all(np.isfinite(points)):
            raise DataError('landmark points must be finite')
        if mirror.shape != (len(points),):
            raise DataError('mirror table has length {}, expected {}'.format(
                mirror.shape, len(points)))
        if not np.issubdtype(mirror.dtype, np.integer):
            raise DataError('mirror table must hold integer indices')

        self.points = points
        self.mirror = mirror.astype(np.int64)
        self.check_involution()

    def __repr__(self):
        return '<shadowpy LandmarkSet {} vertices>'.format(len(self))

    def __len__(self):
        return len(self.points)

    def check_involution(self):
        """ mirror[mirror[j]] == j for every j """
        n = len(self)
        if self.mirror.min() < 0 or self.mirror.max() >= n:
            raise DataError('mirror table indices must lie in [0, {})'.format(n))

        broken = np.flatnonzero(self.mirror[self.mirror] != np.arange(n))
        if broken.size:
            j = int(broken[0])
            raise DataError(
                'mirror table is not an involution: mirror[{}]={} but mirror[{}]={}'.format(
                    j, int(self.mirror[j]), int(self.mirror[j]),
                    int(self.mirror[self.mirror[j]])))

    def check_inside(self, width, height):
        u, v = self.points[:, 0], self.points[:, 1]
        outside = np.flatnonzero((u < 0) | (v < 0) | (u > width - 1) | (v > height - 1))
        if outside.size:
            j = int(outside[0])
            raise DataError('landmark {} at {} lies outside the {}x{} image'.format(
                j, tuple(self.points[j]), width, height))

    @property
    def mirrored_points(self):
        """ (u_jbar, v_jbar) for every j """
        return self.points[self.mirror]

    def to_dict(self):
        return {
            'version': LANDMARK_FORMAT_VERSION,
            'points': self.points.tolist(),
            'mirror': self.mirror.tolist(),
        }

    @classmethod
    def from_dict(cls, d, num_vertices=NUM_FACE_LANDMARKS):
        if d.get('version') != LANDMARK_FORMAT_VERSION:
            raise DataError('unsupported landmark format version {}'.format(
                d.get('version')))
        landmarks = cls(d['points'], d['mirror'])
        if num_vertices and len(landmarks) != num_vertices:
            raise DataError('expected {} landmarks, got {}'.format(
                num_vertices, len(landmarks)))
        return landmarks


def load_landmarks(path, num_vertices=NUM_FACE_LANDMARKS):
    try:
        return LandmarkSet.from_dict(load_json(path), num_vertices=num_vertices)
    except (KeyError, TypeError) as err:
        raise DataError('malformed landmark file {}: {}'.format(path, err))


def save_landmarks(landmarks, path):
    dump_json(landmarks.to_dict(), path)


def mirror_table_from_points(points, axis_x, tol=1e-6):
    """
    Mirror table for a mesh that is bilaterally symmetric about x = axis_x

    Each vertex is paired with the vertex nearest to its reflection;
    vertices on the axis pair with themselves.

    args
        points (np.array) shape=(N, 2)
        axis_x (float)
        tol (float) max distance between a reflection and its partner
    """
    points = np.asarray(points, dtype=np.float64)
    reflected = points.copy()
    reflected[:, 0] = 2 * axis_x - reflected[:, 0]

    distances, mirror = cKDTree(points).query(reflected)
    if distances.max() > tol:
        j = int(np.argmax(distances))
        raise DataError('vertex {} has no mirror partner within {}'.format(j, tol))

    return mirror.astype(np.int64)


def make_synthetic_landmarks(size=256, num_vertices=NUM_FACE_LANDMARKS,
                             num_midline=18, seed=0):
    """
    A face-like symmetric landmark layout with its mirror table

    Vertices fill an ellipse covering the synthetic face renders, denser
    around the eyes, nose and mouth.  Used for desk-scale runs where no
    detector output is available.

    returns
        landmarks (LandmarkSet)
    """
    if (num_vertices - num_midline) % 2:
        raise ValueError('num_vertices - num_midline must be even')

    rng = make_rng(seed, 'synthetic-landmarks')
    cx, cy = (size - 1) / 2.0, (size - 1) / 2.0
    rx, ry = 0.36 * size, 0.44 * size

    midline_v = cy + ry * np.linspace(-0.9, 0.9, num_midline)
    midline = np.stack([np.full(num_midline, cx), midline_v], axis=1)

    #  features on the left half, as (center offset, spread) in face units
    features = np.array([
        [-0.40, -0.25, 0.12],   # eye
        [-0.45, -0.45, 0.15],   # brow
        [-0.15, 0.15, 0.10],    # nose wing
        [-0.25, 0.50, 0.12],    # mouth corner
        [-0.60, 0.10, 0.35],    # cheek
    ])
    num_pairs = (num_vertices - num_midline) // 2
    left = []
    while len(left) < num_pairs:
        feature = features[rng.integers(len(features))]
        du, dv = feature[:2] + feature[2] * rng.standard_normal(2)
        #  keep inside the face ellipse and clear of the midline
        if du < -0.03 and du ** 2 + dv ** 2 < 0.95:
            candidate = np.array([cx + rx * du, cy + ry * dv])
            if all(np.hypot(*(candidate - p)) > 0.5 for p in left):
                left.append(candidate)

    left = np.array(left)
    right = left.copy()
    right[:, 0] = 2 * cx - right[:, 0]

    points = np.concatenate([midline, left, right])
    mirror = np.concatenate([
        np.arange(num_midline),
        num_midline + num_pairs + np.arange(num_pairs),
        num_midline + np.arange(num_pairs),
    ])
    return LandmarkSet(points, mirror)
