"""
Homography alignment of captured frames

A Homography maps source pixel coordinates to target pixel coordinates.
Correspondences are pairs [[x, y], [x', y']] with (x, y) in the source.
"""
from collections import namedtuple
from itertools import combinations
import logging

import numpy as np

from shadowpy.common.errors import DataError
from shadowpy.common.np_utils import bilinear_sample, pixel_grid
from shadowpy.imgcore.image import as_image, check_same_shape


logger = logging.getLogger(__name__)

#  relative tolerances for degeneracy checks on normalized coordinates
COLLINEAR_TOL = 1e-9
RANK_TOL = 1e-10
#  singular when |det| falls below this times |H|^3
SINGULAR_TOL = 1e-12
#  source coordinates this far past the border still count as inside
OVERLAP_TOL = 1e-6


class Homography(namedtuple('Homography', ['matrix', 'rms'])):
    """ 3x3 matrix normalized so matrix[2, 2] = 1, plus reprojection RMS """
    __slots__ = ()

    def __new__(cls, matrix, rms=0.0):
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.shape != (3, 3) or not np.all(np.isfinite(matrix)):
            raise DataError('homography must be a finite 3x3 matrix')
        if abs(matrix[2, 2]) < 1e-12:
            raise DataError('homography has a zero bottom-right entry')
        matrix = matrix / matrix[2, 2]
        if abs(np.linalg.det(matrix)) < SINGULAR_TOL * np.linalg.norm(matrix) ** 3:
            raise DataError('homography is singular')
        return super().__new__(cls, matrix, float(rms))

    @classmethod
    def identity(cls):
        return cls(np.eye(3))

    def apply(self, points):
        """ maps (N, 2) points through the homography """
        return _project(self.matrix, points)

    def inverse(self):
        return Homography(np.linalg.inv(self.matrix))


def _project(matrix, points):
    points = np.asarray(points, dtype=np.float64)
    homog = np.concatenate([points, np.ones((len(points), 1))], axis=1) @ matrix.T
    return homog[:, :2] / homog[:, 2:]


def as_correspondences(data):
    """ validates to shape (N, 2, 2) """
    pairs = np.asarray(data, dtype=np.float64)
    if pairs.ndim != 3 or pairs.shape[1:] != (2, 2):
        raise DataError('correspondences must be [[x, y], [x\', y\']] pairs, got shape {}'.format(
            pairs.shape))
    if not np.all(np.isfinite(pairs)):
        raise DataError('correspondences must be finite')
    return pairs


def normalizing_transform(points):
    """ similarity taking points to centroid 0, mean distance sqrt(2) """
    centroid = points.mean(axis=0)
    mean_dist = np.mean(np.linalg.norm(points - centroid, axis=1))
    if mean_dist <= 0:
        raise DataError('all correspondence points coincide')
    s = np.sqrt(2) / mean_dist
    return np.array([
        [s, 0, -s * centroid[0]],
        [0, s, -s * centroid[1]],
        [0, 0, 1],
    ])


def _check_collinear_triples(points, name):
    for i, j, k in combinations(range(len(points)), 3):
        a, b, c = points[i], points[j], points[k]
        area = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        if abs(area) <= COLLINEAR_TOL:
            raise DataError('{} points {}, {}, {} are collinear'.format(name, i, j, k))


def dlt_homography(correspondences):
    """
    Least-squares direct linear transform with coordinate pre-normalization

    args
        correspondences (array like) shape=(N, 2, 2), N >= 4

    returns
        homography (Homography) with rms the reprojection error in target pixels
    """
    pairs = as_correspondences(correspondences)
    if len(pairs) < 4:
        raise DataError('need at least 4 correspondences, got {}'.format(len(pairs)))

    src, dst = pairs[:, 0], pairs[:, 1]
    t_src, t_dst = normalizing_transform(src), normalizing_transform(dst)
    src_n, dst_n = _project(t_src, src), _project(t_dst, dst)

    if len(pairs) == 4:
        _check_collinear_triples(src_n, 'source')
        _check_collinear_triples(dst_n, 'target')

    x, y = src_n[:, 0], src_n[:, 1]
    u, v = dst_n[:, 0], dst_n[:, 1]
    zeros, ones = np.zeros(len(pairs)), np.ones(len(pairs))
    rows_u = np.stack([-x, -y, -ones, zeros, zeros, zeros, u * x, u * y, u], axis=1)
    rows_v = np.stack([zeros, zeros, zeros, -x, -y, -ones, v * x, v * y, v], axis=1)
    design = np.concatenate([rows_u, rows_v])

    _, singular, vt = np.linalg.svd(design)
    #  rank 8 leaves a one dimensional null space
    if singular[7] <= RANK_TOL * singular[0]:
        raise DataError('degenerate correspondences, solution is not unique')

    h_norm = vt[-1].reshape(3, 3)
    matrix = np.linalg.inv(t_dst) @ h_norm @ t_src
    if abs(matrix[2, 2]) < 1e-12:
        raise DataError('estimated homography sends the origin to infinity')

    matrix = matrix / matrix[2, 2]
    residual = _project(matrix, src) - dst
    rms = np.sqrt(np.mean(np.sum(residual ** 2, axis=1)))
    logger.debug('dlt homography from {} pairs, rms {:.3e}'.format(len(pairs), rms))
    return Homography(matrix, rms)


def source_coordinates(homography, height, width):
    """ H^-1 p for every target pixel p, as xs, ys of shape (height, width) """
    inverse = homography.inverse().matrix
    xs, ys = pixel_grid(height, width)
    source = _project(inverse, np.stack([xs.ravel(), ys.ravel()], axis=1))
    return source[:, 0].reshape(xs.shape), source[:, 1].reshape(xs.shape)


def warp_homography(image, homography):
    """
    Resamples the image into the target frame of the homography

    Each output pixel p takes the bilinear sample of the input at H^-1 p,
    clamped to the border.
    """
    image = as_image(image, max_value=None)
    if not isinstance(homography, Homography):
        homography = Homography(homography)

    xs, ys = source_coordinates(homography, *image.shape[:2])
    return bilinear_sample(image, xs, ys)


def warp_overlap(homography, height, width):
    """
    Boolean mask of target pixels whose source position lies inside the image

    Outside it warp_homography only repeats border pixels.
    """
    if not isinstance(homography, Homography):
        homography = Homography(homography)
    xs, ys = source_coordinates(homography, height, width)
    return ((xs >= -OVERLAP_TOL) & (xs <= width - 1 + OVERLAP_TOL)
            & (ys >= -OVERLAP_TOL) & (ys <= height - 1 + OVERLAP_TOL))


def overlap_error(aligned, lit, overlap):
    """ mean absolute pixel error over the overlap, inf when there is none """
    lit = as_image(lit, name='lit frame', max_value=None)
    check_same_shape(('aligned', aligned), ('lit frame', lit))
    if not overlap.any():
        return np.inf
    return float(np.mean(np.abs(aligned - lit)[overlap]))


def select_counterpart(shadow_image, candidates, correspondences):
    """
    Picks the lit frame that best matches a shadowed frame

    The shadowed frame is aligned to every candidate and the candidate with
    the smallest mean absolute pixel error wins; ties go to the lowest index.
    The error only counts pixels that map back inside the shadowed frame.

    args
        shadow_image (np.array) shape=(H, W, 3)
        candidates (list) of lit images, each shape=(H, W, 3)
        correspondences (list) per candidate, shadow -> candidate pairs

    returns
        index (int)
        errors (np.array) shape=(num_candidates,)
    """
    if len(candidates) == 0:
        raise DataError('no candidate frames to select from')
    if len(correspondences) != len(candidates):
        raise DataError('{} candidates but {} correspondence sets'.format(
            len(candidates), len(correspondences)))

    shadow_image = as_image(shadow_image, max_value=None)
    height, width = shadow_image.shape[:2]
    errors = np.empty(len(candidates))
    for k, (lit, pairs) in enumerate(zip(candidates, correspondences)):
        homography = dlt_homography(pairs)
        aligned = warp_homography(shadow_image, homography)
        errors[k] = overlap_error(aligned, lit, warp_overlap(homography, height, width))

    index = int(np.argmin(errors))
    logger.debug('counterpart {} of {}, error {:.4f}'.format(
        index, len(candidates), errors[index]))
    return index, errors
