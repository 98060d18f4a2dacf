"""
Adaptive RBF facial mirror warp

Every pixel is written as a convex combination of the landmark positions,
with normalized Gaussian weights whose bandwidth sigma_j adapts to how
crowded vertex j is.  The same combination of the *mirrored* landmarks
gives the location to sample, so each face region is replaced by its
bilateral counterpart.

Pixel (row r, col c) has its center at (x=c, y=r), the same coordinates
the landmarks use.
"""
from collections import namedtuple
import logging

import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import softmax

from shadowpy.common.errors import DataError
from shadowpy.common.np_utils import bilinear_sample, pixel_grid
from shadowpy.imgcore.image import as_image, check_same_shape
from shadowpy.olat.pairs import knob_image


logger = logging.getLogger(__name__)

K_SIGMA = 4

WarpField = namedtuple('WarpField', ['x', 'y', 'sigmas', 'row_sum_error'])


def vertex_sigmas(landmarks, k_sigma=K_SIGMA):
    """
    sigma_j = k-th smallest squared distance from vertex j to the others

    The zero self-distance is not counted.

    returns
        sigmas (np.array) shape=(num_vertices,)
    """
    points = landmarks.points
    if len(points) < k_sigma + 1:
        raise DataError('need at least {} landmarks for K_sigma={}, got {}'.format(
            k_sigma + 1, k_sigma, len(points)))

    distances = cdist(points, points, 'sqeuclidean')
    np.fill_diagonal(distances, np.inf)
    sigmas = np.partition(distances, k_sigma - 1, axis=1)[:, k_sigma - 1]

    zero = np.flatnonzero(sigmas <= 0)
    if zero.size:
        j = int(zero[0])
        partner = int(np.flatnonzero(distances[j] == 0)[0])
        raise DataError('vertices {} and {} coincide at {}'.format(
            j, partner, tuple(points[j])))

    return sigmas


def weight_matrix(pixels, points, sigmas):
    """
    W_ij = exp(-D_ij / sigma_j) / sum_j' exp(-D_ij' / sigma_j')

    Normalized in the log domain (max subtracted), so rows far from every
    landmark do not underflow.

    args
        pixels (np.array) shape=(num_pixels, 2), (x, y)
        points (np.array) shape=(num_vertices, 2), (u, v)
        sigmas (np.array) shape=(num_vertices,)

    returns
        weights (np.array) shape=(num_pixels, num_vertices), rows sum to 1
    """
    sigmas = np.asarray(sigmas, dtype=np.float64)
    if np.any(sigmas <= 0):
        raise DataError('every sigma must be positive')
    distances = cdist(np.asarray(pixels, dtype=np.float64), points, 'sqeuclidean')
    return softmax(-distances / sigmas, axis=1)


def mirror_targets(landmarks, height, width, k_sigma=K_SIGMA, sigmas=None, chunk=8192):
    """
    Mirrored sample location of every pixel

    Weights are streamed in chunks of pixels and never held for the whole
    image.  sigmas overrides the per-vertex bandwidths from vertex_sigmas.

    returns
        field (WarpField) x, y of shape (height, width)
    """
    landmarks.check_involution()
    if sigmas is None:
        sigmas = vertex_sigmas(landmarks, k_sigma)
    mirrored = landmarks.mirrored_points

    xs, ys = pixel_grid(height, width)
    pixels = np.stack([xs.ravel(), ys.ravel()], axis=1)
    targets = np.empty_like(pixels)
    row_sum_error = 0.0

    for start in range(0, len(pixels), chunk):
        weights = weight_matrix(pixels[start:start + chunk], landmarks.points, sigmas)
        targets[start:start + chunk] = weights @ mirrored
        row_sum_error = max(row_sum_error, float(np.abs(weights.sum(axis=1) - 1.0).max()))

    logger.debug('mirror targets {}x{}, max row sum error {}'.format(
        width, height, row_sum_error))
    return WarpField(
        x=targets[:, 0].reshape(height, width),
        y=targets[:, 1].reshape(height, width),
        sigmas=sigmas,
        row_sum_error=row_sum_error,
    )


def dense_weights(landmarks, height, width, k_sigma=K_SIGMA):
    """ the full (height * width, num_vertices) weight matrix, for small images """
    xs, ys = pixel_grid(height, width)
    pixels = np.stack([xs.ravel(), ys.ravel()], axis=1)
    return weight_matrix(pixels, landmarks.points, vertex_sigmas(landmarks, k_sigma))


def mirror_warp(image, landmarks, k_sigma=K_SIGMA, sigmas=None):
    """
    I_bar, the input bilinearly sampled at each pixel's mirrored location

    Locations outside the image clamp to the border.
    """
    image = as_image(image, max_value=None)
    field = mirror_targets(
        landmarks, image.shape[0], image.shape[1], k_sigma, sigmas=sigmas)
    return bilinear_sample(image, field.x, field.y)


def concat_mirrored(image, mirrored):
    """ 6-channel input, I in channels 0-2 and I_bar in 3-5 """
    check_same_shape(('image', image), ('mirrored', mirrored))
    return np.concatenate([image, mirrored], axis=-1)


def mirror_difference(image, mirrored):
    """ |I - I_bar|, bright where the lighting is asymmetric """
    check_same_shape(('image', image), ('mirrored', mirrored))
    return np.abs(image - mirrored)


def facial_input(image, mirrored, m, p_fill):
    """ concat(I, I_bar, P_fill, m) along channels, 8 channels """
    stacked = concat_mirrored(image, mirrored)
    knobs = knob_image(m, p_fill, *image.shape[:2])
    return np.concatenate([stacked, knobs], axis=-1)
