"""Helper functions for numpy"""

import numpy as np
from scipy import ndimage


def pixel_grid(height, width):
    """
    Pixel-center coordinates, with pixel (row r, col c) centered at (x=c, y=r)

    returns
        xs, ys (np.array) shape=(height, width)
    """
    ys, xs = np.mgrid[0:height, 0:width]
    return xs.astype(np.float64), ys.astype(np.float64)


def bilinear_sample(image, xs, ys):
    """
    Samples an (H, W, C) image at fractional pixel coordinates

    Coordinates outside the image are clamped to the border pixels.

    args
        image (np.array) shape=(H, W, C)
        xs, ys (np.array) same shape, pixel-center coordinates

    returns
        samples (np.array) shape=(*xs.shape, C)
    """
    coords = np.stack([np.asarray(ys, dtype=np.float64),
                       np.asarray(xs, dtype=np.float64)])
    channels = [
        ndimage.map_coordinates(
            image[..., c], coords, order=1, mode='nearest', prefilter=False)
        for c in range(image.shape[-1])
    ]
    return np.stack(channels, axis=-1)


def gaussian_blur(image, sigma, truncate=4.0):
    """
    Separable Gaussian blur over the two spatial axes, edge-clamp boundary

    sigma = 0 returns a copy of the image.

    args
        image (np.array) shape=(H, W) or (H, W, C)
        sigma (float) in pixels
    """
    image = np.asarray(image, dtype=np.float64)
    if sigma == 0:
        return image.copy()

    sigmas = (sigma, sigma) + (0,) * (image.ndim - 2)
    return ndimage.gaussian_filter(
        image, sigma=sigmas, mode='nearest', truncate=truncate)
