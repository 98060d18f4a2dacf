"""
OLAT scans and a synthetic scan renderer

Real Light Stage scans are not redistributable, so a Lambertian head
(sphere plus nose, brows and cheeks on a heightfield) with cast shadows
stands in for them at desk scale.
"""
import logging
from os.path import join

import numpy as np
from scipy import ndimage

from shadowpy.common.errors import DataError
from shadowpy.common.seeding import make_rng
from shadowpy.common.utils import dump_json, ensure_dir, load_json
from shadowpy.imgcore.image import as_image
from shadowpy.imgcore.io import load_image, save_pfm


logger = logging.getLogger(__name__)


class OlatScan:
    """
    One image per active light of a rig

    args
        images (array like) shape=(num_lights, H, W, 3), linear light
        light_indices (array like) rig index of each image
        subject (str) subject / pose id
    """
    def __init__(self, images, light_indices, subject='subject'):
        images = np.asarray(images, dtype=np.float64)
        if images.ndim != 4 or images.shape[3] != 3 or len(images) < 1:
            raise DataError('scan images must have shape (N, H, W, 3), got {}'.format(
                images.shape))
        light_indices = np.asarray(light_indices, dtype=np.int64)
        if light_indices.shape != (len(images),):
            raise DataError('{} light indices for {} images'.format(
                len(light_indices), len(images)))
        for image in images:
            as_image(image, name='scan {} image'.format(subject), max_value=None)

        self.images = images
        self.light_indices = light_indices
        self.subject = str(subject)

    def __repr__(self):
        return '<shadowpy OlatScan {} - {} lights {}x{}>'.format(
            self.subject, len(self), self.shape[1], self.shape[0])

    def __len__(self):
        return len(self.images)

    @property
    def shape(self):
        return self.images.shape[1:]

    def check_rig(self, rig):
        """ one image per active light, in active order """
        if not np.array_equal(self.light_indices, rig.active_indices):
            raise DataError(
                'scan {} holds lights {}... but the rig has {} active lights'.format(
                    self.subject, self.light_indices[:5].tolist(), rig.num_active))


def save_scan(scan, directory):
    ensure_dir(directory)
    lights = []
    for index, image in zip(scan.light_indices, scan.images):
        name = 'light_{:03d}.pfm'.format(int(index))
        save_pfm(image, join(directory, name))
        lights.append({'index': int(index), 'file': name})
    dump_json({'subject': scan.subject, 'lights': lights}, join(directory, 'index.json'))


def load_scan(directory):
    """ directory of PFM / PNG images plus an index.json naming them """
    try:
        index = load_json(join(directory, 'index.json'))
        lights = index['lights']
        images = [load_image(join(directory, light['file'])) for light in lights]
        indices = [light['index'] for light in lights]
    except (KeyError, TypeError) as err:
        raise DataError('malformed scan index in {}: {}'.format(directory, err))
    return OlatScan(images, indices, subject=index.get('subject', directory))


def synthetic_head(size, subject=0):
    """
    Heightfield, normals, face mask and albedo of a synthetic head

    Image coordinates map to [-1, 1] with y pointing down.

    returns
        height (np.array) shape=(size, size)
        normals (np.array) shape=(size, size, 3)
        inside (np.array) bool, pixels on the head
        albedo (np.array) shape=(3,)
    """
    rng = make_rng(subject, 'synthetic-head')
    coords = (np.arange(size) + 0.5) / size * 2.0 - 1.0
    x, y = np.meshgrid(coords, coords)

    radius = 0.85
    inside = x ** 2 + (y / 1.15) ** 2 < radius ** 2
    sphere = np.sqrt(np.clip(radius ** 2 - x ** 2 - (y / 1.15) ** 2, 0.0, None))

    def bump(cx, cy, sx, sy, amplitude):
        return amplitude * np.exp(-((x - cx) ** 2 / (2 * sx ** 2) + (y - cy) ** 2 / (2 * sy ** 2)))

    nose = rng.uniform(0.2, 0.3)
    height = sphere + bump(0.0, 0.05, 0.07, 0.2, nose)
    for side in (-1.0, 1.0):
        height += bump(side * 0.32, -0.3, 0.18, 0.05, 0.08)   # brow
        height -= bump(side * 0.3, -0.18, 0.1, 0.06, 0.06)    # eye socket
        height += bump(side * 0.4, 0.2, 0.15, 0.12, 0.05)     # cheek
    height = np.where(inside, height, 0.0)

    #  normals in world axes: x right, y up, z toward the camera
    step = 2.0 / size
    dz_dy, dz_dx = np.gradient(height, step)
    normals = np.stack([-dz_dx, dz_dy, np.ones_like(height)], axis=-1)
    normals /= np.linalg.norm(normals, axis=-1, keepdims=True)

    albedo = np.array([0.78, 0.56, 0.45]) * rng.uniform(0.6, 1.0)
    return height, normals, inside, albedo


def _cast_shadow(height, inside, to_light, steps=24, reach=0.8, bias=0.01):
    """ True where the heightfield blocks the path toward the light """
    size = height.shape[0]
    rows, cols = np.nonzero(inside)
    #  image y points down, heightfield z points to the camera
    lx, ly, lz = to_light[0], -to_light[1], to_light[2]
    if lz <= 0:
        return np.zeros_like(inside)

    z0 = height[rows, cols]
    blocked = np.zeros(len(rows), dtype=bool)
    scale = size / 2.0
    for t in np.linspace(reach / steps, reach, steps):
        sample = ndimage.map_coordinates(
            height, [rows + t * ly * scale, cols + t * lx * scale],
            order=1, mode='constant', cval=0.0, prefilter=False)
        blocked |= sample > z0 + t * lz + bias

    shadow = np.zeros_like(inside)
    shadow[rows, cols] = blocked
    return shadow


def render_synthetic_scan(rig, size=64, subject=0):
    """
    Lambertian OLAT scan of a synthetic head, one image per active light

    args
        rig (LightRig)
        size (int) square image edge in pixels
        subject (int) seeds the head shape and albedo
    """
    height, normals, inside, albedo = synthetic_head(size, subject)
    images = []
    for index in rig.active_indices:
        to_light = -rig.directions[index]
        shading = np.clip(normals @ to_light, 0.0, None)
        shading = np.where(inside & ~_cast_shadow(height, inside, to_light), shading, 0.0)
        images.append(shading[..., None] * albedo)

    logger.debug('rendered synthetic scan {} at {}px'.format(subject, size))
    return OlatScan(np.stack(images), rig.active_indices, subject='synthetic-{}'.format(subject))


def render_synthetic_face(size=256, subject=0):
    """
    Shadow-free synthetic face under broad frontal light

    Only attached shading, no cast shadows, so it can serve as I_l.
    """
    _, normals, inside, albedo = synthetic_head(size, subject)
    soft = np.array([0.2, 0.3, 1.0])
    soft /= np.linalg.norm(soft)
    shading = 0.35 + 0.65 * np.clip(normals @ soft, 0.0, None)
    return np.where(inside[..., None], shading[..., None] * albedo, 0.0)
