"""
Light Stage rig geometry

Light directions are unit vectors pointing from each light toward the
subject center.  The camera axis n points out of the stage, toward the
camera.
"""
import numpy as np

from shadowpy.common.errors import DataError
from shadowpy.common.utils import dump_json, load_json


UNIT_TOLERANCE = 1e-9


class LightRig:
    """
    args
        directions (array like) shape=(num_lights, 3), unit vectors
        active (array like) shape=(num_lights,), bool
        camera_axis (array like) shape=(3,), unit vector n
    """
    def __init__(self, directions, active=None, camera_axis=(0.0, 0.0, 1.0)):
        directions = np.asarray(directions, dtype=np.float64)
        if directions.ndim != 2 or directions.shape[1] != 3 or len(directions) < 1:
            raise DataError('light directions must have shape (N, 3), got {}'.format(
                directions.shape))

        norms = np.linalg.norm(directions, axis=1)
        bad = np.flatnonzero(np.abs(norms - 1.0) > UNIT_TOLERANCE)
        if bad.size:
            raise DataError('light {} direction has norm {}, expected 1'.format(
                int(bad[0]), norms[bad[0]]))

        camera_axis = np.asarray(camera_axis, dtype=np.float64)
        if camera_axis.shape != (3,) or abs(np.linalg.norm(camera_axis) - 1.0) > UNIT_TOLERANCE:
            raise DataError('camera axis must be a unit 3-vector, got {}'.format(camera_axis))

        active = np.ones(len(directions), dtype=bool) if active is None \
            else np.asarray(active, dtype=bool)
        if active.shape != (len(directions),):
            raise DataError('active mask has shape {}, expected ({},)'.format(
                active.shape, len(directions)))
        if not active.any():
            raise DataError('rig has no active lights')

        self.directions = directions
        self.active = active
        self.camera_axis = camera_axis

        self.active_indices = np.flatnonzero(active)
        #  rig index -> position among active lights, -1 when inactive
        self._position = np.full(len(directions), -1)
        self._position[self.active_indices] = np.arange(len(self.active_indices))

    def __repr__(self):
        return '<shadowpy LightRig {} lights, {} active>'.format(
            self.num_lights, self.num_active)

    @property
    def num_lights(self):
        return len(self.directions)

    @property
    def num_active(self):
        return len(self.active_indices)

    def check_active(self, index):
        if not 0 <= index < self.num_lights:
            raise DataError('light {} outside rig of {}'.format(index, self.num_lights))
        if not self.active[index]:
            raise DataError('light {} is inactive'.format(index))

    def positions(self, indices):
        """ rig indices -> positions in the active-light ordering """
        indices = np.asarray(indices)
        for i in np.atleast_1d(indices):
            self.check_active(int(i))
        return self._position[indices]

    def to_dict(self):
        return {
            'n': self.camera_axis.tolist(),
            'lights': [{'dir': d.tolist(), 'active': bool(a)}
                       for d, a in zip(self.directions, self.active)],
        }

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(
                directions=[light['dir'] for light in d['lights']],
                active=[light.get('active', True) for light in d['lights']],
                camera_axis=d['n'],
            )
        except (KeyError, TypeError) as err:
            raise DataError('malformed rig: {}'.format(err))


def load_rig(path):
    return LightRig.from_dict(load_json(path))


def save_rig(rig, path):
    dump_json(rig.to_dict(), path)


def make_geodesic_rig(num_lights=304, num_inactive=20, camera_axis=(0.0, 0.0, 1.0)):
    """
    Near-uniform spherical rig on a Fibonacci lattice

    The num_inactive lights furthest behind the subject are switched off,
    standing in for the dark and flaring lights removed from a real stage.
    """
    if not 0 <= num_inactive < num_lights:
        raise DataError('need 0 <= num_inactive < num_lights, got {} of {}'.format(
            num_inactive, num_lights))

    i = np.arange(num_lights) + 0.5
    z = 1.0 - 2.0 * i / num_lights
    radius = np.sqrt(1.0 - z ** 2)
    theta = np.pi * (1.0 + 5 ** 0.5) * i
    positions = np.stack([radius * np.cos(theta), radius * np.sin(theta), z], axis=1)
    positions /= np.linalg.norm(positions, axis=1, keepdims=True)

    camera_axis = np.asarray(camera_axis, dtype=np.float64)
    active = np.ones(num_lights, dtype=bool)
    #  stable sort so ties go to the lower index
    behind = np.argsort(positions @ camera_axis, kind='stable')[:num_inactive]
    active[behind] = False

    return LightRig(-positions, active=active, camera_axis=camera_axis)
