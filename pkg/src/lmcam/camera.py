"""Pinhole camera model: rigid transforms, perspective projection, and the
global-similarity scale invariance that the rest of the toolkit builds on.

Conventions (fixed here, honored everywhere else):
  - world-to-camera: x_c = R @ x + t
  - camera looks down +z; x right, y down (image v grows downward)
  - pixel (u, v) = (f_x * x_c / z_c + c_x, f_y * y_c / z_c + c_y)
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import BehindCamera, DivideByZero, InvalidScale

EPS_DEPTH = 1e-9
ORTHO_TOL = 1e-9


def _frozen(a):
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


class Rotation:
    """3x3 proper rotation matrix with a validating constructor.

    The matrix must be orthonormal (R^T R = I within 1e-9 elementwise) with
    det(R) = +1 within 1e-9. A unit-quaternion view is provided for
    interpolation.
    """

    __slots__ = ("_m",)

    def __init__(self, matrix):
        m = np.asarray(matrix, dtype=float)
        if m.shape != (3, 3):
            raise ValueError(f"rotation matrix must be 3x3, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("rotation matrix must be finite")
        if np.max(np.abs(m.T @ m - np.eye(3))) > ORTHO_TOL:
            raise ValueError("rotation matrix is not orthonormal within 1e-9")
        if abs(np.linalg.det(m) - 1.0) > ORTHO_TOL:
            raise ValueError("rotation matrix determinant is not +1 within 1e-9")
        self._m = _frozen(m)

    @property
    def matrix(self):
        return self._m

    @classmethod
    def identity(cls):
        return cls(np.eye(3))

    @classmethod
    def from_axis_angle(cls, axis, angle_rad):
        """Rodrigues rotation about a (not necessarily unit) axis."""
        axis = np.asarray(axis, dtype=float)
        n = np.linalg.norm(axis)
        if n == 0.0:
            raise ValueError("rotation axis must be nonzero")
        k = axis / n
        kx = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
        m = np.eye(3) + np.sin(angle_rad) * kx + (1.0 - np.cos(angle_rad)) * (kx @ kx)
        return cls(_reorthonormalize(m))

    @classmethod
    def from_quat(cls, q):
        return cls(matrix_from_quat(q))

    def as_quat(self):
        """Unit quaternion (w, x, y, z) with w >= 0."""
        return quat_from_matrix(self._m)

    def apply(self, points):
        """Rotate one point (3,) or a batch (n, 3)."""
        points = np.asarray(points, dtype=float)
        return points @ self._m.T

    def compose(self, other):
        """self applied after other: (self.compose(other)).apply == self(other(x))."""
        return Rotation(_reorthonormalize(self._m @ other._m))

    def inverse(self):
        return Rotation(self._m.T)

    def angle_to(self, other):
        """Geodesic distance in radians."""
        c = (np.trace(self._m.T @ other._m) - 1.0) / 2.0
        return float(np.arccos(np.clip(c, -1.0, 1.0)))

    def __repr__(self):
        return f"Rotation({self._m.tolist()})"


def _reorthonormalize(m):
    u, _, vt = np.linalg.svd(m)
    r = u @ vt
    if np.linalg.det(r) < 0:
        r = u @ np.diag([1.0, 1.0, -1.0]) @ vt
    return r


@dataclass(frozen=True)
class Pose:
    """Rigid world-to-camera transform [R|t] in scale-free scene units."""

    rotation: Rotation
    translation: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.translation, dtype=float)
        if t.shape != (3,):
            raise ValueError(f"translation must be a 3-vector, got {t.shape}")
        if not np.all(np.isfinite(t)):
            raise ValueError("translation must be finite")
        object.__setattr__(self, "translation", _frozen(t))

    @classmethod
    def identity(cls):
        return cls(Rotation.identity(), np.zeros(3))

    @property
    def center(self):
        """Camera center in world coordinates: -R^T t."""
        return -self.rotation.matrix.T @ self.translation

    def transform(self, points):
        """World -> camera: R @ x + t for one point (3,) or a batch (n, 3)."""
        return self.rotation.apply(points) + self.translation

    def compose(self, other):
        """Pose equivalent to applying `other` first, then `self`."""
        r = self.rotation.compose(other.rotation)
        t = self.rotation.apply(other.translation) + self.translation
        return Pose(r, t)

    def inverse(self):
        rinv = self.rotation.inverse()
        return Pose(rinv, -rinv.apply(self.translation))

    @classmethod
    def look_at(cls, center, target, up):
        """Pose of a camera at `center` aimed at `target`.

        `up` is the world-space up hint; the camera y axis (which points
        down in image space) ends up opposite to it.
        """
        center = np.asarray(center, dtype=float)
        target = np.asarray(target, dtype=float)
        up = np.asarray(up, dtype=float)
        z = target - center
        nz = np.linalg.norm(z)
        if nz == 0.0:
            raise ValueError("look_at target coincides with camera center")
        z = z / nz
        x = np.cross(z, up)
        nx = np.linalg.norm(x)
        if nx < 1e-12:
            raise ValueError("up vector is parallel to the viewing direction")
        x = x / nx
        y = np.cross(z, x)
        r = Rotation(_reorthonormalize(np.vstack([x, y, z])))
        return cls(r, -r.apply(center))


@dataclass(frozen=True)
class Intrinsics:
    """Pinhole parameters in pixels."""

    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if not (self.fx > 0 and self.fy > 0):
            raise ValueError("focal lengths must be positive")
        if not (0 <= self.cx <= self.width and 0 <= self.cy <= self.height):
            raise ValueError("principal point must lie within the image")

    @property
    def matrix(self):
        return np.array(
            [[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]]
        )

    @classmethod
    def from_fov(cls, fov_deg, width, height):
        """Square-pixel intrinsics from a horizontal field of view."""
        if not (0.0 < fov_deg < 180.0):
            raise ValueError("fov must lie in (0, 180) degrees")
        f = (width / 2.0) / np.tan(np.deg2rad(fov_deg) / 2.0)
        return cls(fx=f, fy=f, cx=width / 2.0, cy=height / 2.0,
                   width=width, height=height)


def world_to_camera(pose, x):
    """x_c = R @ x + t for one point (3,) or a batch (n, 3)."""
    return pose.transform(x)


def project(k, x_c):
    """Perspective projection of camera-frame points to pixels.

    Raises BehindCamera if any point has z_c <= EPS_DEPTH.
    """
    x_c = np.asarray(x_c, dtype=float)
    z = x_c[..., 2]
    if np.any(z <= EPS_DEPTH):
        raise BehindCamera(f"point at depth {np.min(z):.3g} is behind the camera")
    u = k.fx * x_c[..., 0] / z + k.cx
    v = k.fy * x_c[..., 1] / z + k.cy
    return np.stack([u, v], axis=-1)


def perspective_divide(x_c):
    """(x_c/z_c, y_c/z_c); raises DivideByZero when |z_c| < EPS_DEPTH."""
    x_c = np.asarray(x_c, dtype=float)
    z = x_c[..., 2]
    if np.any(np.abs(z) < EPS_DEPTH):
        raise DivideByZero("perspective division by (near-)zero depth")
    return np.stack([x_c[..., 0] / z, x_c[..., 1] / z], axis=-1)


def scale_scene(points, pose, alpha):
    """Global similarity scaling: (alpha * points, pose with t' = alpha * t).

    Pixel projections are invariant to this transform; the function exists to
    make that property directly executable.
    """
    if not alpha > 0:
        raise InvalidScale(f"scale factor must be positive, got {alpha}")
    points = np.asarray(points, dtype=float)
    return alpha * points, Pose(pose.rotation, alpha * pose.translation)


# -- quaternion utilities (w, x, y, z) ---------------------------------------

def quat_from_matrix(m):
    """Rotation matrix -> unit quaternion with w >= 0."""
    m = np.asarray(m, dtype=float)
    tr = m[0, 0] + m[1, 1] + m[2, 2]
    if tr > 0:
        s = np.sqrt(tr + 1.0) * 2.0
        q = np.array([0.25 * s,
                      (m[2, 1] - m[1, 2]) / s,
                      (m[0, 2] - m[2, 0]) / s,
                      (m[1, 0] - m[0, 1]) / s])
    elif m[0, 0] >= m[1, 1] and m[0, 0] >= m[2, 2]:
        s = np.sqrt(1.0 + m[0, 0] - m[1, 1] - m[2, 2]) * 2.0
        q = np.array([(m[2, 1] - m[1, 2]) / s,
                      0.25 * s,
                      (m[0, 1] + m[1, 0]) / s,
                      (m[0, 2] + m[2, 0]) / s])
    elif m[1, 1] >= m[2, 2]:
        s = np.sqrt(1.0 + m[1, 1] - m[0, 0] - m[2, 2]) * 2.0
        q = np.array([(m[0, 2] - m[2, 0]) / s,
                      (m[0, 1] + m[1, 0]) / s,
                      0.25 * s,
                      (m[1, 2] + m[2, 1]) / s])
    else:
        s = np.sqrt(1.0 + m[2, 2] - m[0, 0] - m[1, 1]) * 2.0
        q = np.array([(m[1, 0] - m[0, 1]) / s,
                      (m[0, 2] + m[2, 0]) / s,
                      (m[1, 2] + m[2, 1]) / s,
                      0.25 * s])
    q = q / np.linalg.norm(q)
    if q[0] < 0:
        q = -q
    return q


def matrix_from_quat(q):
    q = np.asarray(q, dtype=float)
    q = q / np.linalg.norm(q)
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def slerp(q0, q1, s):
    """Shortest-arc spherical interpolation between unit quaternions."""
    q0 = np.asarray(q0, dtype=float)
    q1 = np.asarray(q1, dtype=float)
    dot = float(np.dot(q0, q1))
    if dot < 0.0:
        q1 = -q1
        dot = -dot
    if dot > 0.9995:
        # nearly parallel: linear blend avoids sin(theta) ~ 0 instability
        out = q0 + s * (q1 - q0)
        return out / np.linalg.norm(out)
    theta = np.arccos(np.clip(dot, -1.0, 1.0))
    sin_theta = np.sin(theta)
    a = np.sin((1.0 - s) * theta) / sin_theta
    b = np.sin(s * theta) / sin_theta
    return a * q0 + b * q1
