"""Camera trajectory authoring and sampling.

A trajectory is a list of time-ordered keyframes (pose + field of view)
interpolated with slerp on rotations and linear blending on camera centers
and fov. The ten canonical test motions (pan/zoom/arc families) are
generated here; arcs emit one keyframe per sampled frame so every sampled
camera center sits exactly on the orbit sphere.
"""

import json
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .camera import Intrinsics, Pose, Rotation, matrix_from_quat, slerp
from .errors import InvalidMagnitude, SchemaError, UnknownMotion


@dataclass(frozen=True)
class CameraKeyframe:
    pose: Pose
    fov_deg: float = 40.0
    time: float = 0.0

    def __post_init__(self):
        if not 1.0 <= self.fov_deg <= 179.0:
            raise ValueError(f"fov must lie in [1, 179] degrees, got {self.fov_deg}")
        if not 0.0 <= self.time <= 1.0:
            raise ValueError(f"keyframe time must lie in [0, 1], got {self.time}")


@dataclass(frozen=True)
class Trajectory:
    keyframes: tuple
    width: int = 512
    height: int = 512
    interpolation: str = "linear-slerp"

    def __post_init__(self):
        kfs = tuple(self.keyframes)
        if not kfs:
            raise ValueError("a trajectory needs at least one keyframe")
        times = [k.time for k in kfs]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("keyframe times must be strictly increasing")
        object.__setattr__(self, "keyframes", kfs)


class CanonicalMotion(str, Enum):
    PAN_LEFT = "pan_left"
    PAN_RIGHT = "pan_right"
    PAN_UP = "pan_up"
    PAN_DOWN = "pan_down"
    ZOOM_IN = "zoom_in"
    ZOOM_OUT = "zoom_out"
    ARC_LEFT = "arc_left"
    ARC_RIGHT = "arc_right"
    ARC_UP = "arc_up"
    ARC_DOWN = "arc_down"

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("-", "_").replace(" ", "_")
        for m in cls:
            if m.value == key:
                return m
        raise UnknownMotion(f"unknown canonical motion {name!r}")

    @property
    def opposite(self):
        pairs = {
            "pan_left": "pan_right", "pan_up": "pan_down",
            "zoom_in": "zoom_out", "arc_left": "arc_right", "arc_up": "arc_down",
        }
        inv = {v: k for k, v in pairs.items()}
        return CanonicalMotion(pairs.get(self.value) or inv[self.value])


# pan in fractions of image width/height, zoom as a distance ratio, arc in degrees
DEFAULT_MAGNITUDES = {
    CanonicalMotion.PAN_LEFT: 0.25, CanonicalMotion.PAN_RIGHT: 0.25,
    CanonicalMotion.PAN_UP: 0.25, CanonicalMotion.PAN_DOWN: 0.25,
    CanonicalMotion.ZOOM_IN: 1.25, CanonicalMotion.ZOOM_OUT: 1.25,
    CanonicalMotion.ARC_LEFT: 30.0, CanonicalMotion.ARC_RIGHT: 30.0,
    CanonicalMotion.ARC_UP: 30.0, CanonicalMotion.ARC_DOWN: 30.0,
}


def default_base_keyframe(distance=2.0, fov_deg=40.0):
    """Frontal camera at the given distance, aimed at the origin."""
    pose = Pose.look_at([0.0, 0.0, distance], [0.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    return CameraKeyframe(pose=pose, fov_deg=fov_deg, time=0.0)


def interpolate(a, b, s):
    """Blend two keyframes: slerp on rotation, linear on center and fov.

    s = 0 and s = 1 return `a` and `b` bit-exactly.
    """
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"interpolation parameter must lie in [0, 1], got {s}")
    if s == 0.0:
        return a
    if s == 1.0:
        return b
    q = slerp(a.pose.rotation.as_quat(), b.pose.rotation.as_quat(), s)
    rot = Rotation(matrix_from_quat(q))
    center = (1.0 - s) * a.pose.center + s * b.pose.center
    pose = Pose(rot, -rot.apply(center))
    fov = (1.0 - s) * a.fov_deg + s * b.fov_deg
    time = (1.0 - s) * a.time + s * b.time
    return CameraKeyframe(pose=pose, fov_deg=fov, time=time)


def sample(traj, f, width=None, height=None):
    """Sample f poses at times j/(f-1), plus per-frame intrinsics from fov.

    Sample times outside the keyframe range clamp to the end keyframes;
    with a single keyframe (or f = 1) the pose is replicated.
    """
    if f < 1:
        raise ValueError("frame count must be >= 1")
    w = width if width is not None else traj.width
    h = height if height is not None else traj.height
    kfs = traj.keyframes
    times = np.array([k.time for k in kfs])
    out = []
    for j in range(f):
        s = 0.0 if f == 1 else j / (f - 1)
        if len(kfs) == 1 or s <= times[0]:
            kf = kfs[0]
        elif s >= times[-1]:
            kf = kfs[-1]
        else:
            hi = int(np.searchsorted(times, s, side="right"))
            lo = hi - 1
            local = (s - times[lo]) / (times[hi] - times[lo])
            kf = interpolate(kfs[lo], kfs[hi], local)
        out.append(kf)
    poses = [k.pose for k in out]
    intr = [Intrinsics.from_fov(k.fov_deg, w, h) for k in out]
    return poses, intr


def _rodrigues(axis, angle):
    return Rotation.from_axis_angle(axis, angle).matrix


def canonical_trajectory(motion, base=None, frames=81, magnitude=None,
                         pivot=(0.0, 0.0, 0.0), width=512, height=512):
    """Build one of the ten canonical camera motions from a base keyframe.

    Pans translate parallel to the image plane by a fraction of the image
    size; zooms dolly along the optical axis by a distance ratio; arcs orbit
    the pivot at constant radius, keeping it on the optical axis. Arcs emit
    one keyframe per frame so sampled centers stay exactly on the orbit.
    """
    motion = CanonicalMotion.parse(motion)
    if base is None:
        base = default_base_keyframe()
    if frames < 2:
        raise ValueError("canonical trajectories need at least 2 frames")
    if magnitude is None:
        magnitude = DEFAULT_MAGNITUDES[motion]
    if not magnitude > 0:
        raise InvalidMagnitude(f"magnitude must be positive, got {magnitude}")
    pivot = np.asarray(pivot, dtype=float)
    r = base.pose.rotation.matrix
    right, down, forward = r[0], r[1], r[2]
    up = -down
    center0 = base.pose.center

    kind = motion.value.split("_")[0]
    if kind == "pan":
        depth = float((base.pose.transform(pivot))[2])
        k = Intrinsics.from_fov(base.fov_deg, width, height)
        if motion in (CanonicalMotion.PAN_LEFT, CanonicalMotion.PAN_RIGHT):
            shift = magnitude * width * depth / k.fx
            direction = -right if motion == CanonicalMotion.PAN_LEFT else right
        else:
            shift = magnitude * height * depth / k.fy
            direction = up if motion == CanonicalMotion.PAN_UP else -up
        end_pose = Pose(base.pose.rotation,
                        -r @ (center0 + shift * direction))
        kfs = (CameraKeyframe(base.pose, base.fov_deg, 0.0),
               CameraKeyframe(end_pose, base.fov_deg, 1.0))
    elif kind == "zoom":
        offset = center0 - pivot
        ratio = 1.0 / magnitude if motion == CanonicalMotion.ZOOM_IN else magnitude
        end_center = pivot + ratio * offset
        end_pose = Pose(base.pose.rotation, -r @ end_center)
        kfs = (CameraKeyframe(base.pose, base.fov_deg, 0.0),
               CameraKeyframe(end_pose, base.fov_deg, 1.0))
    else:  # arc: orbit the pivot, one keyframe per frame
        total = np.deg2rad(magnitude)
        if motion == CanonicalMotion.ARC_LEFT:
            axis, angle = up, -total
        elif motion == CanonicalMotion.ARC_RIGHT:
            axis, angle = up, total
        elif motion == CanonicalMotion.ARC_UP:
            axis, angle = right, -total
        else:
            axis, angle = right, total
        offset0 = center0 - pivot
        kfs = []
        for j in range(frames):
            s = j / (frames - 1)
            rot = _rodrigues(axis, s * angle)
            center = pivot + rot @ offset0
            up_j = rot @ up
            pose = Pose.look_at(center, pivot, up_j)
            kfs.append(CameraKeyframe(pose, base.fov_deg, s))
        kfs = tuple(kfs)
    return Trajectory(keyframes=kfs, width=width, height=height)


# -- trajectory file schema -----------------------------------------------------

def trajectory_to_dict(traj):
    doc = {"image": {"w": traj.width, "h": traj.height}, "keyframes": []}
    for kf in traj.keyframes:
        r = kf.pose.rotation.matrix
        center = kf.pose.center
        doc["keyframes"].append({
            "time": float(kf.time),
            "center": [float(v) for v in center],
            "look_at": [float(v) for v in center + r[2]],
            "up": [float(v) for v in -r[1]],
            "fov_deg": float(kf.fov_deg),
        })
    return doc


def trajectory_from_dict(doc):
    try:
        w = int(doc["image"]["w"])
        h = int(doc["image"]["h"])
        raw = doc["keyframes"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"trajectory document missing fields: {exc}") from exc
    if not isinstance(raw, list) or not raw:
        raise SchemaError("'keyframes' must be a non-empty array")
    kfs = []
    for i, entry in enumerate(raw):
        try:
            pose = Pose.look_at(entry["center"], entry["look_at"], entry["up"])
            kfs.append(CameraKeyframe(pose=pose,
                                      fov_deg=float(entry["fov_deg"]),
                                      time=float(entry["time"])))
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"malformed keyframe {i}: {exc}") from exc
        except ValueError as exc:
            raise SchemaError(f"invalid keyframe {i}: {exc}") from exc
    try:
        return Trajectory(keyframes=tuple(kfs), width=w, height=h)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


def save_trajectory(traj, path):
    with open(path, "w") as fh:
        json.dump(trajectory_to_dict(traj), fh, indent=2)


def load_trajectory(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read trajectory file {path}: {exc}") from exc
    return trajectory_from_dict(doc)
