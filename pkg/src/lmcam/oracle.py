"""Procedural multi-view ground-truth generator.

A stand-in for studio capture and for the proxy head used at inference
time: a procedural landmark head, a static camera ring, sinusoidal rigid +
expression animation, and landmark-video rendering that emits exact poses
alongside every frame. Everything the estimation modules compute (F, E,
relative pose, PnP pose) is recoverable from this output to near machine
precision, which makes it the toolkit's master test oracle.
"""

from dataclasses import dataclass

import numpy as np

from .camera import Intrinsics, Pose, Rotation
from .errors import AllBehindCamera
from .landmarks import LandmarkTemplate3D, _base_layout_68
from .raster import RasterStyle, rasterize
from .rng import keyed_rng


@dataclass(frozen=True)
class ProceduralHead:
    """Landmark template plus fixed per-landmark expression directions.

    Zero expression reproduces the base template exactly; jaw_open in
    [0, 1] pushes the lower face down/out, brow_raise in [-1, 1] moves the
    brow band vertically.
    """

    template: LandmarkTemplate3D
    jaw_dirs: np.ndarray
    brow_dirs: np.ndarray

    def __post_init__(self):
        for name in ("jaw_dirs", "brow_dirs"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def landmark_points(self, jaw_open=0.0, brow_raise=0.0):
        if jaw_open == 0.0 and brow_raise == 0.0:
            return self.template.points
        return (self.template.points
                + jaw_open * self.jaw_dirs + brow_raise * self.brow_dirs)


@dataclass(frozen=True)
class CameraRig:
    """Static ring of cameras, equally spaced in azimuth, aimed at the origin."""

    cameras: tuple  # of (Pose, Intrinsics)
    radius: float
    elevation_deg: float

    def __len__(self):
        return len(self.cameras)


@dataclass(frozen=True)
class AnimatedScene:
    """Per-frame rigid head transform + expression parameters."""

    head: ProceduralHead
    rotations: tuple      # head-to-world Rotation per frame
    translations: np.ndarray  # (f, 3)
    jaw_open: np.ndarray      # (f,)
    brow_raise: np.ndarray    # (f,)

    def __post_init__(self):
        for name in ("translations", "jaw_open", "brow_raise"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self):
        return len(self.rotations)

    def world_points(self, i):
        pts = self.head.landmark_points(self.jaw_open[i], self.brow_raise[i])
        return pts @ self.rotations[i].matrix.T + self.translations[i]

    def head_pose_in_camera(self, i, camera_pose):
        """Composed head-to-camera pose for frame i."""
        r = camera_pose.rotation.compose(self.rotations[i])
        t = camera_pose.rotation.apply(self.translations[i]) + camera_pose.translation
        return Pose(r, t)


def _symmetric_cloud(m, rng):
    """m bilaterally symmetric points on the front half of an ellipsoid."""
    pts = np.zeros((m, 3))
    n_pairs = m // 2
    for j in range(n_pairs):
        u = (j + 0.5) / n_pairs
        lat = np.pi * (u - 0.5) * 0.9          # -81..81 degrees
        lon = 0.25 * np.pi * np.sin(7.0 * np.pi * u) + 0.35 * np.pi
        x = 0.80 * np.cos(lat) * np.sin(lon)
        y = 1.0 * np.sin(lat)
        z = 0.80 * np.cos(lat) * np.cos(lon)
        pts[2 * j] = [x, y, z]
        pts[2 * j + 1] = [-x, y, z]
    if m % 2 == 1:
        pts[-1] = [0.0, 0.1, 0.85]
    return pts


def make_head(seed=0, m=68, perturb=0.05):
    """Procedural bilateral-symmetric head with m landmarks.

    m = 68 uses the classical face layout with drawing connectivity; other
    counts get a symmetric ellipsoid cloud. `perturb` scales a seeded
    per-point identity perturbation; at 0 the layout is exactly symmetric.
    """
    if m < 7:
        raise ValueError(f"a head needs at least 7 landmarks, got {m}")
    if m == 68:
        pts, groups, edges = _base_layout_68()
    else:
        pts = _symmetric_cloud(m, None)
        groups, edges = ("other",) * m, ()
    if perturb:
        rng = keyed_rng(seed, "make_head", m)
        pts = pts + rng.uniform(-perturb, perturb, size=pts.shape)
    template = LandmarkTemplate3D(pts, groups=groups, edges=edges)

    p = template.points
    y = p[:, 1]
    # jaw: pull the lower face down and slightly out as the mouth opens
    jaw_w = np.clip((-y - 0.2) / 0.8, 0.0, 1.0)
    jaw_dirs = np.stack([np.zeros_like(y), -0.25 * jaw_w, 0.05 * jaw_w], axis=1)
    # brows: vertical shift of the upper band
    brow_w = np.clip((y - 0.25) / 0.5, 0.0, 1.0)
    brow_dirs = np.stack([np.zeros_like(y), 0.12 * brow_w, np.zeros_like(y)], axis=1)
    return ProceduralHead(template=template, jaw_dirs=jaw_dirs, brow_dirs=brow_dirs)


def make_rig(n=16, radius=2.0, elevation_deg=15.0, fov_deg=40.0,
             width=512, height=512):
    """n cameras equally spaced in azimuth on one elevation band."""
    if n < 2:
        raise ValueError("a rig needs at least 2 cameras")
    if not radius > 0:
        raise ValueError("rig radius must be positive")
    k = Intrinsics.from_fov(fov_deg, width, height)
    el = np.deg2rad(elevation_deg)
    cameras = []
    for j in range(n):
        az = 2.0 * np.pi * j / n
        center = radius * np.array([
            np.cos(el) * np.sin(az), np.sin(el), np.cos(el) * np.cos(az)])
        pose = Pose.look_at(center, [0.0, 0.0, 0.0], [0.0, 1.0, 0.0])
        cameras.append((pose, k))
    return CameraRig(cameras=tuple(cameras), radius=radius,
                     elevation_deg=elevation_deg)


def animate(head, f, yaw_amp_deg=0.0, pitch_amp_deg=0.0, trans_amp=0.0,
            jaw_amp=0.0, brow_amp=0.0, jitter=0.0, seed=0):
    """Sinusoidal rigid + expression schedule over one cycle; frame 0 is rest."""
    if f < 1:
        raise ValueError("need at least one frame")
    thetas = np.array([2.0 * np.pi * i / (f - 1) if f > 1 else 0.0
                       for i in range(f)])
    rng = keyed_rng(seed, "animate") if jitter else None
    rotations = []
    translations = np.zeros((f, 3))
    for i, th in enumerate(thetas):
        yaw = np.deg2rad(yaw_amp_deg) * np.sin(th)
        pitch = np.deg2rad(pitch_amp_deg) * np.sin(2.0 * th)
        if jitter:
            yaw += np.deg2rad(jitter) * rng.normal()
            pitch += np.deg2rad(jitter) * rng.normal()
        r = Rotation.from_axis_angle([0, 1, 0], yaw).compose(
            Rotation.from_axis_angle([1, 0, 0], pitch))
        rotations.append(r)
        translations[i] = trans_amp * np.array(
            [np.sin(th), 0.5 * np.sin(2.0 * th), 0.0])
    jaw = jaw_amp * (1.0 - np.cos(thetas)) / 2.0
    brow = brow_amp * np.sin(thetas)
    return AnimatedScene(head=head, rotations=tuple(rotations),
                         translations=translations, jaw_open=jaw,
                         brow_raise=brow)


@dataclass(frozen=True)
class RenderedView:
    """Landmark video of one camera plus lossless ground truth."""

    maps: tuple            # ConditionMap per frame
    frames: tuple          # LandmarkFrame2D per frame
    head_poses: tuple      # head-in-camera Pose per frame
    camera_pose: Pose
    intrinsics: Intrinsics


def _render_frames(scene, poses, intrinsics_list, style):
    from .camera import EPS_DEPTH
    from .landmarks import LandmarkFrame2D

    maps, frames, head_poses = [], [], []
    tpl = scene.head.template
    for i in range(len(scene)):
        pose, k = poses[i], intrinsics_list[i]
        # project the animated world points directly (no re-normalization)
        world = scene.world_points(i)
        xc = pose.transform(world)
        z = xc[:, 2]
        visible = z > EPS_DEPTH
        if not visible.any():
            raise AllBehindCamera(f"frame {i}: head fully behind camera",
                                  frame_index=i)
        uv = np.full((len(world), 2), np.nan)
        uv[visible, 0] = k.fx * xc[visible, 0] / z[visible] + k.cx
        uv[visible, 1] = k.fy * xc[visible, 1] / z[visible] + k.cy
        frame = LandmarkFrame2D(uv, visible, groups=tpl.groups, edges=tpl.edges)
        frames.append(frame)
        maps.append(rasterize(frame, style, k.width, k.height))
        head_poses.append(scene.head_pose_in_camera(i, pose))
    return maps, frames, head_poses


def render_view(scene, camera, style=None):
    """Render an animated scene from one static rig camera."""
    style = style or RasterStyle()
    pose, k = camera
    f = len(scene)
    maps, frames, head_poses = _render_frames(scene, [pose] * f, [k] * f, style)
    return RenderedView(maps=tuple(maps), frames=tuple(frames),
                        head_poses=tuple(head_poses), camera_pose=pose,
                        intrinsics=k)


def render_trajectory(scene, poses, intrinsics_list, style=None):
    """Render an animated scene along a per-frame camera path.

    The scene length must match the pose count; ground truth is emitted per
    frame exactly as for static cameras.
    """
    style = style or RasterStyle()
    if len(poses) != len(scene):
        raise ValueError("scene length and pose count differ")
    maps, frames, head_poses = _render_frames(scene, poses, intrinsics_list, style)
    return maps, frames, head_poses


def ground_truth_dict(view, scene):
    """JSON-ready ground truth for one rendered view."""
    k = view.intrinsics
    doc = {
        "intrinsics": {"fx": k.fx, "fy": k.fy, "cx": k.cx, "cy": k.cy,
                       "width": k.width, "height": k.height},
        "camera_pose": {
            "rotation": view.camera_pose.rotation.matrix.tolist(),
            "translation": view.camera_pose.translation.tolist(),
        },
        "frames": [],
    }
    for i, frame in enumerate(view.frames):
        hp = view.head_poses[i]
        doc["frames"].append({
            "index": i,
            "head_pose_in_camera": {
                "rotation": hp.rotation.matrix.tolist(),
                "translation": hp.translation.tolist(),
            },
            "jaw_open": float(scene.jaw_open[i]),
            "brow_raise": float(scene.brow_raise[i]),
            "landmarks": [[float(u), float(v)] for u, v in frame.points],
            "visible": [bool(v) for v in frame.visibility],
        })
    return doc
