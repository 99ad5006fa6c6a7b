"""3D landmark templates, their projection under camera poses, and file I/O.

A template is the scale-free 3D layout of facial landmarks; projecting it
under a pose and rasterizing the result (see raster.py) yields the
pixel-space camera conditioning signal. Templates are normalized to
centroid 0 / RMS radius 1 so the global-scale degree of freedom is gone by
construction.
"""

import json
from dataclasses import dataclass

import numpy as np

from .camera import EPS_DEPTH
from .errors import (
    AllBehindCamera,
    CountMismatch,
    NormalizationFailure,
    SchemaError,
)

SEMANTIC_GROUPS = ("contour", "brow", "eye", "nose", "lips", "iris", "other")


@dataclass(frozen=True)
class LandmarkTemplate3D:
    """Normalized 3D landmark set: centroid 0, RMS radius 1, non-coplanar.

    `edges` is the fixed drawing connectivity (index pairs) of the layout;
    it travels with projected frames so rasterization stays a pure function
    of its inputs.
    """

    points: np.ndarray
    ids: tuple = None
    groups: tuple = None
    edges: tuple = ()

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise SchemaError(f"template points must be (m, 3), got {pts.shape}")
        m = len(pts)
        if m < 7:
            raise CountMismatch(f"a template needs at least 7 landmarks, got {m}")
        if not np.all(np.isfinite(pts)):
            raise SchemaError("template points must be finite")
        centered = pts - pts.mean(axis=0)
        rms = np.sqrt(np.mean(np.sum(centered ** 2, axis=1)))
        if rms < 1e-12:
            raise NormalizationFailure("landmark cloud has zero extent")
        pts = centered / rms
        eigvals = np.linalg.eigvalsh(np.cov(pts.T))
        if eigvals[0] <= 1e-6:
            raise NormalizationFailure("landmark cloud is (near-)coplanar")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        ids = tuple(range(m)) if self.ids is None else tuple(int(i) for i in self.ids)
        groups = (("other",) * m if self.groups is None
                  else tuple(str(g) for g in self.groups))
        if len(ids) != m or len(groups) != m:
            raise CountMismatch("ids/groups length must match the point count")
        for g in groups:
            if g not in SEMANTIC_GROUPS:
                raise SchemaError(f"unknown semantic group {g!r}")
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "groups", groups)
        object.__setattr__(self, "edges",
                           tuple((int(a), int(b)) for a, b in self.edges))

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class LandmarkFrame2D:
    """Projected landmarks for one frame; invisible points carry NaN pixels."""

    points: np.ndarray
    visibility: np.ndarray
    groups: tuple = None
    edges: tuple = ()

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        vis = np.asarray(self.visibility, dtype=bool)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise SchemaError(f"frame points must be (m, 2), got {pts.shape}")
        if vis.shape != (len(pts),):
            raise CountMismatch("visibility length must match the point count")
        if not np.all(np.isfinite(pts[vis])):
            raise SchemaError("visible landmarks must be finite")
        pts = pts.copy()
        pts.setflags(write=False)
        vis = vis.copy()
        vis.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "visibility", vis)
        if self.groups is not None:
            object.__setattr__(self, "groups", tuple(self.groups))
        object.__setattr__(self, "edges",
                           tuple((int(a), int(b)) for a, b in self.edges))

    def __len__(self):
        return len(self.points)


def project_landmarks(template, pose, k):
    """Project a template under a pose: u_k from R x_k + t via the pinhole.

    Points with depth <= EPS_DEPTH are marked invisible; AllBehindCamera is
    raised when that is every point.
    """
    xc = pose.transform(template.points)
    z = xc[:, 2]
    visible = z > EPS_DEPTH
    if not visible.any():
        raise AllBehindCamera("every landmark is behind the camera")
    pts = np.full((len(template), 2), np.nan)
    zs = z[visible]
    pts[visible, 0] = k.fx * xc[visible, 0] / zs + k.cx
    pts[visible, 1] = k.fy * xc[visible, 1] / zs + k.cy
    return LandmarkFrame2D(pts, visible, groups=template.groups, edges=template.edges)


def condition_sequence(template, traj, width, height, style, frames, k=None):
    """Render one condition map per sampled trajectory pose.

    Frame i depends only on pose i. Intrinsics come from each keyframe's
    field of view at the raster size unless a fixed `k` override is given.
    AllBehindCamera failures are re-raised with the offending frame index.
    """
    from . import trajectory as _traj
    from .raster import rasterize

    poses, intrinsics = _traj.sample(traj, frames, width=width, height=height)
    maps = []
    for i, pose in enumerate(poses):
        ki = k if k is not None else intrinsics[i]
        try:
            frame = project_landmarks(template, pose, ki)
        except AllBehindCamera as exc:
            raise AllBehindCamera(f"frame {i}: {exc}", frame_index=i) from exc
        maps.append(rasterize(frame, style, width, height))
    return maps


# -- built-in procedural layout ------------------------------------------------

def _mirror_x(pts):
    out = np.array(pts, dtype=float)
    out[:, 0] = -out[:, 0]
    return out


def _base_layout_68():
    """Classical 68-landmark layout on an ellipsoidal head.

    Head frame: x to the subject's left, y up, z out of the face. The left
    half is an exact mirror of the right half, so bilateral symmetry holds
    to the bit.
    """
    pts = np.zeros((68, 3))
    groups = ["other"] * 68

    # jaw contour 0..16 (0 at the subject's right ear, 8 at the chin)
    for i in range(8):
        t = i / 16.0
        s = np.sin(np.pi * t)
        pts[i] = [-0.80 * np.cos(np.pi * t), 0.10 - 1.05 * s ** 1.2, -0.10 + 0.62 * s ** 1.5]
        pts[16 - i] = _mirror_x(pts[i][None, :])[0]
    pts[8] = [0.0, -0.95, 0.52]
    for i in range(17):
        groups[i] = "contour"

    # brows 17..21 (right, lateral to medial) and 22..26 (left, mirrored)
    brow_x = np.linspace(-0.56, -0.13, 5)
    for j, x in enumerate(brow_x):
        s = j / 4.0
        pts[17 + j] = [x, 0.40 + 0.10 * np.sin(np.pi * s), 0.50 + 0.14 * np.sin(np.pi * s)]
        pts[26 - j] = _mirror_x(pts[17 + j][None, :])[0]
    for i in range(17, 27):
        groups[i] = "brow"

    # nose bridge 27..30 and base 31..35
    for j, (y, z) in enumerate([(0.28, 0.56), (0.16, 0.64), (0.04, 0.72), (-0.06, 0.80)]):
        pts[27 + j] = [0.0, y, z]
    base_x = [-0.17, -0.085, 0.0, 0.085, 0.17]
    for j, x in enumerate(base_x):
        pts[31 + j] = [x, -0.16, 0.62 + 0.10 * np.cos(np.pi * x / 0.40)]
    for i in range(27, 36):
        groups[i] = "nose"

    # right eye 36..41 (closed hexagon), left eye 42..47 mirrored so that
    # the classical pairing (36<->45, 37<->44, ...) holds
    right_eye = np.array([
        [-0.46, 0.245, 0.455],
        [-0.385, 0.29, 0.50],
        [-0.265, 0.29, 0.51],
        [-0.19, 0.245, 0.49],
        [-0.265, 0.20, 0.50],
        [-0.385, 0.20, 0.49],
    ])
    pts[36:42] = right_eye
    pts[42:48] = _mirror_x(right_eye[[3, 2, 1, 0, 5, 4]])
    for i in range(36, 48):
        groups[i] = "eye"

    # lips: outer ring 48..59, inner ring 60..67 (both closed)
    for j in range(12):
        a = np.pi - j * (2.0 * np.pi / 12.0)
        x = 0.29 * np.cos(a)
        pts[48 + j] = [x, -0.55 + 0.14 * np.sin(a), 0.62 - 0.10 * abs(np.cos(a))]
    for j in range(8):
        a = np.pi - j * (2.0 * np.pi / 8.0)
        x = 0.17 * np.cos(a)
        pts[60 + j] = [x, -0.55 + 0.055 * np.sin(a), 0.63 - 0.06 * abs(np.cos(a))]
    for i in range(48, 68):
        groups[i] = "lips"

    edges = []
    for a, b in [(0, 16), (17, 21), (22, 26), (27, 30), (31, 35)]:
        edges += [(i, i + 1) for i in range(a, b)]
    for a, b in [(36, 41), (42, 47), (48, 59), (60, 67)]:
        edges += [(i, i + 1) for i in range(a, b)] + [(b, a)]
    return pts, tuple(groups), tuple(edges)


def default_template():
    """The built-in 68-point template (no external assets needed)."""
    pts, groups, edges = _base_layout_68()
    return LandmarkTemplate3D(pts, groups=groups, edges=edges)


# -- file I/O -------------------------------------------------------------------

def load_landmark_template(path):
    """Load a template JSON ({count, points: [{id, x, y, z, group?}]}).

    Points are renormalized to centroid 0 / RMS radius 1 on load.
    """
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read template file {path}: {exc}") from exc
    if not isinstance(doc, dict) or "points" not in doc:
        raise SchemaError("template file must be an object with a 'points' array")
    raw = doc["points"]
    if not isinstance(raw, list):
        raise SchemaError("'points' must be an array")
    try:
        pts = np.array([[p["x"], p["y"], p["z"]] for p in raw], dtype=float)
        ids = [int(p["id"]) for p in raw]
        groups = [p.get("group", "other") for p in raw]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed point entry: {exc}") from exc
    declared = doc.get("count", len(raw))
    if declared != len(raw):
        raise CountMismatch(f"file declares {declared} points but contains {len(raw)}")
    if len(raw) < 7:
        raise CountMismatch(f"a template needs at least 7 landmarks, got {len(raw)}")
    edges = tuple((int(a), int(b)) for a, b in doc.get("edges", []))
    return LandmarkTemplate3D(pts, ids=ids, groups=groups, edges=edges)


def save_landmark_template(template, path):
    doc = {
        "count": len(template),
        "points": [
            {"id": template.ids[i], "x": float(p[0]), "y": float(p[1]),
             "z": float(p[2]), "group": template.groups[i]}
            for i, p in enumerate(template.points)
        ],
        "edges": [list(e) for e in template.edges],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_landmark_frames(path):
    """Load 2D landmark frames ({width, height, frames: [[{id,x,y,visible}]]}).

    Coordinates are normalized [0, 1] in the file and converted to pixels
    using the declared image size. Returns (frames, width, height).
    """
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read landmark frames file {path}: {exc}") from exc
    try:
        width, height = int(doc["width"]), int(doc["height"])
        raw_frames = doc["frames"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"landmark frames file missing fields: {exc}") from exc
    if not isinstance(raw_frames, list) or not raw_frames:
        raise SchemaError("'frames' must be a non-empty array")
    m = len(raw_frames[0])
    frames = []
    for fi, entries in enumerate(raw_frames):
        if len(entries) != m:
            raise CountMismatch(f"frame {fi} has {len(entries)} points, expected {m}")
        order = sorted(range(len(entries)), key=lambda j: int(entries[j]["id"]))
        pts = np.full((m, 2), np.nan)
        vis = np.zeros(m, dtype=bool)
        for slot, j in enumerate(order):
            p = entries[j]
            try:
                visible = bool(p.get("visible", True))
                if visible:
                    pts[slot] = [float(p["x"]) * width, float(p["y"]) * height]
                vis[slot] = visible
            except (KeyError, TypeError, ValueError) as exc:
                raise SchemaError(f"malformed landmark entry in frame {fi}: {exc}") from exc
        frames.append(LandmarkFrame2D(pts, vis))
    return frames, width, height


def save_landmark_frames(frames, width, height, path):
    doc = {"width": int(width), "height": int(height), "frames": []}
    for frame in frames:
        entries = []
        for i in range(len(frame)):
            visible = bool(frame.visibility[i])
            u, v = (frame.points[i] if visible else (0.0, 0.0))
            entries.append({"id": i, "x": float(u) / width, "y": float(v) / height,
                            "visible": visible})
        doc["frames"].append(entries)
    with open(path, "w") as fh:
        json.dump(doc, fh)
