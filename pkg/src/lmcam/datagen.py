"""Seeded training-data generation over 8-bit frame sequences.

Three clip-level operations (scale/color augmentation, synthetic zoom/pan
camera motion, multi-shot stitching) plus the resize/crop/pad primitives
they are built from. Every stochastic draw comes from a counter-based
stream keyed by (seed, op name), so outputs are byte-reproducible across
runs and platforms, and each op returns a provenance dict recording every
drawn parameter.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidOffset, InvalidRange
from .rng import keyed_rng

DEFAULT_PAN_BOUND_FRAC = 0.15


@dataclass(frozen=True)
class FrameSequence:
    """T frames of h x w x 3 uint8 pixels plus an fps tag."""

    frames: np.ndarray
    fps: float = 30.0

    def __post_init__(self):
        arr = np.asarray(self.frames)
        if arr.ndim != 4 or arr.shape[3] != 3 or arr.dtype != np.uint8:
            raise DimensionMismatch(
                f"frames must be uint8 (T, h, w, 3), got {arr.shape} {arr.dtype}")
        if arr.shape[0] < 1:
            raise DimensionMismatch("a sequence needs at least one frame")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "frames", arr)

    def __len__(self):
        return len(self.frames)

    @property
    def height(self):
        return self.frames.shape[1]

    @property
    def width(self):
        return self.frames.shape[2]


@dataclass(frozen=True)
class MaskSequence:
    """Per-frame binary masks (T, h, w) with values in {0, 1}."""

    masks: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.masks)
        if arr.ndim != 3:
            raise DimensionMismatch(f"masks must be (T, h, w), got {arr.shape}")
        arr = (arr > 0).astype(np.uint8)
        arr.setflags(write=False)
        object.__setattr__(self, "masks", arr)

    def __len__(self):
        return len(self.masks)


def _round_half_away(x):
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def _to_u8(x):
    return np.clip(np.floor(x + 0.5), 0.0, 255.0).astype(np.uint8)


def resize(img, scale):
    """Bilinear resample of one (h, w[, c]) image by a scalar factor.

    Output dimensions are round-half-away(h*scale, w*scale); a scale whose
    rounded dimensions equal the input is an exact identity.
    """
    if not scale > 0:
        raise ValueError("resize scale must be positive")
    img = np.asarray(img)
    h, w = img.shape[:2]
    out_h = max(int(_round_half_away(h * scale)), 1)
    out_w = max(int(_round_half_away(w * scale)), 1)
    if (out_h, out_w) == (h, w):
        return img.copy()
    ry, rx = out_h / h, out_w / w
    src_y = np.clip((np.arange(out_h) + 0.5) / ry - 0.5, 0.0, h - 1.0)
    src_x = np.clip((np.arange(out_w) + 0.5) / rx - 0.5, 0.0, w - 1.0)
    y0 = np.floor(src_y).astype(int)
    x0 = np.floor(src_x).astype(int)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    wy = (src_y - y0)[:, None]
    wx = (src_x - x0)[None, :]
    if img.ndim == 3:
        wy = wy[..., None]
        wx = wx[..., None]
    f = img.astype(np.float64)
    top = f[y0][:, x0] * (1 - wx) + f[y0][:, x1] * wx
    bot = f[y1][:, x0] * (1 - wx) + f[y1][:, x1] * wx
    out = top * (1 - wy) + bot * wy
    if img.dtype == np.uint8:
        return _to_u8(out)
    return out


def _pad_crop_axis(size, target):
    """(src_start, src_stop, dst_start, dst_stop) for one axis; remainder
    pixels go to the trailing edge."""
    if size >= target:
        start = (size - target) // 2
        return start, start + target, 0, target
    pad = (target - size) // 2
    return 0, size, pad, pad + size


def center_crop_or_pad(img, target_h, target_w, fill=0):
    """Center crop or pad with a constant fill to the target size."""
    if target_h <= 0 or target_w <= 0:
        raise ValueError("target dimensions must be positive")
    img = np.asarray(img)
    h, w = img.shape[:2]
    sy0, sy1, dy0, dy1 = _pad_crop_axis(h, target_h)
    sx0, sx1, dx0, dx1 = _pad_crop_axis(w, target_w)
    shape = (target_h, target_w) + img.shape[2:]
    out = np.full(shape, fill, dtype=img.dtype)
    out[dy0:dy1, dx0:dx1] = img[sy0:sy1, sx0:sx1]
    return out


def crop_or_pad_with_offset(img, offset, target_h, target_w, fill=0):
    """Center placement shifted by (ox, oy) pixels; positive offsets move
    content right/down. Fractional offsets round half away from zero."""
    if target_h <= 0 or target_w <= 0:
        raise ValueError("target dimensions must be positive")
    img = np.asarray(img)
    h, w = img.shape[:2]
    ox = int(_round_half_away(offset[0]))
    oy = int(_round_half_away(offset[1]))
    out = np.full((target_h, target_w) + img.shape[2:], fill, dtype=img.dtype)
    base_y = (target_h - h) // 2 if h < target_h else -((h - target_h) // 2)
    base_x = (target_w - w) // 2 if w < target_w else -((w - target_w) // 2)
    y0 = base_y + oy
    x0 = base_x + ox
    src_y0, src_x0 = max(0, -y0), max(0, -x0)
    dst_y0, dst_x0 = max(0, y0), max(0, x0)
    copy_h = min(h - src_y0, target_h - dst_y0)
    copy_w = min(w - src_x0, target_w - dst_x0)
    if copy_h > 0 and copy_w > 0:
        out[dst_y0:dst_y0 + copy_h, dst_x0:dst_x0 + copy_w] = \
            img[src_y0:src_y0 + copy_h, src_x0:src_x0 + copy_w]
    return out


def _check_mask_pairing(seq, masks):
    if len(seq) != len(masks):
        raise DimensionMismatch(
            f"{len(masks)} masks for {len(seq)} frames")
    if masks.masks.shape[1:] != seq.frames.shape[1:3]:
        raise DimensionMismatch(
            f"mask size {masks.masks.shape[1:]} does not match frames "
            f"{seq.frames.shape[1:3]}")


def _resize_mask(mask, scale):
    out = resize(mask.astype(np.float64), scale)
    return (out >= 0.5).astype(np.uint8)


def scale_color_augment(source, target, src_masks, tgt_masks, seed):
    """Rescale two clips independently and paint one shared random color
    behind the foreground masks.

    Scales are drawn uniformly from [0.75, 1.25] per clip; the background
    color is drawn once and shared. Returns ((source_out, target_out),
    provenance).
    """
    _check_mask_pairing(source, src_masks)
    _check_mask_pairing(target, tgt_masks)
    rng = keyed_rng(seed, "scale_color_augment")
    s_src = float(rng.uniform(0.75, 1.25))
    s_tgt = float(rng.uniform(0.75, 1.25))
    color = rng.integers(0, 256, size=3, dtype=np.int64).astype(np.uint8)

    def apply(seq, masks, scale):
        out = []
        for frame, mask in zip(seq.frames, masks.masks):
            j = resize(frame, scale)
            m = _resize_mask(mask, scale)
            out.append(np.where(m[..., None] == 1, j, color[None, None, :]))
        return FrameSequence(np.stack(out), fps=seq.fps)

    out_src = apply(source, src_masks, s_src)
    out_tgt = apply(target, tgt_masks, s_tgt)
    prov = {
        "op": "scale_color_augment",
        "seed": int(seed),
        "scale_source": s_src,
        "scale_target": s_tgt,
        "background_color": [int(c) for c in color],
    }
    return (out_src, out_tgt), prov


def synthetic_zoom(seq, s_start=None, s_end=None, seed=None, fill=0):
    """Per-frame linear zoom schedule, cropped/padded back to input size.

    Either give both scales in [1.0, 1.25] or a seed to draw them.
    Frame i is scaled by (1-a)*s_start + a*s_end with a = i / max(T-1, 1).
    """
    if s_start is None or s_end is None:
        if seed is None:
            raise InvalidRange("either both scales or a seed must be given")
        rng = keyed_rng(seed, "synthetic_zoom")
        s_start = float(rng.uniform(1.0, 1.25))
        s_end = float(rng.uniform(1.0, 1.25))
    if not (1.0 <= s_start <= 1.25 and 1.0 <= s_end <= 1.25):
        raise InvalidRange(
            f"zoom scales must lie in [1.0, 1.25], got {s_start}, {s_end}")
    t = len(seq)
    h, w = seq.height, seq.width
    scales = []
    out = []
    for i in range(t):
        a = i / max(t - 1, 1)
        s_i = (1.0 - a) * s_start + a * s_end
        scales.append(s_i)
        j = resize(seq.frames[i], s_i)
        out.append(center_crop_or_pad(j, h, w, fill=fill))
    prov = {
        "op": "synthetic_zoom",
        "seed": None if seed is None else int(seed),
        "s_start": float(s_start),
        "s_end": float(s_end),
        "scales": [float(s) for s in scales],
    }
    return FrameSequence(np.stack(out), fps=seq.fps), prov


def synthetic_pan(seq, o_start=None, o_end=None, seed=None, bounds=None, fill=0):
    """Per-frame linearly interpolated crop/pad offsets (lateral motion).

    Offsets are (ox, oy) pixel pairs bounded by `bounds` (defaults to
    0.15 * (W, H)); a seed draws both endpoints uniformly inside the bounds.
    """
    h, w = seq.height, seq.width
    if bounds is None:
        bounds = (DEFAULT_PAN_BOUND_FRAC * w, DEFAULT_PAN_BOUND_FRAC * h)
    bx, by = float(bounds[0]), float(bounds[1])
    if o_start is None or o_end is None:
        if seed is None:
            raise InvalidOffset("either both offsets or a seed must be given")
        rng = keyed_rng(seed, "synthetic_pan")
        o_start = (float(rng.uniform(-bx, bx)), float(rng.uniform(-by, by)))
        o_end = (float(rng.uniform(-bx, bx)), float(rng.uniform(-by, by)))
    o_start = (float(o_start[0]), float(o_start[1]))
    o_end = (float(o_end[0]), float(o_end[1]))
    for o in (o_start, o_end):
        if abs(o[0]) > bx or abs(o[1]) > by:
            raise InvalidOffset(f"offset {o} exceeds bounds ({bx}, {by})")
    t = len(seq)
    offsets = []
    out = []
    for i in range(t):
        a = i / max(t - 1, 1)
        o_i = ((1.0 - a) * o_start[0] + a * o_end[0],
               (1.0 - a) * o_start[1] + a * o_end[1])
        offsets.append(o_i)
        out.append(crop_or_pad_with_offset(seq.frames[i], o_i, h, w, fill=fill))
    prov = {
        "op": "synthetic_pan",
        "seed": None if seed is None else int(seed),
        "o_start": list(o_start),
        "o_end": list(o_end),
        "bounds": [bx, by],
        "offsets": [list(o) for o in offsets],
    }
    return FrameSequence(np.stack(out), fps=seq.fps), prov


def multishot_stitch(clips, seed, k_max=4):
    """Concatenate trimmed segments of 1..k_max distinct clips of one scene.

    The drawn shot count K clamps to the number of available clips rather
    than failing, so small scenes stay usable. Each segment [a, b] is at
    least two frames. Returns (stitched, provenance).
    """
    if not clips:
        raise ValueError("need at least one clip to stitch")
    dims = {(c.height, c.width) for c in clips}
    if len(dims) != 1:
        raise DimensionMismatch(f"clips disagree on frame size: {sorted(dims)}")
    for i, c in enumerate(clips):
        if len(c) < 2:
            raise ValueError(f"clip {i} has fewer than 2 frames")
    rng = keyed_rng(seed, "multishot_stitch")
    k_drawn = int(rng.integers(1, k_max + 1))
    k = min(k_drawn, len(clips))
    indices = [int(i) for i in rng.choice(len(clips), size=k, replace=False)]
    segments = []
    pieces = []
    for idx in indices:
        t = len(clips[idx])
        a = int(rng.integers(0, t - 1))
        b = int(rng.integers(a + 1, t))
        segments.append((a, b))
        pieces.append(clips[idx].frames[a:b + 1])
    stitched = FrameSequence(np.concatenate(pieces, axis=0), fps=clips[indices[0]].fps)
    prov = {
        "op": "multishot_stitch",
        "seed": int(seed),
        "k_max": int(k_max),
        "k_drawn": k_drawn,
        "k_used": k,
        "clip_indices": indices,
        "segments": [[int(a), int(b)] for a, b in segments],
        "output_length": int(sum(b - a + 1 for a, b in segments)),
    }
    return stitched, prov
