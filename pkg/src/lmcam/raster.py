"""Deterministic rasterization of 2D landmark frames into condition maps.

The output is a pure function of (frame, style): primitives are painted in
a fixed order (edges, then points) onto a supersampled uint8 canvas which
is then box-downsampled, so identical inputs give byte-identical buffers on
any platform. Geometry outside the frame is clipped, never wrapped.
"""

import io
from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from .errors import SchemaError

GROUP_COLORS = {
    "contour": (70, 255, 70),
    "brow": (255, 160, 40),
    "eye": (60, 170, 255),
    "nose": (255, 250, 60),
    "lips": (255, 60, 110),
    "iris": (190, 80, 255),
    "other": (245, 245, 245),
}


@dataclass(frozen=True)
class RasterStyle:
    point_radius_px: float = 2.0
    line_width_px: float = 1.5
    colors: dict = field(default_factory=lambda: dict(GROUP_COLORS))
    background: tuple = (0, 0, 0)
    anti_aliasing: bool = True
    supersample: int = 4
    draw_edges: bool = True

    def __post_init__(self):
        if not self.point_radius_px > 0:
            raise ValueError("point radius must be positive")
        if not self.line_width_px > 0:
            raise ValueError("line width must be positive")
        if self.supersample < 1:
            raise ValueError("supersample factor must be >= 1")

    def color_for(self, group):
        return self.colors.get(group, self.colors.get("other", (255, 255, 255)))


@dataclass(frozen=True)
class ConditionMap:
    """8-bit RGB raster of projected landmarks."""

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.shape != (self.height, self.width, 3) or px.dtype != np.uint8:
            raise SchemaError("condition map buffer must be uint8 (h, w, 3)")
        px = px.copy()
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    def to_image(self):
        return Image.fromarray(self.pixels, mode="RGB")

    def to_png_bytes(self):
        buf = io.BytesIO()
        self.to_image().save(buf, format="PNG")
        return buf.getvalue()

    @classmethod
    def from_png_bytes(cls, data):
        img = Image.open(io.BytesIO(data)).convert("RGB")
        arr = np.asarray(img, dtype=np.uint8)
        return cls(img.width, img.height, arr)


def _paint_disk(canvas, center, radius, color, ss):
    hs, ws = canvas.shape[:2]
    cx, cy = center[0] * ss, center[1] * ss
    r = radius * ss
    x0 = max(int(np.floor(cx - r)), 0)
    x1 = min(int(np.ceil(cx + r)) + 1, ws)
    y0 = max(int(np.floor(cy - r)), 0)
    y1 = min(int(np.ceil(cy + r)) + 1, hs)
    if x0 >= x1 or y0 >= y1:
        return
    xs = np.arange(x0, x1) + 0.5
    ys = np.arange(y0, y1) + 0.5
    dx = xs[None, :] - cx
    dy = ys[:, None] - cy
    mask = dx * dx + dy * dy <= r * r
    canvas[y0:y1, x0:x1][mask] = color


def _paint_segment(canvas, a, b, half_width, color, ss):
    hs, ws = canvas.shape[:2]
    ax, ay = a[0] * ss, a[1] * ss
    bx, by = b[0] * ss, b[1] * ss
    hw = half_width * ss
    x0 = max(int(np.floor(min(ax, bx) - hw)), 0)
    x1 = min(int(np.ceil(max(ax, bx) + hw)) + 1, ws)
    y0 = max(int(np.floor(min(ay, by) - hw)), 0)
    y1 = min(int(np.ceil(max(ay, by) + hw)) + 1, hs)
    if x0 >= x1 or y0 >= y1:
        return
    xs = np.arange(x0, x1) + 0.5
    ys = np.arange(y0, y1) + 0.5
    px = np.broadcast_to(xs[None, :], (y1 - y0, x1 - x0))
    py = np.broadcast_to(ys[:, None], (y1 - y0, x1 - x0))
    vx, vy = bx - ax, by - ay
    seg_len2 = vx * vx + vy * vy
    if seg_len2 < 1e-300:
        t = np.zeros_like(px)
    else:
        t = np.clip(((px - ax) * vx + (py - ay) * vy) / seg_len2, 0.0, 1.0)
    dx = px - (ax + t * vx)
    dy = py - (ay + t * vy)
    mask = dx * dx + dy * dy <= hw * hw
    canvas[y0:y1, x0:x1][mask] = color


def rasterize(frame, style, width, height):
    """Rasterize a landmark frame into a ConditionMap.

    Invisible points are skipped entirely (including their incident edges).
    """
    if width <= 0 or height <= 0:
        raise ValueError("raster dimensions must be positive")
    ss = style.supersample if style.anti_aliasing else 1
    canvas = np.empty((height * ss, width * ss, 3), dtype=np.uint8)
    canvas[:] = np.asarray(style.background, dtype=np.uint8)

    groups = frame.groups if frame.groups is not None else ("other",) * len(frame)
    vis = frame.visibility
    pts = frame.points

    if style.draw_edges:
        for a, b in frame.edges:
            if a >= len(frame) or b >= len(frame):
                continue
            if not (vis[a] and vis[b]):
                continue
            color = style.color_for(groups[a])
            _paint_segment(canvas, pts[a], pts[b], style.line_width_px / 2.0, color, ss)
    for i in range(len(frame)):
        if not vis[i]:
            continue
        _paint_disk(canvas, pts[i], style.point_radius_px, style.color_for(groups[i]), ss)

    if ss > 1:
        down = canvas.reshape(height, ss, width, ss, 3).mean(axis=(1, 3))
        out = np.rint(down).astype(np.uint8)
    else:
        out = canvas
    return ConditionMap(width, height, out)
