"""Config-file handling for raster style and eval thresholds.

Accepts JSON or TOML files of the shape:

    {"raster": {"point_radius_px": 2.0, "line_width_px": 1.5,
                "anti_aliasing": true, "background": [0, 0, 0],
                "colors": {"lips": [255, 60, 110]}},
     "eval": {"tau_px": 5.0, "tau_deg": 3.0, "tau_scale": 0.05}}
"""

import json
import os

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from .errors import IOFailure, SchemaError
from .raster import GROUP_COLORS, RasterStyle

DEFAULT_SEED_ENV = "LMCAM_SEED"


def default_seed():
    raw = os.environ.get(DEFAULT_SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError as exc:
        raise SchemaError(f"{DEFAULT_SEED_ENV} must be an integer, got {raw!r}") from exc


def load_config(path):
    if path is None:
        return {}
    try:
        if str(path).endswith(".toml"):
            with open(path, "rb") as fh:
                return tomllib.load(fh)
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise IOFailure(f"cannot read config {path}: {exc}") from exc
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise SchemaError(f"malformed config {path}: {exc}") from exc


def style_from_config(cfg):
    raster = dict(cfg.get("raster", {}))
    colors = dict(GROUP_COLORS)
    for group, rgb in raster.pop("colors", {}).items():
        colors[group] = tuple(int(v) for v in rgb)
    kwargs = {}
    for key in ("point_radius_px", "line_width_px", "anti_aliasing",
                "supersample", "draw_edges"):
        if key in raster:
            kwargs[key] = raster[key]
    if "background" in raster:
        kwargs["background"] = tuple(int(v) for v in raster["background"])
    try:
        return RasterStyle(colors=colors, **kwargs)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"invalid raster config: {exc}") from exc


def thresholds_from_config(cfg):
    ev = cfg.get("eval", {})
    try:
        return {
            "tau_px": float(ev.get("tau_px", 5.0)),
            "tau_deg": float(ev.get("tau_deg", 3.0)),
            "tau_scale": float(ev.get("tau_scale", 0.05)),
        }
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"invalid eval thresholds: {exc}") from exc
