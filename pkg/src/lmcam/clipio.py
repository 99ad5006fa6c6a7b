"""Clip directory format shared by datagen, the oracle, and the eval harness.

A clip is a directory of PNG frames named frame_%05d.png plus a clip.json
sidecar {width, height, fps, count}. Masks use the same frame names as
8-bit single-channel PNGs with values 0/255.
"""

import json
import os

import numpy as np
from PIL import Image

from .datagen import FrameSequence, MaskSequence
from .errors import DimensionMismatch, IOFailure, SchemaError

FRAME_PATTERN = "frame_{:05d}.png"


def write_clip(seq, directory):
    os.makedirs(directory, exist_ok=True)
    for i, frame in enumerate(seq.frames):
        Image.fromarray(frame, mode="RGB").save(
            os.path.join(directory, FRAME_PATTERN.format(i)))
    sidecar = {"width": seq.width, "height": seq.height,
               "fps": seq.fps, "count": len(seq)}
    with open(os.path.join(directory, "clip.json"), "w") as fh:
        json.dump(sidecar, fh)


def read_clip(directory):
    sidecar_path = os.path.join(directory, "clip.json")
    try:
        with open(sidecar_path) as fh:
            sidecar = json.load(fh)
    except OSError as exc:
        raise IOFailure(f"cannot read clip sidecar {sidecar_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"malformed clip sidecar {sidecar_path}: {exc}") from exc
    try:
        count = int(sidecar["count"])
        width, height = int(sidecar["width"]), int(sidecar["height"])
        fps = float(sidecar.get("fps", 30.0))
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"clip sidecar missing fields: {exc}") from exc
    frames = []
    for i in range(count):
        path = os.path.join(directory, FRAME_PATTERN.format(i))
        try:
            img = Image.open(path).convert("RGB")
        except OSError as exc:
            raise IOFailure(f"missing clip frame {path}") from exc
        arr = np.asarray(img, dtype=np.uint8)
        if arr.shape != (height, width, 3):
            raise DimensionMismatch(
                f"{path} is {arr.shape[1]}x{arr.shape[0]}, sidecar says {width}x{height}")
        frames.append(arr)
    return FrameSequence(np.stack(frames), fps=fps)


def write_masks(masks, directory):
    os.makedirs(directory, exist_ok=True)
    for i, mask in enumerate(masks.masks):
        Image.fromarray((mask * 255).astype(np.uint8), mode="L").save(
            os.path.join(directory, FRAME_PATTERN.format(i)))


def read_masks(directory, count):
    masks = []
    for i in range(count):
        path = os.path.join(directory, FRAME_PATTERN.format(i))
        try:
            img = Image.open(path).convert("L")
        except OSError as exc:
            raise IOFailure(f"missing mask frame {path}") from exc
        masks.append((np.asarray(img, dtype=np.uint8) > 127).astype(np.uint8))
    return MaskSequence(np.stack(masks))


def write_provenance(prov, directory):
    with open(os.path.join(directory, "provenance.json"), "w") as fh:
        json.dump(prov, fh, indent=2)
