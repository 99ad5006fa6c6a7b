"""Camera-correctness labeling and reference-based image metrics.

Correctness follows the head-pose-delta protocol: solve PnP on the first
and last landmark frames, decompose the relative head-in-camera rotation
into yaw/pitch/roll (intrinsic Y-X-Z), measure the image-plane centroid
shift and the PnP depth ratio, and check the single signed inequality
registered for the intended motion. A strict inequality means a delta that
exactly meets a threshold is labeled incorrect.

Sign conventions (camera x right, y down, z forward):
  - pan left  -> subject centroid shifts right  (du > 0)
  - pan up    -> subject centroid shifts down   (dv > 0)
  - arc left  -> head appears turned right      (yaw < 0)
  - arc up    -> head appears tilted down       (pitch > 0)
  - zoom in   -> head-origin depth shrinks      (scale_log > 0)
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate1d

from .epipolar import pnp_solve
from .errors import DimensionMismatch, UnknownMotion
from .trajectory import CanonicalMotion

DEFAULT_TAU_PX = 5.0
DEFAULT_TAU_DEG = 3.0
DEFAULT_TAU_SCALE = 0.05

PSNR_CAP_DB = 100.0


@dataclass(frozen=True)
class PoseDelta:
    """Relative head pose between anchor and final frames.

    Rotation as yaw/pitch/roll degrees in (-180, 180], centroid shift in
    pixels, and the log of the PnP depth ratio (positive = moved closer).
    """

    yaw_deg: float
    pitch_deg: float
    roll_deg: float
    du_px: float
    dv_px: float
    scale_log: float

    def component(self, name):
        return {
            "yaw": self.yaw_deg, "pitch": self.pitch_deg, "roll": self.roll_deg,
            "du": self.du_px, "dv": self.dv_px, "scale_log": self.scale_log,
        }[name]


@dataclass(frozen=True)
class CorrectnessRule:
    """sign * delta.component(component) > threshold (strict)."""

    component: str
    sign: int
    threshold: float

    def __post_init__(self):
        if not self.threshold > 0:
            raise ValueError("rule thresholds must be positive")
        if self.sign not in (-1, 1):
            raise ValueError("rule sign must be +1 or -1")

    def holds(self, delta):
        return self.sign * delta.component(self.component) > self.threshold


def default_rules(tau_px=DEFAULT_TAU_PX, tau_deg=DEFAULT_TAU_DEG,
                  tau_scale=DEFAULT_TAU_SCALE):
    log_tau = math.log(1.0 + tau_scale)
    return {
        CanonicalMotion.PAN_LEFT: CorrectnessRule("du", +1, tau_px),
        CanonicalMotion.PAN_RIGHT: CorrectnessRule("du", -1, tau_px),
        CanonicalMotion.PAN_UP: CorrectnessRule("dv", +1, tau_px),
        CanonicalMotion.PAN_DOWN: CorrectnessRule("dv", -1, tau_px),
        CanonicalMotion.ZOOM_IN: CorrectnessRule("scale_log", +1, log_tau),
        CanonicalMotion.ZOOM_OUT: CorrectnessRule("scale_log", -1, log_tau),
        CanonicalMotion.ARC_LEFT: CorrectnessRule("yaw", -1, tau_deg),
        CanonicalMotion.ARC_RIGHT: CorrectnessRule("yaw", +1, tau_deg),
        CanonicalMotion.ARC_UP: CorrectnessRule("pitch", +1, tau_deg),
        CanonicalMotion.ARC_DOWN: CorrectnessRule("pitch", -1, tau_deg),
    }


def yxz_euler_deg(m):
    """Intrinsic Y-X-Z decomposition: R = Ry(yaw) Rx(pitch) Rz(roll)."""
    m = np.asarray(m, dtype=float)
    sp = -m[1, 2]
    pitch = math.asin(max(-1.0, min(1.0, sp)))
    if abs(sp) > 1.0 - 1e-12:
        # gimbal lock: fold roll into yaw
        yaw = math.atan2(-m[2, 0], m[0, 0])
        roll = 0.0
    else:
        yaw = math.atan2(m[0, 2], m[2, 2])
        roll = math.atan2(m[1, 0], m[1, 1])
    return tuple(np.rad2deg([yaw, pitch, roll]))


def _template_points(template):
    pts = getattr(template, "points", template)
    return np.asarray(pts, dtype=float).reshape(-1, 3)


def head_pose_delta(frame_first, frame_last, template, k):
    """Head-pose change between two landmark frames of the same subject.

    Needs at least 6 landmarks visible in both frames. Rotation comes from
    per-frame PnP; the centroid shift is measured directly in pixels over
    the commonly visible landmarks.
    """
    pts3d = _template_points(template)
    common = frame_first.visibility & frame_last.visibility
    if int(common.sum()) < 6:
        raise ValueError(
            f"need >= 6 commonly visible landmarks, got {int(common.sum())}")
    if len(pts3d) != len(frame_first.points):
        raise DimensionMismatch("template and frames disagree on landmark count")
    pose_first = pnp_solve(pts3d[common], frame_first.points[common], k)
    pose_last = pnp_solve(pts3d[common], frame_last.points[common], k)
    r_delta = pose_last.rotation.matrix @ pose_first.rotation.matrix.T
    yaw, pitch, roll = yxz_euler_deg(r_delta)
    c_first = frame_first.points[common].mean(axis=0)
    c_last = frame_last.points[common].mean(axis=0)
    z_first = float(pose_first.translation[2])
    z_last = float(pose_last.translation[2])
    return PoseDelta(
        yaw_deg=yaw, pitch_deg=pitch, roll_deg=roll,
        du_px=float(c_last[0] - c_first[0]),
        dv_px=float(c_last[1] - c_first[1]),
        scale_log=math.log(max(z_first, 1e-300) / max(z_last, 1e-300)),
    )


def correctness_label(delta, intended, rules=None):
    """Binary label: does the measured delta match the intended motion?"""
    rules = rules if rules is not None else default_rules()
    motion = CanonicalMotion.parse(intended)
    if motion not in rules:
        raise UnknownMotion(f"no correctness rule registered for {motion.value}")
    return bool(rules[motion].holds(delta))


# -- reference metrics ---------------------------------------------------------

def _check_pair(a, b):
    if a.frames.shape != b.frames.shape:
        raise DimensionMismatch(
            f"sequences differ: {a.frames.shape} vs {b.frames.shape}")


def psnr_frames(a, b):
    """Per-frame PSNR in dB; math.inf for identical frames."""
    _check_pair(a, b)
    out = []
    for fa, fb in zip(a.frames, b.frames):
        mse = float(np.mean((fa.astype(np.float64) - fb.astype(np.float64)) ** 2))
        out.append(math.inf if mse == 0.0 else 10.0 * math.log10(255.0 ** 2 / mse))
    return out


def psnr(a, b):
    """Mean PSNR over frames with the +inf sentinel capped at 100 dB."""
    vals = [min(v, PSNR_CAP_DB) for v in psnr_frames(a, b)]
    return float(np.mean(vals))


def _gaussian_kernel(size=11, sigma=1.5):
    offsets = np.arange(size) - (size - 1) / 2.0
    k = np.exp(-(offsets ** 2) / (2.0 * sigma ** 2))
    return k / k.sum()

_SSIM_KERNEL = _gaussian_kernel()
_C1 = (0.01 * 255.0) ** 2
_C2 = (0.03 * 255.0) ** 2


def _windowed(img, kernel):
    t = correlate1d(img, kernel, axis=0, mode="nearest")
    t = correlate1d(t, kernel, axis=1, mode="nearest")
    r = (len(kernel) - 1) // 2
    return t[r:-r, r:-r]


def _ssim_single(x, y):
    mu_x = _windowed(x, _SSIM_KERNEL)
    mu_y = _windowed(y, _SSIM_KERNEL)
    sxx = _windowed(x * x, _SSIM_KERNEL) - mu_x * mu_x
    syy = _windowed(y * y, _SSIM_KERNEL) - mu_y * mu_y
    sxy = _windowed(x * y, _SSIM_KERNEL) - mu_x * mu_y
    num = (2.0 * mu_x * mu_y + _C1) * (2.0 * sxy + _C2)
    den = (mu_x * mu_x + mu_y * mu_y + _C1) * (sxx + syy + _C2)
    return float(np.mean(num / den))


def ssim_frames(a, b):
    """Per-frame SSIM (11x11 Gaussian window, sigma 1.5, channel mean)."""
    _check_pair(a, b)
    if a.height < 11 or a.width < 11:
        raise DimensionMismatch("frames must be at least 11x11 for SSIM")
    out = []
    for fa, fb in zip(a.frames, b.frames):
        xa = fa.astype(np.float64)
        xb = fb.astype(np.float64)
        vals = [_ssim_single(xa[..., c], xb[..., c]) for c in range(3)]
        out.append(float(np.mean(vals)))
    return out


def ssim(a, b):
    return float(np.mean(ssim_frames(a, b)))
