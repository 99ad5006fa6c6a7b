import math

import numpy as np
import pytest

from lmcam.camera import Intrinsics
from lmcam.datagen import FrameSequence
from lmcam.errors import DimensionMismatch, UnknownMotion
from lmcam.evalharness import (
    CorrectnessRule,
    PoseDelta,
    correctness_label,
    default_rules,
    head_pose_delta,
    psnr,
    psnr_frames,
    ssim,
    yxz_euler_deg,
)
from lmcam.landmarks import LandmarkFrame2D
from lmcam.oracle import animate, make_head
from lmcam.oracle import render_trajectory
from lmcam.trajectory import canonical_trajectory, default_base_keyframe, sample


def render_motion(motion, frames=21, magnitude=None, size=128):
    head = make_head(seed=0)
    scene = animate(head, f=frames)
    traj = canonical_trajectory(motion, default_base_keyframe(distance=2.0),
                                frames=frames, magnitude=magnitude,
                                width=size, height=size)
    poses, intr = sample(traj, frames, width=size, height=size)
    _, lm_frames, _ = render_trajectory(scene, poses, intr)
    return head, lm_frames, intr[0]


def test_zero_delta_on_identical_frames():
    head, frames, k = render_motion("zoom-in", frames=3)
    delta = head_pose_delta(frames[0], frames[0], head.template, k)
    assert abs(delta.yaw_deg) < 1e-9
    assert abs(delta.pitch_deg) < 1e-9
    assert abs(delta.roll_deg) < 1e-9
    assert abs(delta.du_px) < 1e-9 and abs(delta.dv_px) < 1e-9
    assert abs(delta.scale_log) < 1e-9


def test_arc_left_yaw_delta_matches_orbit():
    head, frames, k = render_motion("arc-left", magnitude=30.0)
    delta = head_pose_delta(frames[0], frames[-1], head.template, k)
    assert abs(delta.yaw_deg - (-30.0)) < 0.1


def test_too_few_visible_landmarks():
    head, frames, k = render_motion("pan-left", frames=2)
    vis = np.zeros(len(frames[0]), dtype=bool)
    vis[:3] = True
    poor = LandmarkFrame2D(frames[0].points, vis)
    with pytest.raises(ValueError):
        head_pose_delta(poor, poor, head.template, k)


def test_delta_invariant_to_template_scale():
    head, frames, k = render_motion("arc-right", magnitude=20.0)
    base = head_pose_delta(frames[0], frames[-1], head.template, k)
    for alpha in (0.05, 3.0, 250.0):
        scaled = head_pose_delta(frames[0], frames[-1],
                                 alpha * head.template.points, k)
        assert abs(scaled.yaw_deg - base.yaw_deg) < 1e-6
        assert abs(scaled.du_px - base.du_px) < 1e-6
        assert abs(scaled.scale_log - base.scale_log) < 1e-8


def test_correctness_zero_delta_all_false():
    zero = PoseDelta(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    for motion in ("pan-left", "pan-right", "pan-up", "pan-down", "zoom-in",
                   "zoom-out", "arc-left", "arc-right", "arc-up", "arc-down"):
        assert correctness_label(zero, motion) is False


def test_correctness_strict_inequality_at_threshold():
    rules = default_rules(tau_px=5.0)
    exact = PoseDelta(0.0, 0.0, 0.0, 5.0, 0.0, 0.0)
    assert correctness_label(exact, "pan-left", rules) is False
    above = PoseDelta(0.0, 0.0, 0.0, 5.0 + 1e-9, 0.0, 0.0)
    assert correctness_label(above, "pan-left", rules) is True


def test_correctness_unknown_motion():
    zero = PoseDelta(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    with pytest.raises(UnknownMotion):
        correctness_label(zero, "spiral-up")


def test_rule_validation():
    with pytest.raises(ValueError):
        CorrectnessRule("du", +1, 0.0)
    with pytest.raises(ValueError):
        CorrectnessRule("du", 2, 1.0)


def test_yxz_euler_roundtrip():
    from lmcam.camera import Rotation

    rng = np.random.default_rng(0)
    for _ in range(50):
        yaw, pitch, roll = rng.uniform(-60, 60, size=3)
        m = (Rotation.from_axis_angle([0, 1, 0], np.deg2rad(yaw)).compose(
            Rotation.from_axis_angle([1, 0, 0], np.deg2rad(pitch)).compose(
                Rotation.from_axis_angle([0, 0, 1], np.deg2rad(roll))))).matrix
        y2, p2, r2 = yxz_euler_deg(m)
        assert abs(y2 - yaw) < 1e-9
        assert abs(p2 - pitch) < 1e-9
        assert abs(r2 - roll) < 1e-9


def noise_seq(t=3, h=24, w=24, seed=0):
    rng = np.random.default_rng(seed)
    return FrameSequence(
        rng.integers(0, 256, size=(t, h, w, 3), dtype=np.int64).astype(np.uint8))


def test_psnr_identity_sentinel():
    a = noise_seq()
    per_frame = psnr_frames(a, a)
    assert all(v == math.inf for v in per_frame)
    assert psnr(a, a) == 100.0


def test_ssim_identity_exact():
    a = noise_seq(h=32, w=32)
    assert ssim(a, a) == 1.0


def test_psnr_uniform_offset_closed_form():
    base = np.full((2, 32, 32, 3), 100, dtype=np.uint8)
    a = FrameSequence(base)
    b = FrameSequence(base + np.uint8(10))
    expected = 10.0 * math.log10(255.0 ** 2 / 100.0)
    assert abs(psnr(a, b) - expected) < 1e-6
    assert abs(expected - 28.130803608679344) < 1e-9


def test_metric_symmetry():
    a, b = noise_seq(seed=1, h=32, w=32), noise_seq(seed=2, h=32, w=32)
    assert psnr(a, b) == psnr(b, a)
    assert abs(ssim(a, b) - ssim(b, a)) < 1e-12


def test_metrics_dimension_mismatch():
    a = noise_seq(t=3)
    b = noise_seq(t=4)
    with pytest.raises(DimensionMismatch):
        psnr(a, b)
    c = noise_seq(t=3, h=16, w=24)
    with pytest.raises(DimensionMismatch):
        ssim(a, c)


def test_ssim_less_than_one_for_different_images():
    a, b = noise_seq(seed=3, h=32, w=32), noise_seq(seed=4, h=32, w=32)
    assert ssim(a, b) < 0.5
