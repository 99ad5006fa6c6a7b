import numpy as np
import pytest

from lmcam.camera import Intrinsics, Pose, Rotation, project
from lmcam.errors import InvalidMagnitude, SchemaError, UnknownMotion
from lmcam.trajectory import (
    CameraKeyframe,
    CanonicalMotion,
    Trajectory,
    canonical_trajectory,
    default_base_keyframe,
    interpolate,
    load_trajectory,
    sample,
    save_trajectory,
    trajectory_from_dict,
    trajectory_to_dict,
)


def kf_at(center, time, fov=40.0, target=(0, 0, 0)):
    return CameraKeyframe(Pose.look_at(center, target, [0, 1, 0]), fov, time)


def test_interpolate_endpoints_bit_exact():
    a = kf_at([0, 0, 2], 0.0)
    b = kf_at([1, 0.5, 2], 1.0, fov=55.0)
    assert interpolate(a, b, 0.0) is a
    assert interpolate(a, b, 1.0) is b


def test_interpolate_constant_path():
    a = kf_at([0, 0, 2], 0.0)
    for s in (0.0, 0.25, 0.5, 0.99):
        out = interpolate(a, a, s)
        assert np.max(np.abs(out.pose.rotation.matrix - a.pose.rotation.matrix)) < 1e-12
        assert np.max(np.abs(out.pose.center - a.pose.center)) < 1e-12


def test_interpolate_rotation_halfway():
    rot90 = Rotation.from_axis_angle([0, 0, 1], np.pi / 2)
    a = CameraKeyframe(Pose(Rotation.identity(), np.array([0.0, 0.0, 2.0])), 40.0, 0.0)
    b = CameraKeyframe(Pose(rot90, np.array([0.0, 0.0, 2.0])), 40.0, 1.0)
    mid = interpolate(a, b, 0.5)
    expected = Rotation.from_axis_angle([0, 0, 1], np.pi / 4).matrix
    assert np.max(np.abs(mid.pose.rotation.matrix - expected)) < 1e-12


def test_sample_two_keyframes_exact_endpoints():
    a, b = kf_at([0, 0, 2], 0.0), kf_at([1, 0, 2], 1.0)
    traj = Trajectory(keyframes=(a, b))
    poses, intr = sample(traj, 2)
    assert poses[0] is a.pose and poses[1] is b.pose
    assert len(intr) == 2


def test_sample_81_frames():
    a, b = kf_at([0, 0, 2], 0.0), kf_at([0.5, 0.2, 2.2], 1.0)
    traj = Trajectory(keyframes=(a, b))
    poses, _ = sample(traj, 81)
    assert len(poses) == 81
    assert np.max(np.abs(poses[0].center - a.pose.center)) < 1e-12
    assert np.max(np.abs(poses[-1].center - b.pose.center)) < 1e-12


def test_sample_nested_refinement():
    a = kf_at([0, 0, 2], 0.0)
    b = kf_at([0.4, 0.1, 2.5], 0.37)
    c = kf_at([-0.3, 0.3, 1.8], 1.0)
    traj = Trajectory(keyframes=(a, b, c))
    f = 9
    coarse, _ = sample(traj, f)
    fine, _ = sample(traj, 2 * f - 1)
    for j in range(f):
        assert np.max(np.abs(coarse[j].rotation.matrix - fine[2 * j].rotation.matrix)) < 1e-12
        assert np.max(np.abs(coarse[j].translation - fine[2 * j].translation)) < 1e-12


def test_sample_single_keyframe_replicates():
    a = kf_at([0, 0, 2], 0.0)
    traj = Trajectory(keyframes=(a,))
    poses, _ = sample(traj, 5)
    assert all(p is a.pose for p in poses)


def test_time_reversal_symmetry():
    kfs = [kf_at([0, 0, 2], 0.0), kf_at([0.5, 0.1, 2.4], 0.3),
           kf_at([-0.2, 0.4, 1.7], 1.0)]
    fwd = Trajectory(keyframes=tuple(kfs))
    rev_kfs = tuple(
        CameraKeyframe(k.pose, k.fov_deg, 1.0 - k.time) for k in reversed(kfs))
    rev = Trajectory(keyframes=rev_kfs)
    f = 11
    a, _ = sample(fwd, f)
    b, _ = sample(rev, f)
    for j in range(f):
        assert np.max(np.abs(a[j].rotation.matrix - b[f - 1 - j].rotation.matrix)) < 1e-12
        assert np.max(np.abs(a[j].translation - b[f - 1 - j].translation)) < 1e-12


def test_keyframe_times_strictly_increasing():
    a, b = kf_at([0, 0, 2], 0.5), kf_at([1, 0, 2], 0.5)
    with pytest.raises(ValueError):
        Trajectory(keyframes=(a, b))


def test_canonical_zoom_zero_magnitude():
    with pytest.raises(InvalidMagnitude):
        canonical_trajectory("zoom-in", default_base_keyframe(), frames=10, magnitude=0.0)


def test_unknown_motion():
    with pytest.raises(UnknownMotion):
        CanonicalMotion.parse("dolly-roll")


def test_arc_left_orbit_radius_and_azimuth():
    base = default_base_keyframe(distance=2.0)
    traj = canonical_trajectory("arc-left", base, frames=41, magnitude=30.0)
    poses, _ = sample(traj, 41)
    for pose in poses:
        assert abs(np.linalg.norm(pose.center) - 2.0) < 1e-9
    final = poses[-1].center
    azimuth = np.rad2deg(np.arctan2(final[0], final[2]))
    assert abs(azimuth - (-30.0)) < 1e-9


def test_arc_keeps_pivot_on_optical_axis():
    base = default_base_keyframe(distance=2.0)
    k = Intrinsics.from_fov(base.fov_deg, 512, 512)
    for motion in ("arc-left", "arc-right", "arc-up", "arc-down"):
        traj = canonical_trajectory(motion, base, frames=15, magnitude=25.0)
        poses, _ = sample(traj, 15)
        for pose in poses:
            uv = project(k, pose.transform([0.0, 0.0, 0.0]))
            assert np.max(np.abs(uv - [k.cx, k.cy])) < 1e-6


def test_pan_left_drifts_subject_right():
    base = default_base_keyframe(distance=2.0)
    traj = canonical_trajectory("pan-left", base, frames=12, magnitude=0.25)
    poses, intr = sample(traj, 12)
    us = [project(intr[i], poses[i].transform([0.0, 0.0, 0.0]))[0]
          for i in range(12)]
    assert all(a < b for a, b in zip(us, us[1:]))
    # total drift is the requested fraction of the image width
    assert abs((us[-1] - us[0]) - 0.25 * 512) < 1e-6


def test_zoom_in_shrinks_distance_by_ratio():
    base = default_base_keyframe(distance=2.0)
    traj = canonical_trajectory("zoom-in", base, frames=5, magnitude=1.25)
    poses, _ = sample(traj, 5)
    assert abs(np.linalg.norm(poses[0].center) - 2.0) < 1e-12
    assert abs(np.linalg.norm(poses[-1].center) - 2.0 / 1.25) < 1e-12


def test_trajectory_file_roundtrip(tmp_path):
    base = default_base_keyframe(distance=2.0)
    traj = canonical_trajectory("arc-right", base, frames=7, magnitude=20.0)
    path = tmp_path / "traj.json"
    save_trajectory(traj, path)
    loaded = load_trajectory(path)
    assert loaded.width == traj.width and loaded.height == traj.height
    assert len(loaded.keyframes) == len(traj.keyframes)
    for a, b in zip(traj.keyframes, loaded.keyframes):
        assert np.max(np.abs(a.pose.rotation.matrix - b.pose.rotation.matrix)) < 1e-9
        assert np.max(np.abs(a.pose.center - b.pose.center)) < 1e-9
        assert abs(a.fov_deg - b.fov_deg) < 1e-12


def test_trajectory_dict_schema_errors():
    with pytest.raises(SchemaError):
        trajectory_from_dict({"keyframes": []})
    with pytest.raises(SchemaError):
        trajectory_from_dict({"image": {"w": 10, "h": 10}, "keyframes": [{}]})
    good = trajectory_to_dict(canonical_trajectory("pan-up", default_base_keyframe(), 5))
    assert trajectory_from_dict(good)


def test_opposite_motions():
    assert CanonicalMotion.PAN_LEFT.opposite == CanonicalMotion.PAN_RIGHT
    assert CanonicalMotion.ZOOM_OUT.opposite == CanonicalMotion.ZOOM_IN
    assert CanonicalMotion.ARC_DOWN.opposite == CanonicalMotion.ARC_UP
