import numpy as np
import pytest

from lmcam.camera import Intrinsics, Pose, Rotation, project
from lmcam.epipolar import (
    RansacConfig,
    cheirality_select,
    decompose_essential,
    epipolar_residual,
    essential_from_fundamental,
    essential_from_relative,
    estimate_fundamental_7pt,
    estimate_fundamental_8pt,
    fundamental_from_poses,
    pnp_solve,
    ransac_fundamental,
    relative_pose,
    sampson_distance,
    triangulate,
)
from lmcam.errors import Degenerate, ParallelRays


def normalized_eye_intrinsics():
    # K = I: pixel coordinates are normalized camera coordinates
    return Intrinsics(fx=1.0, fy=1.0, cx=0.0, cy=0.0, width=4, height=4)


def two_view_scene(rng, n=60, img=512, fov=50.0, spread=0.8):
    """Random calibrated two-view setup observing a cloud around the origin."""
    k = Intrinsics.from_fov(fov, img, img)
    points = rng.uniform(-spread, spread, size=(n, 3))

    def random_pose():
        az = rng.uniform(-1.2, 1.2)
        el = rng.uniform(-0.5, 0.5)
        d = rng.uniform(3.5, 5.0)
        center = d * np.array([np.cos(el) * np.sin(az), np.sin(el), np.cos(el) * np.cos(az)])
        return Pose.look_at(center, [0.0, 0.0, 0.0], [0.0, 1.0, 0.0])

    pose1, pose2 = random_pose(), random_pose()
    while np.linalg.norm(pose1.center - pose2.center) < 0.5:
        pose2 = random_pose()
    p1 = project(k, pose1.transform(points))
    p2 = project(k, pose2.transform(points))
    return k, pose1, pose2, points, p1, p2


def rotation_error_deg(r_a, r_b):
    c = (np.trace(r_a.T @ r_b) - 1.0) / 2.0
    return np.rad2deg(np.arccos(np.clip(c, -1.0, 1.0)))


def test_8pt_pure_translation_skew_form():
    # R = I, t = (1, 0, 0) in normalized coordinates: F ~ [t]x
    rng = np.random.default_rng(0)
    points = rng.uniform(-0.5, 0.5, size=(40, 3)) + np.array([0.0, 0.0, 4.0])
    pose1 = Pose.identity()
    pose2 = Pose(Rotation.identity(), np.array([1.0, 0.0, 0.0]))
    k = normalized_eye_intrinsics()
    p1 = project(k, pose1.transform(points))
    p2 = project(k, pose2.transform(points))
    f = estimate_fundamental_8pt(p1, p2)
    expected = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]])
    expected /= np.linalg.norm(expected)
    sign = np.sign(np.sum(f * expected))
    assert np.max(np.abs(f - sign * expected)) < 1e-9


def test_8pt_noise_free_residuals():
    rng = np.random.default_rng(1)
    k, pose1, pose2, _, p1, p2 = two_view_scene(rng, n=100)
    f = estimate_fundamental_8pt(p1, p2)
    h1 = np.hstack([p1, np.ones((len(p1), 1))])
    h2 = np.hstack([p2, np.ones((len(p2), 1))])
    res = epipolar_residual(f, p1, p2)
    normed = res / (np.linalg.norm(h1, axis=1) * np.linalg.norm(h2, axis=1))
    assert np.max(normed) < 1e-10
    assert np.max(sampson_distance(f, p1, p2)) < 1e-8


def test_8pt_too_few_points():
    pts = np.random.default_rng(2).uniform(0, 100, size=(7, 2))
    with pytest.raises(ValueError):
        estimate_fundamental_8pt(pts, pts + 1.0)


def test_8pt_degenerate_identical_points():
    p = np.tile(np.array([[10.0, 20.0]]), (9, 1))
    p[0] += 1e-9
    with pytest.raises(Degenerate):
        estimate_fundamental_8pt(p, p)


def test_7pt_recovers_truth_noise_free():
    rng = np.random.default_rng(3)
    for _ in range(20):
        k, pose1, pose2, _, p1, p2 = two_view_scene(rng, n=7)
        sols = estimate_fundamental_7pt(p1, p2)
        assert 1 <= len(sols) <= 3
        h1 = np.hstack([p1, np.ones((7, 1))])
        h2 = np.hstack([p2, np.ones((7, 1))])
        norms = np.linalg.norm(h1, axis=1) * np.linalg.norm(h2, axis=1)
        best = min(np.max(epipolar_residual(f, p1, p2) / norms) for f in sols)
        assert best < 1e-8


def test_7pt_duplicated_point_is_degenerate():
    rng = np.random.default_rng(4)
    _, _, _, _, p1, p2 = two_view_scene(rng, n=7)
    p1[6] = p1[5]
    p2[6] = p2[5]
    with pytest.raises(Degenerate):
        estimate_fundamental_7pt(p1, p2)


def test_7pt_wrong_count():
    pts = np.zeros((8, 2))
    with pytest.raises(ValueError):
        estimate_fundamental_7pt(pts, pts)


def test_essential_from_fundamental_identity_K():
    rng = np.random.default_rng(5)
    k = normalized_eye_intrinsics()
    points = rng.uniform(-0.4, 0.4, size=(30, 3)) + np.array([0.0, 0.0, 4.0])
    pose1 = Pose.identity()
    pose2 = Pose.look_at([1.0, 0.3, -0.5], [0.0, 0.0, 4.0], [0.0, 1.0, 0.0])
    p1 = project(k, pose1.transform(points))
    p2 = project(k, pose2.transform(points))
    f = estimate_fundamental_8pt(p1, p2)
    e = essential_from_fundamental(f, k, k)
    # with K = I, E is F with singular values snapped to (1, 1, 0)
    fu, fs, fvt = np.linalg.svd(f)
    f_projected = fu @ np.diag([1.0, 1.0, 0.0]) @ fvt
    sign = np.sign(np.sum(e * f_projected))
    assert np.max(np.abs(e - sign * f_projected)) < 1e-9


def test_essential_projection_idempotent():
    rng = np.random.default_rng(6)
    k, pose1, pose2, _, p1, p2 = two_view_scene(rng)
    f = estimate_fundamental_8pt(p1, p2)
    e1 = essential_from_fundamental(f, k, k)
    u, s, vt = np.linalg.svd(e1)
    e2 = u @ np.diag([1.0, 1.0, 0.0]) @ vt
    assert np.max(np.abs(e1 - e2)) < 1e-12


def test_decompose_essential_canonical():
    e = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])  # [t]x, t=(0,0,1)
    hyps = decompose_essential(e)
    assert len(hyps) == 4
    for h in hyps:
        assert abs(np.linalg.det(h.rotation.matrix) - 1.0) < 1e-12
    found = [h for h in hyps
             if np.max(np.abs(h.rotation.matrix - np.eye(3))) < 1e-9
             and abs(abs(h.translation_dir[2]) - 1.0) < 1e-9]
    assert found


def test_full_pipeline_recovers_relative_pose():
    rng = np.random.default_rng(7)
    for _ in range(10):
        k, pose1, pose2, _, p1, p2 = two_view_scene(rng)
        f = estimate_fundamental_8pt(p1, p2)
        e = essential_from_fundamental(f, k, k)
        hyps = decompose_essential(e)
        chosen = cheirality_select(hyps, p1, p2, k, k)
        r_true, t_true = relative_pose(pose1, pose2)
        assert rotation_error_deg(chosen.rotation.matrix, r_true) < 1e-4
        t_dir = t_true / np.linalg.norm(t_true)
        assert float(np.dot(chosen.translation_dir, t_dir)) > 1.0 - 1e-8


def test_exactly_one_hypothesis_fully_cheiral():
    rng = np.random.default_rng(8)
    k, pose1, pose2, points, p1, p2 = two_view_scene(rng, n=40)
    r_true, t_true = relative_pose(pose1, pose2)
    e = essential_from_relative(r_true, t_true)
    hyps = decompose_essential(e)
    full_front = 0
    for h in hyps:
        x1 = pose1.transform(points)
        x2 = x1 @ h.rotation.matrix.T + h.translation_dir
        # triangulated depth sign equals true depth sign for noise-free data
        if np.all(x1[:, 2] > 0) and np.all(x2[:, 2] > 0):
            full_front += 1
    assert full_front == 1


def test_cheirality_single_correspondence():
    rng = np.random.default_rng(9)
    k, pose1, pose2, points, p1, p2 = two_view_scene(rng, n=1, spread=0.01)
    r_true, t_true = relative_pose(pose1, pose2)
    e = essential_from_relative(r_true, t_true)
    chosen = cheirality_select(decompose_essential(e), p1, p2, k, k)
    assert rotation_error_deg(chosen.rotation.matrix, r_true) < 1e-4


def test_cheirality_empty_correspondences():
    e = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
    k = normalized_eye_intrinsics()
    with pytest.raises(ValueError):
        cheirality_select(decompose_essential(e), np.zeros((0, 2)), np.zeros((0, 2)), k, k)


def test_ransac_clean_data_all_inliers():
    rng = np.random.default_rng(10)
    k, pose1, pose2, _, p1, p2 = two_view_scene(rng, n=50)
    f_direct = estimate_fundamental_8pt(p1, p2)
    f, mask = ransac_fundamental(p1, p2, RansacConfig(seed=1))
    assert mask.all()
    sign = np.sign(np.sum(f * f_direct))
    assert np.max(np.abs(f - sign * f_direct)) < 1e-9


def test_ransac_deterministic():
    rng = np.random.default_rng(11)
    k, pose1, pose2, _, p1, p2 = two_view_scene(rng, n=60)
    out = rng.uniform(0, 512, size=(20, 2))
    p2_noisy = np.vstack([p2, out])
    p1_noisy = np.vstack([p1, rng.uniform(0, 512, size=(20, 2))])
    f_a, mask_a = ransac_fundamental(p1_noisy, p2_noisy, RansacConfig(seed=42))
    f_b, mask_b = ransac_fundamental(p1_noisy, p2_noisy, RansacConfig(seed=42))
    assert np.array_equal(mask_a, mask_b)
    assert np.array_equal(f_a, f_b)


def test_ransac_with_outliers_recovers_pose():
    rng = np.random.default_rng(12)
    k, pose1, pose2, _, p1, p2 = two_view_scene(rng, n=80)
    n_out = 24
    idx = rng.choice(len(p1), size=n_out, replace=False)
    p2 = p2.copy()
    p2[idx] = rng.uniform(0, 512, size=(n_out, 2))
    p1 = p1 + rng.normal(0, 0.5, size=p1.shape)
    p2 = p2 + rng.normal(0, 0.5, size=p2.shape)
    f, mask = ransac_fundamental(p1, p2, RansacConfig(threshold_px=2.0, seed=7))
    e = essential_from_fundamental(f, k, k)
    chosen = cheirality_select(decompose_essential(e), p1[mask], p2[mask], k, k)
    r_true, _ = relative_pose(pose1, pose2)
    assert rotation_error_deg(chosen.rotation.matrix, r_true) < 0.5


def test_ransac_inlier_count_monotone_in_threshold():
    rng = np.random.default_rng(13)
    _, _, _, _, p1, p2 = two_view_scene(rng, n=60)
    p2 = p2 + rng.normal(0, 1.0, size=p2.shape)
    counts = []
    for thr in (0.5, 1.0, 2.0, 4.0, 8.0):
        _, mask = ransac_fundamental(p1, p2, RansacConfig(threshold_px=thr, seed=3))
        counts.append(int(mask.sum()))
    assert all(a <= b for a, b in zip(counts, counts[1:]))


def test_pnp_identity_pose():
    rng = np.random.default_rng(14)
    k = Intrinsics.from_fov(50.0, 512, 512)
    pts = rng.uniform(-0.5, 0.5, size=(30, 3))
    pose_true = Pose(Rotation.identity(), np.array([0.0, 0.0, 2.0]))
    pixels = project(k, pose_true.transform(pts))
    pose = pnp_solve(pts, pixels, k)
    assert rotation_error_deg(pose.rotation.matrix, np.eye(3)) < np.rad2deg(1e-6)
    assert np.linalg.norm(pose.translation - [0, 0, 2]) / 2.0 < 1e-8


def test_pnp_random_poses_noise_free():
    rng = np.random.default_rng(15)
    k = Intrinsics.from_fov(45.0, 640, 480)
    for _ in range(25):
        pts = rng.uniform(-0.6, 0.6, size=(20, 3))
        q = rng.normal(size=4)
        rot = Rotation.from_quat(q / np.linalg.norm(q))
        t = rng.normal(size=3)
        t[2] = abs(t[2]) + 3.0
        pose_true = Pose(rot, t)
        pixels = project(k, pose_true.transform(pts))
        pose = pnp_solve(pts, pixels, k)
        err_rad = np.deg2rad(rotation_error_deg(pose.rotation.matrix, rot.matrix))
        assert err_rad < 1e-6
        assert np.linalg.norm(pose.translation - t) / np.linalg.norm(t) < 1e-8


def test_pnp_scale_covariance():
    rng = np.random.default_rng(16)
    k = Intrinsics.from_fov(50.0, 512, 512)
    pts = rng.uniform(-0.5, 0.5, size=(25, 3))
    pose_true = Pose(Rotation.from_axis_angle([0.2, 1.0, 0.1], 0.4),
                     np.array([0.1, -0.2, 3.0]))
    pixels = project(k, pose_true.transform(pts))
    for alpha in (0.01, 0.5, 7.0, 400.0):
        pose = pnp_solve(alpha * pts, pixels, k)
        assert rotation_error_deg(pose.rotation.matrix, pose_true.rotation.matrix) < 1e-6
        expected_t = alpha * pose_true.translation
        assert np.linalg.norm(pose.translation - expected_t) / np.linalg.norm(expected_t) < 1e-8


def test_pnp_too_few_points():
    k = Intrinsics.from_fov(50.0, 512, 512)
    with pytest.raises(ValueError):
        pnp_solve(np.zeros((3, 3)), np.zeros((3, 2)), k)


def test_pnp_coplanar_degenerate():
    rng = np.random.default_rng(17)
    k = Intrinsics.from_fov(50.0, 512, 512)
    pts = rng.uniform(-0.5, 0.5, size=(20, 3))
    pts[:, 2] = 0.0
    pose_true = Pose(Rotation.identity(), np.array([0.0, 0.0, 2.0]))
    pixels = project(k, pose_true.transform(pts))
    with pytest.raises(Degenerate):
        pnp_solve(pts, pixels, k)


def test_triangulate_symmetric_stereo_midline():
    k = Intrinsics.from_fov(50.0, 512, 512)
    pose1 = Pose.look_at([-1.0, 0.0, -4.0], [0.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    pose2 = Pose.look_at([1.0, 0.0, -4.0], [0.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    x = np.array([0.0, 0.3, 0.2])  # on the x = 0 bisecting plane
    p1 = project(k, pose1.transform(x))
    p2 = project(k, pose2.transform(x))
    rec = triangulate(pose1, pose2, k, k, p1, p2)
    assert abs(rec[0]) < 1e-9
    assert np.max(np.abs(rec - x)) < 1e-8


def test_triangulate_roundtrip_and_reprojection():
    rng = np.random.default_rng(18)
    k, pose1, pose2, points, p1, p2 = two_view_scene(rng, n=15)
    for i in range(len(points)):
        rec = triangulate(pose1, pose2, k, k, p1[i], p2[i])
        assert np.max(np.abs(rec - points[i])) < 1e-8
        assert np.max(np.abs(project(k, pose1.transform(rec)) - p1[i])) < 1e-6
        assert np.max(np.abs(project(k, pose2.transform(rec)) - p2[i])) < 1e-6


def test_triangulate_zero_baseline():
    k = Intrinsics.from_fov(50.0, 512, 512)
    pose = Pose.look_at([0.0, 0.0, -3.0], [0.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    with pytest.raises(ParallelRays):
        triangulate(pose, pose, k, k, [256.0, 256.0], [256.0, 256.0])


def test_ground_truth_fundamental_satisfies_constraint():
    rng = np.random.default_rng(19)
    k, pose1, pose2, _, p1, p2 = two_view_scene(rng, n=50)
    f = fundamental_from_poses(pose1, pose2, k, k)
    h1 = np.hstack([p1, np.ones((len(p1), 1))])
    h2 = np.hstack([p2, np.ones((len(p2), 1))])
    res = epipolar_residual(f, p1, p2)
    normed = res / (np.linalg.norm(h1, axis=1) * np.linalg.norm(h2, axis=1))
    assert np.max(normed) < 1e-10
