"""Two-view geometry: fundamental/essential estimation, robust fitting,
pose decomposition, PnP, and triangulation.

This is the machinery behind treating image-space correspondences as a
complete description of relative camera motion: estimate F from pixel
matches, upgrade to E with known intrinsics, and decompose into [R|t]
up to an unobservable global scale.

Correspondences are passed as two (n, 2) pixel arrays (p1 in view 1,
p2 in view 2), matched row by row.
"""

from dataclasses import dataclass

import numpy as np

from .camera import EPS_DEPTH, Intrinsics, Pose, Rotation, _reorthonormalize
from .errors import (
    Degenerate,
    InsufficientInliers,
    NoConvergence,
    NoValidHypothesis,
    ParallelRays,
)
from .rng import keyed_rng

_W = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])


@dataclass(frozen=True)
class RelativePose:
    """Rotation plus translation direction; scale is unobservable."""

    rotation: Rotation
    translation_dir: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.translation_dir, dtype=float)
        n = np.linalg.norm(t)
        if abs(n - 1.0) > 1e-12:
            t = t / n
        t.setflags(write=False)
        object.__setattr__(self, "translation_dir", t)


@dataclass(frozen=True)
class RansacConfig:
    threshold_px: float = 1.0
    max_iters: int = 2000
    confidence: float = 0.999
    seed: int = 0

    def __post_init__(self):
        if not self.threshold_px > 0:
            raise ValueError("threshold_px must be positive")
        if not 0.0 < self.confidence < 1.0:
            raise ValueError("confidence must lie in (0, 1)")


def _as_points(p):
    p = np.asarray(p, dtype=float)
    if p.ndim != 2 or p.shape[1] != 2:
        raise ValueError(f"expected (n, 2) pixel array, got {p.shape}")
    return p


def _homogeneous(p):
    return np.hstack([p, np.ones((len(p), 1))])


def hartley_normalize(p):
    """Isotropic normalization: centroid at origin, mean radius sqrt(2).

    Returns (normalized (n,3) homogeneous points, 3x3 transform T).
    """
    p = _as_points(p)
    mean = p.mean(axis=0)
    d = np.linalg.norm(p - mean, axis=1).mean()
    if d < 1e-12:
        raise Degenerate("all correspondences coincide")
    s = np.sqrt(2.0) / d
    t = np.array([[s, 0.0, -s * mean[0]], [0.0, s, -s * mean[1]], [0.0, 0.0, 1.0]])
    return _homogeneous(p) @ t.T, t


def _design_matrix(h1, h2):
    # rows encode p2^T F p1 = 0 with F flattened row-major
    return np.column_stack([
        h2[:, 0] * h1[:, 0], h2[:, 0] * h1[:, 1], h2[:, 0],
        h2[:, 1] * h1[:, 0], h2[:, 1] * h1[:, 1], h2[:, 1],
        h1[:, 0], h1[:, 1], np.ones(len(h1)),
    ])


def _normalize_f(f):
    f = f / np.linalg.norm(f)
    # deterministic sign: largest-magnitude entry positive
    idx = np.unravel_index(np.argmax(np.abs(f)), f.shape)
    if f[idx] < 0:
        f = -f
    return f


def _rank2_project(f):
    u, s, vt = np.linalg.svd(f)
    return u @ np.diag([s[0], s[1], 0.0]) @ vt


def estimate_fundamental_8pt(p1, p2):
    """Normalized eight-point algorithm with rank-2 projection.

    Needs >= 8 correspondences; raises Degenerate when the design matrix
    is effectively rank deficient (condition number above 1e12).
    """
    p1, p2 = _as_points(p1), _as_points(p2)
    if len(p1) != len(p2):
        raise ValueError("correspondence arrays must have equal length")
    if len(p1) < 8:
        raise ValueError(f"need at least 8 correspondences, got {len(p1)}")
    h1, t1 = hartley_normalize(p1)
    h2, t2 = hartley_normalize(p2)
    a = _design_matrix(h1, h2)
    _, s, vt = np.linalg.svd(a, full_matrices=True)
    if s[0] / max(s[7], 1e-300) > 1e12:
        raise Degenerate("correspondences are degenerate for the 8-point solve")
    f = vt[-1].reshape(3, 3)
    f = _rank2_project(f)
    f = t2.T @ f @ t1
    return _normalize_f(f)


def estimate_fundamental_7pt(p1, p2):
    """Seven-point algorithm: 1-3 real solutions of det(F1 + x F2) = 0."""
    p1, p2 = _as_points(p1), _as_points(p2)
    if len(p1) != 7 or len(p2) != 7:
        raise ValueError("the 7-point solver takes exactly 7 correspondences")
    h1, t1 = hartley_normalize(p1)
    h2, t2 = hartley_normalize(p2)
    a = _design_matrix(h1, h2)
    _, s, vt = np.linalg.svd(a, full_matrices=True)
    if s[0] / max(s[6], 1e-300) > 1e12:
        raise Degenerate("correspondences are degenerate for the 7-point solve")
    f1 = vt[-1].reshape(3, 3)
    f2 = vt[-2].reshape(3, 3)

    # det(f1 + x f2) is cubic in x; recover coefficients by interpolation
    xs = np.array([0.0, 1.0, -1.0, 2.0])
    dets = np.array([np.linalg.det(f1 + x * f2) for x in xs])
    coeffs = np.linalg.solve(np.vander(xs, 4), dets)  # [c3, c2, c1, c0]
    if np.max(np.abs(coeffs)) < 1e-300:
        raise Degenerate("vanishing determinant polynomial")
    roots = np.roots(coeffs)
    out = []
    for r in roots:
        if abs(r.imag) > 1e-9 * (1.0 + abs(r.real)):
            continue
        f = f1 + r.real * f2
        if np.linalg.norm(f) < 1e-12:
            continue
        f = _rank2_project(f)
        f = t2.T @ f @ t1
        out.append(_normalize_f(f))
    if not out:
        raise Degenerate("no real solution to the 7-point cubic")
    return out


def epipolar_residual(f, p1, p2):
    """|p2^T F p1| per correspondence (algebraic residual)."""
    h1, h2 = _homogeneous(_as_points(p1)), _homogeneous(_as_points(p2))
    return np.abs(np.einsum("ni,ij,nj->n", h2, f, h1))


def sampson_distance(f, p1, p2):
    """First-order geometric distance to the epipolar constraint, in pixels."""
    h1, h2 = _homogeneous(_as_points(p1)), _homogeneous(_as_points(p2))
    fp1 = h1 @ f.T          # F p1  (epipolar lines in view 2)
    ftp2 = h2 @ f           # F^T p2
    num = np.einsum("ni,ni->n", h2, fp1)
    den = fp1[:, 0] ** 2 + fp1[:, 1] ** 2 + ftp2[:, 0] ** 2 + ftp2[:, 1] ** 2
    den = np.maximum(den, 1e-300)
    return np.abs(num) / np.sqrt(den)


def essential_from_fundamental(f, k1, k2):
    """E = K2^T F K1, singular values projected to (1, 1, 0)."""
    e = k2.matrix.T @ f @ k1.matrix
    u, s, vt = np.linalg.svd(e)
    return u @ np.diag([1.0, 1.0, 0.0]) @ vt


def decompose_essential(e):
    """The four (R, +-t) hypotheses of an essential matrix.

    All returned rotations are proper (det = +1); translation directions
    are unit vectors.
    """
    u, _, vt = np.linalg.svd(e)
    if np.linalg.det(u) < 0:
        u = -u
    if np.linalg.det(vt) < 0:
        vt = -vt
    r1 = Rotation(_reorthonormalize(u @ _W @ vt))
    r2 = Rotation(_reorthonormalize(u @ _W.T @ vt))
    t = u[:, 2]
    return [
        RelativePose(r1, t),
        RelativePose(r1, -t),
        RelativePose(r2, t),
        RelativePose(r2, -t),
    ]


def _triangulate_linear(pm1, pm2, p1, p2):
    """Batch DLT triangulation for projection matrices pm1/pm2, pixels (n,2)."""
    n = len(p1)
    out = np.empty((n, 3))
    for i in range(n):
        a = np.vstack([
            p1[i, 0] * pm1[2] - pm1[0],
            p1[i, 1] * pm1[2] - pm1[1],
            p2[i, 0] * pm2[2] - pm2[0],
            p2[i, 1] * pm2[2] - pm2[1],
        ])
        _, _, vt = np.linalg.svd(a)
        x = vt[-1]
        if abs(x[3]) < 1e-300:
            out[i] = np.inf
        else:
            out[i] = x[:3] / x[3]
    return out


def cheirality_select(hypotheses, p1, p2, k1, k2):
    """Pick the decomposition hypothesis with the most points in front of
    both cameras; ties broken by the larger total positive-depth margin."""
    p1, p2 = _as_points(p1), _as_points(p2)
    if len(p1) == 0:
        raise ValueError("need at least one correspondence for the depth test")
    pm1 = k1.matrix @ np.hstack([np.eye(3), np.zeros((3, 1))])
    best = None
    for idx, hyp in enumerate(hypotheses):
        rt = np.hstack([hyp.rotation.matrix, hyp.translation_dir.reshape(3, 1)])
        pm2 = k2.matrix @ rt
        x = _triangulate_linear(pm1, pm2, p1, p2)
        z1 = x[:, 2]
        z2 = (x @ hyp.rotation.matrix.T + hyp.translation_dir)[:, 2]
        front = (z1 > EPS_DEPTH) & (z2 > EPS_DEPTH) & np.all(np.isfinite(x), axis=1)
        margin = float(np.sum(np.clip(np.minimum(z1, z2), 0.0, None)[front]))
        key = (int(front.sum()), margin, -idx)
        if best is None or key > best[0]:
            best = (key, hyp)
    if best[0][0] == 0:
        raise NoValidHypothesis("no hypothesis places any point in front of both cameras")
    return best[1]


def ransac_fundamental(p1, p2, cfg=RansacConfig()):
    """Seeded RANSAC over 8-point samples with a Sampson-distance gate.

    Returns (F, inlier_mask). The final F is re-estimated from all inliers
    of the best sample model, and the mask reflects that final F. Output is
    a deterministic function of (correspondences, cfg).
    """
    p1, p2 = _as_points(p1), _as_points(p2)
    n = len(p1)
    if n < 8:
        raise ValueError(f"need at least 8 correspondences, got {n}")
    rng = keyed_rng(cfg.seed, "ransac_fundamental")
    best_count = -1
    best_mask = None
    iters_needed = cfg.max_iters
    it = 0
    while it < min(iters_needed, cfg.max_iters):
        sample = rng.choice(n, size=8, replace=False)
        try:
            f = estimate_fundamental_8pt(p1[sample], p2[sample])
        except Degenerate:
            it += 1
            continue
        mask = sampson_distance(f, p1, p2) < cfg.threshold_px
        count = int(mask.sum())
        if count > best_count:
            best_count = count
            best_mask = mask
            ratio = count / n
            if ratio > 0:
                denom = np.log1p(-min(ratio ** 8, 1.0 - 1e-12))
                iters_needed = int(np.ceil(np.log(1.0 - cfg.confidence) / denom))
        it += 1
    if best_count < 8:
        raise InsufficientInliers(
            f"best model explains only {max(best_count, 0)} correspondences")
    # re-estimate on the inlier set until the set stops changing
    mask = best_mask
    f = None
    for _ in range(10):
        f = estimate_fundamental_8pt(p1[mask], p2[mask])
        new_mask = sampson_distance(f, p1, p2) < cfg.threshold_px
        if new_mask.sum() < 8 or np.array_equal(new_mask, mask):
            break
        mask = new_mask
    final_mask = sampson_distance(f, p1, p2) < cfg.threshold_px
    return f, final_mask


def triangulate(pose1, pose2, k1, k2, p1, p2):
    """Linear (DLT) triangulation of a single correspondence.

    Raises ParallelRays when the camera centers coincide or the viewing
    rays are parallel beyond recovery.
    """
    p1 = np.asarray(p1, dtype=float).reshape(2)
    p2 = np.asarray(p2, dtype=float).reshape(2)
    c1, c2 = pose1.center, pose2.center
    if np.linalg.norm(c1 - c2) < 1e-12:
        raise ParallelRays("camera centers coincide; zero baseline")
    d1 = pose1.rotation.matrix.T @ np.linalg.solve(k1.matrix, np.array([*p1, 1.0]))
    d2 = pose2.rotation.matrix.T @ np.linalg.solve(k2.matrix, np.array([*p2, 1.0]))
    d1 /= np.linalg.norm(d1)
    d2 /= np.linalg.norm(d2)
    angle = np.arccos(np.clip(abs(float(np.dot(d1, d2))), -1.0, 1.0))
    if angle < 1e-8:
        raise ParallelRays(f"ray angle {angle:.2e} rad is below 1e-8")
    pm1 = k1.matrix @ np.hstack([pose1.rotation.matrix, pose1.translation.reshape(3, 1)])
    pm2 = k2.matrix @ np.hstack([pose2.rotation.matrix, pose2.translation.reshape(3, 1)])
    return _triangulate_linear(pm1, pm2, p1[None, :], p2[None, :])[0]


# -- PnP ----------------------------------------------------------------------

def _pnp_dlt(points3d, xn):
    """Direct linear transform for >= 6 points in normalized image coords."""
    n = len(points3d)
    a = np.zeros((2 * n, 12))
    xh = np.hstack([points3d, np.ones((n, 1))])
    a[0::2, 0:4] = xh
    a[0::2, 8:12] = -xn[:, 0:1] * xh
    a[1::2, 4:8] = xh
    a[1::2, 8:12] = -xn[:, 1:2] * xh
    _, s, vt = np.linalg.svd(a)
    if s[0] / max(s[10], 1e-300) > 1e12:
        raise Degenerate("point configuration is degenerate for the linear PnP stage")
    pm = vt[-1].reshape(3, 4)
    # fix sign so depths come out positive for the majority of points
    depths = xh @ pm[2]
    if np.sum(depths > 0) < n / 2:
        pm = -pm
    m = pm[:, :3]
    u, sv, vvt = np.linalg.svd(m)
    r = u @ vvt
    if np.linalg.det(r) < 0:
        raise Degenerate("linear PnP produced a reflection")
    scale = sv.mean()
    t = pm[:, 3] / scale
    return r, t


def _reproject_residual(r, t, points3d, pixels, k):
    xc = points3d @ r.T + t
    z = xc[:, 2]
    u = k.fx * xc[:, 0] / z + k.cx
    v = k.fy * xc[:, 1] / z + k.cy
    return np.stack([u, v], axis=1) - pixels, xc


def _skew(v):
    return np.array([[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]])


def pnp_solve(points3d, pixels, k):
    """Recover a camera pose from 3D points and their pixel projections.

    Linear DLT initialization (for >= 6 points) followed by damped
    Gauss-Newton on the total squared reprojection error, iterated until the
    relative error change drops below 1e-12 or 100 iterations.
    For 4-5 points the linear stage is skipped and refinement starts from a
    frontal guess; NoConvergence is raised if that fails to settle.
    """
    points3d = np.asarray(points3d, dtype=float).reshape(-1, 3)
    pixels = np.asarray(pixels, dtype=float).reshape(-1, 2)
    n = len(points3d)
    if n != len(pixels):
        raise ValueError("points3d and pixels must pair up")
    if n < 4:
        raise ValueError(f"PnP needs at least 4 points, got {n}")

    centered = points3d - points3d.mean(axis=0)
    sv = np.linalg.svd(centered, compute_uv=False)
    if n >= 6:
        if sv[-1] / max(sv[0], 1e-300) < 1e-6:
            raise Degenerate("3D points are coplanar/collinear beyond tolerance")
        xn = (np.hstack([pixels, np.ones((n, 1))]) @ np.linalg.inv(k.matrix).T)[:, :2]
        r, t = _pnp_dlt(points3d, xn)
    else:
        if sv[1] / max(sv[0], 1e-300) < 1e-9:
            raise Degenerate("3D points are collinear")
        # frontal guess: identity rotation, depth from the spread ratio
        spread2d = np.linalg.norm(pixels - pixels.mean(axis=0), axis=1).mean()
        spread3d = np.linalg.norm(centered[:, :2], axis=1).mean()
        depth = k.fx * spread3d / max(spread2d, 1e-12)
        r = np.eye(3)
        t = np.array([0.0, 0.0, max(depth, 1.0)]) - points3d.mean(axis=0)

    # damped Gauss-Newton (Levenberg schedule: x10 on reject, /10 on accept)
    lam = 1e-3
    res, xc = _reproject_residual(r, t, points3d, pixels, k)
    cost = float(np.sum(res ** 2))
    for _ in range(100):
        jac = np.zeros((2 * n, 6))
        for i in range(n):
            x, y, z = xc[i]
            dproj = np.array([[k.fx / z, 0.0, -k.fx * x / z ** 2],
                              [0.0, k.fy / z, -k.fy * y / z ** 2]])
            dxc = np.hstack([-_skew(r @ points3d[i]), np.eye(3)])
            jac[2 * i:2 * i + 2] = dproj @ dxc
        g = jac.T @ res.ravel()
        h = jac.T @ jac
        accepted = False
        for _ in range(30):
            try:
                delta = np.linalg.solve(h + lam * np.eye(6), -g)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            w = delta[:3]
            angle = np.linalg.norm(w)
            dr = np.eye(3) if angle < 1e-300 else Rotation.from_axis_angle(w, angle).matrix
            r_new = _reorthonormalize(dr @ r)
            t_new = t + delta[3:]
            res_new, xc_new = _reproject_residual(r_new, t_new, points3d, pixels, k)
            cost_new = float(np.sum(res_new ** 2))
            if np.isfinite(cost_new) and cost_new <= cost:
                accepted = True
                break
            lam *= 10.0
            if lam > 1e12:
                break
        if not accepted:
            break
        rel_change = abs(cost - cost_new) / max(cost, 1e-300)
        r, t, res, xc, cost = r_new, t_new, res_new, xc_new, cost_new
        lam = max(lam / 10.0, 1e-12)
        if rel_change < 1e-12:
            break

    if n < 6 and cost > max(1e-6 * n, 1e-9):
        raise NoConvergence("minimal-point refinement did not reach a consistent pose")
    if not np.all(np.isfinite(t)):
        raise NoConvergence("PnP refinement diverged")
    return Pose(Rotation(_reorthonormalize(r)), t)


# -- helpers used by the oracle and tests -------------------------------------

def relative_pose(pose1, pose2):
    """(R, t) with x2 = R x1 + t between two world-frame poses."""
    r = pose2.rotation.matrix @ pose1.rotation.matrix.T
    t = pose2.translation - r @ pose1.translation
    return _reorthonormalize(r), t


def essential_from_relative(r, t):
    """E = [t]x R for a relative pose, Frobenius-normalized to sqrt(2)."""
    e = _skew(t / np.linalg.norm(t)) @ r
    u, s, vt = np.linalg.svd(e)
    return u @ np.diag([1.0, 1.0, 0.0]) @ vt


def fundamental_from_poses(pose1, pose2, k1, k2):
    """Ground-truth F implied by two posed, calibrated views."""
    r, t = relative_pose(pose1, pose2)
    e = essential_from_relative(r, t)
    f = np.linalg.inv(k2.matrix).T @ e @ np.linalg.inv(k1.matrix)
    return _normalize_f(f)
