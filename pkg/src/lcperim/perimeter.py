"""Boundary measure of convex bodies under log-concave measures.

The perimeter of a convex body A under a measure with density f is the
boundary integral of f over the facets of A (equivalently the Minkowski
content; the two agree for convex bodies whenever the density is continuous
on its support).  Three evaluation routes are provided:

* ``exact-clip``   for uniform measures on polytopes: each facet of A is
  clipped against the support body inside its own hyperplane and re-measured,
  giving a quadrature-free exact value;
* ``facet-mc``     Monte-Carlo facet integrals (samples split by facet area);
* ``sphere-mc``    spherical quadrature for Euclidean balls.

Densities with a jump across the support boundary (uniform measures) are
integrated with their inside value; that convention is what makes the
perimeter of the support itself equal the isotropic constant times the
surface area.  The independent finite-difference estimator ``perimeter_fd``
cross-checks the boundary integral on bodies whose boundary stays inside the
support.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import bodies
from .bodies import Ball, ConvexBody, HPolytope, unit_ball_volume
from .estimation import (
    Estimate,
    SampleBank,
    SamplerConfig,
    estimate_facet_integral,
    estimate_prob,
    sphere_directions,
    tag_seed,
    _rng,
)
from .measures import Measure, Measure1D, UniformBody, moments

_CLIP_WORK_CAP = 80_000


@dataclass
class PerimeterResult:
    value: float
    stderr: float
    method: str
    samples: int = 0
    seed: int = 0
    measure_id: str = ""
    body_id: str = ""
    warnings: list = field(default_factory=list)

    def as_estimate(self) -> Estimate:
        return Estimate(self.value, self.stderr, self.samples, self.seed, self.method)


def _body_id(A: ConvexBody) -> str:
    return f"{type(A).__name__.lower()}{A.dim}"


def _measure_id(mu: Measure) -> str:
    return f"{type(mu).__name__.lower()}{mu.dim}"


def perimeter(
    mu: Measure,
    A: ConvexBody,
    cfg: SamplerConfig | None = None,
    method: str = "auto",
) -> PerimeterResult:
    """mu-perimeter of a convex body A (facet route or spherical route)."""
    cfg = cfg or SamplerConfig()
    res = None
    if isinstance(A, Ball):
        res = _perimeter_sphere(mu, A, cfg)
    elif not A.is_polytopal():
        raise bodies.BodyError("perimeter needs a polytopal body or a ball")
    else:
        if method == "auto":
            method = "exact-clip" if _exact_clip_applicable(mu, A) else "facet-mc"
        if method == "exact-clip":
            try:
                res = _perimeter_uniform_exact(mu, A)
            except bodies.CapExceededError:
                method = "facet-mc"
        if res is None:
            if method != "facet-mc":
                raise ValueError(f"unknown perimeter method {method!r}")
            res = _perimeter_facet_mc(mu, A, cfg)
    res.measure_id = _measure_id(mu)
    res.body_id = _body_id(A)
    return res


def _exact_clip_applicable(mu: Measure, A: ConvexBody) -> bool:
    if not isinstance(mu, UniformBody):
        return False
    K = mu.body
    if not (K.is_polytopal() and A.is_polytopal()):
        return False
    try:
        hA = A.to_hpolytope()
        hK = K.to_hpolytope()
    except bodies.BodyError:
        return False
    # Facets entirely inside the support are re-used as-is (no clipping work),
    # which covers A contained in K in any dimension.  Genuine clipping builds
    # an (n-1)-dimensional chart polytope per protruding facet, so gate that
    # path by its enumeration cost.
    if bool(np.all(hK.contains(hA.vertices()))):
        return True
    n = A.dim
    mA, mK = hA.A.shape[0], hK.A.shape[0]
    return math.comb(min(mA - 1 + mK, 60), max(n - 1, 1)) <= _CLIP_WORK_CAP


def _chart_basis(normal: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the hyperplane orthogonal to ``normal`` (n x n-1)."""
    n = normal.shape[0]
    M = np.concatenate([normal[:, None], np.eye(n)], axis=1)
    Q = np.linalg.qr(M)[0]
    return Q[:, 1:n]


def _clipped_facet_area(facet: bodies.Facet, hA: HPolytope, hK: HPolytope) -> float:
    """(n-1)-volume of facet ∩ K, measured inside the facet's hyperplane."""
    n = hA.dim
    inside = hK.contains(facet.vertices)
    if np.all(inside):
        return facet.area
    if n == 1:
        return 0.0  # single endpoint outside the support
    x0 = facet.vertices[0]
    Bc = _chart_basis(facet.normal)
    rows = []
    offs = []
    for H in (hA, hK):
        Ac = H.A @ Bc
        bc = H.b - H.A @ x0
        norms = np.linalg.norm(Ac, axis=1)
        live = norms > 1e-10
        if np.any(~live & (bc < -1e-9)):
            return 0.0  # hyperplane misses that system entirely
        rows.append(Ac[live])
        offs.append(bc[live])
    Ac = np.concatenate(rows, axis=0)
    bc = np.concatenate(offs)
    try:
        chart = HPolytope(Ac, bc)
    except (bodies.EmptyBodyError, bodies.DegenerateBodyError):
        return 0.0
    return bodies.volume(chart)


def _perimeter_uniform_exact(mu: UniformBody, A: ConvexBody) -> PerimeterResult:
    hA = A.to_hpolytope()
    hK = mu.body.to_hpolytope()
    total = 0.0
    for facet in hA.facets():
        total += _clipped_facet_area(facet, hA, hK)
    return PerimeterResult(total * mu.sup_density(), 0.0, "exact-clip")


def _perimeter_facet_mc(mu: Measure, A: ConvexBody, cfg: SamplerConfig) -> PerimeterResult:
    facets = A.to_hpolytope().facets()
    areas = np.array([f.area for f in facets])
    total_area = areas.sum()
    if total_area <= 0:
        return PerimeterResult(0.0, 0.0, "facet-mc")
    counts = np.maximum((cfg.samples * areas / total_area).astype(int), 16)
    value = 0.0
    var = 0.0
    used = 0
    for i, (f, c) in enumerate(zip(facets, counts)):
        est = estimate_facet_integral(mu, f, int(c), tag_seed(cfg.seed, "perim-facet", i))
        value += est.value
        var += est.stderr ** 2
        used += int(c)
    return PerimeterResult(value, math.sqrt(var), "facet-mc", samples=used, seed=cfg.seed)


def _perimeter_sphere(mu: Measure, A: Ball, cfg: SamplerConfig) -> PerimeterResult:
    n = A.dim
    rng = _rng(tag_seed(cfg.seed, "perim-sphere"))
    U = sphere_directions(rng, cfg.samples, n)
    pts = A.center + A.radius * U
    vals = mu.density(pts)
    scale = n * unit_ball_volume(n) * A.radius ** (n - 1)
    return PerimeterResult(
        scale * float(vals.mean()),
        scale * float(vals.std()) / math.sqrt(cfg.samples),
        "sphere-mc",
        samples=cfg.samples,
        seed=cfg.seed,
    )


# ---------------------------------------------------------------------------
# One-dimensional endpoint formula


def perimeter_1d(mu: Measure1D, a: float, b: float):
    """Perimeter of the interval [a, b]: outside limits f(a-) + f(b+).

    Endpoints sitting exactly on the support boundary take the outside limit
    (zero) and are flagged in the second return value.
    """
    if a > b:
        raise ValueError("need a <= b")
    left = mu.density_outside_left(a)
    right = mu.density_outside_right(b)
    flags = []
    if mu.at_support_boundary(a):
        flags.append(("left", a))
    if mu.at_support_boundary(b):
        flags.append(("right", b))
    return left + right, flags


def gamma_1d(mu: Measure1D) -> float:
    """Maximal interval perimeter: twice the sup of the density."""
    return 2.0 * mu.sup_density()


# ---------------------------------------------------------------------------
# Closed-form maximal perimeter for uniform measures


@dataclass
class GammaUniformResult:
    value: float
    bound: float
    slack: float
    isotropic_constant: float
    surface_area: float


def gamma_uniform(K: ConvexBody, tol: float = 1e-6) -> GammaUniformResult:
    """L_K * S(K) for an isotropic body K, with the dimensional bound
    sqrt(n/(n+2)) * n and its slack."""
    n = K.dim
    vol = bodies.volume(K)
    if abs(vol - 1.0) > tol:
        raise ValueError(f"body is not unit-volume (vol={vol})")
    bar, cov = UniformBody(K).exact_moments()
    if float(np.abs(bar).max()) > tol:
        raise ValueError("body is not centered")
    L2 = float(np.trace(cov)) / n
    if float(np.abs(cov - L2 * np.eye(n)).max()) > tol:
        raise ValueError("covariance is not a multiple of the identity")
    L = math.sqrt(L2)
    S = bodies.surface_area(K)
    bound = math.sqrt(n / (n + 2)) * n
    return GammaUniformResult(L * S, bound, bound - L * S, L, S)


# ---------------------------------------------------------------------------
# Finite-difference cross-check


def polytope_distances(
    H: HPolytope, X: np.ndarray, iters: int = 200, tol: float = 1e-10, skip_beyond: float | None = None
):
    """Euclidean distances from points to an H-polytope by Dykstra's
    alternating projections onto the halfspaces.  Returns (dist, converged).

    Points whose distance provably exceeds ``skip_beyond`` (bounding-box
    lower bound) are reported as inf without running the projection.
    """
    m, n = H.A.shape
    if n > 4 or m > 20:
        raise bodies.CapExceededError("distance projections capped at n <= 4, m <= 20")
    X = np.atleast_2d(np.asarray(X, dtype=float))
    inside = H.contains(X)
    todo = ~inside
    dist = np.zeros(X.shape[0])
    conv = np.ones(X.shape[0], dtype=bool)
    if skip_beyond is not None and np.any(todo):
        lo, hi = bodies.bounding_box(H)
        lb = np.linalg.norm(X - np.clip(X, lo, hi), axis=1)
        far = todo & (lb > skip_beyond)
        dist[far] = np.inf
        todo &= ~far
    if not np.any(todo):
        return dist, conv
    Y = X[todo].copy()
    P = np.zeros((m, Y.shape[0], n))
    ok = np.zeros(Y.shape[0], dtype=bool)
    for _ in range(iters):
        max_move = 0.0
        for i in range(m):
            Z = Y + P[i]
            viol = Z @ H.A[i] - H.b[i]
            viol = np.maximum(viol, 0.0)
            Ynew = Z - viol[:, None] * H.A[i][None, :]
            P[i] = Z - Ynew
            max_move = max(max_move, float(np.abs(Ynew - Y).max()))
            Y = Ynew
        if max_move < tol:
            ok[:] = True
            break
    dist[todo] = np.linalg.norm(Y - X[todo], axis=1)
    conv[todo] = ok
    return dist, conv


DEFAULT_FD_GRID = (0.1, 0.05, 0.02, 0.01)


def perimeter_fd(
    mu: Measure,
    A: ConvexBody,
    eps_grid=DEFAULT_FD_GRID,
    cfg: SamplerConfig | None = None,
    bank: SampleBank | None = None,
):
    """Finite-difference perimeter estimates (mu(A + eps B) - mu(A)) / eps.

    One distance computation serves the whole grid, so the per-eps estimates
    share their random numbers.  Returns a list of (eps, Estimate) plus a
    record of non-converged projections.
    """
    cfg = cfg or SamplerConfig()
    bank = bank or SampleBank()
    H = A.to_hpolytope()
    X = bank.get(mu, cfg)
    dist, conv = polytope_distances(H, X, skip_beyond=float(max(eps_grid)))
    errors = int(np.count_nonzero(~conv))
    N = X.shape[0]
    out = []
    for eps in sorted(eps_grid, reverse=True):
        ind = (dist > 0) & (dist <= eps)
        p = float(np.mean(ind))
        stderr = math.sqrt(max(p * (1 - p), 0.0) / N)
        out.append((eps, Estimate(p / eps, stderr / eps, N, cfg.seed, "fd")))
    return out, errors


def richardson_extrapolate(fd_results):
    """Linear-model extrapolation from the two smallest grid steps."""
    (e1, est1), (e2, est2) = sorted(fd_results, key=lambda t: t[0])[:2]
    # values at e1 < e2; extrapolate assuming value(e) = P + c e
    p = (e2 * est1.value - e1 * est2.value) / (e2 - e1)
    model_err = abs(p - est1.value)
    stderr = math.hypot(est1.stderr * e2 / (e2 - e1), est2.stderr * e1 / (e2 - e1))
    return p, stderr, model_err


# ---------------------------------------------------------------------------
# Lower-bound search


def random_hpolytope(n: int, rng: np.random.Generator, symmetric: bool = False) -> HPolytope:
    """Random body from 2n..4n uniform unit normals with offsets keeping the
    Chebyshev radius at least 0.1; symmetric variants pair rows (a, b), (-a, b)."""
    row_cap = 24 if n >= 7 else 30
    for _ in range(200):
        if symmetric:
            half = int(rng.integers(n, 2 * n + 1))
            half = min(half, row_cap // 2)
            A0 = rng.standard_normal((half, n))
            A0 /= np.linalg.norm(A0, axis=1, keepdims=True)
            b0 = rng.uniform(0.2, 1.2, size=half)
            A = np.concatenate([A0, -A0], axis=0)
            b = np.concatenate([b0, b0])
        else:
            m = int(rng.integers(2 * n, min(4 * n, row_cap) + 1))
            A = rng.standard_normal((m, n))
            A /= np.linalg.norm(A, axis=1, keepdims=True)
            b = rng.uniform(0.2, 1.2, size=m)
        try:
            K = HPolytope(A, b)
        except bodies.BodyError:
            continue
        if K.chebyshev_inball().radius >= 0.1:
            return K
    raise RuntimeError("could not draw a nondegenerate random polytope")


def _search_candidates(mu: Measure, families, cfg: SamplerConfig, n_random: int = 12):
    n = mu.dim
    cands = []
    if "level_dilates" in families:
        for t in (0.5 * n, float(n), 2.0 * n, 6.0 * n):
            ls = mu.level_set(t)
            if not ls.explicit:
                continue
            for lam in (0.4, 0.6, 0.8, 0.9, 1.0, 1.1, 1.25):
                cands.append((f"level[t={t:g}]x{lam:g}", bodies.dilate(ls.body, lam)))
    if "slabs" in families and n >= 2:
        for k in range(n):
            for w in (0.05, 0.1, 0.25, 0.5):
                lo = np.full(n, -10.0)
                hi = np.full(n, 10.0)
                lo[k], hi[k] = -w, w
                cands.append((f"slab[{k}]w{w:g}", bodies.box(lo, hi)))
    if "gallery" in families:
        cands.append(("cube", bodies.cube(n, 1.0)))
        cands.append(("ball", Ball(np.zeros(n), 1.0)))
        cands.append(("ball2", Ball(np.zeros(n), math.sqrt(n))))
        if n <= 6:
            cands.append(("cross", bodies.cross_polytope(n, 2.0)))
    if "random" in families:
        rng = _rng(tag_seed(cfg.seed, "gamma-search"))
        for i in range(n_random):
            try:
                cands.append((f"random{i}", random_hpolytope(n, rng)))
            except RuntimeError:
                continue
    return cands


def gamma_search(
    mu: Measure,
    families=("level_dilates", "slabs", "gallery", "random"),
    cfg: SamplerConfig | None = None,
    n_random: int = 12,
):
    """Maximize the perimeter over a family grid: a certified lower bound on
    the maximal perimeter constant, up to Monte-Carlo error."""
    cfg = cfg or SamplerConfig()
    best = None
    best_body = None
    best_name = None
    trace = []
    for name, body in _search_candidates(mu, families, cfg, n_random):
        try:
            res = perimeter(mu, body, cfg)
        except bodies.BodyError:
            continue
        trace.append((name, res.value, res.stderr))
        if best is None or res.value > best.value:
            best = res.as_estimate()
            best_body = body
            best_name = name
    return best, best_body, best_name, trace


def gamma_search_1d(mu: Measure1D, lengths=(1e-2, 1e-3, 1e-4)):
    """Interval search: shrink intervals around the mode of the density."""
    mode = mu.mode()
    lo, hi = mu.support()
    best = 0.0
    best_iv = None
    for ell in lengths:
        for a in (mode, mode + 0.5 * ell, mode - 0.5 * ell, mode + ell):
            aa = max(a, lo) if math.isfinite(lo) else a
            bb = aa + ell
            if math.isfinite(hi):
                bb = min(bb, hi)
            if bb <= aa:
                continue
            val, _ = perimeter_1d(mu, aa + 1e-12, bb)
            if val > best:
                best, best_iv = val, (aa, bb)
    return best, best_iv
