"""Verification engine: one executable check per perimeter inequality.

Every check compares a computed left-hand side against a bound and emits a
``BoundReport`` with the numeric slack, a statistical margin (three combined
standard errors; zero on exact paths), and a verdict:

``PASS``                    exact or clear statistical pass
``PASS_WITHIN_MARGIN``      |lhs - rhs| within the statistical margin
``FAIL``                    lhs > rhs + margin
``FALSIFICATION_ONLY_PASS`` the estimator can only over-approximate the
                            constrained quantity, so a non-failure cannot
                            certify the inequality (oracle level sets)
``SKIPPED``                 preconditions not met (with the reason recorded)

No check compares an estimator against itself: one side is always a closed
form, an independent quadrature, or an independent sample functional.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import bodies, gallery
from .bodies import Ball, ConvexBody, HPolytope
from .estimation import (
    Estimate,
    SampleBank,
    SamplerConfig,
    draw_samples,
    estimate_prob,
    sample_facet,
    sphere_directions,
    tag_seed,
    _rng,
)
from .measures import (
    BodyNorm,
    GaussianStd,
    LevelSet,
    Measure,
    Measure1D,
    PNormRadial,
    ProductMeasure,
    UniformBody,
    _body_is_symmetric,
)
from .perimeter import gamma_uniform, perimeter, random_hpolytope

PASS = "PASS"
PASS_WITHIN_MARGIN = "PASS_WITHIN_MARGIN"
FAIL = "FAIL"
FALSIFICATION_ONLY_PASS = "FALSIFICATION_ONLY_PASS"
SKIPPED = "SKIPPED"

_EXACT_MARGIN = 1e-9


@dataclass
class BoundReport:
    check_id: str
    statement: str
    n: int
    measure: str
    body: str
    lhs: float
    rhs: float
    margin: float
    verdict: str
    seed: int = 0
    samples: int = 0
    details: dict = field(default_factory=dict)

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    def to_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "statement": self.statement,
            "n": self.n,
            "measure": self.measure,
            "body": self.body,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "margin": self.margin,
            "verdict": self.verdict,
            "seed": self.seed,
            "samples": self.samples,
            "details": self.details,
        }

    def csv_row(self) -> list:
        return [
            self.check_id,
            self.n,
            self.measure,
            self.body,
            repr(self.lhs),
            repr(self.rhs),
            repr(self.slack),
            repr(self.margin),
            self.verdict,
            self.seed,
        ]


CSV_COLUMNS = [
    "check_id",
    "n",
    "measure",
    "body",
    "lhs",
    "rhs",
    "slack",
    "margin",
    "verdict",
    "seed",
]


def verdict_for(lhs: float, rhs: float, margin: float, falsification_only: bool = False) -> str:
    if lhs > rhs + margin:
        return FAIL
    if falsification_only:
        return FALSIFICATION_ONLY_PASS
    if margin > 0 and abs(lhs - rhs) <= margin:
        return PASS_WITHIN_MARGIN
    return PASS


@dataclass
class CheckContext:
    measure: Measure
    measure_name: str
    cfg: SamplerConfig
    bank: SampleBank = field(default_factory=SampleBank)
    entry_meta: dict = field(default_factory=dict)
    corrupt_rhs: float | None = None  # harness self-test: scales every rhs

    @property
    def n(self) -> int:
        return self.measure.dim

    def report(
        self,
        check_id: str,
        statement: str,
        body_name: str,
        lhs: float,
        rhs: float,
        margin: float,
        falsification_only: bool = False,
        samples: int = 0,
        **details,
    ) -> BoundReport:
        if self.corrupt_rhs is not None:
            rhs = rhs * self.corrupt_rhs
            details["corrupted_rhs"] = True
        return BoundReport(
            check_id=check_id,
            statement=statement,
            n=self.n,
            measure=self.measure_name,
            body=body_name,
            lhs=float(lhs),
            rhs=float(rhs),
            margin=float(margin),
            verdict=verdict_for(lhs, rhs, margin, falsification_only),
            seed=self.cfg.seed,
            samples=samples,
            details=details,
        )

    def skipped(self, check_id: str, statement: str, body_name: str, reason: str) -> BoundReport:
        return BoundReport(
            check_id=check_id,
            statement=statement,
            n=self.n,
            measure=self.measure_name,
            body=body_name,
            lhs=math.nan,
            rhs=math.nan,
            margin=0.0,
            verdict=SKIPPED,
            seed=self.cfg.seed,
            details={"reason": reason},
        )


# ---------------------------------------------------------------------------
# Individual checks


def _direction_set(A: ConvexBody, n: int, extra: int = 64) -> np.ndarray:
    dirs = [sphere_directions(_rng(0xD1CE), extra, n)]
    if A.is_polytopal():
        dirs.append(A.to_hpolytope().A)
    return np.concatenate(dirs, axis=0)


def min_tested_width(A: ConvexBody, extra: int = 64) -> float:
    """min over a finite direction set of the width; each direction gives a
    valid one-dimensional bound, so the minimum is usable as a bound."""
    Xi = _direction_set(A, A.dim, extra)
    w = bodies.support_batch(A, Xi) + bodies.support_batch(A, -Xi)
    return float(np.min(w))


def check_measure_width(ctx: CheckContext, A: ConvexBody, body_name: str) -> BoundReport:
    est = estimate_prob(ctx.measure, A, ctx.cfg, ctx.bank)
    rhs = min_tested_width(A)
    return ctx.report(
        "measure_width",
        "mu(A) <= min width of A",
        body_name,
        est.value,
        rhs,
        3.0 * est.stderr,
        samples=est.samples,
    )


DEFAULT_DILATION_GRID = (0.05, 0.1, 0.2, 0.5)


def check_dilation(ctx: CheckContext, A: ConvexBody, body_name: str, deltas=DEFAULT_DILATION_GRID):
    """Mass growth under origin dilation, with the sharper exponent for
    densities maximized at the origin."""
    mu = ctx.measure
    k = 1.0 if mu.geometric else 2.0
    base = estimate_prob(mu, A, ctx.cfg, ctx.bank)
    out = []
    for d in deltas:
        big = bodies.dilate(A, 1.0 + d)
        est = estimate_prob(mu, big, ctx.cfg, ctx.bank)
        factor = math.exp(k * ctx.n * d)
        rhs = factor * base.value
        margin = 3.0 * (est.stderr + factor * base.stderr)
        out.append(
            ctx.report(
                f"dilation[d={d:g}]",
                f"mu((1+d)A) <= exp({k:g} n d) mu(A)",
                body_name,
                est.value,
                rhs,
                margin,
                samples=est.samples,
                delta=d,
                exponent=k,
            )
        )
    return out


def check_perimeter_inradius(ctx: CheckContext, A: ConvexBody, body_name: str) -> BoundReport:
    cid, stmt = "perimeter_inradius", "perimeter(A) <= 2 n mu(A) / r(A)"
    try:
        r = bodies.inradius_origin(A)
    except bodies.OriginNotInteriorError:
        return ctx.skipped(cid, stmt, body_name, "origin not interior")
    per = perimeter(ctx.measure, A, ctx.cfg)
    mass = estimate_prob(ctx.measure, A, ctx.cfg, ctx.bank)
    rhs = 2.0 * ctx.n * mass.value / r
    margin = 3.0 * (per.stderr + 2.0 * ctx.n * mass.stderr / r) + _EXACT_MARGIN
    return ctx.report(cid, stmt, body_name, per.value, rhs, margin, samples=per.samples)


def _sup_density_on_body(ctx: CheckContext, A: ConvexBody, x_A: np.ndarray) -> tuple:
    """(sup of f over A, exact flag).  Exact for uniform measures and for
    bodies containing the density's maximizer; otherwise a sample maximum."""
    mu = ctx.measure
    if isinstance(mu, UniformBody):
        return mu.sup_density(), True
    if mu.geometric and bool(A.contains(np.zeros(ctx.n))):
        return mu.sup_density(), True
    vals = [float(mu.density(x_A[None, :])[0])]
    H = A.to_hpolytope() if A.is_polytopal() else None
    if H is not None:
        for i, f in enumerate(H.facets()):
            pts = sample_facet(f, 256, tag_seed(ctx.cfg.seed, "supf", i))
            vals.append(float(mu.density(pts).max()))
        vals.append(float(mu.density(H.vertices()).max()))
    X = ctx.bank.get(mu, ctx.cfg)
    inside = A.contains(X)
    if np.any(inside):
        vals.append(float(mu.density(X[inside]).max()))
    return max(vals), False


def check_perimeter_incenter(ctx: CheckContext, A: ConvexBody, body_name: str):
    """Perimeter against mass / intrinsic inradius with the density-ratio
    correction, plus its width-weighted refinement."""
    mu = ctx.measure
    cid = "perimeter_incenter"
    stmt = "perimeter(A) <= mu(A) (n + ln(sup_A f / f(x_A))) / r_A"
    inb = bodies.chebyshev_inball(A)
    fx = float(mu.density(inb.center[None, :])[0])
    if fx <= 0:
        return [ctx.skipped(cid, stmt, body_name, "inball center outside the support")]
    sup_f, sup_exact = _sup_density_on_body(ctx, A, inb.center)
    per = perimeter(mu, A, ctx.cfg)
    mass = estimate_prob(mu, A, ctx.cfg, ctx.bank)
    log_ratio = math.log(max(sup_f / fx, 1.0))
    rhs = mass.value * (ctx.n + log_ratio) / inb.radius
    margin = 3.0 * (per.stderr + mass.stderr * (ctx.n + log_ratio) / inb.radius) + _EXACT_MARGIN
    out = [
        ctx.report(
            cid,
            stmt,
            body_name,
            per.value,
            rhs,
            margin,
            samples=per.samples,
            sup_exact=sup_exact,
            log_ratio=log_ratio,
        )
    ]
    # refinement: width replaces the mass, the log moves inside the average
    X = ctx.bank.get(mu, ctx.cfg)
    inside = A.contains(X)
    k = int(np.count_nonzero(inside))
    if k >= 100:
        logs = mu.log_density(X[inside]) - math.log(fx)
        avg = float(np.mean(logs))
        se_avg = float(np.std(logs) / math.sqrt(k))
        w_hat = min_tested_width(A)
        rhs2 = (w_hat / inb.radius) * (ctx.n + avg)
        margin2 = 3.0 * (per.stderr + (w_hat / inb.radius) * se_avg) + _EXACT_MARGIN
        out.append(
            ctx.report(
                "perimeter_incenter_refined",
                "perimeter(A) <= (w_A/r_A)(n + avg_A ln(f/f(x_A)))",
                body_name,
                per.value,
                rhs2,
                margin2,
                samples=k,
            )
        )
    return out


def steinhagen_constant(n: int) -> float:
    """Sharp width/inradius ratio: 2 sqrt(n) in odd dimensions and
    2(n+1)/sqrt(n+2) in even ones, both attained by the regular simplex."""
    if n % 2 == 1:
        return 2.0 * math.sqrt(n)
    return 2.0 * (n + 1) / math.sqrt(n + 2.0)


def check_steinhagen(ctx: CheckContext, A: ConvexBody, body_name: str) -> BoundReport:
    """Minimal width against the intrinsic inradius.  The width estimator is
    an upper bound, so a pass certifies the inequality; an apparent failure
    is re-verified with a tenfold direction budget first."""
    mw = bodies.min_width(A, budget=2048)
    r = bodies.chebyshev_inball(A).radius
    rhs = steinhagen_constant(ctx.n) * r
    lhs = mw.value
    if lhs > rhs + _EXACT_MARGIN and not mw.certified:
        lhs = bodies.min_width(A, budget=20480).value
    return ctx.report(
        "steinhagen",
        "w_A <= 2 sqrt(n) r_A (odd n; 2(n+1)/sqrt(n+2) r_A for even n)",
        body_name,
        lhs,
        rhs,
        _EXACT_MARGIN,
        certified=mw.certified,
    )


def level_mass_exact(mu: Measure, t: float) -> float | None:
    """Exact mass of the super-level set where the family admits one."""
    if isinstance(mu, UniformBody):
        return 1.0
    if isinstance(mu, PNormRadial):
        return float(mu.radial.cdf(np.array([(mu.p * t) ** (1.0 / mu.p)]))[0])
    if isinstance(mu, GaussianStd):
        from .measures import RadialLaw

        law = RadialLaw(mu.dim, 2.0, 2.0)
        return float(law.cdf(np.array([math.sqrt(2.0 * t)]))[0])
    if isinstance(mu, BodyNorm):
        return float(mu.radial.cdf(np.array([t ** (1.0 / mu.p)]))[0])
    if isinstance(mu, ProductMeasure) and mu.dim == 1:
        f = mu.factors[0]
        if isinstance(f, gallery.ShiftedExp):
            return 1.0 - math.exp(-t)
    return None


def default_t_grid(n: int) -> tuple:
    return (6.0 * n, 7.0 * n, 8.0 * n, 10.0 * n, 12.0 * n)


def check_level_mass(ctx: CheckContext, t_grid=None):
    """Rapid exhaustion of mass by the super-level sets for t >= 6n."""
    mu = ctx.measure
    grid = t_grid or default_t_grid(ctx.n)
    out = []
    for t in grid:
        if t < 6 * ctx.n:
            raise ValueError("level-mass grid points must be at least 6n")
        lhs = 1.0 - math.exp(-t / 5.0)
        exact = level_mass_exact(mu, t)
        if exact is not None:
            out.append(
                ctx.report(
                    f"level_mass[t={t:g}]",
                    "mu(R_t) >= 1 - exp(-t/5)",
                    "level_set",
                    lhs,
                    exact,
                    _EXACT_MARGIN,
                    t=t,
                    method="exact",
                )
            )
        else:
            ls = mu.level_set(t)
            est = estimate_prob(mu, ls, ctx.cfg, ctx.bank)
            out.append(
                ctx.report(
                    f"level_mass[t={t:g}]",
                    "mu(R_t) >= 1 - exp(-t/5)",
                    "level_set",
                    lhs,
                    est.value,
                    3.0 * est.stderr,
                    samples=est.samples,
                    t=t,
                    method="mc",
                )
            )
    return out


def check_level_inradius(ctx: CheckContext):
    """Origin inradius of R_{6n} (and R_n for origin-maximized densities).

    Oracle-only level sets admit only an upper radial bound, so non-failures
    are falsification-only."""
    mu = ctx.measure
    out = []
    cases = [(6.0 * ctx.n, 1.0 / 3.0, "level_inradius[t=6n]", "r(R_6n) >= 1/3")]
    if mu.geometric:
        cases.append((float(ctx.n), 1.0 / 18.0, "level_inradius[t=n]", "r(R_n) >= 1/18"))
    for t, bound, cid, stmt in cases:
        ls = mu.level_set(t)
        if ls.explicit:
            try:
                r = bodies.inradius_origin(ls.body)
            except bodies.BodyError as e:
                out.append(ctx.skipped(cid, stmt, "level_set", str(e)))
                continue
            out.append(ctx.report(cid, stmt, "level_set", bound, r, _EXACT_MARGIN, t=t, method="exact"))
        else:
            r_hat = bodies.inradius_scan(ls.contains, ctx.n, budget=2048)
            out.append(
                ctx.report(
                    cid,
                    stmt,
                    "level_set",
                    bound,
                    r_hat,
                    _EXACT_MARGIN,
                    falsification_only=True,
                    t=t,
                    method="radial-scan",
                )
            )
    return out


def check_symmetric_gamma(ctx: CheckContext, A: ConvexBody, body_name: str) -> BoundReport:
    mu = ctx.measure
    rhs = (2.0 if mu.geometric else 4.0) * ctx.n
    stmt = "perimeter(A) <= %gn for symmetric A" % (2 if mu.geometric else 4)
    if not _body_is_symmetric(A):
        return ctx.skipped("symmetric_gamma", stmt, body_name, "body is not symmetric")
    per = perimeter(mu, A, ctx.cfg)
    return ctx.report(
        "symmetric_gamma",
        stmt,
        body_name,
        per.value,
        rhs,
        3.0 * per.stderr + _EXACT_MARGIN,
        samples=per.samples,
    )


def check_general_gamma(ctx: CheckContext, A: ConvexBody, body_name: str):
    """Dimensional envelope for arbitrary convex bodies: the always-valid
    (14 + 3/sqrt(n)) n^(3/2) bound, the 14 n^(3/2) bound inside R_{6n}, and
    the width/inradius bound with the density-ratio term."""
    mu = ctx.measure
    n = ctx.n
    per = perimeter(mu, A, ctx.cfg)
    out = [
        ctx.report(
            "general_gamma_envelope",
            "perimeter(A) <= (14 + 3/sqrt(n)) n^(3/2)",
            body_name,
            per.value,
            (14.0 + 3.0 / math.sqrt(n)) * n ** 1.5,
            3.0 * per.stderr + _EXACT_MARGIN,
            samples=per.samples,
        )
    ]
    if A.is_polytopal():
        ls = mu.level_set(6.0 * n)
        verts = A.to_hpolytope().vertices()
        if bool(np.all(ls.contains(verts))):
            out.append(
                ctx.report(
                    "general_gamma_levelset",
                    "perimeter(A) <= 14 n^(3/2) for A inside R_6n",
                    body_name,
                    per.value,
                    14.0 * n ** 1.5,
                    3.0 * per.stderr + _EXACT_MARGIN,
                    samples=per.samples,
                )
            )
    inb = bodies.chebyshev_inball(A)
    fx = float(mu.density(inb.center[None, :])[0])
    if fx > 0:
        sup_f, sup_exact = _sup_density_on_body(ctx, A, inb.center)
        log_ratio = math.log(max(sup_f / fx, 1.0))
        out.append(
            ctx.report(
                "general_gamma_width",
                "perimeter(A) <= 2 sqrt(n)(n + ln(sup_A f / f(x_A)))",
                body_name,
                per.value,
                2.0 * math.sqrt(n) * (n + log_ratio),
                3.0 * per.stderr + _EXACT_MARGIN,
                samples=per.samples,
                sup_exact=sup_exact,
            )
        )
    else:
        out.append(
            ctx.skipped(
                "general_gamma_width",
                "perimeter(A) <= 2 sqrt(n)(n + ln(sup_A f / f(x_A)))",
                body_name,
                "inball center outside the support",
            )
        )
    return out


# ---------------------------------------------------------------------------
# Level-set volume/inradius functional


def livshyts_bound(mu: Measure, t: float) -> float:
    """n (sup f * vol(R_t) + 1) / r(R_t); needs an explicit level set."""
    ls = mu.level_set(t)
    if not ls.explicit:
        raise ValueError("level-set functional needs explicit level sets; "
                         "use the falsification checks for oracle families")
    vol = bodies.volume(ls.body)
    r = bodies.inradius_origin(ls.body)
    return mu.dim * (mu.sup_density() * vol + 1.0) / r


def livshyts_inf(mu: Measure, t_grid=()) -> tuple:
    n = mu.dim
    grid = [float(n), 2.0 * n, 6.0 * n, 10.0 * n]
    p = getattr(mu, "p", None)
    if p is not None:
        grid.insert(0, n / math.exp(p))
    grid = sorted(set(list(grid) + [float(t) for t in t_grid]))
    best, best_t = math.inf, None
    for t in grid:
        v = livshyts_bound(mu, t)
        if v < best:
            best, best_t = v, t
    return best, best_t


def check_livshyts(ctx: CheckContext):
    """Homogeneous level-set chain: the functional at t = n/e^p stays under
    36 e n, and the Markov step sup f * vol(R_{n/e^p}) <= 1."""
    mu = ctx.measure
    out = []
    if not isinstance(mu, BodyNorm):
        return out
    n, p = ctx.n, mu.p
    t0 = n / math.exp(p)
    val = livshyts_bound(mu, t0)
    out.append(
        ctx.report(
            "livshyts_homogeneous",
            "level functional at t=n/e^p <= 36 e n",
            "level_set",
            val,
            36.0 * math.e * n,
            _EXACT_MARGIN,
            t=t0,
        )
    )
    ls = mu.level_set(t0)
    markov = mu.sup_density() * bodies.volume(ls.body)
    out.append(
        ctx.report(
            "livshyts_markov",
            "sup f * vol(R_(n/e^p)) <= 1",
            "level_set",
            markov,
            1.0,
            _EXACT_MARGIN,
            t=t0,
        )
    )
    return out


# ---------------------------------------------------------------------------
# Unconditional / product structure


def check_unconditional(ctx: CheckContext, A: ConvexBody, body_name: str) -> BoundReport:
    stmt = "perimeter(A) <= sqrt(2) n for unconditional mu"
    if not ctx.measure.unconditional:
        return ctx.skipped("unconditional_gamma", stmt, body_name, "measure not unconditional")
    per = perimeter(ctx.measure, A, ctx.cfg)
    return ctx.report(
        "unconditional_gamma",
        stmt,
        body_name,
        per.value,
        math.sqrt(2.0) * ctx.n,
        3.0 * per.stderr + _EXACT_MARGIN,
        samples=per.samples,
    )


def check_product(ctx: CheckContext, A: ConvexBody, body_name: str):
    mu = ctx.measure
    stmt = "perimeter(A) <= 2 sum_k sup g_k for product mu"
    if not isinstance(mu, ProductMeasure):
        return [ctx.skipped("product_gamma", stmt, body_name, "measure is not a product")]
    per = perimeter(mu, A, ctx.cfg)
    rhs = 2.0 * float(sum(f.sup_density() for f in mu.factors))
    out = [
        ctx.report(
            "product_gamma",
            stmt,
            body_name,
            per.value,
            rhs,
            3.0 * per.stderr + _EXACT_MARGIN,
            samples=per.samples,
        )
    ]
    if all(abs(f.var() - 1.0) < 1e-9 for f in mu.factors):
        out.append(
            ctx.report(
                "product_gamma_isotropic",
                "perimeter(A) <= 2n for unit-variance factors",
                body_name,
                per.value,
                2.0 * ctx.n,
                3.0 * per.stderr + _EXACT_MARGIN,
                samples=per.samples,
            )
        )
    return out


def _segment_extension_membership(H: HPolytope, X: np.ndarray, k: int, eps: float) -> np.ndarray:
    """Membership in A + eps*segment(e_k): a one-dimensional interval
    feasibility test per point."""
    a_k = H.A[:, k]
    proj = X @ H.A.T
    slack = H.b[None, :] - proj  # need s * a_k >= -slack, i.e. a_k s >= -slack
    lo = np.full(X.shape[0], -eps)
    hi = np.full(X.shape[0], eps)
    feasible = np.ones(X.shape[0], dtype=bool)
    for i in range(H.A.shape[0]):
        c = a_k[i]
        if abs(c) < 1e-14:
            feasible &= slack[:, i] >= -1e-9
        elif c > 0:
            lo = np.maximum(lo, -slack[:, i] / c)
        else:
            hi = np.minimum(hi, -slack[:, i] / c)
    return feasible & (lo <= hi + 1e-12)


def check_fiber(ctx: CheckContext, A: ConvexBody, body_name: str, eps: float = 0.01):
    """Coordinate-segment growth: mu((A + eps I_k) \\ A) <= 2 eps g_k(0)."""
    mu = ctx.measure
    stmt = "mu((A + eps I_k) \\ A) <= 2 eps g_k(0)"
    if not mu.unconditional:
        return [ctx.skipped("fiber", stmt, body_name, "measure not unconditional")]
    if not A.is_polytopal():
        return [ctx.skipped("fiber", stmt, body_name, "needs a polytopal body")]
    H = A.to_hpolytope()
    X = ctx.bank.get(mu, ctx.cfg)
    in_A = H.contains(X)
    out = []
    for k in range(ctx.n):
        g0 = mu.axis_marginal_at0(k)
        g0_err = 0.0
        if g0 is None:
            e = np.zeros(ctx.n)
            e[k] = 1.0
            from .measures import marginal_1d

            marg = marginal_1d(mu, e, samples=ctx.cfg.samples, seed=tag_seed(ctx.cfg.seed, "fiber-marg", k))
            g0 = float(marg.density(np.array([0.0]))[0])
            g0_err = getattr(marg, "sup_stderr", 0.0)
        ext = _segment_extension_membership(H, X, k, eps)
        diff = ext & ~in_A
        p = float(np.mean(diff))
        se = math.sqrt(max(p * (1 - p), 0.0) / X.shape[0])
        out.append(
            ctx.report(
                f"fiber[k={k}]",
                stmt,
                body_name,
                p,
                2.0 * eps * g0,
                3.0 * (se + 2.0 * eps * g0_err),
                samples=X.shape[0],
                eps=eps,
                coordinate=k,
            )
        )
    return out


# ---------------------------------------------------------------------------
# Preliminary inequality suite


def _empirical_direction_sup(X: np.ndarray, xi: np.ndarray):
    """(sup density, density at 0, stderr of the sup) of the projection."""
    from .measures import Empirical1D

    emp = Empirical1D(X @ xi)
    return emp.sup_density(), float(emp.density(np.array([0.0]))[0]), emp.sup_stderr


def check_preliminaries(ctx: CheckContext, directions: int = 50):
    """Halfspace mass, sup-vs-center density, marginal sup bounds, the even
    marginal bound at 0, the 1d variance window, and the inclusion radii of
    isotropic bodies."""
    mu = ctx.measure
    n = ctx.n
    out = []
    X = ctx.bank.get(mu, ctx.cfg)
    N = X.shape[0]
    Xi = sphere_directions(_rng(tag_seed(ctx.cfg.seed, "prelim-dirs")), directions, n)

    # Grunbaum: no origin halfspace carries more than 1 - 1/e
    proj = X @ Xi.T
    masses = np.mean(proj <= 0.0, axis=0)
    worst = float(masses.max())
    se = math.sqrt(0.25 / N)
    out.append(
        ctx.report(
            "grunbaum",
            "mu({<x,xi> <= 0}) <= 1 - 1/e",
            "halfspaces",
            worst,
            1.0 - 1.0 / math.e,
            3.0 * se,
            samples=N,
            directions=directions,
        )
    )

    # Fradelizi: sup f <= e^n f(0) for centered f
    f0 = float(mu.density(np.zeros((1, n)))[0])
    if f0 > 0:
        out.append(
            ctx.report(
                "fradelizi",
                "sup f <= e^n f(0)",
                "density",
                mu.sup_density(),
                math.exp(n) * f0,
                _EXACT_MARGIN * math.exp(n) * f0,
            )
        )

    # marginal sups (isotropic measures): every direction density stays <= 1
    sups = []
    sup_ses = []
    zeros = []
    for i in range(Xi.shape[0]):
        s, z, e = _empirical_direction_sup(X, Xi[i])
        sups.append(s)
        sup_ses.append(e)
        zeros.append(z)
    j = int(np.argmax(sups))
    out.append(
        ctx.report(
            "marginal_sup",
            "sup of any 1d marginal <= 1",
            "marginals",
            float(sups[j]),
            1.0,
            3.0 * float(sup_ses[j]),
            samples=N,
            directions=directions,
        )
    )
    if mu.even:
        exact_axis = [mu.axis_marginal_at0(k) for k in range(n)]
        cand = [v for v in exact_axis if v is not None]
        margin = 3.0 * float(sup_ses[int(np.argmax(zeros))])
        lhs = max(max(zeros), max(cand) if cand else 0.0)
        out.append(
            ctx.report(
                "hensley",
                "even isotropic marginal density at 0 <= 1/sqrt(2)",
                "marginals",
                float(lhs),
                1.0 / math.sqrt(2.0),
                margin,
                samples=N,
            )
        )
    return out


def check_1d_window(ctx_seed: int = 0):
    """Variance-sup window for the one-dimensional gallery densities."""
    out = []
    for f in gallery.one_d_gallery():
        val = f.var() * f.sup_density() ** 2
        name = f.to_json()["type"]
        out.append(
            BoundReport(
                "bobkov_chistyakov_lower",
                "1/12 <= Var(X) sup(g)^2",
                1,
                name,
                "density",
                1.0 / 12.0,
                val,
                _EXACT_MARGIN,
                verdict_for(1.0 / 12.0, val, _EXACT_MARGIN),
                seed=ctx_seed,
            )
        )
        out.append(
            BoundReport(
                "bobkov_chistyakov_upper",
                "Var(X) sup(g)^2 <= 1",
                1,
                name,
                "density",
                val,
                1.0,
                _EXACT_MARGIN,
                verdict_for(val, 1.0, _EXACT_MARGIN),
                seed=ctx_seed,
            )
        )
    return out


def check_body_inclusions(entry: gallery.GalleryEntry, seed: int = 0):
    """Inradius and circumradius of an isotropic body against its isotropic
    constant, plus the surface-area/inradius identity."""
    K = entry.body
    if K is None:
        return []
    n = K.dim
    bar, cov = UniformBody(K).exact_moments()
    L = math.sqrt(float(np.trace(cov)) / n)
    r = bodies.inradius_origin(K)
    out = [
        BoundReport(
            "kls_inradius",
            "sqrt((n+2)/n) L_K <= r(K)",
            n,
            entry.name,
            entry.name,
            math.sqrt((n + 2.0) / n) * L,
            r,
            _EXACT_MARGIN,
            verdict_for(math.sqrt((n + 2.0) / n) * L, r, _EXACT_MARGIN),
            seed=seed,
        )
    ]
    V = K.to_hpolytope().vertices() if K.is_polytopal() else None
    if V is not None:
        circ = float(np.linalg.norm(V, axis=1).max())
        rhs = math.sqrt(n * (n + 2.0)) * L
        out.append(
            BoundReport(
                "kls_circumradius",
                "circumradius(K) <= sqrt(n(n+2)) L_K",
                n,
                entry.name,
                entry.name,
                circ,
                rhs,
                _EXACT_MARGIN,
                verdict_for(circ, rhs, _EXACT_MARGIN),
                seed=seed,
            )
        )
    S = bodies.surface_area(K)
    vol = bodies.volume(K)
    out.append(
        BoundReport(
            "surface_inradius",
            "S(K) r(K) <= n vol(K)",
            n,
            entry.name,
            entry.name,
            S * r,
            n * vol,
            _EXACT_MARGIN * n * vol,
            verdict_for(S * r, n * vol, _EXACT_MARGIN * n * vol),
            seed=seed,
        )
    )
    return out


# ---------------------------------------------------------------------------
# Suite orchestration


DEFAULT_MEASURES = {
    1: ["gaussian", "cube", "product_exp", "shifted_exp"],
    2: ["gaussian", "cube", "simplex", "cross", "pnorm:1", "pnorm:3", "bodynorm_cube:1", "product_exp", "product_uniform"],
    3: ["gaussian", "cube", "simplex", "cross", "pnorm:1", "pnorm:1.5", "bodynorm_cube:1", "product_exp"],
    4: ["gaussian", "cube", "simplex", "cross", "pnorm:1.5", "pnorm:3", "bodynorm_cube:2", "product_uniform"],
    6: ["gaussian", "cube", "simplex", "pnorm:1", "bodynorm_cube:1"],
    8: ["gaussian", "cube", "simplex", "cross", "pnorm:1.5"],
}

MEASURE_CHECKS = ["level_mass", "level_inradius", "livshyts", "preliminaries"]
BODY_CHECKS = [
    "measure_width",
    "dilation",
    "perimeter_inradius",
    "perimeter_incenter",
    "steinhagen",
    "symmetric_gamma",
    "general_gamma",
    "unconditional",
    "product",
    "fiber",
]
ALL_CHECKS = MEASURE_CHECKS + BODY_CHECKS + ["1d_window", "body_inclusions"]


@dataclass
class SuiteConfig:
    name: str = "default"
    dimensions: tuple = (1, 2, 3, 4, 6, 8)
    measures: dict | None = None  # dim -> list of gallery names
    random_symmetric: int = 6
    random_general: int = 6
    checks: tuple = ("all",)
    seed: int = 0
    samples: int = 40_000
    corrupt_rhs: float | None = None
    threads: int = 1

    @staticmethod
    def from_json(doc: dict) -> "SuiteConfig":
        allowed = {
            "name",
            "dimensions",
            "measures",
            "random_symmetric",
            "random_general",
            "checks",
            "seed",
            "samples",
            "corrupt_rhs",
            "threads",
        }
        unknown = set(doc) - allowed
        if unknown:
            raise ValueError(f"unknown suite config keys: {sorted(unknown)}")
        cfg = SuiteConfig()
        if "name" in doc:
            cfg.name = str(doc["name"])
        if "dimensions" in doc:
            dims = doc["dimensions"]
            if not isinstance(dims, list) or not all(isinstance(d, int) and 1 <= d <= 8 for d in dims):
                raise ValueError("dimensions must be a list of integers in 1..8")
            cfg.dimensions = tuple(dims)
        if "measures" in doc:
            m = doc["measures"]
            if not isinstance(m, dict):
                raise ValueError("measures must map dimension -> list of gallery names")
            cfg.measures = {int(k): list(v) for k, v in m.items()}
        for key in ("random_symmetric", "random_general", "seed", "samples", "threads"):
            if key in doc:
                v = doc[key]
                if not isinstance(v, int) or v < 0:
                    raise ValueError(f"{key} must be a nonnegative integer")
                setattr(cfg, key, v)
        if "checks" in doc:
            cs = doc["checks"]
            if isinstance(cs, str):
                cs = [cs]
            bad = [c for c in cs if c != "all" and c not in ALL_CHECKS]
            if bad:
                raise ValueError(f"unknown checks: {bad}")
            cfg.checks = tuple(cs)
        if "corrupt_rhs" in doc and doc["corrupt_rhs"] is not None:
            cfg.corrupt_rhs = float(doc["corrupt_rhs"])
        return cfg

    def active_checks(self) -> list:
        if "all" in self.checks:
            return list(ALL_CHECKS)
        return [c for c in ALL_CHECKS if c in self.checks]


def suite_bodies(n: int, seed: int, n_symmetric: int, n_general: int):
    """Deterministic random instance bodies, shared across measures."""
    if n == 1:
        # intervals: symmetric ones and shifted ones
        rng = _rng(tag_seed(seed, "suite-bodies-1d"))
        out = []
        for i in range(n_symmetric):
            a = float(rng.uniform(0.2, 2.0))
            out.append((f"sym{i}", bodies.box([-a], [a])))
        for i in range(n_general):
            a = float(rng.uniform(0.2, 1.5))
            c = float(rng.uniform(-1.0, 1.0))
            out.append((f"gen{i}", bodies.box([c - a], [c + a])))
        return out
    out = []
    rng = _rng(tag_seed(seed, "suite-bodies-sym", n))
    for i in range(n_symmetric):
        out.append((f"sym{i}", random_hpolytope(n, rng, symmetric=True)))
    rng = _rng(tag_seed(seed, "suite-bodies-gen", n))
    for i in range(n_general):
        K = random_hpolytope(n, rng, symmetric=False)
        shift = 0.2 * sphere_directions(rng, 1, n)[0]
        out.append((f"gen{i}", bodies.translate(K, shift)))
    return out


def _run_measure_task(config: SuiteConfig, checks, n: int, mname: str, inst_bodies):
    entry = gallery.gallery_measure(mname, n)
    if entry.measure is None:
        return []
    reports: list[BoundReport] = []
    cfg = SamplerConfig(seed=tag_seed(config.seed, "measure", mname, n), samples=config.samples)
    ctx = CheckContext(
        measure=entry.measure,
        measure_name=entry.name,
        cfg=cfg,
        entry_meta=entry.meta,
        corrupt_rhs=config.corrupt_rhs,
    )
    if "body_inclusions" in checks and entry.body is not None:
        reports.extend(check_body_inclusions(entry, seed=cfg.seed))
    if "level_mass" in checks:
        reports.extend(check_level_mass(ctx))
    if "level_inradius" in checks and n >= 3:
        reports.extend(check_level_inradius(ctx))
    if "livshyts" in checks:
        reports.extend(check_livshyts(ctx))
    if "preliminaries" in checks:
        reports.extend(check_preliminaries(ctx))
    fiber_done = False
    for bname, A in inst_bodies:
        if "measure_width" in checks:
            reports.append(check_measure_width(ctx, A, bname))
        if "dilation" in checks:
            reports.extend(check_dilation(ctx, A, bname, deltas=(0.1, 0.5)))
        if "perimeter_inradius" in checks:
            reports.append(check_perimeter_inradius(ctx, A, bname))
        if "perimeter_incenter" in checks:
            reports.extend(check_perimeter_incenter(ctx, A, bname))
        if "steinhagen" in checks:
            reports.append(check_steinhagen(ctx, A, bname))
        if "symmetric_gamma" in checks and bname.startswith("sym"):
            reports.append(check_symmetric_gamma(ctx, A, bname))
        if "general_gamma" in checks:
            reports.extend(check_general_gamma(ctx, A, bname))
        if "unconditional" in checks and ctx.measure.unconditional:
            reports.append(check_unconditional(ctx, A, bname))
        if "product" in checks and isinstance(ctx.measure, ProductMeasure):
            reports.extend(check_product(ctx, A, bname))
        if "fiber" in checks and ctx.measure.unconditional and not fiber_done:
            reports.extend(check_fiber(ctx, A, bname))
            fiber_done = True
    return reports


def run_suite(config: SuiteConfig):
    """Execute the full measure x body x check matrix deterministically.

    Tasks (one per dimension/measure pair) carry independent derived seeds
    and may run on a thread pool; results are merged in task order, so the
    report list is identical regardless of the worker count.  Returns
    (reports, summary); the caller maps 'any FAIL' to a nonzero exit code.
    """
    checks = config.active_checks()
    reports: list[BoundReport] = []
    if "1d_window" in checks:
        reports.extend(check_1d_window(config.seed))
    measures_by_dim = config.measures or DEFAULT_MEASURES
    tasks = []
    for n in config.dimensions:
        names = measures_by_dim.get(n, [])
        if not names:
            continue
        # Random instance bodies stop at n = 6: vertex enumeration of generic
        # 8-dimensional polytopes is beyond the desk-scale budget, and the
        # dimension-8 coverage comes from the gallery bodies and level sets.
        if n <= 6:
            inst_bodies = suite_bodies(n, config.seed, config.random_symmetric, config.random_general)
        else:
            inst_bodies = []
        for mname in names:
            tasks.append((n, mname, inst_bodies))
    if config.threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            futures = [pool.submit(_run_measure_task, config, checks, n, m, bs) for n, m, bs in tasks]
            for fut in futures:
                reports.extend(fut.result())
    else:
        for n, m, bs in tasks:
            reports.extend(_run_measure_task(config, checks, n, m, bs))
    summary = summarize(reports)
    return reports, summary


def summarize(reports) -> dict:
    counts: dict = {}
    for r in reports:
        counts[r.verdict] = counts.get(r.verdict, 0) + 1
    counts["total"] = len(reports)
    return counts
