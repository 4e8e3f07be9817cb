"""Log-concave probability measures and their structure.

Families
--------
``UniformBody(K)``       density 1/vol(K) on a convex body K
``PNormRadial(n, p, s)``  density proportional to exp(-|x/s|^p / p)
``BodyNorm(K, p, s)``     density proportional to exp(-||x/s||_K^p), K symmetric
``ProductMeasure([g_k])`` product of one-dimensional log-concave factors
``GaussianStd(n)``        standard normal
``GeneralLogDensity``     black-box log-density with a declared maximum point

Each measure answers pointwise (log-)density queries on point batches, knows
its sup-density exactly (closed-form normalization constants) or by
declaration, carries structural flags (even / unconditional / 1-symmetric /
geometric), and exposes its super-level sets

    R_t = {x : f(x) >= exp(-t) * sup f},

either as an explicit convex body (radial, body-norm, and uniform families)
or as a membership oracle (products, black boxes).

Log-concavity of every constructed density is spot-checked along fixed-seed
random segments at construction time; statistical normalization audits live
in the test suite, where an independent importance-sampling quadrature is
compared against the analytic constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import bodies
from .bodies import Ball, ConvexBody, HPolytope, VPolytope, unit_ball_volume

__all__ = [
    "Measure",
    "UniformBody",
    "PNormRadial",
    "BodyNorm",
    "ProductMeasure",
    "GaussianStd",
    "GeneralLogDensity",
    "AffineImage",
    "Measure1D",
    "Uniform1D",
    "ShiftedExp",
    "Gaussian1D",
    "TruncatedLinear",
    "Empirical1D",
    "LevelSet",
    "Moments",
    "isotropize",
    "isotropic_constant",
    "marginal_1d",
    "level_set",
    "measure_from_json",
]

_SQRT2PI = math.sqrt(2.0 * math.pi)


class MeasureError(ValueError):
    pass


class NoSamplerError(MeasureError):
    """Measure family has no registered sampler."""


# ---------------------------------------------------------------------------
# Radial laws r^(n-1) exp(-r^p / a) on [0, inf)


class RadialLaw:
    """Radial factor of a spherically/gauge-symmetric log-concave density.

    Density on [0, inf) proportional to r^(n-1) * exp(-r^p / a).  Moments are
    closed-form in Gamma functions; sampling inverts a cached 4096-node
    monotone CDF table by bisection to 1e-12.
    """

    TABLE_NODES = 4096

    def __init__(self, n: int, p: float, a: float):
        self.n, self.p, self.a = int(n), float(p), float(a)
        # integral of r^(n-1) exp(-r^p/a) over [0, inf)
        self.norm = a ** (n / p) * math.gamma(n / p) / p
        self._cdf_interp = None

    def moment(self, k: float) -> float:
        return self.a ** (k / self.p) * math.gamma((self.n + k) / self.p) / math.gamma(self.n / self.p)

    def pdf(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        pos = r > 0
        out[pos] = np.exp((self.n - 1) * np.log(r[pos]) - r[pos] ** self.p / self.a) / self.norm
        if self.n == 1:
            out[r == 0] = 1.0 / self.norm
        return out

    def _table(self):
        if self._cdf_interp is None:
            mode = (self.a * max(self.n - 1, 0.5) / self.p) ** (1.0 / self.p)
            r_max = max(1.0, 2.0 * mode)
            while True:
                tail = (r_max ** (self.n - 1)) * math.exp(-(r_max ** self.p) / self.a)
                if tail < 1e-18 * self.norm / max(r_max, 1.0):
                    break
                r_max *= 1.5
            nodes = np.linspace(0.0, r_max, self.TABLE_NODES)
            # cumulative 16-node Gauss-Legendre panel quadrature
            gl_x, gl_w = np.polynomial.legendre.leggauss(16)
            lo, hi = nodes[:-1], nodes[1:]
            mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
            pts = mid[:, None] + half[:, None] * gl_x[None, :]
            vals = self.pdf(pts.ravel()).reshape(pts.shape)
            panel = (vals * gl_w[None, :]).sum(axis=1) * half
            cdf = np.concatenate([[0.0], np.cumsum(panel)])
            cdf /= cdf[-1]
            cdf = np.maximum.accumulate(cdf)
            self._cdf_interp = PchipInterpolator(nodes, cdf)
            self._r_max = r_max
        return self._cdf_interp

    def cdf(self, r):
        interp = self._table()
        r = np.clip(np.asarray(r, dtype=float), 0.0, self._r_max)
        return np.clip(interp(r), 0.0, 1.0)

    def ppf(self, u):
        interp = self._table()
        u = np.asarray(u, dtype=float)
        lo = np.zeros_like(u)
        hi = np.full_like(u, self._r_max)
        for _ in range(52):
            mid = 0.5 * (lo + hi)
            below = interp(mid) < u
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
            if float(np.max(hi - lo)) < 1e-12:
                break
        return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Moments and affine maps


@dataclass
class Moments:
    barycenter: np.ndarray
    cov: np.ndarray
    mean_abs: float
    var_abs: float
    exact: bool
    samples: int = 0
    seed: int = 0
    stderr_bar: np.ndarray | None = None
    stderr_abs: float | None = None


@dataclass(frozen=True)
class AffineMap:
    """x -> lin @ (x - shift)."""

    lin: np.ndarray
    shift: np.ndarray

    def apply(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return (X - self.shift) @ self.lin.T

    def is_identity(self, tol: float = 1e-9) -> bool:
        n = self.lin.shape[0]
        return (
            float(np.abs(self.lin - np.eye(n)).max()) <= tol
            and float(np.abs(self.shift).max()) <= tol
        )


# ---------------------------------------------------------------------------
# Level sets


class LevelSet:
    """Super-level set {f >= exp(-t) sup f}: explicit body or oracle."""

    def __init__(self, t: float, body: ConvexBody | None = None, contains_fn=None, dim: int = 0):
        self.t = float(t)
        self.body = body
        self._contains_fn = contains_fn
        self.explicit = body is not None
        self.dim = body.dim if body is not None else dim

    def contains(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.explicit:
            return self.body.contains(X)
        return self._contains_fn(X)


# ---------------------------------------------------------------------------
# Measure base


class Measure:
    """Full-dimensional log-concave probability measure on R^n."""

    dim: int
    even: bool = False
    unconditional: bool = False
    one_symmetric: bool = False
    geometric: bool = False

    def log_density(self, X) -> np.ndarray:
        raise NotImplementedError

    def density(self, X) -> np.ndarray:
        return np.exp(self.log_density(X))

    def sup_density(self) -> float:
        raise NotImplementedError

    def level_set(self, t: float) -> LevelSet:
        t = float(t)
        if t < 0:
            raise MeasureError("level parameter must be nonnegative")
        log_sup = math.log(self.sup_density())

        def member(X):
            return self.log_density(X) >= log_sup - t - 1e-12

        return LevelSet(t, contains_fn=member, dim=self.dim)

    def exact_moments(self) -> tuple | None:
        """(barycenter, covariance) in closed form, or None."""
        return None

    def exact_abs_moments(self) -> tuple | None:
        """(E|x|, Var|x|) in closed form, or None."""
        return None

    def axis_marginal_at0(self, k: int) -> float | None:
        """Density of the k-th coordinate marginal at 0, where closed-form."""
        return None

    def key(self) -> str:
        import json

        return json.dumps(self.to_json(), sort_keys=True)

    def to_json(self) -> dict:
        raise NotImplementedError

    def _check_log_concavity(self, count: int = 1000, seed: int = 20099):
        rng = np.random.default_rng(seed)
        X = rng.standard_normal((count, self.dim)) * 2.0
        Y = rng.standard_normal((count, self.dim)) * 2.0
        lx, ly = self.log_density(X), self.log_density(Y)
        lm = self.log_density(0.5 * (X + Y))
        ok = np.isfinite(lx) & np.isfinite(ly)
        bad = ok & (lm < 0.5 * (lx + ly) - 1e-7 * (1.0 + np.abs(0.5 * (lx + ly))))
        if np.any(bad):
            raise MeasureError("density failed the log-concavity midpoint test")


# ---------------------------------------------------------------------------
# Families


class UniformBody(Measure):
    def __init__(self, body: ConvexBody, even: bool | None = None, unconditional: bool | None = None):
        self.body = body
        self.dim = body.dim
        self._vol = bodies.volume(body)
        if self._vol <= 0:
            raise MeasureError("support body has zero volume")
        origin_inside = bool(body.contains(np.zeros(self.dim)))
        self.geometric = origin_inside
        self.even = _body_is_symmetric(body) if even is None else even
        self.unconditional = (
            self.even and _body_is_unconditional(body) if unconditional is None else unconditional
        )
        self.one_symmetric = False

    def log_density(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        inside = self.body.contains(X)
        out = np.full(X.shape[0], -np.inf)
        out[inside] = -math.log(self._vol)
        return out

    def sup_density(self) -> float:
        return 1.0 / self._vol

    def level_set(self, t: float) -> LevelSet:
        if t < 0:
            raise MeasureError("level parameter must be nonnegative")
        return LevelSet(t, body=self.body)

    def exact_moments(self):
        if isinstance(self.body, Ball):
            n = self.dim
            cov = self.body.radius ** 2 / (n + 2) * np.eye(n)
            return self.body.center.copy(), cov
        verts, simplices, vols = bodies.triangulate(self.body)
        return _simplex_mixture_moments(verts, simplices, vols)

    def exact_abs_moments(self):
        if isinstance(self.body, Ball) and np.allclose(self.body.center, 0.0):
            n, r = self.dim, self.body.radius
            m1 = r * n / (n + 1)
            m2 = r * r * n / (n + 2)
            return m1, m2 - m1 * m1
        return None

    def axis_marginal_at0(self, k: int) -> float | None:
        H = self.body.to_hpolytope() if self.body.is_polytopal() else None
        if H is None:
            if isinstance(self.body, Ball) and abs(self.body.center[k]) < self.body.radius:
                n, r, c = self.dim, self.body.radius, self.body.center[k]
                rr = math.sqrt(r * r - c * c)
                return unit_ball_volume(n - 1) * rr ** (n - 1) / self._vol
            return None
        sec = _axis_section_volume(H, k)
        if sec is None:
            return None
        return sec / self._vol

    def to_json(self) -> dict:
        return {"type": "uniform_body", "body": self.body.to_json()}


class PNormRadial(Measure):
    """Density c * exp(-|x/sigma|^p / p)."""

    def __init__(self, dim: int, p: float, sigma: float = 1.0):
        if p < 1:
            raise MeasureError("p must be at least 1 for log-concavity")
        if sigma <= 0:
            raise MeasureError("sigma must be positive")
        self.dim, self.p, self.sigma = int(dim), float(p), float(sigma)
        self.radial = RadialLaw(self.dim, self.p, self.p)
        n = self.dim
        self._log_c = -(
            n * math.log(self.sigma)
            + math.log(n * unit_ball_volume(n))
            + math.log(self.radial.norm)
        )
        self.even = True
        self.unconditional = True
        self.one_symmetric = True
        self.geometric = True

    def log_density(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        r = np.linalg.norm(X, axis=1) / self.sigma
        return self._log_c - r ** self.p / self.p

    def sup_density(self) -> float:
        return math.exp(self._log_c)

    def level_set(self, t: float) -> LevelSet:
        if t < 0:
            raise MeasureError("level parameter must be nonnegative")
        if t == 0:
            t = 1e-12
        return LevelSet(t, body=Ball(np.zeros(self.dim), self.sigma * (self.p * t) ** (1.0 / self.p)))

    def coordinate_variance(self) -> float:
        return self.sigma ** 2 * self.radial.moment(2.0) / self.dim

    def exact_moments(self):
        return np.zeros(self.dim), self.coordinate_variance() * np.eye(self.dim)

    def exact_abs_moments(self):
        m1 = self.sigma * self.radial.moment(1.0)
        m2 = self.sigma ** 2 * self.radial.moment(2.0)
        return m1, m2 - m1 * m1

    def axis_marginal_at0(self, k: int) -> float | None:
        n = self.dim
        if n == 1:
            return self.sup_density()
        slice_law = RadialLaw(n - 1, self.p, self.p)
        return (
            math.exp(self._log_c)
            * self.sigma ** (n - 1)
            * (n - 1)
            * unit_ball_volume(n - 1)
            * slice_law.norm
        )

    def to_json(self) -> dict:
        return {"type": "pnorm", "n": self.dim, "p": self.p, "sigma": self.sigma}


class GaussianStd(Measure):
    def __init__(self, dim: int):
        self.dim = int(dim)
        self.even = True
        self.unconditional = True
        self.one_symmetric = True
        self.geometric = True

    def log_density(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return -0.5 * np.sum(X * X, axis=1) - 0.5 * self.dim * math.log(2.0 * math.pi)

    def sup_density(self) -> float:
        return (2.0 * math.pi) ** (-self.dim / 2.0)

    def level_set(self, t: float) -> LevelSet:
        if t < 0:
            raise MeasureError("level parameter must be nonnegative")
        if t == 0:
            t = 1e-12
        return LevelSet(t, body=Ball(np.zeros(self.dim), math.sqrt(2.0 * t)))

    def exact_moments(self):
        return np.zeros(self.dim), np.eye(self.dim)

    def exact_abs_moments(self):
        n = self.dim
        m1 = math.sqrt(2.0) * math.gamma((n + 1) / 2.0) / math.gamma(n / 2.0)
        return m1, n - m1 * m1

    def axis_marginal_at0(self, k: int) -> float:
        return 1.0 / _SQRT2PI

    def to_json(self) -> dict:
        return {"type": "gaussian_std", "n": self.dim}


class BodyNorm(Measure):
    """Density c * exp(-||x/sigma||_K^p) for a symmetric convex body K."""

    def __init__(self, body: ConvexBody, p: float, sigma: float = 1.0):
        if p < 1:
            raise MeasureError("p must be at least 1")
        if not _body_is_symmetric(body):
            raise MeasureError("body-norm measures need a symmetric body")
        self.body = body
        self.dim = body.dim
        self.p, self.sigma = float(p), float(sigma)
        self._H = body.to_hpolytope() if body.is_polytopal() else None
        self._vol = bodies.volume(body)
        n = self.dim
        self._log_c = -(
            n * math.log(self.sigma) + math.log(self._vol) + math.lgamma(n / self.p + 1.0)
        )
        self.radial = RadialLaw(n, self.p, 1.0)
        self.even = True
        self.unconditional = _body_is_unconditional(body)
        self.one_symmetric = False
        self.geometric = True

    def gauge(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self._H is not None:
            return self._H.gauge(X)
        return np.linalg.norm(X - self.body.center, axis=1) / self.body.radius

    def log_density(self, X) -> np.ndarray:
        g = self.gauge(np.atleast_2d(np.asarray(X, dtype=float)) / self.sigma)
        return self._log_c - g ** self.p

    def sup_density(self) -> float:
        return math.exp(self._log_c)

    def level_set(self, t: float) -> LevelSet:
        if t < 0:
            raise MeasureError("level parameter must be nonnegative")
        if t == 0:
            t = 1e-12
        return LevelSet(t, body=bodies.dilate(self.body, self.sigma * t ** (1.0 / self.p)))

    def uniform_second_moment(self) -> np.ndarray:
        if isinstance(self.body, Ball):
            return self.body.radius ** 2 / (self.dim + 2) * np.eye(self.dim)
        verts, simplices, vols = bodies.triangulate(self.body)
        _, cov = _simplex_mixture_moments(verts, simplices, vols)[:2]
        return cov

    def exact_moments(self):
        n = self.dim
        scale = self.sigma ** 2 * self.radial.moment(2.0) * (n + 2) / n
        return np.zeros(n), scale * self.uniform_second_moment()

    def axis_marginal_at0(self, k: int) -> float | None:
        n = self.dim
        if n == 1:
            return self.sup_density()
        if self._H is None:
            return None
        sec = _axis_section_volume(self._H, k)
        if sec is None:
            return None
        return (
            math.exp(self._log_c)
            * self.sigma ** (n - 1)
            * sec
            * math.gamma((n - 1) / self.p + 1.0)
        )

    def to_json(self) -> dict:
        return {
            "type": "body_norm",
            "body": self.body.to_json(),
            "p": self.p,
            "sigma": self.sigma,
        }


class ProductMeasure(Measure):
    def __init__(self, factors):
        self.factors = list(factors)
        if not self.factors:
            raise MeasureError("product measure needs at least one factor")
        self.dim = len(self.factors)
        self.even = all(f.even for f in self.factors)
        self.unconditional = self.even
        self.one_symmetric = self.even and len({f.key() for f in self.factors}) == 1
        self.geometric = all(abs(f.mode()) < 1e-12 for f in self.factors)

    def log_density(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.zeros(X.shape[0])
        for k, f in enumerate(self.factors):
            with np.errstate(divide="ignore"):
                out += np.log(f.density(X[:, k]))
        return out

    def sup_density(self) -> float:
        return float(np.prod([f.sup_density() for f in self.factors]))

    def exact_moments(self):
        bar = np.array([f.mean() for f in self.factors])
        cov = np.diag([f.var() for f in self.factors])
        return bar, cov

    def axis_marginal_at0(self, k: int) -> float:
        return float(self.factors[k].density(np.array([0.0]))[0])

    def marginal(self, k: int) -> "Measure1D":
        return self.factors[k]

    def to_json(self) -> dict:
        return {"type": "product", "factors": [f.to_json() for f in self.factors]}


class GeneralLogDensity(Measure):
    """Black-box log-density with a declared maximizer; no closed forms."""

    def __init__(self, dim: int, log_density_fn, sup_point, flags: dict | None = None, sampler=None, name: str = "general"):
        self.dim = int(dim)
        self._fn = log_density_fn
        self.sup_point = np.asarray(sup_point, dtype=float).ravel()
        self._sup = float(np.exp(self._fn(self.sup_point[None, :])[0]))
        self.sampler = sampler
        self.name = name
        flags = flags or {}
        self.even = bool(flags.get("even", False))
        self.unconditional = bool(flags.get("unconditional", False))
        self.one_symmetric = bool(flags.get("one_symmetric", False))
        self.geometric = bool(flags.get("geometric", np.linalg.norm(self.sup_point) < 1e-12))
        self._check_log_concavity()

    def log_density(self, X) -> np.ndarray:
        return np.asarray(self._fn(np.atleast_2d(np.asarray(X, dtype=float))), dtype=float)

    def sup_density(self) -> float:
        return self._sup

    def key(self) -> str:
        return f"general:{self.name}:{id(self._fn)}"

    def to_json(self) -> dict:
        raise MeasureError("black-box densities are not serializable")


class AffineImage(Measure):
    """Push-forward of a base measure under x -> lin @ (x - shift)."""

    def __init__(self, base: Measure, amap: AffineMap):
        self.base = base
        self.map = amap
        self.dim = base.dim
        self._inv = np.linalg.inv(amap.lin)
        self._logdet = float(np.linalg.slogdet(amap.lin)[1])
        self.even = base.even and bool(np.linalg.norm(amap.shift) < 1e-12)
        self.unconditional = False
        self.one_symmetric = False
        self.geometric = False

    def log_density(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        back = X @ self._inv.T + self.map.shift
        return self.base.log_density(back) - self._logdet

    def sup_density(self) -> float:
        return self.base.sup_density() * math.exp(-self._logdet)

    def level_set(self, t: float) -> LevelSet:
        base_ls = self.base.level_set(t)

        def member(X):
            X = np.atleast_2d(np.asarray(X, dtype=float))
            return base_ls.contains(X @ self._inv.T + self.map.shift)

        return LevelSet(t, contains_fn=member, dim=self.dim)

    def key(self) -> str:
        return f"affine:{self.base.key()}:{self.map.lin.tobytes().hex()[:16]}"

    def to_json(self) -> dict:
        raise MeasureError("affine images of black-box densities are not serializable")


# ---------------------------------------------------------------------------
# One-dimensional measures


class Measure1D:
    even: bool = False

    def density(self, x) -> np.ndarray:
        raise NotImplementedError

    def cdf(self, x) -> np.ndarray:
        raise NotImplementedError

    def ppf(self, u) -> np.ndarray:
        raise NotImplementedError

    def sup_density(self) -> float:
        raise NotImplementedError

    def mean(self) -> float:
        raise NotImplementedError

    def var(self) -> float:
        raise NotImplementedError

    def mode(self) -> float:
        raise NotImplementedError

    def support(self) -> tuple:
        return (-math.inf, math.inf)

    def density_outside_left(self, x: float) -> float:
        """Left limit f(x-); zero at and below the support's lower endpoint.

        Families with a known support are continuous on its interior, so the
        limit is the density itself except at the endpoints.
        """
        lo, hi = self.support()
        if x <= lo or x > hi:
            return 0.0
        return float(self.density(np.array([min(x, hi)]))[0])

    def density_outside_right(self, x: float) -> float:
        """Right limit f(x+); zero at and above the support's upper endpoint."""
        lo, hi = self.support()
        if x >= hi or x < lo:
            return 0.0
        return float(self.density(np.array([max(x, lo)]))[0])

    def at_support_boundary(self, x: float, tol: float = 1e-9) -> bool:
        lo, hi = self.support()
        return (math.isfinite(lo) and abs(x - lo) <= tol) or (
            math.isfinite(hi) and abs(x - hi) <= tol
        )

    def standardized(self) -> "Measure1D":
        """Affine image with mean 0 and variance 1, within the same family."""
        raise NotImplementedError

    def key(self) -> str:
        import json

        return json.dumps(self.to_json(), sort_keys=True)

    def to_json(self) -> dict:
        raise NotImplementedError


class Uniform1D(Measure1D):
    def __init__(self, a: float, b: float):
        if b <= a:
            raise MeasureError("need a < b")
        self.a, self.b = float(a), float(b)
        self.even = abs(a + b) < 1e-12

    def density(self, x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= self.a) & (x <= self.b), 1.0 / (self.b - self.a), 0.0)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.clip((x - self.a) / (self.b - self.a), 0.0, 1.0)

    def ppf(self, u):
        return self.a + (self.b - self.a) * np.asarray(u, dtype=float)

    def sup_density(self):
        return 1.0 / (self.b - self.a)

    def mean(self):
        return 0.5 * (self.a + self.b)

    def var(self):
        return (self.b - self.a) ** 2 / 12.0

    def mode(self):
        return 0.5 * (self.a + self.b)

    def support(self):
        return (self.a, self.b)

    def standardized(self):
        m, s = self.mean(), math.sqrt(self.var())
        return Uniform1D((self.a - m) / s, (self.b - m) / s)

    def to_json(self):
        return {"type": "uniform", "a": self.a, "b": self.b}


class ShiftedExp(Measure1D):
    """Density rate * exp(-rate (x - shift)) on [shift, inf)."""

    def __init__(self, rate: float, shift: float):
        if rate <= 0:
            raise MeasureError("rate must be positive")
        self.rate, self.shift = float(rate), float(shift)
        self.even = False

    def density(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros_like(x)
        ok = x >= self.shift
        out[ok] = self.rate * np.exp(-self.rate * (x[ok] - self.shift))
        return out

    def cdf(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros_like(x)
        ok = x >= self.shift
        out[ok] = 1.0 - np.exp(-self.rate * (x[ok] - self.shift))
        return out

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        return self.shift - np.log1p(-u) / self.rate

    def sup_density(self):
        return self.rate

    def mean(self):
        return self.shift + 1.0 / self.rate

    def var(self):
        return 1.0 / self.rate ** 2

    def mode(self):
        return self.shift

    def support(self):
        return (self.shift, math.inf)

    def standardized(self):
        return ShiftedExp(1.0, -1.0)

    def to_json(self):
        return {"type": "shifted_exp", "rate": self.rate, "shift": self.shift}


class Gaussian1D(Measure1D):
    def __init__(self, mean: float = 0.0, std: float = 1.0):
        if std <= 0:
            raise MeasureError("std must be positive")
        self.m, self.s = float(mean), float(std)
        self.even = abs(self.m) < 1e-12

    def density(self, x):
        x = np.asarray(x, dtype=float)
        z = (x - self.m) / self.s
        return np.exp(-0.5 * z * z) / (self.s * _SQRT2PI)

    def cdf(self, x):
        from scipy.special import ndtr

        return ndtr((np.asarray(x, dtype=float) - self.m) / self.s)

    def ppf(self, u):
        from scipy.special import ndtri

        return self.m + self.s * ndtri(np.asarray(u, dtype=float))

    def sup_density(self):
        return 1.0 / (self.s * _SQRT2PI)

    def mean(self):
        return self.m

    def var(self):
        return self.s ** 2

    def mode(self):
        return self.m

    def standardized(self):
        return Gaussian1D(0.0, 1.0)

    def to_json(self):
        return {"type": "gaussian", "mean": self.m, "std": self.s}


class TruncatedLinear(Measure1D):
    """Decreasing linear density 2(b - x)/(b - a)^2 on [a, b]."""

    def __init__(self, a: float, b: float):
        if b <= a:
            raise MeasureError("need a < b")
        self.a, self.b = float(a), float(b)
        self.even = False

    def density(self, x):
        x = np.asarray(x, dtype=float)
        w = self.b - self.a
        return np.where((x >= self.a) & (x <= self.b), 2.0 * (self.b - x) / w ** 2, 0.0)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        w = self.b - self.a
        inside = 1.0 - (self.b - np.clip(x, self.a, self.b)) ** 2 / w ** 2
        return np.clip(inside, 0.0, 1.0)

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        return self.b - (self.b - self.a) * np.sqrt(1.0 - u)

    def sup_density(self):
        return 2.0 / (self.b - self.a)

    def mean(self):
        return self.a + (self.b - self.a) / 3.0

    def var(self):
        return (self.b - self.a) ** 2 / 18.0

    def mode(self):
        return self.a

    def support(self):
        return (self.a, self.b)

    def standardized(self):
        m, s = self.mean(), math.sqrt(self.var())
        return TruncatedLinear((self.a - m) / s, (self.b - m) / s)

    def to_json(self):
        return {"type": "truncated_linear", "a": self.a, "b": self.b}


class Empirical1D(Measure1D):
    """Kernel-free marginal estimate: smoothed empirical CDF on a fixed grid."""

    GRID = 512
    RANGE = 8.0
    SMOOTH = 5

    def __init__(self, samples: np.ndarray):
        s = np.sort(np.asarray(samples, dtype=float))
        self.samples = s
        self.n = s.shape[0]
        g = np.linspace(-self.RANGE, self.RANGE, self.GRID)
        F = np.searchsorted(s, g, side="right") / self.n
        w = self.SMOOTH
        kernel = np.ones(w) / w
        Fs = np.convolve(np.pad(F, (w // 2, w // 2), mode="edge"), kernel, mode="valid")
        Fs = np.maximum.accumulate(Fs)
        d = np.zeros_like(g)
        dx = g[1] - g[0]
        d[1:-1] = (Fs[2:] - Fs[:-2]) / (2 * dx)
        self.grid, self.cdf_grid, self.dens_grid = g, Fs, d
        j = int(np.argmax(d))
        self._sup = float(d[j])
        self._mode = float(g[j])
        lo = max(j - 1, 0)
        hi = min(j + 1, self.GRID - 1)
        mass = max(float(F[hi] - F[lo]), 0.0)
        self.sup_stderr = math.sqrt(max(mass * (1 - mass), 1e-12) / self.n) / (g[hi] - g[lo])

    def density(self, x):
        x = np.asarray(x, dtype=float)
        return np.interp(x, self.grid, self.dens_grid, left=0.0, right=0.0)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.searchsorted(self.samples, x, side="right") / self.n

    def ppf(self, u):
        return np.quantile(self.samples, np.asarray(u, dtype=float))

    def sup_density(self):
        return self._sup

    def mean(self):
        return float(self.samples.mean())

    def var(self):
        return float(self.samples.var())

    def mode(self):
        return self._mode

    def to_json(self):
        return {"type": "empirical", "n": self.n}


# ---------------------------------------------------------------------------
# Structure helpers


def _body_is_symmetric(body: ConvexBody) -> bool:
    if isinstance(body, Ball):
        return bool(np.linalg.norm(body.center) < 1e-10)
    if body.is_polytopal():
        H = body.to_hpolytope()
        rows = np.concatenate([H.A, H.b[:, None]], axis=1)
        neg = np.concatenate([-H.A, H.b[:, None]], axis=1)
        return _same_row_sets(rows, neg)
    return False


def _body_is_unconditional(body: ConvexBody) -> bool:
    if isinstance(body, Ball):
        return bool(np.linalg.norm(body.center) < 1e-10)
    if not body.is_polytopal():
        return False
    H = body.to_hpolytope()
    rows = np.concatenate([H.A, H.b[:, None]], axis=1)
    for k in range(body.dim):
        flip = rows.copy()
        flip[:, k] *= -1.0
        if not _same_row_sets(rows, flip):
            return False
    return True


def _same_row_sets(R1: np.ndarray, R2: np.ndarray, tol: float = 1e-8) -> bool:
    a = np.array(sorted(tuple(np.round(r / tol).astype(np.int64)) for r in R1))
    b = np.array(sorted(tuple(np.round(r / tol).astype(np.int64)) for r in R2))
    if a.shape != b.shape:
        return False
    return bool(np.all(np.abs(a - b) <= 1))


def _simplex_mixture_moments(verts: np.ndarray, simplices, vols: np.ndarray):
    """Exact barycenter/covariance of the uniform measure on a triangulated body."""
    n = verts.shape[1]
    total = vols.sum()
    bar = np.zeros(n)
    second = np.zeros((n, n))
    for s, v in zip(simplices, vols):
        W = verts[list(s)]
        sw = W.sum(axis=0)
        bar += v * sw / (n + 1)
        second += v * (np.outer(sw, sw) + W.T @ W) / ((n + 1) * (n + 2))
    bar /= total
    second /= total
    return bar, second - np.outer(bar, bar)


def _axis_section_volume(H: HPolytope, k: int) -> float | None:
    """(n-1)-volume of the section {x in H : x_k = 0}.

    Returns None (no closed form) when the section exceeds the exact
    enumeration caps; returns 0.0 only for genuinely flat or empty sections.
    """
    n = H.dim
    if n == 1:
        return 1.0 if bool(H.contains(np.zeros(1))) else 0.0
    keep = [i for i in range(n) if i != k]
    Ak = H.A[:, keep]
    norms = np.linalg.norm(Ak, axis=1)
    live = norms > 1e-12
    if np.any(~live & (H.b < -1e-12)):
        return 0.0
    try:
        sec = HPolytope(Ak[live], H.b[live])
        return bodies.volume(sec)
    except bodies.CapExceededError:
        return None
    except (bodies.EmptyBodyError, bodies.DegenerateBodyError):
        return 0.0


# ---------------------------------------------------------------------------
# Operations


def moments(mu: Measure, samples: int = 100_000, seed: int = 0) -> Moments:
    exact = mu.exact_moments()
    abs_exact = mu.exact_abs_moments()
    if exact is not None and abs_exact is not None:
        bar, cov = exact
        return Moments(bar, cov, abs_exact[0], abs_exact[1], exact=True)
    from .estimation import SamplerConfig, draw_samples

    if samples < 10_000:
        raise MeasureError("need at least 1e4 samples for moment estimation")
    X = draw_samples(mu, SamplerConfig(seed=seed, samples=samples))
    r = np.linalg.norm(X, axis=1)
    mean_abs = float(r.mean())
    var_abs = float(r.var())
    if exact is not None:
        bar, cov = exact
        return Moments(
            bar,
            cov,
            mean_abs,
            var_abs,
            exact=False,
            samples=samples,
            seed=seed,
            stderr_abs=float(r.std() / math.sqrt(samples)),
        )
    bar = X.mean(axis=0)
    cov = np.cov(X.T, bias=False).reshape(mu.dim, mu.dim)
    return Moments(
        bar,
        cov,
        mean_abs,
        var_abs,
        exact=False,
        samples=samples,
        seed=seed,
        stderr_bar=X.std(axis=0) / math.sqrt(samples),
        stderr_abs=float(r.std() / math.sqrt(samples)),
    )


def _inv_sqrt_psd(cov: np.ndarray, floor: float = 1e-12):
    w, V = np.linalg.eigh(cov)
    if np.any(w < 1e-10):
        raise MeasureError("singular covariance: measure not full-dimensional")
    w = np.maximum(w, floor)
    return (V * (1.0 / np.sqrt(w))) @ V.T


def isotropize(mu: Measure, samples: int = 100_000, seed: int = 0):
    """Whiten to barycenter 0 and identity covariance; returns (measure, map)."""
    mom = moments(mu, samples=samples, seed=seed)
    bar, cov = mom.barycenter, mom.cov
    W = _inv_sqrt_psd(cov)
    amap = AffineMap(lin=W, shift=bar.copy())
    if amap.is_identity(tol=1e-9):
        return mu, AffineMap(lin=np.eye(mu.dim), shift=np.zeros(mu.dim))
    if isinstance(mu, UniformBody):
        return UniformBody(_affine_body(mu.body, W, bar)), amap
    if isinstance(mu, GaussianStd):
        return mu, amap
    if isinstance(mu, PNormRadial):
        v = mu.coordinate_variance()
        return PNormRadial(mu.dim, mu.p, mu.sigma / math.sqrt(v)), amap
    if isinstance(mu, BodyNorm):
        return BodyNorm(_affine_body(mu.body, W, np.zeros(mu.dim)), mu.p, mu.sigma), amap
    if isinstance(mu, ProductMeasure):
        return ProductMeasure([f.standardized() for f in mu.factors]), amap
    return AffineImage(mu, amap), amap


def _affine_body(body: ConvexBody, W: np.ndarray, shift: np.ndarray) -> ConvexBody:
    """Image of a body under x -> W (x - shift)."""
    if isinstance(body, Ball):
        scales = np.linalg.eigvalsh(W)
        if np.ptp(scales) > 1e-9 * scales.mean():
            raise MeasureError("ball support requires an isotropic whitening map")
        return Ball(W @ (body.center - shift), float(scales.mean()) * body.radius)
    if isinstance(body, VPolytope):
        return VPolytope((body.verts - shift) @ W.T)
    H = body.to_hpolytope()
    Winv = np.linalg.inv(W)
    return HPolytope(H.A @ Winv, H.b - H.A @ shift, validate=False)


def isotropic_constant(mu: Measure, mom: Moments | None = None) -> float:
    """sup(f)^(1/n) * det(Cov)^(1/(2n)) for a probability density f."""
    if mom is None:
        mom = moments(mu)
    n = mu.dim
    sign, logdet = np.linalg.slogdet(mom.cov)
    if sign <= 0:
        raise MeasureError("covariance not positive definite")
    return float(mu.sup_density() ** (1.0 / n) * math.exp(logdet / (2.0 * n)))


def marginal_1d(mu: Measure, xi, samples: int = 100_000, seed: int = 0) -> Measure1D:
    """One-dimensional marginal along a unit direction.

    Exact for the standard Gaussian (any direction) and for products along
    coordinate axes; otherwise an empirical estimate from projected samples.
    """
    xi = np.asarray(xi, dtype=float).ravel()
    if abs(np.linalg.norm(xi) - 1.0) > 1e-8:
        raise MeasureError("marginal direction must be a unit vector")
    if isinstance(mu, GaussianStd):
        return Gaussian1D(0.0, 1.0)
    if isinstance(mu, ProductMeasure):
        k = int(np.argmax(np.abs(xi)))
        e = np.zeros(mu.dim)
        e[k] = 1.0
        if np.allclose(xi, e, atol=1e-12):
            return mu.factors[k]
    from .estimation import SamplerConfig, draw_samples

    X = draw_samples(mu, SamplerConfig(seed=seed, samples=samples))
    return Empirical1D(X @ xi)


def level_set(mu: Measure, t: float) -> LevelSet:
    return mu.level_set(t)


# ---------------------------------------------------------------------------
# JSON


def factor_from_json(doc: dict) -> Measure1D:
    kind = doc.get("type")
    if kind == "uniform":
        return Uniform1D(doc["a"], doc["b"])
    if kind == "shifted_exp":
        return ShiftedExp(doc["rate"], doc["shift"])
    if kind == "gaussian":
        return Gaussian1D(doc["mean"], doc["std"])
    if kind == "truncated_linear":
        return TruncatedLinear(doc["a"], doc["b"])
    raise MeasureError(f"unknown 1d factor type {kind!r}")


def measure_from_json(doc: dict) -> Measure:
    kind = doc.get("type")
    if kind == "uniform_body":
        return UniformBody(bodies.body_from_json(doc["body"]))
    if kind == "pnorm":
        return PNormRadial(doc["n"], doc["p"], doc.get("sigma", 1.0))
    if kind == "gaussian_std":
        return GaussianStd(doc["n"])
    if kind == "body_norm":
        return BodyNorm(bodies.body_from_json(doc["body"]), doc["p"], doc.get("sigma", 1.0))
    if kind == "product":
        return ProductMeasure([factor_from_json(f) for f in doc["factors"]])
    raise MeasureError(f"unknown measure type {kind!r}")
