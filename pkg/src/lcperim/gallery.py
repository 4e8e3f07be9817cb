"""Closed-form gallery: the named extremal bodies and measures.

Each entry records its structural constants (isotropic constant, origin
inradius, surface area, volume, maximal perimeter) in closed form where
known; the test suite audits every entry by recomputing the constants
through the geometry and measure operations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from . import bodies
from .bodies import ConvexBody, HPolytope, VPolytope
from .measures import (
    BodyNorm,
    GaussianStd,
    Measure,
    Measure1D,
    PNormRadial,
    ProductMeasure,
    ShiftedExp,
    TruncatedLinear,
    Uniform1D,
    UniformBody,
)

__all__ = [
    "GalleryEntry",
    "regular_simplex_isotropic",
    "cube_isotropic",
    "cross_polytope_isotropic",
    "extremal_1d",
    "pnorm_isotropic",
    "body_norm_isotropic",
    "product_measure",
    "gallery_names",
    "gallery_measure",
]


@dataclass
class GalleryEntry:
    name: str
    body: ConvexBody | None = None
    measure: Measure | None = None
    factor: Measure1D | None = None
    meta: dict = field(default_factory=dict)
    notes: str = ""


def regular_simplex_vertices(n: int) -> np.ndarray:
    """n+1 unit vectors with pairwise inner product -1/n summing to zero."""
    ones = np.ones((n + 1, 1))
    basis = np.linalg.qr(np.concatenate([ones, np.eye(n + 1)[:, :n]], axis=1))[0][:, 1:]
    U = (np.eye(n + 1) - np.ones((n + 1, n + 1)) / (n + 1)) @ basis
    V = U * math.sqrt((n + 1) / n)
    return V


def regular_simplex_isotropic(n: int) -> GalleryEntry:
    """Regular simplex scaled to volume one, centered at its incenter."""
    if not 2 <= n <= 8:
        raise ValueError("simplex gallery supports 2 <= n <= 8")
    V0 = regular_simplex_vertices(n)
    # unit-volume rescaling from the exact fan determinant
    edges = V0[1:] - V0[0]
    vol0 = abs(float(np.linalg.det(edges))) / math.factorial(n)
    beta = vol0 ** (-1.0 / n)
    body = VPolytope(beta * V0)
    r = beta / n
    L = beta / math.sqrt(n * (n + 2))
    S = n / r
    gamma = math.sqrt(n / (n + 2)) * n
    measure = UniformBody(bodies.dilate(body, 1.0 / L))
    return GalleryEntry(
        name=f"simplex{n}",
        body=body,
        measure=measure,
        meta={"n": n, "L": L, "r": r, "S": S, "vol": 1.0, "gamma": gamma, "beta": beta},
        notes="sharp case of the uniform-measure perimeter bound",
    )


def cube_isotropic(n: int) -> GalleryEntry:
    if not 1 <= n <= 8:
        raise ValueError("cube gallery supports 1 <= n <= 8")
    body = bodies.cube(n, 0.5)
    L = 1.0 / math.sqrt(12.0)
    measure = UniformBody(bodies.cube(n, math.sqrt(3.0)))
    return GalleryEntry(
        name=f"cube{n}",
        body=body,
        measure=measure,
        meta={"n": n, "L": L, "r": 0.5, "S": 2.0 * n, "vol": 1.0, "gamma": n / math.sqrt(3.0)},
        notes="linear-growth example: perimeter constant n/sqrt(3)",
    )


def cross_polytope_isotropic(n: int) -> GalleryEntry:
    if not 2 <= n <= 8:
        raise ValueError("cross-polytope gallery supports 2 <= n <= 8")
    alpha = math.exp(math.lgamma(n + 1) / n) / 2.0
    body = bodies.cross_polytope(n, alpha)
    L = alpha * math.sqrt(2.0 / ((n + 1) * (n + 2)))
    r = alpha / math.sqrt(n)
    S = n / r
    measure = UniformBody(bodies.dilate(body, 1.0 / L))
    return GalleryEntry(
        name=f"cross{n}",
        body=body,
        measure=measure,
        meta={"n": n, "L": L, "r": r, "S": S, "vol": 1.0, "gamma": L * S, "alpha": alpha},
        notes="unit-volume cross-polytope; incenter at the origin",
    )


def extremal_1d() -> GalleryEntry:
    factor = ShiftedExp(1.0, -1.0)
    return GalleryEntry(
        name="shifted_exp",
        factor=factor,
        measure=ProductMeasure([factor]),
        meta={"n": 1, "sup": 1.0, "gamma": 2.0, "mean": 0.0, "var": 1.0},
        notes="one-sided exponential: saturates the 1d perimeter bound",
    )


def pnorm_isotropic(n: int, p: float) -> GalleryEntry:
    """Radial density exp(-|x/sigma|^p / p) with sigma tuned to unit
    coordinate variance by radial quadrature and Brent root-finding."""
    if p < 1:
        raise ValueError("p must be at least 1")

    def coord_var(sigma: float) -> float:
        num = quad(lambda r: r ** (n + 1) * math.exp(-(r ** p) / p), 0, np.inf)[0]
        den = quad(lambda r: r ** (n - 1) * math.exp(-(r ** p) / p), 0, np.inf)[0]
        return sigma * sigma * num / den / n

    guess = 1.0 / math.sqrt(coord_var(1.0))
    sigma = brentq(lambda s: coord_var(s) - 1.0, 0.1 * guess, 10.0 * guess, xtol=1e-10)
    measure = PNormRadial(n, p, sigma)
    return GalleryEntry(
        name=f"pnorm{n}_p{p:g}",
        measure=measure,
        meta={"n": n, "p": p, "sigma": sigma, "sup": measure.sup_density()},
        notes="rotationally invariant family interpolating Gaussian and uniform-like tails",
    )


def body_norm_isotropic(n: int, p: float, shape: str = "cube") -> GalleryEntry:
    """Homogeneous-level-set measure exp(-||x/sigma||_K^p), K a cube or
    cross-polytope, sigma tuned so the covariance is the identity."""
    if shape == "cube":
        K = bodies.cube(n, 0.5)
    elif shape == "cross":
        K = bodies.cross_polytope(n, 1.0)
    else:
        raise ValueError("shape must be 'cube' or 'cross'")
    probe = BodyNorm(K, p, 1.0)
    _, cov = probe.exact_moments()
    diag = np.diag(cov)
    if np.ptp(diag) > 1e-9 * diag.mean() or np.abs(cov - np.diag(diag)).max() > 1e-9 * diag.mean():
        raise ValueError("shape does not give a covariance multiple of the identity")
    sigma = 1.0 / math.sqrt(float(diag.mean()))
    measure = BodyNorm(K, p, sigma)
    return GalleryEntry(
        name=f"bodynorm_{shape}{n}_p{p:g}",
        body=K,
        measure=measure,
        meta={"n": n, "p": p, "sigma": sigma, "sup": measure.sup_density()},
        notes="level sets are dilates of a fixed symmetric body",
    )


def product_measure(factors) -> GalleryEntry:
    factors = list(factors)
    measure = ProductMeasure(factors)
    return GalleryEntry(
        name=f"product{len(factors)}",
        measure=measure,
        meta={
            "n": len(factors),
            "sup": measure.sup_density(),
            "sum_factor_sups": float(sum(f.sup_density() for f in factors)),
        },
        notes="product of one-dimensional log-concave factors",
    )


# ---------------------------------------------------------------------------
# Named lookups used by the CLI and the suite


def one_d_gallery() -> list[Measure1D]:
    """Standardized one-dimensional gallery densities (mean 0, variance 1)."""
    return [
        Uniform1D(-math.sqrt(3.0), math.sqrt(3.0)),
        ShiftedExp(1.0, -1.0),
        Gaussian_std_1d(),
        TruncatedLinear(0.0, 1.0).standardized(),
    ]


def Gaussian_std_1d():
    from .measures import Gaussian1D

    return Gaussian1D(0.0, 1.0)


def gallery_names() -> list[str]:
    return [
        "gaussian",
        "cube",
        "simplex",
        "cross",
        "pnorm:1",
        "pnorm:1.5",
        "pnorm:3",
        "bodynorm_cube:1",
        "bodynorm_cube:2",
        "product_exp",
        "product_uniform",
        "shifted_exp",
    ]


def gallery_measure(name: str, n: int) -> GalleryEntry:
    """Resolve a gallery measure by name at dimension n."""
    if name == "gaussian":
        return GalleryEntry(name=f"gaussian{n}", measure=GaussianStd(n), meta={"n": n})
    if name == "cube":
        return cube_isotropic(n)
    if name == "simplex":
        return regular_simplex_isotropic(n)
    if name == "cross":
        return cross_polytope_isotropic(n)
    if name.startswith("pnorm:"):
        return pnorm_isotropic(n, float(name.split(":", 1)[1]))
    if name.startswith("bodynorm_cube:"):
        return body_norm_isotropic(n, float(name.split(":", 1)[1]), "cube")
    if name == "product_exp":
        return product_measure([ShiftedExp(1.0, -1.0) for _ in range(n)])
    if name == "product_uniform":
        s3 = math.sqrt(3.0)
        return product_measure([Uniform1D(-s3, s3) for _ in range(n)])
    if name == "shifted_exp":
        return extremal_1d()
    raise ValueError(f"unknown gallery name {name!r}")
