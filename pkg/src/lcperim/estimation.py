"""Seeded sampling from every measure family and Monte-Carlo estimation.

Determinism contract: every estimator is a pure function of (measure, body,
config).  Derived seeds come from a splitmix-style 64-bit mixer applied to
``cfg.seed`` XOR a role tag, so independent streams (chains, facets) never
overlap and replays are bit-identical.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass

import numpy as np

from . import bodies
from .bodies import Ball, ConvexBody
from .measures import (
    AffineImage,
    BodyNorm,
    GaussianStd,
    GeneralLogDensity,
    Measure,
    NoSamplerError,
    PNormRadial,
    ProductMeasure,
    UniformBody,
)

_M64 = (1 << 64) - 1


def mix64(z: int) -> int:
    """splitmix64 finalizer; the seed-splitting function for derived streams."""
    z = (z + 0x9E3779B97F4A7C15) & _M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return (z ^ (z >> 31)) & _M64


def tag_seed(seed: int, *tags) -> int:
    """Derive an independent stream seed from a base seed and string/int tags."""
    z = seed & _M64
    for t in tags:
        if isinstance(t, str):
            t = zlib.crc32(t.encode())
        z = mix64(z ^ (int(t) & _M64))
    return z


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed & _M64))


@dataclass(frozen=True)
class SamplerConfig:
    seed: int = 0
    samples: int = 100_000
    burn_in: int | None = None  # hit-and-run; default 10 n^2
    thinning: int | None = None  # hit-and-run; default n
    chains: int = 8

    def burn_in_for(self, n: int) -> int:
        return self.burn_in if self.burn_in is not None else 10 * n * n

    def thinning_for(self, n: int) -> int:
        return self.thinning if self.thinning is not None else n

    def key(self) -> tuple:
        return (self.seed, self.samples, self.burn_in, self.thinning, self.chains)


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float
    samples: int
    seed: int
    method: str

    def __add__(self, other: "Estimate") -> "Estimate":
        return Estimate(
            self.value + other.value,
            math.hypot(self.stderr, other.stderr),
            self.samples + other.samples,
            self.seed,
            self.method,
        )


def box_muller(rng: np.random.Generator, count: int) -> np.ndarray:
    pairs = (count + 1) // 2
    u1 = 1.0 - rng.random(pairs)
    u2 = rng.random(pairs)
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.concatenate([r * np.cos(2.0 * math.pi * u2), r * np.sin(2.0 * math.pi * u2)])
    return z[:count]


def gaussian_matrix(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return box_muller(rng, rows * cols).reshape(rows, cols)


def sphere_directions(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    G = gaussian_matrix(rng, count, n)
    norms = np.linalg.norm(G, axis=1)
    norms[norms < 1e-300] = 1.0
    return G / norms[:, None]


# ---------------------------------------------------------------------------
# Samplers per family


def draw_samples(mu: Measure, cfg: SamplerConfig) -> np.ndarray:
    """i.i.d. (or hit-and-run) samples of shape (cfg.samples, n)."""
    N, n = cfg.samples, mu.dim
    if isinstance(mu, GaussianStd):
        return gaussian_matrix(_rng(tag_seed(cfg.seed, "gauss")), N, n)
    if isinstance(mu, PNormRadial):
        rng = _rng(tag_seed(cfg.seed, "pnorm"))
        dirs = sphere_directions(rng, N, n)
        r = mu.radial.ppf(rng.random(N))
        return mu.sigma * r[:, None] * dirs
    if isinstance(mu, ProductMeasure):
        rng = _rng(tag_seed(cfg.seed, "product"))
        U = rng.random((N, n))
        cols = [f.ppf(U[:, k]) for k, f in enumerate(mu.factors)]
        return np.column_stack(cols)
    if isinstance(mu, UniformBody):
        return draw_uniform_body(mu.body, cfg)
    if isinstance(mu, BodyNorm):
        sub = SamplerConfig(
            seed=tag_seed(cfg.seed, "bodynorm-dir"),
            samples=N,
            burn_in=cfg.burn_in,
            thinning=cfg.thinning,
            chains=cfg.chains,
        )
        Y = draw_uniform_body(mu.body, sub)
        g = mu.gauge(Y)
        g[g < 1e-300] = 1.0
        theta = Y / g[:, None]
        rng = _rng(tag_seed(cfg.seed, "bodynorm-radial"))
        r = mu.radial.ppf(rng.random(N))
        return mu.sigma * r[:, None] * theta
    if isinstance(mu, AffineImage):
        base = draw_samples(mu.base, cfg)
        return mu.map.apply(base)
    if isinstance(mu, GeneralLogDensity):
        if mu.sampler is None:
            raise NoSamplerError(f"no sampler registered for {mu.key()}")
        return np.asarray(mu.sampler(cfg), dtype=float)
    raise NoSamplerError(f"no sampler for measure type {type(mu).__name__}")


def draw_uniform_body(body: ConvexBody, cfg: SamplerConfig, force: str | None = None) -> np.ndarray:
    """Uniform samples on a convex body.

    Exact rejection from the bounding box when the acceptance rate is at
    least 1e-3, hit-and-run otherwise; ``force`` overrides the choice for
    cross-validation tests.
    """
    N, n = cfg.samples, body.dim
    if isinstance(body, Ball) and force is None:
        rng = _rng(tag_seed(cfg.seed, "uniform-ball"))
        dirs = sphere_directions(rng, N, n)
        r = body.radius * rng.random(N) ** (1.0 / n)
        return body.center + r[:, None] * dirs
    lo, hi = bodies.bounding_box(body)
    vol_box = float(np.prod(hi - lo))
    acceptance = bodies.volume(body) / vol_box
    method = force or ("rejection" if acceptance >= 1e-3 else "hitrun")
    if method == "rejection":
        rng = _rng(tag_seed(cfg.seed, "uniform-reject"))
        out = np.empty((N, n))
        got = 0
        while got < N:
            need = N - got
            chunk = int(min(max(need / max(acceptance, 1e-6) * 1.3, 1024), 4_000_000))
            U = lo + (hi - lo) * rng.random((chunk, n))
            hit = U[body.contains(U)]
            take = min(hit.shape[0], need)
            out[got : got + take] = hit[:take]
            got += take
        return out
    return _hit_and_run(body, cfg)


def _hit_and_run(body: ConvexBody, cfg: SamplerConfig) -> np.ndarray:
    H = body.to_hpolytope()
    n = H.dim
    N = cfg.samples
    chains = cfg.chains
    burn = cfg.burn_in_for(n)
    thin = cfg.thinning_for(n)
    per_chain = (N + chains - 1) // chains
    steps = burn + per_chain * thin

    x = np.tile(H.chebyshev_inball().center, (chains, 1))
    dirs = np.empty((chains, steps, n))
    unif = np.empty((chains, steps))
    for k in range(chains):
        rng = _rng(tag_seed(cfg.seed, "hitrun-chain", k))
        dirs[k] = sphere_directions(rng, steps, n)
        unif[k] = rng.random(steps)

    A_T = H.A.T
    b = H.b
    out = np.empty((chains, per_chain, n))
    kept = 0
    for t in range(steps):
        d = dirs[:, t, :]
        num = b[None, :] - x @ A_T
        den = d @ A_T
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = num / den
        t_hi = np.where(den > 1e-12, ratio, np.inf).min(axis=1)
        t_lo = np.where(den < -1e-12, ratio, -np.inf).max(axis=1)
        t_hi = np.maximum(t_hi, t_lo)
        step = t_lo + unif[:, t] * (t_hi - t_lo)
        x = x + step[:, None] * d
        if t >= burn and (t - burn) % thin == thin - 1 and kept < per_chain:
            out[:, kept, :] = x
            kept += 1
    flat = out[:, :kept, :].reshape(-1, n)
    return flat[:N]


# ---------------------------------------------------------------------------
# Shared sample banks (common random numbers across bodies under one measure)


class SampleBank:
    def __init__(self):
        self._cache: dict = {}

    def get(self, mu: Measure, cfg: SamplerConfig) -> np.ndarray:
        key = (mu.key(), cfg.key())
        if key not in self._cache:
            self._cache[key] = draw_samples(mu, cfg)
        return self._cache[key]


def estimate_prob(
    mu: Measure, A, cfg: SamplerConfig, bank: SampleBank | None = None
) -> Estimate:
    """Monte-Carlo mass of a body (or any membership oracle) under mu."""
    X = (bank or SampleBank()).get(mu, cfg)
    inside = A.contains(X) if hasattr(A, "contains") else A(X)
    p = float(np.mean(inside))
    stderr = math.sqrt(max(p * (1.0 - p), 0.0) / X.shape[0])
    return Estimate(p, stderr, X.shape[0], cfg.seed, "mc-indicator")


# ---------------------------------------------------------------------------
# Facet sampling and boundary integrals


def sample_facet(facet: bodies.Facet, count: int, seed: int) -> np.ndarray:
    """Uniform points on a facet: pick a simplex of its triangulation with
    probability proportional to volume, then Dirichlet-uniform barycentrics."""
    n = facet.normal.shape[0]
    if n == 1 or facet.vertices.shape[0] == 1:
        return np.tile(facet.vertices[0], (count, 1))
    rng = _rng(tag_seed(seed, "facet"))
    cum = np.cumsum(facet.simplex_areas)
    total = cum[-1]
    if total <= 0:
        raise ValueError("cannot sample a zero-area facet")
    pick = np.searchsorted(cum, rng.random(count) * total, side="right")
    pick = np.minimum(pick, len(facet.simplices) - 1)
    k = len(facet.simplices[0])
    E = -np.log(1.0 - rng.random((count, k)))
    W = E / E.sum(axis=1, keepdims=True)
    verts_idx = np.array(facet.simplices)[pick]
    # map global vertex ids to coordinates via the facet's vertex table
    id_to_row = {vid: i for i, vid in enumerate(facet.vertex_ids)}
    rows = np.vectorize(id_to_row.get)(verts_idx)
    pts = facet.vertices[rows]
    return np.einsum("ck,ckn->cn", W, pts)


def estimate_facet_integral(
    mu: Measure, facet: bodies.Facet, count: int, seed: int
) -> Estimate:
    """Monte-Carlo estimate of the density integral over one facet."""
    pts = sample_facet(facet, count, seed)
    vals = mu.density(pts)
    mean = float(vals.mean())
    sd = float(vals.std())
    return Estimate(facet.area * mean, facet.area * sd / math.sqrt(count), count, seed, "facet-mc")
