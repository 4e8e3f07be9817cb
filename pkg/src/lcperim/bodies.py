"""Convex bodies: representations, oracles, and exact desk-scale geometry.

Bodies come in three concrete forms (H-polytope, V-polytope, Euclidean ball)
plus thin wrappers for origin dilations, translations, and intersections.
Every variant answers support-function and membership queries; polytopal
variants additionally expose exact vertex enumeration, facet decompositions
with (n-1)-volumes, volumes, and surface areas.

All exact polytope computations run through one pipeline: enumerate the
vertices (basic feasible solutions of n-subsets of the constraints), record
the vertex/constraint incidence, and triangulate each face recursively by
fanning from its lexicographically smallest vertex.  The pipeline is capped
at 30 constraints and dimension 8; inputs beyond the cap are rejected with
an explicit error rather than silently degrading.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .simplexlp import LPInfeasible, LPUnbounded, solve_lp

MEMBER_TOL = 1e-9
VERTEX_DEDUP_TOL = 1e-9
RANK_TOL = 1e-7
MAX_ENUM_ROWS = 30
MAX_ENUM_DIM = 8


class BodyError(ValueError):
    """Invalid convex-body input or unsupported operation."""


class UnboundedBodyError(BodyError):
    """Constraint system does not describe a compact set."""


class DegenerateBodyError(BodyError):
    """Body has empty interior (lower-dimensional)."""


class EmptyBodyError(BodyError):
    """Constraint system is infeasible."""


class EmptyIntersectionError(BodyError):
    """Intersection of two bodies is empty."""


class CapExceededError(BodyError):
    """Input exceeds the exact-enumeration caps (m <= 30, n <= 8)."""


class OriginNotInteriorError(BodyError):
    """Operation requires the origin strictly inside the body."""


def unit_ball_volume(n: int) -> float:
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def _affine_rank(points: np.ndarray) -> int:
    if points.shape[0] <= 1:
        return 0
    rel = points[1:] - points[0]
    scale = max(1.0, float(np.abs(points).max()))
    return int(np.linalg.matrix_rank(rel, tol=RANK_TOL * scale))


def _lexsort_rows(points: np.ndarray) -> np.ndarray:
    order = np.lexsort(points.T[::-1])
    return points[order]


def _dedup_points(points: np.ndarray, tol: float) -> np.ndarray:
    """Keep the lexicographically first representative of each tol-cluster."""
    if points.shape[0] == 0:
        return points
    pts = _lexsort_rows(points)
    kept = np.empty_like(pts)
    kept[0] = pts[0]
    k = 1
    for p in pts[1:]:
        if np.min(np.max(np.abs(kept[:k] - p), axis=1)) > tol:
            kept[k] = p
            k += 1
    return kept[:k].copy()


# ---------------------------------------------------------------------------
# Facet records and the shared enumeration/triangulation pipeline


@dataclass(frozen=True)
class Facet:
    """One facet of a polytope, together with a simplicial decomposition.

    ``simplices`` holds tuples of indices into the body's vertex array; each
    tuple lists the n vertices of one (n-1)-simplex of the facet.  For n = 1
    the facet is a single endpoint and its 0-dimensional volume is 1 by the
    counting convention, which makes boundary integrals come out as endpoint
    evaluations.
    """

    normal: np.ndarray
    offset: float
    vertex_ids: tuple
    vertices: np.ndarray
    area: float
    simplices: tuple
    simplex_areas: np.ndarray


def _simplex_volumes(verts: np.ndarray, simplices, d: int) -> np.ndarray:
    """d-dimensional volumes of simplices given by (d+1)-tuples of vertex ids."""
    if not simplices:
        return np.zeros(0)
    idx = np.array(simplices)
    pts = verts[idx]  # (s, d+1, n)
    edges = pts[:, 1:, :] - pts[:, :1, :]  # (s, d, n)
    gram = np.einsum("sik,sjk->sij", edges, edges)
    dets = np.linalg.det(gram)
    dets[dets < 0] = 0.0
    return np.sqrt(dets) / math.factorial(d)


class _Enumeration:
    """Vertices, incidence, facets, and triangulations of one H-polytope."""

    def __init__(self, A: np.ndarray, b: np.ndarray, vertices: np.ndarray | None = None):
        self.A = A
        self.b = b
        m, n = A.shape
        self.dim = n
        if vertices is None:
            vertices = _enumerate_basic_solutions(A, b)
        self.vertices = _lexsort_rows(vertices)
        scale = max(1.0, float(np.abs(self.vertices).max()))
        resid = self.vertices @ A.T - b
        self.incidence = np.abs(resid) <= 1e-7 * scale
        # Faces are manipulated as vertex-set bitmasks: one Python int per
        # face, one AND per candidate subface.  Vertices are lex-sorted, so
        # the lowest set bit is the lexicographically smallest vertex.
        self._row_bits = [
            int.from_bytes(np.packbits(col, bitorder="little").tobytes(), "little")
            for col in self.incidence.T
        ]
        self._vert_rows = [
            tuple(int(j) for j in np.where(row)[0]) for row in self.incidence
        ]
        self._memo: dict = {}
        self._dim_memo: dict = {}
        self.warnings: list[str] = []
        self.facets = self._build_facets()

    @staticmethod
    def _bits_to_ids(bits: int) -> tuple:
        out = []
        while bits:
            low = bits & -bits
            out.append(low.bit_length() - 1)
            bits ^= low
        return tuple(out)

    def _face_dim(self, bits: int) -> int:
        k = bits.bit_count()
        if k <= 3:
            # distinct extreme points are never collinear, so <=3 of them are
            # affinely independent and span a (k-1)-flat
            return k - 1
        d = self._dim_memo.get(bits)
        if d is None:
            d = _affine_rank(self.vertices[list(self._bits_to_ids(bits))])
            self._dim_memo[bits] = d
        return d

    def _fan(self, bits: int, d: int) -> list:
        if bits in self._memo:
            return self._memo[bits]
        anchor = (bits & -bits).bit_length() - 1
        if d == 0:
            out = [(anchor,)]
        else:
            out = []
            seen = set()
            anchor_rows = set(self._vert_rows[anchor])
            for j in range(self.A.shape[0]):
                if j in anchor_rows:
                    continue
                sub = bits & self._row_bits[j]
                if sub == 0 or sub in seen or sub.bit_count() < d:
                    continue
                seen.add(sub)
                if self._face_dim(sub) != d - 1:
                    continue
                for s in self._fan(sub, d - 1):
                    out.append((anchor,) + s)
        self._memo[bits] = out
        return out

    def _build_facets(self) -> list[Facet]:
        m, n = self.A.shape
        facets = []
        seen = set()
        for j in range(m):
            bits = self._row_bits[j]
            ids = self._bits_to_ids(bits)
            if not ids:
                continue
            if bits in seen:
                self.warnings.append(f"row {j}: duplicate facet hyperplane, dropped")
                continue
            if n == 1:
                seen.add(bits)
                facets.append(
                    Facet(
                        normal=self.A[j].copy(),
                        offset=float(self.b[j]),
                        vertex_ids=ids,
                        vertices=self.vertices[list(ids)],
                        area=1.0,
                        simplices=(ids[:1],),
                        simplex_areas=np.array([1.0]),
                    )
                )
                continue
            if len(ids) < n or self._face_dim(bits) != n - 1:
                self.warnings.append(f"row {j}: contact set not (n-1)-dimensional, dropped")
                continue
            seen.add(bits)
            simplices = tuple(self._fan(bits, n - 1))
            vols = _simplex_volumes(self.vertices, simplices, n - 1)
            order = vols > 0
            facets.append(
                Facet(
                    normal=self.A[j].copy(),
                    offset=float(self.b[j]),
                    vertex_ids=ids,
                    vertices=self.vertices[list(ids)],
                    area=float(vols.sum()),
                    simplices=tuple(s for s, o in zip(simplices, order) if o),
                    simplex_areas=vols[order],
                )
            )
        return facets

    def volume(self) -> float:
        if self.vertices.shape[0] == 0:
            return 0.0
        anchor = self.vertices[0]
        n = self.dim
        total = 0.0
        for f in self.facets:
            h = f.offset - float(f.normal @ anchor)
            total += h * f.area
        return total / n

    def triangulation(self):
        """Full-dimensional simplices (vertex-id tuples) and their volumes."""
        anchor_id = 0
        n = self.dim
        simplices = []
        for f in self.facets:
            if anchor_id in f.vertex_ids:
                continue
            for s in f.simplices:
                simplices.append((anchor_id,) + s)
        if n == 1:
            # interval: single 1-simplex between the two endpoints
            simplices = [(0, self.vertices.shape[0] - 1)]
        pts = self.vertices[np.array(simplices)]
        edges = pts[:, 1:, :] - pts[:, :1, :]
        vols = np.abs(np.linalg.det(edges)) / math.factorial(n)
        good = vols > 0
        return [s for s, g in zip(simplices, good) if g], vols[good]


def _enumerate_basic_solutions(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    m, n = A.shape
    if m > MAX_ENUM_ROWS or n > MAX_ENUM_DIM:
        raise CapExceededError(
            f"vertex enumeration capped at {MAX_ENUM_ROWS} rows and dimension "
            f"{MAX_ENUM_DIM} (got m={m}, n={n}); supply the body in V-form"
        )
    if n == 1:
        cands = b / A[:, 0]
        sols = cands.reshape(-1, 1)
    else:
        ncomb = math.comb(m, n)
        combos = np.fromiter(
            itertools.chain.from_iterable(itertools.combinations(range(m), n)),
            dtype=np.int64,
            count=ncomb * n,
        ).reshape(ncomb, n)
        mats = A[combos]
        dets = np.linalg.det(mats)
        ok = np.abs(dets) > 1e-10
        if not np.any(ok):
            raise DegenerateBodyError("no nondegenerate constraint subsets")
        sols = np.linalg.solve(mats[ok], b[combos][ok][..., None])[..., 0]
    resid = sols @ A.T - b
    tol = 1e-8 * (1.0 + np.linalg.norm(sols, axis=1))
    feas = np.all(resid <= tol[:, None], axis=1)
    pts = sols[feas]
    if pts.shape[0] == 0:
        raise EmptyBodyError("constraint system has no vertices")
    scale = float(np.mean(np.linalg.norm(pts, axis=1)))
    if scale <= 0:
        scale = 1.0
    return _dedup_points(pts, VERTEX_DEDUP_TOL * scale)


# ---------------------------------------------------------------------------
# Body variants


class ConvexBody:
    """Base class: every variant answers support and membership queries."""

    dim: int

    def support(self, xi: np.ndarray) -> float:
        raise NotImplementedError

    def support_point(self, xi: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def contains(self, X: np.ndarray, tol: float = MEMBER_TOL) -> np.ndarray:
        """Vectorized membership for points X of shape (N, n) or (n,)."""
        raise NotImplementedError

    def to_hpolytope(self) -> "HPolytope":
        raise BodyError(f"{type(self).__name__} has no H-representation")

    def is_polytopal(self) -> bool:
        return False

    def to_json(self) -> dict:
        raise NotImplementedError

    def _enum(self) -> _Enumeration:
        return self.to_hpolytope()._enum()


class HPolytope(ConvexBody):
    """Bounded full-dimensional {x : <a_i, x> <= b_i}; rows stored unit-norm."""

    def __init__(self, A, b, validate: bool = True, _vertices: np.ndarray | None = None):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.asarray(b, dtype=float).ravel()
        if A.shape[0] != b.shape[0]:
            raise BodyError("A and b row counts differ")
        norms = np.linalg.norm(A, axis=1)
        if np.any(norms < 1e-14):
            raise BodyError("zero row in constraint matrix")
        self.A = A / norms[:, None]
        self.b = b / norms
        self.dim = A.shape[1]
        self._vertices_seed = _vertices
        self._enum_cache: _Enumeration | None = None
        self._cheb: InballResult | None = None
        if validate:
            self._validate()

    def _validate(self):
        n = self.dim
        try:
            inball = self.chebyshev_inball()
        except LPInfeasible:
            raise EmptyBodyError("constraint system is infeasible") from None
        except LPUnbounded:
            raise UnboundedBodyError("inscribed-ball radius unbounded") from None
        # The inscribed-radius LP is always feasible (the radius may go
        # negative), so emptiness shows up as a strictly negative optimum and
        # a flat body as a zero optimum.
        if inball.radius < -1e-10:
            raise EmptyBodyError("constraint system is infeasible")
        if inball.radius <= 1e-10:
            raise DegenerateBodyError("body has empty interior")
        for i in range(n):
            e = np.zeros(n)
            for s in (1.0, -1.0):
                e[i] = s
                try:
                    solve_lp(e, self.A, self.b)
                except LPUnbounded:
                    raise UnboundedBodyError(
                        f"unbounded in direction {s * np.eye(n)[i]}"
                    ) from None
            e[i] = 0.0

    def _enum(self) -> _Enumeration:
        if self._enum_cache is None:
            self._enum_cache = _Enumeration(self.A, self.b, self._vertices_seed)
        return self._enum_cache

    def is_polytopal(self) -> bool:
        return True

    def to_hpolytope(self) -> "HPolytope":
        return self

    def support(self, xi) -> float:
        xi = np.asarray(xi, dtype=float)
        x, val = solve_lp(xi, self.A, self.b)
        return val

    def support_point(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        x, _ = solve_lp(xi, self.A, self.b)
        return x

    def contains(self, X, tol: float = MEMBER_TOL):
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        Xm = np.atleast_2d(X)
        ok = np.all(Xm @ self.A.T <= self.b + tol, axis=1)
        return bool(ok[0]) if single else ok

    def gauge(self, X) -> np.ndarray:
        """Minkowski functional; requires the origin strictly inside."""
        if np.any(self.b <= 1e-12):
            raise OriginNotInteriorError("gauge needs 0 in the interior")
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        Xm = np.atleast_2d(X)
        g = np.max((Xm @ self.A.T) / self.b, axis=1)
        g = np.maximum(g, 0.0)
        return float(g[0]) if single else g

    def chebyshev_inball(self) -> "InballResult":
        if self._cheb is None:
            n = self.dim
            c = np.zeros(n + 1)
            c[n] = 1.0
            Ae = np.concatenate([self.A, np.ones((self.A.shape[0], 1))], axis=1)
            x, r = solve_lp(c, Ae, self.b)
            center = x[:n]
            resid = self.b - self.A @ center
            active = tuple(int(i) for i in np.where(resid - r <= 1e-8)[0])
            self._cheb = InballResult(center=center, radius=float(r), active=active)
        return self._cheb

    def vertices(self) -> np.ndarray:
        return self._enum().vertices

    def facets(self) -> list[Facet]:
        return self._enum().facets

    def facet_warnings(self) -> list[str]:
        return self._enum().warnings

    def to_json(self) -> dict:
        return {"type": "hpolytope", "A": self.A.tolist(), "b": self.b.tolist()}


class VPolytope(ConvexBody):
    """Convex hull of explicit vertices; must be full-dimensional."""

    def __init__(self, vertices):
        V = np.atleast_2d(np.asarray(vertices, dtype=float))
        self.dim = V.shape[1]
        scale = float(np.mean(np.linalg.norm(V, axis=1)))
        if scale <= 0:
            scale = 1.0
        V = _dedup_points(V, VERTEX_DEDUP_TOL * scale)
        if V.shape[0] < self.dim + 1:
            raise DegenerateBodyError("need at least n+1 distinct vertices")
        if _affine_rank(V) < self.dim:
            raise DegenerateBodyError("vertex set is not full-dimensional")
        self.verts = V
        self._hform: HPolytope | None = None

    def is_polytopal(self) -> bool:
        return True

    def support(self, xi) -> float:
        xi = np.asarray(xi, dtype=float)
        return float(np.max(self.verts @ xi))

    def support_point(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        return self.verts[int(np.argmax(self.verts @ xi))]

    def to_hpolytope(self) -> HPolytope:
        if self._hform is None:
            A, b = _facet_hyperplanes(self.verts)
            self._hform = HPolytope(A, b, validate=False, _vertices=self.verts)
        return self._hform

    def contains(self, X, tol: float = MEMBER_TOL):
        return self.to_hpolytope().contains(X, tol=tol)

    def vertices(self) -> np.ndarray:
        return self.to_hpolytope().vertices()

    def to_json(self) -> dict:
        return {"type": "vpolytope", "vertices": self.verts.tolist()}


def _facet_hyperplanes(V: np.ndarray):
    """Brute-force facet enumeration of conv(V) via n-subsets of vertices."""
    v, n = V.shape
    if v > MAX_ENUM_ROWS or n > MAX_ENUM_DIM:
        raise CapExceededError(
            f"facet enumeration capped at {MAX_ENUM_ROWS} vertices and dimension "
            f"{MAX_ENUM_DIM} (got v={v}, n={n})"
        )
    scale = max(1.0, float(np.abs(V).max()))
    if n == 1:
        lo, hi = float(V.min()), float(V.max())
        return np.array([[1.0], [-1.0]]), np.array([hi, -lo])
    rows = []
    seen = set()
    for combo in itertools.combinations(range(v), n):
        P = V[list(combo)]
        M = np.concatenate([P, -np.ones((n, 1))], axis=1)
        _, s, vh = np.linalg.svd(M)
        if s[-2] <= RANK_TOL * scale:
            continue  # points affinely dependent: no unique hyperplane
        av = vh[-1]
        a, c = av[:n], av[n]
        na = np.linalg.norm(a)
        if na < 1e-12:
            continue
        a, c = a / na, c / na
        d = V @ a - c
        if np.all(d <= RANK_TOL * scale):
            pass
        elif np.all(d >= -RANK_TOL * scale):
            a, c = -a, -c
        else:
            continue
        key = tuple(np.round(np.concatenate([a, [c]]) / 1e-8).astype(int))
        if key in seen:
            continue
        seen.add(key)
        rows.append((a, c))
    if not rows:
        raise DegenerateBodyError("no facets found")
    A = np.array([r[0] for r in rows])
    b = np.array([r[1] for r in rows])
    order = np.lexsort(np.concatenate([A, b[:, None]], axis=1).T[::-1])
    return A[order], b[order]


class Ball(ConvexBody):
    def __init__(self, center, radius: float):
        self.center = np.asarray(center, dtype=float).ravel()
        self.radius = float(radius)
        self.dim = self.center.shape[0]
        if self.radius <= 0:
            raise BodyError("ball radius must be positive")

    def support(self, xi) -> float:
        xi = np.asarray(xi, dtype=float)
        return float(self.center @ xi + self.radius * np.linalg.norm(xi))

    def support_point(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        return self.center + self.radius * xi / np.linalg.norm(xi)

    def contains(self, X, tol: float = MEMBER_TOL):
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        Xm = np.atleast_2d(X)
        ok = np.linalg.norm(Xm - self.center, axis=1) <= self.radius + tol
        return bool(ok[0]) if single else ok

    def to_json(self) -> dict:
        return {"type": "ball", "center": self.center.tolist(), "radius": self.radius}


class Scaled(ConvexBody):
    """Dilation about the origin: lam * K."""

    def __init__(self, body: ConvexBody, lam: float):
        if lam <= 0:
            raise BodyError("dilation factor must be positive")
        self.body = body
        self.lam = float(lam)
        self.dim = body.dim

    def support(self, xi) -> float:
        return self.lam * self.body.support(xi)

    def support_point(self, xi) -> np.ndarray:
        return self.lam * self.body.support_point(xi)

    def contains(self, X, tol: float = MEMBER_TOL):
        return self.body.contains(np.asarray(X, dtype=float) / self.lam, tol=tol)

    def is_polytopal(self) -> bool:
        return self.body.is_polytopal()

    def to_hpolytope(self) -> HPolytope:
        H = self.body.to_hpolytope()
        return HPolytope(H.A, self.lam * H.b, validate=False)

    def to_json(self) -> dict:
        if self.is_polytopal():
            return self.to_hpolytope().to_json()
        if isinstance(self.body, Ball):
            return Ball(self.lam * self.body.center, self.lam * self.body.radius).to_json()
        raise BodyError("cannot serialize this scaled variant")


class Translated(ConvexBody):
    def __init__(self, body: ConvexBody, shift):
        self.body = body
        self.shift = np.asarray(shift, dtype=float).ravel()
        self.dim = body.dim

    def support(self, xi) -> float:
        xi = np.asarray(xi, dtype=float)
        return self.body.support(xi) + float(self.shift @ xi)

    def support_point(self, xi) -> np.ndarray:
        return self.body.support_point(xi) + self.shift

    def contains(self, X, tol: float = MEMBER_TOL):
        return self.body.contains(np.asarray(X, dtype=float) - self.shift, tol=tol)

    def is_polytopal(self) -> bool:
        return self.body.is_polytopal()

    def to_hpolytope(self) -> HPolytope:
        H = self.body.to_hpolytope()
        return HPolytope(H.A, H.b + H.A @ self.shift, validate=False)

    def to_json(self) -> dict:
        if self.is_polytopal():
            return self.to_hpolytope().to_json()
        if isinstance(self.body, Ball):
            return Ball(self.body.center + self.shift, self.body.radius).to_json()
        raise BodyError("cannot serialize this translated variant")


class Intersection(ConvexBody):
    def __init__(self, first: ConvexBody, second: ConvexBody):
        if first.dim != second.dim:
            raise BodyError("dimension mismatch in intersection")
        self.first = first
        self.second = second
        self.dim = first.dim

    def contains(self, X, tol: float = MEMBER_TOL):
        a = self.first.contains(X, tol=tol)
        b = self.second.contains(X, tol=tol)
        return a & b if isinstance(a, np.ndarray) else (a and b)

    def is_polytopal(self) -> bool:
        return self.first.is_polytopal() and self.second.is_polytopal()

    def to_hpolytope(self) -> HPolytope:
        if not self.is_polytopal():
            raise BodyError("intersection with a non-polytopal member has no H-form")
        return intersect(self.first.to_hpolytope(), self.second.to_hpolytope())

    def support(self, xi) -> float:
        # min-of-supports is only an upper bound; the exact value needs the
        # conjoined constraint system, so delegate to the H-form LP.
        return self.to_hpolytope().support(xi)

    def support_point(self, xi) -> np.ndarray:
        return self.to_hpolytope().support_point(xi)

    def to_json(self) -> dict:
        return self.to_hpolytope().to_json()


@dataclass(frozen=True)
class InballResult:
    center: np.ndarray
    radius: float
    active: tuple


# ---------------------------------------------------------------------------
# Operations


def support(K: ConvexBody, xi) -> float:
    xi = np.asarray(xi, dtype=float)
    if np.linalg.norm(xi) < 1e-14:
        raise ValueError("support direction must be nonzero")
    return K.support(xi)


def support_batch(K: ConvexBody, Xi: np.ndarray) -> np.ndarray:
    """Support values for many directions at once (exact, vertex-based for
    polytopes; forces vertex enumeration, so the caps apply)."""
    Xi = np.atleast_2d(np.asarray(Xi, dtype=float))
    if isinstance(K, Ball):
        return Xi @ K.center + K.radius * np.linalg.norm(Xi, axis=1)
    if isinstance(K, Scaled):
        return K.lam * support_batch(K.body, Xi)
    if isinstance(K, Translated):
        return support_batch(K.body, Xi) + Xi @ K.shift
    if isinstance(K, VPolytope):
        return np.max(Xi @ K.verts.T, axis=1)
    V = K.to_hpolytope().vertices()
    return np.max(Xi @ V.T, axis=1)


def width(K: ConvexBody, xi) -> float:
    xi = np.asarray(xi, dtype=float)
    if abs(np.linalg.norm(xi) - 1.0) > 1e-8:
        raise ValueError("width direction must be a unit vector")
    return K.support(xi) + K.support(-xi)


@dataclass(frozen=True)
class MinWidthResult:
    value: float
    direction: np.ndarray
    certified: bool


def _is_axis_box(H: HPolytope) -> bool:
    nz = np.abs(H.A) > 1e-12
    return bool(np.all(nz.sum(axis=1) == 1))


def _sphere_directions(n: int, count: int) -> np.ndarray:
    # Fixed-seed stream so min_width is a pure function of (K, budget).
    rng = np.random.default_rng(np.random.PCG64(0x5EED5EED ^ (count * 2654435761 % 2**63)))
    D = rng.standard_normal((count, n))
    norms = np.linalg.norm(D, axis=1)
    good = norms > 1e-12
    return D[good] / norms[good][:, None]


def min_width(K: ConvexBody, budget: int = 2048) -> MinWidthResult:
    """Upper bound on the minimal width; exact for balls and axis boxes.

    Candidates: facet normals, normalized vertex differences, a fixed-seed
    quasi-uniform sphere sample of the given budget, then projected-gradient
    descent from the ten best candidates.
    """
    n = K.dim
    if isinstance(K, Ball):
        e = np.zeros(n)
        e[0] = 1.0
        return MinWidthResult(2.0 * K.radius, e, True)
    if n == 1:
        H = K.to_hpolytope()
        v = H.vertices()
        return MinWidthResult(float(v.max() - v.min()), np.array([1.0]), True)
    cands = [_sphere_directions(n, budget)]
    H = None
    if K.is_polytopal():
        H = K.to_hpolytope()
        if _is_axis_box(H):
            lo = np.full(n, np.inf)
            hi = np.full(n, np.inf)
            for a, bb in zip(H.A, H.b):
                k = int(np.argmax(np.abs(a)))
                if a[k] > 0:
                    hi[k] = min(hi[k], bb / a[k])
                else:
                    lo[k] = min(lo[k], -bb / a[k])
            side = hi + lo
            k = int(np.argmin(side))
            e = np.zeros(n)
            e[k] = 1.0
            return MinWidthResult(float(side[k]), e, True)
        cands.append(H.A)
        V = H.vertices()
        if V.shape[0] <= 64:
            diffs = V[None, :, :] - V[:, None, :]
            diffs = diffs.reshape(-1, n)
            norms = np.linalg.norm(diffs, axis=1)
            good = norms > 1e-10
            cands.append(diffs[good] / norms[good][:, None])
        if V.shape[0] <= 14:
            # centroid differences over vertex bipartitions: these contain
            # the minimizing directions of simplices in every dimension
            # (joins of centroids of complementary faces)
            v = V.shape[0]
            bips = []
            for mask in range(1, 1 << (v - 1)):
                sel = [(mask >> i) & 1 for i in range(v)]
                S = V[np.array(sel, dtype=bool)]
                T = V[~np.array(sel, dtype=bool)]
                bips.append(S.mean(axis=0) - T.mean(axis=0))
            bips = np.array(bips)
            norms = np.linalg.norm(bips, axis=1)
            good = norms > 1e-10
            cands.append(bips[good] / norms[good][:, None])
    Xi = np.concatenate(cands, axis=0)
    w = support_batch(K, Xi) + support_batch(K, -Xi)
    order = np.argsort(w, kind="stable")[:10]
    best_val = float(w[order[0]])
    best_dir = Xi[order[0]]
    for i in order:
        val, d = _descend_width(K, Xi[i], float(w[i]))
        if val < best_val:
            best_val, best_dir = val, d
    return MinWidthResult(best_val, best_dir, False)


def _descend_width(K: ConvexBody, xi: np.ndarray, w0: float):
    xi = xi.copy()
    w = w0
    step = 0.25
    for _ in range(80):
        g = K.support_point(xi) - K.support_point(-xi)
        g_t = g - (g @ xi) * xi
        gn = np.linalg.norm(g_t)
        if gn < 1e-12 or step < 1e-10:
            break
        cand = xi - step * g_t / max(gn, 1.0)
        cand /= np.linalg.norm(cand)
        wc = width(K, cand)
        if wc < w - 1e-14:
            xi, w = cand, wc
            step *= 1.25
        else:
            step *= 0.5
    return w, xi


def inradius_origin(K: ConvexBody) -> float:
    """Largest r with r * B_2 contained in K; requires 0 in the interior."""
    if isinstance(K, Ball):
        r = K.radius - float(np.linalg.norm(K.center))
        if r <= 0:
            raise OriginNotInteriorError("origin not inside the ball")
        return r
    if isinstance(K, Scaled):
        return K.lam * inradius_origin(K.body)
    H = K.to_hpolytope()
    if np.any(H.b <= 0):
        raise OriginNotInteriorError("origin not in the interior of the polytope")
    return float(np.min(H.b))


def inradius_scan(contains_fn, dim: int, budget: int = 4096, r_max: float = 1e6) -> float:
    """Upper bound on the origin inradius of a membership-oracle convex set.

    Scans fixed quasi-uniform directions and bisects the radial exit point;
    the minimum over the scan can only overestimate the true inradius, so it
    is suitable for falsification-only checks.
    """
    dirs = _sphere_directions(dim, budget)
    best = r_max
    for u in dirs:
        lo, hi = 0.0, best
        if contains_fn((hi * u)[None, :])[0]:
            continue
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if contains_fn((mid * u)[None, :])[0]:
                lo = mid
            else:
                hi = mid
        best = min(best, hi)
    return best


def chebyshev_inball(K: ConvexBody) -> InballResult:
    if isinstance(K, Ball):
        return InballResult(center=K.center.copy(), radius=K.radius, active=())
    return K.to_hpolytope().chebyshev_inball()


def enumerate_vertices(K: HPolytope) -> VPolytope:
    return VPolytope(K.vertices())


def facets(K: ConvexBody) -> list[Facet]:
    if not K.is_polytopal():
        raise BodyError("facet decomposition needs a polytopal variant")
    return K.to_hpolytope().facets()


def volume(K: ConvexBody) -> float:
    if isinstance(K, Ball):
        return unit_ball_volume(K.dim) * K.radius ** K.dim
    if isinstance(K, Scaled):
        return K.lam ** K.dim * volume(K.body)
    if isinstance(K, Translated):
        return volume(K.body)
    return K.to_hpolytope()._enum().volume()


def surface_area(K: ConvexBody) -> float:
    if isinstance(K, Ball):
        n = K.dim
        return n * unit_ball_volume(n) * K.radius ** (n - 1)
    return float(sum(f.area for f in facets(K)))


def dilate(K: ConvexBody, lam: float) -> ConvexBody:
    if lam <= 0:
        raise BodyError("dilation factor must be positive")
    if isinstance(K, HPolytope):
        return HPolytope(K.A, lam * K.b, validate=False)
    if isinstance(K, VPolytope):
        return VPolytope(lam * K.verts)
    if isinstance(K, Ball):
        return Ball(lam * K.center, lam * K.radius)
    return Scaled(K, lam)


def translate(K: ConvexBody, v) -> ConvexBody:
    v = np.asarray(v, dtype=float).ravel()
    if isinstance(K, HPolytope):
        return HPolytope(K.A, K.b + K.A @ v, validate=False)
    if isinstance(K, VPolytope):
        return VPolytope(K.verts + v)
    if isinstance(K, Ball):
        return Ball(K.center + v, K.radius)
    return Translated(K, v)


def intersect(K1: HPolytope, K2: HPolytope) -> HPolytope:
    A = np.concatenate([K1.A, K2.A], axis=0)
    b = np.concatenate([K1.b, K2.b])
    try:
        return HPolytope(A, b)
    except EmptyBodyError:
        raise EmptyIntersectionError("intersection is empty") from None
    except DegenerateBodyError:
        raise DegenerateBodyError("intersection is lower-dimensional") from None


def triangulate(K: ConvexBody):
    """Full-dimensional simplicial decomposition: (vertex array, simplices, volumes)."""
    enum = K.to_hpolytope()._enum()
    simplices, vols = enum.triangulation()
    return enum.vertices, simplices, vols


def bounding_box(K: ConvexBody):
    """Axis-aligned bounding box (lo, hi)."""
    n = K.dim
    if isinstance(K, Ball):
        return K.center - K.radius, K.center + K.radius
    if K.is_polytopal():
        V = K.to_hpolytope().vertices()
        return V.min(axis=0), V.max(axis=0)
    lo = np.empty(n)
    hi = np.empty(n)
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        hi[i] = K.support(e)
        lo[i] = -K.support(-e)
    return lo, hi


# ---------------------------------------------------------------------------
# Convenience constructors and JSON


def box(lo, hi) -> HPolytope:
    lo = np.asarray(lo, dtype=float).ravel()
    hi = np.asarray(hi, dtype=float).ravel()
    n = lo.shape[0]
    if np.any(hi <= lo):
        raise BodyError("box needs lo < hi coordinatewise")
    A = np.concatenate([np.eye(n), -np.eye(n)], axis=0)
    b = np.concatenate([hi, -lo])
    return HPolytope(A, b, validate=False)


def cube(n: int, half_side: float = 0.5) -> HPolytope:
    return box(-half_side * np.ones(n), half_side * np.ones(n))


def cross_polytope(n: int, scale: float = 1.0) -> VPolytope:
    V = np.concatenate([scale * np.eye(n), -scale * np.eye(n)], axis=0)
    return VPolytope(V)


def standard_simplex(n: int) -> HPolytope:
    """{x >= 0, sum x <= 1}."""
    A = np.concatenate([-np.eye(n), np.ones((1, n))], axis=0)
    b = np.concatenate([np.zeros(n), [1.0]])
    return HPolytope(A, b, validate=False)


def body_to_json(K: ConvexBody) -> dict:
    return K.to_json()


def body_from_json(doc: dict) -> ConvexBody:
    kind = doc.get("type")
    if kind == "hpolytope":
        return HPolytope(np.array(doc["A"], dtype=float), np.array(doc["b"], dtype=float))
    if kind == "vpolytope":
        return VPolytope(np.array(doc["vertices"], dtype=float))
    if kind == "ball":
        return Ball(np.array(doc["center"], dtype=float), float(doc["radius"]))
    raise BodyError(f"unknown body type {kind!r}")
