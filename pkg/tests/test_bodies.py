import math

import numpy as np
import pytest
from scipy.spatial import ConvexHull

from lcperim import bodies as B
from lcperim.gallery import regular_simplex_vertices


def random_body(rng, n, m=None):
    m = m or int(rng.integers(2 * n, 4 * n + 1))
    for _ in range(50):
        A = rng.normal(size=(m, n))
        A /= np.linalg.norm(A, axis=1, keepdims=True)
        b = rng.uniform(0.3, 1.5, size=m)
        try:
            return B.HPolytope(A, b)
        except B.BodyError:
            continue
    raise RuntimeError("no body")


# ---------------------------------------------------------------------------
# support / width


def test_support_examples():
    assert B.support(B.cube(3, 1.0), [1, 1, 1]) == pytest.approx(3.0)
    assert B.support(B.Ball([0, 0], 1.0), [1, 0]) == pytest.approx(1.0)
    tri = B.VPolytope([[0, 0], [1, 0], [0, 1]])
    assert B.support(tri, [1, 1]) == pytest.approx(1.0)  # max over the 3 vertices


def test_support_zero_direction_rejected():
    with pytest.raises(ValueError):
        B.support(B.cube(2), [0.0, 0.0])


def test_width_examples():
    assert B.width(B.cube(3, 0.5), np.array([1.0, 0, 0])) == pytest.approx(1.0)
    assert B.width(B.Ball([0.3, -0.2], 0.7), np.array([0.6, 0.8])) == pytest.approx(1.4)
    tri = B.VPolytope([[0, 0], [1, 0], [0, 1]])
    d = np.array([1.0, 1.0]) / math.sqrt(2.0)
    # h(d) = 1/sqrt(2) at either leg vertex, h(-d) = 0 at the right angle
    assert B.width(tri, d) == pytest.approx(1.0 / math.sqrt(2.0))


def test_support_subadditive_all_variants():
    rng = np.random.default_rng(0)
    tri = B.VPolytope([[0, 0], [1, 0], [0, 1]])
    variants = [
        B.cube(3, 0.5),
        B.Ball([0.2, 0.1], 1.3),
        tri,
        B.Scaled(tri, 2.0),
        B.Translated(tri, [0.5, -0.25]),
        B.Intersection(B.cube(2, 1.0), B.box([-2, -0.5], [2, 0.5])),
    ]
    for K in variants:
        n = K.dim
        for _ in range(50):
            xi, eta = rng.normal(size=n), rng.normal(size=n)
            assert K.support(xi + eta) <= K.support(xi) + K.support(eta) + 1e-9


def test_width_symmetry_nonneg():
    rng = np.random.default_rng(1)
    K = random_body(rng, 3)
    for _ in range(30):
        xi = rng.normal(size=3)
        xi /= np.linalg.norm(xi)
        w = B.width(K, xi)
        assert w >= 0
        assert w == pytest.approx(B.width(K, -xi), rel=1e-12)


def test_membership_support_consistency():
    # points inside satisfy <xi, x> <= h(xi) for every direction
    rng = np.random.default_rng(2)
    K = random_body(rng, 3)
    V = K.vertices()
    pts = V.mean(axis=0) + 0.5 * (V[:4] - V.mean(axis=0))
    for xi in rng.normal(size=(40, 3)):
        h = K.support(xi)
        assert np.all(pts @ xi <= h + 1e-9)


# ---------------------------------------------------------------------------
# min_width


def test_min_width_box_certified():
    for n in (2, 3, 5):
        res = B.min_width(B.cube(n, 0.5))
        assert res.certified and res.value == pytest.approx(1.0)
    res = B.min_width(B.box([0, 0], [3.0, 0.5]))
    assert res.certified and res.value == pytest.approx(0.5)


def test_min_width_ball():
    res = B.min_width(B.Ball([1.0, 2.0, 3.0], 0.75))
    assert res.certified and res.value == pytest.approx(1.5)


def test_min_width_matches_dense_scan_n2():
    rng = np.random.default_rng(3)
    V = rng.normal(size=(7, 2))
    K = B.VPolytope(V)
    est = B.min_width(K, budget=10_000).value
    theta = np.linspace(0.0, math.pi, 1_000_000, endpoint=False)
    dirs = np.column_stack([np.cos(theta), np.sin(theta)])
    widths = B.support_batch(K, dirs) + B.support_batch(K, -dirs)
    dense = float(widths.min())
    # both are upper bounds on the true minimal width; the descent step can
    # polish slightly below the grid value
    assert est == pytest.approx(dense, rel=1e-3)


# ---------------------------------------------------------------------------
# inradius / inball


def test_inradius_origin_examples():
    assert B.inradius_origin(B.cube(4, 0.5)) == pytest.approx(0.5)
    assert B.inradius_origin(B.Ball([0.1, 0.0], 1.0)) == pytest.approx(0.9)
    for n in (2, 3, 5):
        simplex = B.VPolytope(regular_simplex_vertices(n))
        assert B.inradius_origin(simplex) == pytest.approx(1.0 / n, rel=1e-10)


def test_inradius_origin_requires_interior():
    with pytest.raises(B.OriginNotInteriorError):
        B.inradius_origin(B.box([1.0, 1.0], [2.0, 2.0]))
    with pytest.raises(B.OriginNotInteriorError):
        B.inradius_origin(B.Ball([2.0, 0.0], 1.0))


def test_chebyshev_right_triangle():
    tri = B.VPolytope([[0, 0], [1, 0], [0, 1]]).to_hpolytope()
    res = B.chebyshev_inball(tri)
    r = (2.0 - math.sqrt(2.0)) / 2.0
    assert res.radius == pytest.approx(r, abs=1e-9)
    assert res.center == pytest.approx([r, r], abs=1e-9)


def test_chebyshev_cube_and_simplex():
    res = B.chebyshev_inball(B.cube(4, 1.0))
    assert res.radius == pytest.approx(1.0)
    assert np.abs(res.center).max() < 1e-9
    for n in (2, 4):
        simplex = B.VPolytope(regular_simplex_vertices(n))
        res = B.chebyshev_inball(simplex)
        assert res.radius == pytest.approx(1.0 / n, abs=1e-9)
        assert np.abs(res.center).max() < 1e-8


def test_inball_certificate_random_bodies():
    rng = np.random.default_rng(4)
    for n in (2, 3, 4):
        K = random_body(rng, n)
        res = B.chebyshev_inball(K)
        U = rng.normal(size=(1000, n))
        U /= np.linalg.norm(U, axis=1, keepdims=True)
        pts = res.center + res.radius * U
        assert bool(np.all(K.contains(pts, tol=1e-9)))


# ---------------------------------------------------------------------------
# enumeration / facets / volume / surface


def test_enumerate_vertices_counts():
    assert B.enumerate_vertices(B.box(np.zeros(3), np.ones(3))).verts.shape[0] == 8
    assert B.enumerate_vertices(B.standard_simplex(3)).verts.shape[0] == 4
    cross4 = B.cross_polytope(4).to_hpolytope()
    assert B.enumerate_vertices(cross4).verts.shape[0] == 8


def test_enumeration_sorted_lexicographically():
    V = B.cube(2, 1.0).vertices()
    assert np.all(np.diff(V[:, 0]) >= 0)


def test_enumeration_cap_error():
    A = np.random.default_rng(0).normal(size=(31, 3))
    b = np.ones(31)
    with pytest.raises(B.CapExceededError):
        B.HPolytope(A, b).vertices()


def test_facets_examples():
    f = B.facets(B.box(np.zeros(3), np.ones(3)))
    assert len(f) == 6
    assert all(x.area == pytest.approx(1.0) for x in f)
    tri = B.VPolytope([[0, 0], [1, 0], [0, 1]])
    lengths = sorted(x.area for x in B.facets(tri))
    assert lengths == pytest.approx([1.0, 1.0, math.sqrt(2.0)])


def test_simplex_surface_identity():
    # vol = (r/n) S for a simplex whose incenter is the origin
    for n in (3, 5):
        body = B.VPolytope(regular_simplex_vertices(n))
        vol = B.volume(body)
        r = B.inradius_origin(body)
        S = B.surface_area(body)
        assert vol == pytest.approx(r * S / n, rel=1e-10)


def test_volume_examples():
    assert B.volume(B.standard_simplex(4)) == pytest.approx(1.0 / 24.0)
    assert B.volume(B.cube(5, 0.5)) == pytest.approx(1.0)
    assert B.volume(B.Ball([0, 0], 1.0)) == pytest.approx(math.pi)


def test_surface_examples():
    assert B.surface_area(B.box(np.zeros(3), np.ones(3))) == pytest.approx(6.0)
    for n in (2, 4, 6):
        assert B.surface_area(B.cube(n, 0.5)) == pytest.approx(2.0 * n)
    assert B.surface_area(B.Ball([0, 0, 0], 2.0)) == pytest.approx(4 * math.pi * 4.0)


def test_surface_inradius_inequality_random():
    # S(K) <= n vol(K) / r(K) whenever the origin is interior
    rng = np.random.default_rng(5)
    checked = 0
    while checked < 100:
        n = int(rng.integers(2, 5))
        K = random_body(rng, n)
        S = B.surface_area(K)
        r = B.inradius_origin(K)
        assert S * r <= n * B.volume(K) * (1 + 1e-9)
        checked += 1


def test_volume_area_against_qhull():
    rng = np.random.default_rng(6)
    for _ in range(20):
        n = int(rng.integers(2, 6))
        K = random_body(rng, n)
        hull = ConvexHull(K.vertices())
        assert B.volume(K) == pytest.approx(hull.volume, rel=1e-9)
        assert B.surface_area(K) == pytest.approx(hull.area, rel=1e-8)


def test_euler_formula_n3():
    rng = np.random.default_rng(7)
    for _ in range(5):
        K = random_body(rng, 3)
        enum = K._enum()
        Vn = enum.vertices.shape[0]
        Fn = len(enum.facets)
        # edges: vertex pairs whose shared active rows cut a 1-dimensional face
        edges = set()
        for f in enum.facets:
            ids = f.vertex_ids
            for i in range(len(ids)):
                for j in range(i + 1, len(ids)):
                    rows_i = set(np.where(enum.incidence[ids[i]])[0])
                    rows_j = set(np.where(enum.incidence[ids[j]])[0])
                    common = rows_i & rows_j
                    if len(common) >= 1 and np.linalg.matrix_rank(enum.A[sorted(common)]) >= 2:
                        edges.add((min(ids[i], ids[j]), max(ids[i], ids[j])))
        assert Vn - len(edges) + Fn == 2


# ---------------------------------------------------------------------------
# transforms


def test_dilate_translate_intersect_examples():
    K = B.dilate(B.cube(3, 1.0), 2.0)
    assert B.volume(K) == pytest.approx(8.0 * B.volume(B.cube(3, 1.0)), rel=1e-12)
    I = B.intersect(B.box([0, 0], [2, 2]), B.box([1, 1], [3, 3]))
    assert B.volume(I) == pytest.approx(1.0)
    lo, hi = B.bounding_box(I)
    assert lo == pytest.approx([1, 1]) and hi == pytest.approx([2, 2])


def test_dilate_volume_scaling_exact():
    rng = np.random.default_rng(8)
    for lam in (0.5, 2.0, 3.7):
        K = random_body(rng, 3)
        assert B.volume(B.dilate(K, lam)) == pytest.approx(lam ** 3 * B.volume(K), rel=1e-12)


def test_translate_inball_equivariance():
    rng = np.random.default_rng(9)
    K = random_body(rng, 3)
    v = np.array([0.3, -1.2, 0.8])
    r0 = B.chebyshev_inball(K)
    r1 = B.chebyshev_inball(B.translate(K, v))
    assert r1.radius == pytest.approx(r0.radius, abs=1e-9)
    assert r1.center == pytest.approx(r0.center + v, abs=1e-8)


def test_intersect_empty_vs_degenerate():
    with pytest.raises(B.EmptyIntersectionError):
        B.intersect(B.box([0, 0], [1, 1]), B.box([2, 2], [3, 3]))
    with pytest.raises(B.DegenerateBodyError):
        B.intersect(B.box([0, 0], [1, 1]), B.box([1, 0], [2, 1]))


def test_degenerate_inputs_rejected():
    with pytest.raises(B.BodyError):
        B.HPolytope(np.array([[1.0, 0.0], [0.0, 0.0]]), np.array([1.0, 1.0]))
    with pytest.raises(B.UnboundedBodyError):
        B.HPolytope(np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]]), np.ones(3))
    with pytest.raises(B.DegenerateBodyError):
        B.VPolytope([[0, 0], [1, 0], [2, 0]])


def test_steinhagen_sanity_gallery_and_random():
    # the width estimator is an upper bound, so a pass certifies the bound;
    # the sharp constant is 2 sqrt(n) for odd n and 2(n+1)/sqrt(n+2) for
    # even n (regular simplices attain both)
    from lcperim.bounds import steinhagen_constant

    rng = np.random.default_rng(10)
    cases = [B.cube(3, 0.5), B.Ball([0, 0, 0, 0], 1.0), B.cross_polytope(3)]
    for n in range(2, 7):
        cases.append(B.VPolytope(regular_simplex_vertices(n)))
    count = 0
    while count < 200:
        n = int(rng.integers(2, 5))
        cases.append(random_body(rng, n))
        count += 1
    for K in cases:
        n = K.dim
        w = B.min_width(K, budget=512).value
        r = B.chebyshev_inball(K).radius
        assert w <= steinhagen_constant(n) * r + 1e-8


def test_steinhagen_even_dimensional_sharpness():
    # regular simplices attain the width/inradius ratio exactly; in even
    # dimensions that ratio strictly exceeds 2 sqrt(n)
    from lcperim.bounds import steinhagen_constant

    for n in (2, 4, 6, 8):
        K = B.VPolytope(regular_simplex_vertices(n))
        w = B.min_width(K, budget=512).value
        r = B.chebyshev_inball(K).radius
        assert w == pytest.approx(steinhagen_constant(n) * r, rel=1e-9)
        assert w > 2.0 * math.sqrt(n) * r + 1e-6


def test_scaled_translated_wrappers():
    tri = B.VPolytope([[0, 0], [1, 0], [0, 1]])
    S = B.Scaled(tri, 2.0)
    assert S.support(np.array([1.0, 1.0])) == pytest.approx(2.0)
    assert bool(S.contains(np.array([1.5, 0.2])))
    T = B.Translated(tri, [1.0, 1.0])
    assert T.support(np.array([1.0, 0.0])) == pytest.approx(2.0)
    assert not bool(T.contains(np.array([0.0, 0.0])))
    I = B.Intersection(B.cube(2, 1.0), B.Ball([0, 0], 1.0))
    assert bool(I.contains(np.array([0.5, 0.5])))
    assert not bool(I.contains(np.array([0.9, 0.9])))


def test_json_roundtrip():
    for K in (B.cube(3, 0.5), B.VPolytope([[0, 0], [1, 0], [0, 1]]), B.Ball([1.0, 2.0], 0.5)):
        doc = B.body_to_json(K)
        K2 = B.body_from_json(doc)
        assert K2.dim == K.dim
        xi = np.array([0.3, -0.7] + ([0.1] if K.dim == 3 else []))
        assert K2.support(xi) == pytest.approx(K.support(xi), rel=1e-12)


def test_inradius_scan_upper_bound():
    K = B.cube(3, 0.5)
    r_hat = B.inradius_scan(lambda X: K.contains(X), 3, budget=512)
    assert r_hat >= 0.5 - 1e-9
    assert r_hat <= math.sqrt(3) * 0.5 + 1e-6
