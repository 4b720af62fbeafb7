import math
import random
from itertools import combinations

import numpy as np
import pytest
from scipy.spatial import Delaunay as ScipyDelaunay

from medusa.complex import MULTI, mono
from medusa.errors import DuplicatePosition, UnsupportedDimension
from medusa.geometry.alpha import _Ball, alpha_slice, restrict_scope, restricted_voronoi_membership
from medusa.geometry.delaunay import SitePoint, delaunay, top_simplices
from medusa.geometry.predicates import det, in_sphere, orientation


def sites(coords, colors=None):
    colors = colors or [1] * len(coords)
    return [SitePoint.from_real(i, c, k) for i, (c, k) in enumerate(zip(coords, colors))]


def random_sites(seed, n, d=2, box=10.0):
    rng = random.Random(seed)
    return sites([tuple(rng.uniform(0, box) for _ in range(d)) for _ in range(n)],
                 [rng.choice([1, 2]) for _ in range(n)])


def test_determinant_and_orientation():
    assert det([[2, 0], [0, 3]]) == 6
    assert det([[1, 2, 3], [4, 5, 6], [7, 8, 10]]) == -3
    assert orientation([(0, 0), (1, 0), (0, 1)]) == 1
    assert orientation([(0, 0), (0, 1), (1, 0)]) == -1
    assert orientation([(0, 0), (1, 1), (2, 2)]) == 0


def test_in_sphere_signs():
    tri = [(0, 0), (4, 0), (0, 4)]
    assert in_sphere(tri, (1, 1)) != 0
    assert in_sphere(tri, (1, 1)) == -in_sphere(tri, (10, 10))
    assert in_sphere(tri, (4, 4)) == 0


@pytest.mark.parametrize("coords,counts", [
    ([(0, 0), (1, 0), (0, 1)], [3, 3, 1]),
    ([(0, 0), (1, 0), (1, 1), (0, 1)], [4, 5, 2]),
    ([(0, 0), (2, 0)], [2, 1, 0]),
    ([(0, 0), (1, 0), (2, 0)], [3, 2, 0]),
    ([(0, 0)], [1, 0, 0]),
])
def test_small_triangulations(coords, counts):
    assert delaunay(sites(coords), 2).count_by_dim() == counts


def test_cocircular_square_is_resolved_deterministically():
    tops = sorted(top_simplices(delaunay(sites([(0, 0), (1, 0), (1, 1), (0, 1)]), 2)))
    assert tops == [(0, 1, 3), (1, 2, 3)]


def test_errors():
    with pytest.raises(DuplicatePosition):
        delaunay(sites([(0, 0), (0, 0)]), 2)
    with pytest.raises(UnsupportedDimension):
        delaunay(sites([(0, 0, 0, 0)]), 4)


@pytest.mark.parametrize("seed", range(10))
@pytest.mark.parametrize("d", [2, 3])
def test_matches_scipy_on_generic_input(seed, d):
    pts = random_sites(seed, 12 if d == 2 else 14, d)
    ours = set(top_simplices(delaunay(pts, d)))
    xy = np.array([p.position for p in pts])
    theirs = {tuple(sorted(int(v) for v in s)) for s in ScipyDelaunay(xy).simplices}
    assert ours == theirs


@pytest.mark.parametrize("seed", range(5))
def test_empty_circumsphere(seed):
    pts = random_sites(seed, 25, 3)
    dc = delaunay(pts, 3)
    for s in top_simplices(dc):
        ball = _Ball([pts[i].coords for i in s])
        assert not any(ball.strictly_contains(p.coords) for p in pts if p.id not in s)


def test_grid_has_euler_characteristic_one():
    pts = sites([(x, y, z) for x in range(4) for y in range(4) for z in range(4)])
    counts = delaunay(pts, 3).count_by_dim()
    assert counts[0] - counts[1] + counts[2] - counts[3] == 1


def test_permutation_invariance():
    pts = random_sites(3, 15)
    base = delaunay(pts, 2).delaunay_simplices()
    shuffled = pts[:]
    random.Random(1).shuffle(shuffled)
    assert delaunay(shuffled, 2).delaunay_simplices() == base


def test_alpha_values_of_simple_shapes():
    pair = alpha_slice(sites([(0, 0), (2, 0)]), 2, 1)
    assert pair.rho((0, 1)) == pytest.approx(1.0)
    assert (0, 1) in pair.alpha_simplices()
    tri = alpha_slice(sites([(0, 0), (1, 0), (0.5, math.sqrt(3) / 2)]), 2, 1)
    assert tri.rho((0, 1, 2)) == pytest.approx(1 / math.sqrt(3), rel=1e-5)
    # obtuse triangle: the long edge is attached and inherits the triangle's radius
    obtuse = alpha_slice(sites([(0, 0), (4, 0), (2, 0.5)]), 2, 10)
    assert obtuse.rho((0, 1)) == pytest.approx(obtuse.rho((0, 1, 2)))
    assert obtuse.rho((0, 1)) > 2


def _bisector_rho(pts, u, v):
    """Distance from u to the nearest point of the Voronoi edge dual to (u, v), or None."""
    pu, pv = np.array(pts[u].position), np.array(pts[v].position)
    m = (pu + pv) / 2
    n = np.array([-(pv - pu)[1], (pv - pu)[0]])
    lo, hi = -np.inf, np.inf
    for w in pts:
        if w.id in (u, v):
            continue
        pw = np.array(w.position)
        a = 2 * n @ (pw - pu)
        b = pw @ pw - pu @ pu - 2 * m @ (pw - pu)
        if abs(a) < 1e-12:
            if b < 0:
                return None
        elif a > 0:
            hi = min(hi, b / a)
        else:
            lo = max(lo, b / a)
    if lo > hi:
        return None
    s = min(max(0.0, lo), hi)
    return float(np.linalg.norm(m + s * n - pu))


@pytest.mark.parametrize("seed", range(8))
def test_rho_matches_voronoi_witness(seed):
    pts = random_sites(seed, 9)
    sc = alpha_slice(pts, 2, 3)
    for s in sc.simplices:
        if len(s) == 1:
            assert sc.rho(s) == 0
        elif len(s) == 2:
            assert sc.rho(s) == pytest.approx(_bisector_rho(pts, *s), rel=1e-6, abs=1e-6)
        else:
            ball = _Ball([pts[i].coords for i in s])
            assert sc.rho(s) == pytest.approx(math.sqrt(float(ball.radius2())) / 2 ** 20, rel=1e-9)
    # every Delaunay edge has a witness and vice versa
    edges = {s for s in sc.simplices if len(s) == 2}
    assert edges == {e for e in combinations(range(len(pts)), 2) if _bisector_rho(pts, *e) is not None}


@pytest.mark.parametrize("seed", range(5))
def test_alpha_complexes_are_nested_subcomplexes(seed):
    pts = random_sites(seed, 20)
    previous = set()
    for a0 in (0.5, 1, 1.5, 2, 3, 10 ** 6):
        sc = alpha_slice(pts, 2, a0)
        chosen = sc.alpha_simplices()
        assert previous <= chosen
        assert all(f in chosen for s in chosen for f in combinations(s, len(s) - 1) if f)
        for s in chosen:
            assert all(sc.rho(f) <= sc.rho(s) + 1e-12 for f in combinations(s, len(s) - 1) if f)
        previous = chosen
    assert previous == sc.delaunay_simplices()


def test_mono_scope_is_full_subcomplex():
    pts = random_sites(4, 20)
    sc = alpha_slice(pts, 2, 2)
    reds = {p.id for p in pts if p.color == 1}
    sub = restrict_scope(sc, mono(1))
    assert set(sub.simplices) == {s for s in sc.simplices if reds.issuperset(s)}
    assert restrict_scope(sc, MULTI) is sc


def test_restricted_voronoi_membership():
    pts = sites([(0, 0), (4, 0)], [1, 2])
    assert restricted_voronoi_membership((1, 0), pts, MULTI, 1.5)
    assert not restricted_voronoi_membership((1, 1.5), pts, MULTI, 1.5)
    assert restricted_voronoi_membership((3, 0), pts, MULTI, 1.5)
    assert not restricted_voronoi_membership((3, 0), pts, mono(1), 1.5)
    # ties go to the lower id
    assert restricted_voronoi_membership((2, 0), pts, mono(1), 2)
    assert not restricted_voronoi_membership((2, 0), pts, mono(2), 2)
