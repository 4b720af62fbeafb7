"""Exact orientation and in-sphere predicates on integer coordinates.

Coordinates are integers (multiples of the quantum ``2**-20``), so every
predicate is the sign of an integer determinant and is exact.  Cospherical
ties are broken by simulation of simplicity on the lifted heights: the point
with height ``|p|^2 + eps_k`` gets the k-th most significant infinitesimal,
with ``k`` following ascending point id.  This is a consistent perturbation,
so the resulting triangulation is the regular triangulation of the perturbed
lift and is deterministic.
"""
from __future__ import annotations

from typing import Sequence

Point = Sequence[int]


def det(rows: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant (fraction-free Bareiss elimination)."""
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        rowk = a[k]
        for i in range(k + 1, n):
            rowi = a[i]
            aik = rowi[k]
            for j in range(k + 1, n):
                rowi[j] = (rowi[j] * akk - aik * rowk[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def _sign(x: int) -> int:
    return (x > 0) - (x < 0)


def orientation(pts: Sequence[Point]) -> int:
    """Sign of the orientation of ``d + 1`` points in ``R^d`` (0 when flat)."""
    p0 = pts[0]
    return _sign(det([[a - b for a, b in zip(p, p0)] for p in pts[1:]]))


def _affine_det(pts: Sequence[Point]) -> int:
    return det([list(p) + [1] for p in pts])


def lifted_sign(pts: Sequence[Point], ids: Sequence[int] | None = None) -> int:
    """Sign of ``det[p_i, |p_i|^2, 1]`` for ``d + 2`` points.

    With ``ids`` given, a zero determinant is resolved by the lifting
    perturbation described in the module docstring, and the result is never 0
    unless the points are affinely degenerate in every sub-configuration.
    """
    origin = pts[-1]
    rel = [[a - b for a, b in zip(p, origin)] for p in pts]
    rows = [r + [sum(x * x for x in r), 1] for r in rel]
    d0 = det(rows)
    if d0 or ids is None:
        return _sign(d0)
    d = len(origin)
    for i in sorted(range(len(pts)), key=lambda k: ids[k]):
        minor = [rel[j] + [1] for j in range(len(pts)) if j != i]
        c = det(minor)
        if c:
            return _sign(c) * (1 if (i + d) % 2 == 0 else -1)
    return 0


def in_sphere(simplex: Sequence[Point], q: Point) -> int:
    """+1 if ``q`` lies strictly inside the circumsphere of a full-dimensional simplex,
    -1 if strictly outside, 0 if on it."""
    o = _sign(_affine_det(simplex))
    if o == 0:
        raise ValueError("flat simplex has no circumsphere")
    return lifted_sign(list(simplex) + [q]) * o


def in_sphere_sos(simplex: Sequence[Point], q: Point, ids: Sequence[int]) -> int:
    """Perturbed in-sphere test; ``ids`` lists the ids of the simplex vertices then ``q``."""
    o = _sign(_affine_det(simplex))
    if o == 0:
        raise ValueError("flat simplex has no circumsphere")
    return lifted_sign(list(simplex) + [q], ids) * o
