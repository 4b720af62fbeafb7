"""Alpha values of Delaunay simplices and restricted Voronoi membership.

All arithmetic is on integer coordinates (quanta), so radii are compared
squared and exactly.  ``rho2`` is stored in quanta squared.
"""
from __future__ import annotations

from dataclasses import replace
from fractions import Fraction
from typing import Iterable, Sequence

from ..complex import Scope
from .delaunay import QUANTUM_BITS, SimplexInfo, SitePoint, SliceComplex
from .predicates import det


def _dot(a, b) -> int:
    return sum(x * y for x, y in zip(a, b))


class _Ball:
    """Smallest circumscribed ball of a simplex, kept in Cramer form."""

    __slots__ = ("p0", "vecs", "numer", "denom")

    def __init__(self, pts: Sequence[Sequence[int]]):
        self.p0 = pts[0]
        self.vecs = [[a - b for a, b in zip(p, self.p0)] for p in pts[1:]]
        gram = [[_dot(u, v) for v in self.vecs] for u in self.vecs]
        rhs = [_dot(v, v) for v in self.vecs]
        self.denom = det(gram)
        self.numer = []
        for j in range(len(self.vecs)):
            m = [row[:j] + [rhs[i]] + row[j + 1:] for i, row in enumerate(gram)]
            self.numer.append(det(m))

    def radius2(self) -> Fraction:
        if not self.vecs:
            return Fraction(0)
        return Fraction(sum(n * _dot(v, v) for n, v in zip(self.numer, self.vecs)), 4 * self.denom)

    def strictly_contains(self, q: Sequence[int]) -> bool:
        w = [a - b for a, b in zip(q, self.p0)]
        lhs = self.denom * _dot(w, w)
        rhs = sum(n * _dot(w, v) for n, v in zip(self.numer, self.vecs))
        return lhs < rhs


def alpha_values(slice_: SliceComplex, alpha0=None) -> SliceComplex:
    """Attach alpha values to every Delaunay simplex and flag the alpha complex.

    A simplex whose smallest circumball holds another vertex of a cofacet is
    attached, and inherits the smallest value among its cofacets; otherwise its
    value is the radius of that ball.
    """
    pts = slice_.points
    by_dim: dict[int, list[tuple[int, ...]]] = {}
    for s in slice_.simplices:
        by_dim.setdefault(len(s) - 1, []).append(s)
    cofacets: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
    for s in slice_.simplices:
        if len(s) > 1:
            for k in range(len(s)):
                cofacets.setdefault(s[:k] + s[k + 1:], []).append(s)

    rho2: dict[tuple[int, ...], Fraction] = {}
    for dim in sorted(by_dim, reverse=True):
        for s in by_dim[dim]:
            if dim == 0:
                rho2[s] = Fraction(0)
                continue
            ball = _Ball([pts[v].coords for v in s])
            ups = cofacets.get(s, [])
            attached = any(
                ball.strictly_contains(pts[next(v for v in t if v not in s)].coords) for t in ups
            )
            rho2[s] = min(rho2[t] for t in ups) if attached else ball.radius2()

    a0 = Fraction(alpha0) if alpha0 is not None else slice_.alpha0
    limit = None if a0 is None else (a0 * (1 << QUANTUM_BITS)) ** 2
    out = SliceComplex(slice_.frame_time, slice_.dim, pts, alpha0=a0)
    for s, info in slice_.simplices.items():
        out.simplices[s] = replace(info, rho2=rho2[s], in_alpha=limit is not None and rho2[s] <= limit)
    return out


def restrict_scope(slice_: SliceComplex, scope: Scope) -> SliceComplex:
    """Full subcomplex spanned by the in-scope vertices."""
    if scope.is_multi:
        return slice_
    keep = {i for i, p in slice_.points.items() if p.color == scope.color}
    out = SliceComplex(slice_.frame_time, slice_.dim, {i: slice_.points[i] for i in keep},
                       alpha0=slice_.alpha0)
    out.simplices = {s: info for s, info in slice_.simplices.items() if keep.issuperset(s)}
    return out


def restricted_voronoi_membership(x: Iterable, points: Sequence[SitePoint], scope: Scope, alpha0) -> bool:
    """Is ``x`` in the union of in-scope restricted Voronoi cells?

    ``x`` is in the input unit (not quanta).  The nearest site wins, ties going
    to the lower id.
    """
    if not points:
        return False
    scale = 1 << QUANTUM_BITS
    xq = [Fraction(v) * scale for v in x]
    best = min(points, key=lambda p: (sum((a - b) ** 2 for a, b in zip(xq, p.coords)), p.id))
    d2 = sum((a - b) ** 2 for a, b in zip(xq, best.coords))
    return d2 <= (Fraction(alpha0) * scale) ** 2 and scope.admits([best.color])


def alpha_slice(points: Sequence[SitePoint], d: int, alpha0, frame_time=0) -> SliceComplex:
    from .delaunay import delaunay

    return alpha_values(delaunay(points, d, frame_time), alpha0)


__all__ = ["alpha_values", "restrict_scope", "restricted_voronoi_membership", "alpha_slice", "SimplexInfo"]
