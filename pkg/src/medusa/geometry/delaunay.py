"""Delaunay triangulations in the plane and in space by incremental insertion.

Points are inserted in ascending id order into a triangulation of a huge
enclosing simplex (Bowyer-Watson).  The enclosing vertices sit farther out
than any circumsphere of real points can reach, so removing them leaves the
perturbed Delaunay complex of the input.  All predicates are exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from ..errors import DuplicatePosition, UnsupportedDimension
from .predicates import in_sphere_sos, orientation

QUANTUM_BITS = 20
QUANTUM = Fraction(1, 1 << QUANTUM_BITS)


def quantize(x) -> int:
    """Nearest multiple of the coordinate quantum, as an integer count of quanta."""
    return round(Fraction(x) * (1 << QUANTUM_BITS))


def dequantize(q: int) -> float:
    return q / (1 << QUANTUM_BITS)


@dataclass(frozen=True)
class SitePoint:
    id: int
    coords: tuple[int, ...]
    color: int = 1

    @classmethod
    def from_real(cls, id: int, xyz: Iterable, color: int = 1) -> "SitePoint":
        return cls(id, tuple(quantize(v) for v in xyz), color)

    @property
    def position(self) -> tuple[float, ...]:
        return tuple(dequantize(c) for c in self.coords)


@dataclass(frozen=True)
class SimplexInfo:
    in_delaunay: bool = True
    in_alpha: bool = False
    rho2: Fraction | None = None  # squared alpha value, in quanta^2


@dataclass
class SliceComplex:
    """Delaunay simplices of one frame, with optional alpha data.

    ``simplices`` maps sorted point-id tuples to their :class:`SimplexInfo`.
    """

    frame_time: Fraction
    dim: int
    points: dict[int, SitePoint]
    simplices: dict[tuple[int, ...], SimplexInfo] = field(default_factory=dict)
    alpha0: Fraction | None = None

    def delaunay_simplices(self) -> set[tuple[int, ...]]:
        return set(self.simplices)

    def alpha_simplices(self) -> set[tuple[int, ...]]:
        return {s for s, info in self.simplices.items() if info.in_alpha}

    def rho(self, simplex: Sequence[int]) -> float:
        r2 = self.simplices[tuple(simplex)].rho2
        return float(r2) ** 0.5 / (1 << QUANTUM_BITS)

    def count_by_dim(self, which: str = "delaunay") -> list[int]:
        chosen = self.simplices if which == "delaunay" else self.alpha_simplices()
        counts = [0] * (self.dim + 1)
        for s in chosen:
            counts[len(s) - 1] += 1
        return counts


def _super_simplex(d: int, reach: int) -> list[tuple[int, ...]]:
    # corner simplex {x_j >= -R, sum x_j <= d R}; contains the ball of radius R
    base = [-reach] * d
    verts = [tuple(base)]
    for i in range(d):
        v = list(base)
        v[i] = d * reach + (d - 1) * reach
        verts.append(tuple(v))
    return verts


class _BowyerWatson:
    def __init__(self, coords: list[tuple[int, ...]], d: int):
        self.d = d
        n = len(coords)
        lo = [min(c[k] for c in coords) for k in range(d)]
        hi = [max(c[k] for c in coords) for k in range(d)]
        center = [(a + b) // 2 for a, b in zip(lo, hi)]
        self.pts = [tuple(a - b for a, b in zip(c, center)) for c in coords]
        spread = max([1] + [abs(x) for p in self.pts for x in p])
        # any circumsphere of real points stays well inside this reach
        reach = (8 * spread + 8) ** (d + 3)
        self.n_real = n
        self.pts.extend(_super_simplex(d, reach))
        self.ids = list(range(len(self.pts)))
        self.cells: dict[int, tuple[int, ...]] = {}
        self.faces: dict[tuple[int, ...], list[int]] = {}
        self._next = 0
        self._last = None
        self._add_cell(tuple(range(n, n + d + 1)))

    def _orient(self, verts: Sequence[int]) -> int:
        return orientation([self.pts[v] for v in verts])

    def _add_cell(self, verts: tuple[int, ...]) -> int:
        o = self._orient(verts)
        if o == 0:
            raise AssertionError(f"flat cell {verts} during insertion")
        if o < 0:
            verts = (verts[1], verts[0]) + verts[2:]
        cid = self._next
        self._next += 1
        self.cells[cid] = verts
        for k in range(len(verts)):
            f = tuple(sorted(verts[:k] + verts[k + 1:]))
            self.faces.setdefault(f, []).append(cid)
        self._last = cid
        return cid

    def _remove_cell(self, cid: int) -> None:
        verts = self.cells.pop(cid)
        for k in range(len(verts)):
            f = tuple(sorted(verts[:k] + verts[k + 1:]))
            lst = self.faces[f]
            lst.remove(cid)
            if not lst:
                del self.faces[f]

    def _neighbor(self, cid: int, k: int) -> int | None:
        verts = self.cells[cid]
        f = tuple(sorted(verts[:k] + verts[k + 1:]))
        for other in self.faces.get(f, ()):
            if other != cid:
                return other
        return None

    def _conflict(self, cid: int, p: int) -> bool:
        verts = self.cells[cid]
        return in_sphere_sos([self.pts[v] for v in verts], self.pts[p], [*verts, p]) > 0

    def _locate(self, p: int) -> int:
        cid = self._last if self._last in self.cells else next(iter(self.cells))
        q = self.pts[p]
        for _ in range(4 * len(self.cells) + 16):
            verts = self.cells[cid]
            moved = False
            for k in range(len(verts)):
                probe = [self.pts[v] for v in verts]
                probe[k] = q
                if orientation(probe) < 0:
                    nb = self._neighbor(cid, k)
                    if nb is not None:
                        cid = nb
                        moved = True
                        break
            if not moved:
                return cid
        # visibility walks terminate on Delaunay triangulations; this is a guard only
        for cid in sorted(self.cells):
            if self._conflict(cid, p):
                return cid
        raise AssertionError("point location failed")

    def insert(self, p: int) -> None:
        start = self._locate(p)
        cavity = {start}
        stack = [start]
        while stack:
            cid = stack.pop()
            for k in range(self.d + 1):
                nb = self._neighbor(cid, k)
                if nb is not None and nb not in cavity and self._conflict(nb, p):
                    cavity.add(nb)
                    stack.append(nb)
        horizon = []
        for cid in cavity:
            verts = self.cells[cid]
            for k in range(len(verts)):
                nb = self._neighbor(cid, k)
                if nb is None or nb not in cavity:
                    horizon.append(verts[:k] + verts[k + 1:])
        for cid in sorted(cavity):
            self._remove_cell(cid)
        for face in horizon:
            self._add_cell(face + (p,))

    def real_complex(self) -> set[tuple[int, ...]]:
        out: set[tuple[int, ...]] = set()
        for verts in self.cells.values():
            real = sorted(v for v in verts if v < self.n_real)
            for k in range(1, len(real) + 1):
                out.update(combinations(real, k))
        return out


def delaunay(points: Sequence[SitePoint], d: int, frame_time=0) -> SliceComplex:
    """Perturbed Delaunay complex of ``points`` (all simplices, every dimension)."""
    if d not in (2, 3):
        raise UnsupportedDimension(f"dimension {d} is not supported (use 2 or 3)")
    pts = sorted(points, key=lambda s: s.id)
    seen: dict[tuple[int, ...], int] = {}
    for s in pts:
        if len(s.coords) != d:
            raise UnsupportedDimension(f"point {s.id} has {len(s.coords)} coordinates, expected {d}")
        if s.coords in seen:
            raise DuplicatePosition(seen[s.coords], s.id)
        seen[s.coords] = s.id
    ids = [s.id for s in pts]
    if len(set(ids)) != len(ids):
        raise ValueError("point ids must be unique")
    out = SliceComplex(Fraction(frame_time), d, {s.id: s for s in pts})
    if not pts:
        return out
    bw = _BowyerWatson([s.coords for s in pts], d)
    for i in range(len(pts)):
        bw.insert(i)
    for simplex in bw.real_complex():
        out.simplices[tuple(ids[i] for i in simplex)] = SimplexInfo()
    return out


def top_simplices(slice_: SliceComplex) -> list[tuple[int, ...]]:
    """Simplices without a coface (full-dimensional ones in generic input)."""
    simp = slice_.simplices
    has_coface = set()
    for s in simp:
        if len(s) > 1:
            for k in range(len(s)):
                has_coface.add(s[:k] + s[k + 1:])
    return sorted(s for s in simp if s not in has_coface)
