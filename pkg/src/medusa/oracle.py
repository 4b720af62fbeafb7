"""Brute-force verifiers, deliberately naive so they are easy to trust.

Persistent ranks come from explicit GF(2) linear algebra on cycle and
boundary spaces (chains are Python ints used as bitsets over cell ids).
Betti numbers of alpha complexes are checked against a raster of the
union of restricted Voronoi cells.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import ndimage

from .complex import InclusionMap, Medusa, Scope
from .errors import NegativeMultiplicity, TooLarge
from .geometry.delaunay import QUANTUM_BITS, SitePoint
from .persistence import HOR, ORD, REL, VER, Dot, PersistenceDiagram, merged_grid, sort_dots

MAX_CELLS = 400


# -- GF(2) ---------------------------------------------------------------------

def _echelon(vectors) -> dict[int, int]:
    piv: dict[int, int] = {}
    for v in vectors:
        while v:
            top = v.bit_length() - 1
            if top not in piv:
                piv[top] = v
                break
            v ^= piv[top]
    return piv


def _rank(vectors) -> int:
    return len(_echelon(vectors))


def _mask(ids) -> int:
    v = 0
    for i in ids:
        v |= 1 << i
    return v


class _Chains:
    """Cellular chain complex of one medusa: boundary bitsets per cell."""

    def __init__(self, medusa: Medusa):
        self.cells = medusa.cells
        self.bnd = [_mask(c.boundary) for c in medusa.cells]
        self.dims = sorted({c.dim for c in medusa.cells})

    def of_dim(self, p: int, within: int) -> list[int]:
        return [i for i, c in enumerate(self.cells) if c.dim == p and within >> i & 1]

    def cycles(self, p: int, alive: int) -> list[int]:
        """Basis of relative p-cycles on the cells of ``alive`` (boundary taken mod the rest)."""
        piv: dict[int, tuple[int, int]] = {}
        out = []
        for i in self.of_dim(p, alive):
            col, combo = self.bnd[i] & alive, 1 << i
            while col:
                top = col.bit_length() - 1
                hit = piv.get(top)
                if hit is None:
                    piv[top] = (col, combo)
                    break
                col ^= hit[0]
                combo ^= hit[1]
            else:
                out.append(combo)
        return out

    def boundaries(self, p: int, alive: int) -> list[int]:
        return [self.bnd[i] & alive for i in self.of_dim(p + 1, alive)]


def _states(medusa: Medusa, grid: Sequence[Fraction]) -> list[int]:
    """Bitset of live chain cells at each position 1..2M (index 0 is the empty start)."""
    cells = medusa.cells
    out = [0]
    for t in grid:
        out.append(_mask(i for i, c in enumerate(cells) if c.f_min <= t))
    full = _mask(range(len(cells)))
    for t in reversed(grid):
        out.append(full & ~_mask(i for i, c in enumerate(cells) if c.f_max >= t))
    return out


# -- rank tables ---------------------------------------------------------------

@dataclass
class RankTable:
    grid: tuple[Fraction, ...]
    ranks: dict[int, list[list[int]]]  # ranks[p][i][j] for positions 0..2M (+1 sentinel)

    @property
    def m(self) -> int:
        return len(self.grid)

    @property
    def positions(self) -> int:
        return 2 * self.m

    def beta(self, p: int, i: int, j: int) -> int:
        n = self.positions
        if i < 1 or j > n or i > j or p not in self.ranks:
            return 0
        return self.ranks[p][i][j]

    def time(self, pos: int) -> Fraction:
        return self.grid[pos - 1] if pos <= self.m else self.grid[2 * self.m - pos]

    def sanity(self) -> list[str]:
        problems = []
        n = self.positions
        for p in self.ranks:
            for i in range(1, n + 1):
                for j in range(i, n + 1):
                    b = self.beta(p, i, j)
                    if b > min(self.beta(p, i, i), self.beta(p, j, j)):
                        problems.append(f"dim {p}: rank({i},{j}) exceeds the ranks at its ends")
                    if j > i and b > self.beta(p, i, j - 1):
                        problems.append(f"dim {p}: rank({i},{j}) grew from rank({i},{j - 1})")
        return problems


def _check_size(*medusas: Medusa, max_cells: int) -> None:
    for m in medusas:
        if len(m.cells) > max_cells:
            raise TooLarge(f"{len(m.cells)} cells exceeds the oracle limit of {max_cells}")


def _table(sub: _Chains, amb: _Chains, cmap: Sequence[int], sub_states, amb_states, grid) -> RankTable:
    n = len(sub_states) - 1
    dims = sorted(set(sub.dims))
    ranks: dict[int, list[list[int]]] = {}
    for p in dims:
        cyc = [[_push(z, cmap) for z in sub.cycles(p, sub_states[i])] if i else [] for i in range(n + 1)]
        bnds = [amb.boundaries(p, amb_states[j]) if j else [] for j in range(n + 1)]
        brank = [_rank(b) for b in bnds]
        table = [[0] * (n + 1) for _ in range(n + 1)]
        for i in range(1, n + 1):
            if not cyc[i]:
                continue
            for j in range(i, n + 1):
                live = amb_states[j]
                table[i][j] = _rank(bnds[j] + [z & live for z in cyc[i]]) - brank[j]
        ranks[p] = table
    return RankTable(tuple(grid), ranks)


def _push(chain: int, cmap: Sequence[int] | None) -> int:
    if cmap is None:
        return chain
    out = 0
    while chain:
        low = chain & -chain
        out ^= 1 << cmap[low.bit_length() - 1]
        chain ^= low
    return out


def rank_table_extended(medusa: Medusa, max_cells: int = MAX_CELLS) -> RankTable:
    _check_size(medusa, max_cells=max_cells)
    grid = tuple(medusa.time_grid)
    ch = _Chains(medusa)
    st = _states(medusa, grid)
    return _table(ch, ch, None, st, st, grid)


def rank_table_image(inc: InclusionMap, max_cells: int = MAX_CELLS) -> RankTable:
    _check_size(inc.sub, inc.ambient, max_cells=max_cells)
    grid = merged_grid(inc.sub, inc.ambient)
    if not inc.sub.cells:
        return RankTable(grid, {})
    return _table(_Chains(inc.sub), _Chains(inc.ambient), inc.cell_map,
                  _states(inc.sub, grid), _states(inc.ambient, grid), grid)


def diagram_from_ranks(rt: RankTable, source: str = "oracle", ambient_dim: int = 2) -> PersistenceDiagram:
    n, m = rt.positions, rt.m
    dots = []
    for p in sorted(rt.ranks):
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                mu = rt.beta(p, i, j - 1) - rt.beta(p, i, j) - rt.beta(p, i - 1, j - 1) + rt.beta(p, i - 1, j)
                if mu < 0:
                    raise NegativeMultiplicity(f"dim {p}, positions ({i},{j}): multiplicity {mu}")
                b, d = rt.time(i), rt.time(j)
                if j <= m:
                    sub = ORD
                elif i > m:
                    sub = REL
                else:
                    sub = HOR if b <= d else VER
                dots += [Dot(p, sub, b, d, -1, -1, i, j)] * mu
    return PersistenceDiagram(sort_dots(dots), source, "oracle", ambient_dim, rt.grid)


def betti_at(medusa: Medusa, t, p: int) -> int:
    ch = _Chains(medusa)
    alive = _mask(i for i, c in enumerate(medusa.cells) if c.f_min <= t)
    return len(ch.cycles(p, alive)) - _rank(ch.boundaries(p, alive))


def simplicial_betti(simplices, top: int = 2) -> tuple[int, ...]:
    """Betti numbers 0..top of a simplicial complex given as vertex tuples."""
    simp = sorted({tuple(sorted(s)) for s in simplices}, key=lambda s: (len(s), s))
    index = {s: k for k, s in enumerate(simp)}
    bnd = [_mask(index[s[:k] + s[k + 1:]] for k in range(len(s))) if len(s) > 1 else 0 for s in simp]
    full = _mask(range(len(simp)))
    out = []
    for p in range(top + 1):
        cols = [bnd[k] for k, s in enumerate(simp) if len(s) == p + 1]
        z = len(cols) - _rank(cols)
        b = _rank([bnd[k] for k, s in enumerate(simp) if len(s) == p + 2])
        out.append(z - b)
    return tuple(out)


# -- rasterized restricted Voronoi cells --------------------------------------

def _raster(points: Sequence[SitePoint], scope: Scope, alpha0, resolution: int) -> np.ndarray:
    scale = float(1 << QUANTUM_BITS)
    pts = sorted(points, key=lambda s: s.id)
    xy = np.array([[c / scale for c in s.coords] for s in pts], dtype=float)
    ok = np.array([scope.admits([s.color]) for s in pts])
    a0 = float(alpha0)
    lo = xy.min(axis=0) - a0
    hi = xy.max(axis=0) + a0
    side = float(max(hi - lo)) * (1 + 2.0 / resolution)
    origin = (lo + hi) / 2 - side / 2
    step = side / resolution
    centers = origin[None, :] + (np.arange(resolution)[:, None] + 0.5) * step
    img = np.zeros((resolution, resolution), dtype=bool)
    ys = centers[:, 1]
    for r0 in range(0, resolution, 256):
        xs = centers[:, 0]
        yy = ys[r0:r0 + 256]
        # squared distances: rows x cols x sites; argmin keeps the lowest id on ties
        d2 = (xs[None, :, None] - xy[None, None, :, 0]) ** 2 + (yy[:, None, None] - xy[None, None, :, 1]) ** 2
        near = d2.argmin(axis=2)
        best = np.take_along_axis(d2, near[..., None], axis=2)[..., 0]
        img[r0:r0 + 256] = (best <= a0 * a0) & ok[near]
    return img


def cubical_betti(img: np.ndarray) -> tuple[int, int]:
    """(b0, b1) of the union of closed pixels."""
    if not img.any():
        return (0, 0)
    _, b0 = ndimage.label(img, structure=np.ones((3, 3), dtype=int))
    p = np.pad(img, 1)
    faces = int(p.sum())
    h_edges = int((p[1:, :] | p[:-1, :]).sum())  # edges between vertically stacked pixels
    v_edges = int((p[:, 1:] | p[:, :-1]).sum())
    verts = int((p[1:, 1:] | p[1:, :-1] | p[:-1, 1:] | p[:-1, :-1]).sum())
    chi = verts - (h_edges + v_edges) + faces
    return (int(b0), int(b0) - chi)


def rasterized_betti(points: Sequence[SitePoint], color_scope: Scope, alpha0, resolution: int = 256):
    if not points:
        return (0, 0)
    return cubical_betti(_raster(points, color_scope, alpha0, resolution))


def raster_compare(points: Sequence[SitePoint], color_scope: Scope, alpha0, expected,
                    resolution: int = 256, refinements: int = 3):
    """Compare against ``expected`` (b0, b1), doubling the resolution on mismatch.

    Returns ``(agrees, observed, resolution_used)``.
    """
    res = resolution
    seen = None
    for _ in range(refinements + 1):
        seen = rasterized_betti(points, color_scope, alpha0, res)
        if tuple(seen) == tuple(expected):
            return True, seen, res
        res *= 2
    return False, seen, res // 2
