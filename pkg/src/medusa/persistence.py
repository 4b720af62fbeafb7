"""Extended and image persistence of the time function over GF(2).

The extended filtration is realized as a cone: an apex comes first, then the
cells sweep up by ``f_min`` (phase 1), then the cones over the cells sweep
back down by ``f_max`` (phase 2).  With ``M`` grid times, position ``k + 1``
holds phase-1 cells with ``f_min = grid[k]`` and position ``2M - k`` holds the
cones over cells with ``f_max = grid[k]``.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .complex import Cell, InclusionMap, Medusa, validate
from .errors import IncompatibleInclusion, InvalidMedusa

ORD, HOR, VER, REL = "Ord", "Hor", "Ver", "Rel"
SUBDIAGRAMS = (ORD, HOR, VER, REL)
_SUB_RANK = {s: i for i, s in enumerate(SUBDIAGRAMS)}


@dataclass(frozen=True)
class Dot:
    dim: int
    subdiagram: str
    birth: Fraction
    death: Fraction
    creator: int
    destroyer: int
    birth_pos: int = 0
    death_pos: int = 0

    @property
    def persistence(self) -> Fraction:
        return abs(self.birth - self.death)

    @property
    def instant(self) -> bool:
        """Born and killed at the same filtration position."""
        return self.birth_pos == self.death_pos

    def key(self) -> tuple:
        return (self.dim, self.subdiagram, self.birth, self.death)


@dataclass(frozen=True)
class PersistenceDiagram:
    dots: tuple[Dot, ...]
    source: str = ""
    flavor: str = "extended"
    ambient_dim: int = 2
    grid: tuple[Fraction, ...] = ()
    columns: int = 0  # size of the reduced matrix, apex included

    def __len__(self) -> int:
        return len(self.dots)

    def __iter__(self):
        return iter(self.dots)

    def visible(self) -> list[Dot]:
        """Dots that occupy more than one filtration position."""
        return [d for d in self.dots if not d.instant]

    def multiset(self, include_instant: bool = False) -> dict[tuple, int]:
        out: dict[tuple, int] = {}
        for d in self.dots if include_instant else self.visible():
            out[d.key()] = out.get(d.key(), 0) + 1
        return out

    def filtered(self, min_persistence=0) -> "PersistenceDiagram":
        lim = Fraction(min_persistence)
        keep = tuple(d for d in self.dots if d.persistence >= lim and (lim == 0 or d.persistence > 0))
        return PersistenceDiagram(keep, self.source, self.flavor, self.ambient_dim, self.grid, self.columns)

    def select(self, subdiagram: str | None = None, dim: int | None = None) -> list[Dot]:
        return [d for d in self.dots
                if (subdiagram is None or d.subdiagram == subdiagram) and (dim is None or d.dim == dim)]


def sort_dots(dots: Iterable[Dot]) -> tuple[Dot, ...]:
    return tuple(sorted(dots, key=lambda d: (d.dim, _SUB_RANK[d.subdiagram], d.birth, d.death,
                                             d.creator, d.destroyer)))


# -- filtration order ----------------------------------------------------------

class _Order:
    """Column order of the coned complex for one medusa on a given grid.

    Entry 0 is the apex; entries are ``(cone, cell id)`` with ``cone`` False
    for phase-1 cells.
    """

    def __init__(self, medusa: Medusa, grid: Sequence[Fraction]):
        at = {t: k for k, t in enumerate(grid)}
        m = len(grid)
        cells = medusa.cells
        self.m = m
        up = sorted(range(len(cells)), key=lambda i: (at[cells[i].f_min], cells[i].dim, i))
        down = sorted(range(len(cells)), key=lambda i: (-at[cells[i].f_max], cells[i].dim, i))
        self.entries: list[tuple[bool, int]] = [(False, -1)]
        self.pos: list[int] = [0]
        for i in up:
            self.entries.append((False, i))
            self.pos.append(at[cells[i].f_min] + 1)
        for i in down:
            self.entries.append((True, i))
            self.pos.append(2 * m - at[cells[i].f_max])
        self.index = {e: k for k, e in enumerate(self.entries)}
        self.dims = [0] + [cells[i].dim for i in up] + [cells[i].dim + 1 for i in down]

    def boundary(self, medusa: Medusa, k: int) -> list[tuple[bool, int]]:
        cone, i = self.entries[k]
        if i < 0:
            return []
        bnd = medusa.cells[i].boundary
        if not cone:
            return [(False, b) for b in bnd]
        # d(w * s) = s + w * ds, and d(w * v) = v + w
        return [(False, i)] + ([(True, b) for b in bnd] if bnd else [(False, -1)])


def _time_at(grid: Sequence[Fraction], m: int, pos: int) -> Fraction:
    return grid[pos - 1] if pos <= m else grid[2 * m - pos]


def _reduce(columns: list[int]) -> list[tuple[int, int]]:
    """Standard left-to-right GF(2) column reduction; returns (low row, column) pairs."""
    owner: dict[int, int] = {}
    reduced: list[int] = []
    pairs = []
    for j, col in enumerate(columns):
        while col:
            low = col.bit_length() - 1
            k = owner.get(low)
            if k is None:
                owner[low] = j
                pairs.append((low, j))
                break
            col ^= reduced[k]
        reduced.append(col)
    return pairs


def _dot(order_c: _Order, kc: int, pos_c: int, pos_d: int, kd_cell: int, grid, creator_cell: int) -> Dot:
    m = order_c.m
    birth, death = _time_at(grid, m, pos_c), _time_at(grid, m, pos_d)
    if pos_d <= m:
        sub = ORD
    elif pos_c > m:
        sub = REL
    else:
        sub = HOR if birth <= death else VER
    return Dot(order_c.dims[kc], sub, birth, death, creator_cell, kd_cell, pos_c, pos_d)


def extended_persistence(medusa: Medusa, check: bool = True) -> PersistenceDiagram:
    """Extended persistence diagram of the time function on ``medusa``."""
    if check:
        report = validate(medusa)
        if report:
            raise InvalidMedusa(report)
    grid = tuple(medusa.time_grid)
    order = _Order(medusa, grid)
    cols = []
    for k in range(len(order.entries)):
        v = 0
        for e in order.boundary(medusa, k):
            v ^= 1 << order.index[e]
        cols.append(v)
    dots = []
    paired = set()
    for low, j in _reduce(cols):
        paired.update((low, j))
        dots.append(_dot(order, low, order.pos[low], order.pos[j], order.entries[j][1], grid,
                         order.entries[low][1]))
    if len(paired) != len(cols) - 1 or 0 in paired:
        raise AssertionError("extended pairing left columns other than the apex unpaired")
    return PersistenceDiagram(sort_dots(dots), medusa.descriptor, "extended", medusa.ambient_dim, grid, len(cols))


def merged_grid(*medusas: Medusa) -> tuple[Fraction, ...]:
    return tuple(sorted({t for m in medusas for t in m.time_grid}))


def check_inclusion(inc: InclusionMap) -> None:
    """Raise unless the cell map is a filtration-compatible chain map."""
    sub, amb, cmap = inc.sub, inc.ambient, inc.cell_map
    if len(cmap) != len(sub.cells):
        raise IncompatibleInclusion("cell map is not total")
    for i, j in enumerate(cmap):
        if not 0 <= j < len(amb.cells):
            raise IncompatibleInclusion(f"cell {i} maps outside the ambient medusa")
        a, b = sub.cells[i], amb.cells[j]
        if a.dim != b.dim or a.vertices != b.vertices:
            raise IncompatibleInclusion(f"cell {i} maps to cell {j} of another shape")
        if a.f_min < b.f_min or a.f_max > b.f_max:
            raise IncompatibleInclusion(f"cell {i} lives outside its image {j}")
        pushed = set()
        for x in a.boundary:
            pushed ^= {cmap[x]}
        if pushed != set(b.boundary):
            raise IncompatibleInclusion(f"cell map does not commute with the boundary at cell {i}")


def mapping_cylinder(inc: InclusionMap) -> InclusionMap:
    """Replace a non-injective cell map by the inclusion of the sub medusa into its mapping cylinder.

    The cylinder holds the ambient cells (same ids), then a copy of every sub
    cell, then a prism ``s x I`` per sub cell with the sub cell's lifetime.
    Each level set deformation retracts onto the ambient one, so images agree.
    """
    sub, amb, cmap = inc.sub, inc.ambient, inc.cell_map
    na, ns = len(amb.cells), len(sub.cells)
    cells = list(amb.cells)
    spare = 1 + max((c.run for c in amb.cells), default=0)  # keeps (vertices, run) unique
    for i, c in enumerate(sub.cells):
        cells.append(Cell(c.vertices, spare + i, c.dim, c.f_min, c.f_max, c.kind,
                          tuple(sorted(na + b for b in c.boundary))))
    for i, c in enumerate(sub.cells):
        bnd = {na + i} ^ {cmap[i]} ^ {na + ns + b for b in c.boundary}
        cells.append(Cell(c.vertices, spare + ns + i, c.dim + 1, c.f_min, c.f_max, c.kind, tuple(sorted(bnd))))
    cyl = Medusa(tuple(cells), amb.ambient_dim, amb.color_scope, merged_grid(sub, amb), amb.complex_kind, amb.alpha0)
    return InclusionMap(sub, cyl, tuple(range(na, na + ns)))


def image_persistence(inc: InclusionMap, check: bool = True) -> PersistenceDiagram:
    """Extended persistence of the images of the sub medusa's groups in the ambient ones.

    Ambient columns are reduced in ambient order with rows arranged so the sub
    cells come first, in sub order; a column whose lowest row is a sub cell
    kills the image class born at that row.  Non-injective cell maps go
    through the mapping cylinder first.
    """
    sub, amb = inc.sub, inc.ambient
    if check:
        for m in (sub, amb):
            report = validate(m)
            if report:
                raise InvalidMedusa(report)
        check_inclusion(inc)
    grid = merged_grid(sub, amb)
    desc = f"{sub.descriptor} in {amb.descriptor}"
    if not sub.cells:
        return PersistenceDiagram((), desc, "image", amb.ambient_dim, grid, 0)
    back = None
    if len(set(inc.cell_map)) != len(inc.cell_map):
        n_amb, n_sub, first_map = len(amb.cells), len(sub.cells), inc.cell_map
        inc = mapping_cylinder(inc)
        amb = inc.ambient

        def back(k):  # destroyers are reported by ambient id
            return k if k < n_amb else first_map[(k - n_amb) % n_sub]

    so, ao = _Order(sub, grid), _Order(amb, grid)
    row_of: dict[tuple[bool, int], int] = {}
    for cone, i in so.entries:
        row_of[(cone, inc.cell_map[i] if i >= 0 else -1)] = len(row_of)
    n_sub_rows = len(row_of)
    for e in ao.entries:
        if e not in row_of:
            row_of[e] = len(row_of)
    cols = []
    for k in range(len(ao.entries)):
        v = 0
        for e in ao.boundary(amb, k):
            v ^= 1 << row_of[e]
        cols.append(v)
    dots = []
    for low, j in _reduce(cols):
        if low >= n_sub_rows:
            continue
        pb, pd = so.pos[low], ao.pos[j]
        if pd < pb:
            continue
        killer = ao.entries[j][1]
        dots.append(_dot(so, low, pb, pd, back(killer) if back else killer, grid, so.entries[low][1]))
    return PersistenceDiagram(sort_dots(dots), desc, "image", amb.ambient_dim, grid, len(cols))


def betti_curve(medusa_or_diagram, p: int) -> list[tuple[Fraction, int]]:
    """Betti number ``p`` of the sublevel complex at every grid time, read off the diagram."""
    dg = medusa_or_diagram
    if isinstance(dg, Medusa):
        if not dg.cells:
            return [(t, 0) for t in dg.time_grid]
        dg = extended_persistence(dg)
    out = []
    for k, t in enumerate(dg.grid):
        pos = k + 1
        # the apex is disjoint from every sublevel complex, so it never shows up here
        out.append((t, sum(1 for d in dg.dots if d.dim == p and d.birth_pos <= pos < d.death_pos)))
    return out


# -- CSV -----------------------------------------------------------------------

DIAGRAM_HEADER = ["dim", "subdiagram", "birth", "death", "persistence", "hole_type", "creator", "destroyer"]


def diagram_csv(diagram: PersistenceDiagram, hole_type=None, min_persistence=0) -> str:
    from .summary import hole_type as default_hole_type

    label = hole_type or default_hole_type
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(DIAGRAM_HEADER)
    for d in diagram.filtered(min_persistence).dots:
        w.writerow([d.dim, d.subdiagram, f"{float(d.birth):.6f}", f"{float(d.death):.6f}",
                    f"{float(d.persistence):.6f}", label(d, diagram.ambient_dim), d.creator, d.destroyer])
    return buf.getvalue()
