"""Filtered cell complexes ("medusas") over GF(2).

A medusa is a finite complex of cells, each carrying a lifetime interval
``[f_min, f_max]`` of normalized time.  The sublevel complex at ``t`` holds the
cells with ``f_min <= t``; the superlevel complex holds those with
``f_max >= t``.  Two cells may share a vertex set (a simplex that vanishes and
comes back), in which case they differ by their run index.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

PRISM = "prism"
FILLER = "filler"
KINDS = (PRISM, FILLER)


@dataclass(frozen=True)
class Scope:
    """Color scope of a complex: all colors (``color is None``) or one color."""

    color: int | None = None

    @property
    def is_multi(self) -> bool:
        return self.color is None

    def admits(self, colors: Iterable[int]) -> bool:
        return self.color is None or all(c == self.color for c in colors)

    def __str__(self) -> str:
        return "multi" if self.color is None else f"mono{self.color}"

    @classmethod
    def parse(cls, text: str) -> "Scope":
        text = text.strip().lower()
        if text == "multi":
            return cls(None)
        for prefix in ("mono:", "mono"):
            if text.startswith(prefix) and text[len(prefix):].isdigit():
                return cls(int(text[len(prefix):]))
        raise ValueError(f"unknown color scope {text!r}")


MULTI = Scope(None)


def mono(color: int) -> Scope:
    return Scope(int(color))


@dataclass(frozen=True)
class Cell:
    vertices: tuple[int, ...]
    run: int
    dim: int
    f_min: Fraction
    f_max: Fraction
    kind: str = PRISM
    boundary: tuple[int, ...] = ()


@dataclass(frozen=True)
class Medusa:
    cells: tuple[Cell, ...]
    ambient_dim: int
    color_scope: Scope
    time_grid: tuple[Fraction, ...]
    complex_kind: str = "alpha"
    alpha0: Fraction | None = None

    def __len__(self) -> int:
        return len(self.cells)

    @property
    def descriptor(self) -> str:
        return f"{self.complex_kind}-{self.color_scope}"

    def max_dim(self) -> int:
        return max((c.dim for c in self.cells), default=-1)

    def grid_index(self) -> dict[Fraction, int]:
        return {t: i for i, t in enumerate(self.time_grid)}


@dataclass(frozen=True)
class InclusionMap:
    sub: Medusa
    ambient: Medusa
    cell_map: tuple[int, ...]

    @classmethod
    def identity(cls, medusa: Medusa) -> "InclusionMap":
        return cls(medusa, medusa, tuple(range(len(medusa.cells))))


@dataclass(frozen=True)
class Violation:
    kind: str
    cells: tuple[int, ...]
    message: str

    def __str__(self) -> str:
        return f"[{self.kind}] {self.message}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    def __bool__(self) -> bool:
        # truthy when something is wrong, so `if validate(m):` reads naturally
        return bool(self.violations)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def add(self, kind: str, cells: Sequence[int], message: str) -> None:
        self.violations.append(Violation(kind, tuple(cells), message))


def validate(medusa: Medusa) -> ValidationReport:
    """Check every structural invariant; the report is empty iff the medusa is valid."""
    report = ValidationReport()
    cells = medusa.cells
    n = len(cells)
    grid = set(medusa.time_grid)
    if list(medusa.time_grid) != sorted(grid):
        report.add("grid", (), "time grid is not strictly increasing")
    elif medusa.time_grid and (medusa.time_grid[0] != 0 or medusa.time_grid[-1] != 1):
        report.add("grid", (), "time grid must start at 0 and end at 1")

    seen_runs: dict[tuple, int] = {}
    for i, c in enumerate(cells):
        if c.kind not in KINDS:
            report.add("kind", (i,), f"cell {i} has unknown kind {c.kind!r}")
        if c.f_min > c.f_max:
            report.add("interval", (i,), f"cell {i} has f_min {c.f_min} > f_max {c.f_max}")
        for t in (c.f_min, c.f_max):
            if t not in grid:
                report.add("off-grid", (i,), f"cell {i} time {t} is not on the time grid")
        key = (c.vertices, c.run)
        if key in seen_runs:
            j = seen_runs[key]
            report.add("duplicate", (j, i), f"cells {j} and {i} share vertices {c.vertices} and run {c.run}")
        else:
            seen_runs[key] = i
        if c.dim == 0 and c.boundary:
            report.add("dimension", (i,), f"vertex cell {i} has a non-empty boundary")
        if len(set(c.boundary)) != len(c.boundary):
            report.add("boundary", (i,), f"cell {i} lists a facet twice")
        for b in c.boundary:
            if not (0 <= b < n):
                report.add("dangling", (i, b), f"cell {i} refers to missing cell {b}")
                continue
            face = cells[b]
            if face.dim != c.dim - 1:
                report.add("dimension", (i, b), f"cell {i} (dim {c.dim}) has facet {b} of dim {face.dim}")
            if face.f_min > c.f_min:
                report.add(
                    "monotonicity", (i, b),
                    f"cell {i} has f_min {c.f_min} below its face {b} with f_min {face.f_min}",
                )
            if face.f_max < c.f_max:
                report.add(
                    "monotonicity", (i, b),
                    f"cell {i} has f_max {c.f_max} above its face {b} with f_max {face.f_max}",
                )
    for i, c in enumerate(cells):
        if c.dim < 2:
            continue
        acc: set[int] = set()
        for b in c.boundary:
            if 0 <= b < n:
                acc.symmetric_difference_update(cells[b].boundary)
        if acc:
            report.add("boundary", (i, *sorted(acc)), f"boundary of boundary of cell {i} is {sorted(acc)}")
    return report


def sublevel_cells(medusa: Medusa, t) -> list[int]:
    return [i for i, c in enumerate(medusa.cells) if c.f_min <= t]


def superlevel_cells(medusa: Medusa, t) -> list[int]:
    return [i for i, c in enumerate(medusa.cells) if c.f_max >= t]


def euler_characteristic_at(medusa: Medusa, t) -> int:
    return sum(-1 if c.dim % 2 else 1 for c in medusa.cells if c.f_min <= t)


def is_face_closed(medusa: Medusa, ids: Iterable[int]) -> bool:
    chosen = set(ids)
    return all(b in chosen for i in chosen for b in medusa.cells[i].boundary)


def cells_by_vertices(medusa: Medusa) -> dict[tuple[int, ...], list[int]]:
    out: dict[tuple[int, ...], list[int]] = defaultdict(list)
    for i, c in enumerate(medusa.cells):
        out[c.vertices].append(i)
    return out


# -- text serialization ------------------------------------------------------

def _fmt_time(t: Fraction) -> str:
    return str(Fraction(t))


def dumps(medusa: Medusa) -> str:
    head = [
        "# medusa v1",
        f"# ambient_dim={medusa.ambient_dim} kind={medusa.complex_kind} scope={medusa.color_scope}"
        f" alpha0={'-' if medusa.alpha0 is None else _fmt_time(medusa.alpha0)}",
        "# grid=" + ",".join(_fmt_time(t) for t in medusa.time_grid),
    ]
    lines = []
    for i, c in enumerate(medusa.cells):
        lines.append(
            f"{i} {c.dim} {c.kind} {_fmt_time(c.f_min)} {_fmt_time(c.f_max)}"
            f" vertices={','.join(map(str, c.vertices))} boundary={','.join(map(str, c.boundary))}"
        )
    return "\n".join(head + lines) + "\n"


def loads(text: str) -> Medusa:
    meta: dict[str, str] = {}
    grid: tuple[Fraction, ...] = ()
    rows = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("grid="):
                vals = body[len("grid="):]
                grid = tuple(Fraction(v) for v in vals.split(",") if v)
            else:
                for tok in body.split():
                    if "=" in tok:
                        k, v = tok.split("=", 1)
                        meta[k] = v
            continue
        parts = line.split()
        if len(parts) != 7 or not parts[5].startswith("vertices=") or not parts[6].startswith("boundary="):
            raise ValueError(f"malformed cell line: {line!r}")
        idx, dim = int(parts[0]), int(parts[1])
        if idx != len(rows):
            raise ValueError(f"cell ids must be dense and ordered, got {idx} at position {len(rows)}")
        verts = tuple(int(v) for v in parts[5][len("vertices="):].split(",") if v)
        bnd = tuple(int(v) for v in parts[6][len("boundary="):].split(",") if v)
        rows.append((verts, dim, parts[2], Fraction(parts[3]), Fraction(parts[4]), bnd))
    # run indices are implied by start time within a vertex set
    order: dict[tuple[int, ...], list[int]] = defaultdict(list)
    for i, r in enumerate(rows):
        order[r[0]].append(i)
    run_of = {}
    for ids in order.values():
        for k, i in enumerate(sorted(ids, key=lambda i: (rows[i][3], rows[i][4], i))):
            run_of[i] = k
    cells = tuple(
        Cell(vertices=r[0], run=run_of[i], dim=r[1], f_min=r[3], f_max=r[4], kind=r[2], boundary=r[5])
        for i, r in enumerate(rows)
    )
    alpha0 = meta.get("alpha0", "-")
    return Medusa(
        cells=cells,
        ambient_dim=int(meta.get("ambient_dim", 2)),
        color_scope=Scope.parse(meta.get("scope", "multi")),
        time_grid=grid,
        complex_kind=meta.get("kind", "alpha"),
        alpha0=None if alpha0 == "-" else Fraction(alpha0),
    )


def from_simplices(
    simplices: dict[tuple[int, ...], tuple],
    ambient_dim: int = 2,
    grid: Sequence | None = None,
    scope: Scope = MULTI,
    kind: str = "alpha",
) -> Medusa:
    """Build a medusa from ``{vertex tuple: (f_min, f_max)}`` with one run per simplex.

    Handy for hand-made fixtures; every face of a listed simplex must be listed.
    """
    items = sorted(((tuple(sorted(v)), tuple(map(Fraction, iv))) for v, iv in simplices.items()),
                   key=lambda kv: (len(kv[0]), kv[0]))
    ids = {v: i for i, (v, _) in enumerate(items)}
    cells = []
    for v, (lo, hi) in items:
        bnd = tuple(sorted(ids[v[:k] + v[k + 1:]] for k in range(len(v)))) if len(v) > 1 else ()
        cells.append(Cell(vertices=v, run=0, dim=len(v) - 1, f_min=lo, f_max=hi, boundary=bnd))
    if grid is None:
        grid = sorted({Fraction(0), Fraction(1)} | {t for _, iv in items for t in iv})
    return Medusa(tuple(cells), ambient_dim, scope, tuple(Fraction(t) for t in grid), kind)
