"""Hole types, dot counts and 1-norms of persistence diagrams."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction

from .persistence import HOR, ORD, REL, SUBDIAGRAMS, VER, Dot, PersistenceDiagram

GAP, TUNNEL, VOID, ARTIFACT = "gap", "tunnel", "void", "artifact"
HOLE_TYPES = (GAP, TUNNEL, VOID)
_HOLE_NAMES = {0: GAP, 1: TUNNEL, 2: VOID}


def hole_type(dot: Dot, ambient_dim: int = 3) -> str:
    """Which kind of level-set hole a dot describes.

    Ordinary and horizontal classes of dimension p come from p-dimensional
    holes; vertical and relative ones from (p-1)-dimensional holes.  A hole
    can be at most (d-1)-dimensional in a d-dimensional slice.
    """
    hole = dot.dim if dot.subdiagram in (ORD, HOR) else dot.dim - 1
    if hole < 0 or hole > ambient_dim - 1:
        return ARTIFACT
    return _HOLE_NAMES[hole]


@dataclass
class SummaryTable:
    """Counts and exact 1-norms per (hole type, subdiagram)."""

    counts: dict[tuple[str, str], int] = field(default_factory=dict)
    norms: dict[tuple[str, str], Fraction] = field(default_factory=dict)
    artifacts: int = 0

    def count(self, hole: str = "sum", sub: str = "sum") -> int:
        return sum(v for (h, s), v in self.counts.items() if hole in ("sum", h) and sub in ("sum", s))

    def norm(self, hole: str = "sum", sub: str = "sum") -> Fraction:
        return sum((v for (h, s), v in self.norms.items() if hole in ("sum", h) and sub in ("sum", s)), Fraction(0))

    def rows(self):
        """(hole, subdiagram, count, norm) with marginals, in display order."""
        for hole in HOLE_TYPES + ("sum",):
            for sub in SUBDIAGRAMS + ("sum",):
                yield hole, sub, self.count(hole, sub), self.norm(hole, sub)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["hole_type", "subdiagram", "count", "norm"])
        for hole, sub, c, n in self.rows():
            w.writerow([hole, sub, c, f"{float(n):.2f}"])
        return buf.getvalue()

    def to_text(self) -> str:
        head = f"{'':8}" + "".join(f"{s:>14}" for s in SUBDIAGRAMS + ("sum",))
        lines = [head]
        for hole in HOLE_TYPES + ("sum",):
            cells = "".join(f"{self.count(hole, s):>6} {float(self.norm(hole, s)):>7.2f}" for s in SUBDIAGRAMS + ("sum",))
            lines.append(f"{hole:8}{cells}")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {f"{h}/{s}": {"count": c, "norm": round(float(n), 6)} for h, s, c, n in self.rows()}


def summarize(diagram: PersistenceDiagram, ambient_dim: int | None = None, min_persistence=0) -> SummaryTable:
    d = diagram.ambient_dim if ambient_dim is None else ambient_dim
    table = SummaryTable()
    for dot in diagram.filtered(min_persistence).dots:
        hole = hole_type(dot, d)
        if hole == ARTIFACT:
            table.artifacts += 1
            continue
        key = (hole, dot.subdiagram)
        table.counts[key] = table.counts.get(key, 0) + 1
        table.norms[key] = table.norms.get(key, Fraction(0)) + dot.persistence
    return table


__all__ = ["hole_type", "summarize", "SummaryTable", "GAP", "TUNNEL", "VOID", "ARTIFACT", "HOLE_TYPES",
           "ORD", "HOR", "VER", "REL"]
