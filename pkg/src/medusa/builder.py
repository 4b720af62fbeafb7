"""Frame-resolution medusas built from sampled trajectories.

Every abstract simplex contributes one cell per maximal run of consecutive
frames in which it is present.  Between two frames, the d-cycles that appear
in the union of the two slices are filled by (d+1)-dimensional filler cells
living at the midpoint time of the pair.  Faces of a filler that exist on only
one side of the pair are stretched to that midpoint so that the filtration
stays monotone.

Fillers are chosen once per frame pair for a whole family of complexes
(alpha/mono, alpha/multi, delaunay/mono, delaunay/multi), smallest first, and a
complex owns every filler whose boundary lies in its own two-slice union.
That keeps filler boundaries independent inside each complex, fills every
union cycle, and makes all supported inclusions cellular.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .complex import FILLER, MULTI, PRISM, Cell, InclusionMap, Medusa, Scope, mono
from .errors import (
    EmptyFrame,
    IncompatibleInclusion,
    InconsistentSupport,
    PositionCollision,
    UnmappableCell,
    UnsupportedDimension,
)
from .geometry.alpha import alpha_values, restrict_scope
from .geometry.delaunay import SitePoint, SliceComplex, delaunay, quantize

ALPHA = "alpha"
DELAUNAY = "delaunay"


# -- trajectories ------------------------------------------------------------

@dataclass(frozen=True)
class Trajectory:
    id: int
    color: int
    start: int  # index of the first supported frame
    coords: tuple[tuple[int, ...], ...]  # quantized positions, one per supported frame

    @property
    def stop(self) -> int:
        return self.start + len(self.coords) - 1

    def at(self, frame: int) -> tuple[int, ...] | None:
        if self.start <= frame <= self.stop:
            return self.coords[frame - self.start]
        return None


@dataclass(frozen=True)
class TrajectorySet:
    """Colored trajectories sampled on a common frame grid normalized to [0, 1]."""

    dim: int
    frame_times: tuple[Fraction, ...]
    trajectories: tuple[Trajectory, ...]
    raw_times: tuple[Fraction, ...] = ()

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise UnsupportedDimension(f"dimension {self.dim} is not supported (use 2 or 3)")
        m = len(self.frame_times)
        if m < 2 or self.frame_times[0] != 0 or self.frame_times[-1] != 1:
            raise InconsistentSupport("frame grid must run from 0 to 1 with at least two frames")
        if any(a >= b for a, b in zip(self.frame_times, self.frame_times[1:])):
            raise InconsistentSupport("frame times must increase strictly")
        ids = [t.id for t in self.trajectories]
        if ids != sorted(set(ids)):
            raise InconsistentSupport("trajectory ids must be unique and sorted")
        for t in self.trajectories:
            if not t.coords or t.start < 0 or t.stop >= m:
                raise InconsistentSupport(f"trajectory {t.id} is supported outside the frame grid")
            if any(len(c) != self.dim for c in t.coords):
                raise UnsupportedDimension(f"trajectory {t.id} has coordinates of the wrong dimension")
        for i in range(m):
            seen: dict[tuple[int, ...], int] = {}
            for t in self.trajectories:
                c = t.at(i)
                if c is None:
                    continue
                if c in seen:
                    raise PositionCollision(f"trajectories {seen[c]} and {t.id} collide in frame {i}")
                seen[c] = t.id
            if not seen:
                raise EmptyFrame(self.frame_times[i])

    @property
    def frames(self) -> int:
        return len(self.frame_times)

    def colors(self) -> list[int]:
        return sorted({t.color for t in self.trajectories})

    def frame_points(self, i: int) -> list[SitePoint]:
        return [SitePoint(t.id, c, t.color) for t in self.trajectories if (c := t.at(i)) is not None]

    @classmethod
    def from_samples(
        cls,
        dim: int,
        times: Sequence,
        samples: Mapping[int, tuple[int, int, Sequence[Sequence]]],
    ) -> "TrajectorySet":
        """``samples[id] = (color, first_frame, positions)`` with positions in input units.

        Times are mapped affinely onto [0, 1]; a single frame is read as a
        static scene held over the whole interval.
        """
        raw = tuple(Fraction(t) for t in times)
        if len(raw) == 1:
            raw = (raw[0], raw[0])
            samples = {k: (c, 0, [p[0], p[0]]) for k, (c, _, p) in samples.items()}
            norm = (Fraction(0), Fraction(1))
        else:
            lo, hi = raw[0], raw[-1]
            if hi <= lo:
                raise InconsistentSupport("frame times must increase strictly")
            norm = tuple((t - lo) / (hi - lo) for t in raw)
        trajs = tuple(
            Trajectory(k, int(c), int(s), tuple(tuple(quantize(v) for v in p) for p in pos))
            for k, (c, s, pos) in sorted(samples.items())
        )
        return cls(dim, norm, trajs, raw)

    def with_colors(self, colors: Mapping[int, int]) -> "TrajectorySet":
        trajs = tuple(Trajectory(t.id, colors.get(t.id, t.color), t.start, t.coords) for t in self.trajectories)
        return TrajectorySet(self.dim, self.frame_times, trajs, self.raw_times)


# -- targets -----------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Target:
    kind: str
    scope: Scope

    def __str__(self) -> str:
        return f"{self.kind}-{self.scope}"

    @classmethod
    def parse(cls, text: str) -> "Target":
        kind, _, scope = text.replace(":", "-", 1).partition("-")
        kind = kind.strip().lower()
        if kind not in (ALPHA, DELAUNAY):
            raise ValueError(f"unknown complex kind {kind!r}")
        return cls(kind, Scope.parse(scope or "multi"))


def _scope_key(s: Scope):
    return (1, 0) if s.is_multi else (0, s.color)


# -- GF(2) helpers -------------------------------------------------------------

class _Span:
    """Incrementally reduced basis of GF(2) vectors stored as ints."""

    def __init__(self):
        self.pivots: dict[int, int] = {}

    def reduce(self, v: int) -> int:
        while v:
            top = v.bit_length() - 1
            p = self.pivots.get(top)
            if p is None:
                return v
            v ^= p
        return 0

    def add(self, v: int) -> bool:
        v = self.reduce(v)
        if v:
            self.pivots[v.bit_length() - 1] = v
        return bool(v)


def _cycle_basis(tops: Sequence[tuple[int, ...]]) -> list[int]:
    """Basis of the d-cycles spanned by ``tops``, as bitsets over their indices."""
    faces: dict[tuple[int, ...], int] = {}
    pivots: dict[int, tuple[int, int]] = {}
    kernel = []
    for j, s in enumerate(tops):
        col = 0
        for k in range(len(s)):
            col |= 1 << faces.setdefault(s[:k] + s[k + 1:], len(faces))
        combo = 1 << j
        while col:
            low = col.bit_length() - 1
            hit = pivots.get(low)
            if hit is None:
                pivots[low] = (col, combo)
                break
            col ^= hit[0]
            combo ^= hit[1]
        else:
            kernel.append(combo)
    return kernel


def _bits(simplices: Iterable[tuple[int, ...]], index: Mapping[tuple[int, ...], int]) -> int:
    v = 0
    for s in simplices:
        v |= 1 << index[s]
    return v


# -- filler family -----------------------------------------------------------

@dataclass(frozen=True)
class Filler:
    pair: int  # fills the gap between frames pair and pair + 1
    boundary: frozenset  # d-simplices
    shape: str  # "simplex" for a flip, "cycle" for a clustered transition

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted({v for s in self.boundary for v in s}))


@dataclass
class _PairRecord:
    fillers: list[Filler] = field(default_factory=list)
    incomplete: dict[Target, int] = field(default_factory=dict)


class SpaceTime:
    """Per-frame slices plus the filler family shared by all complexes of one dataset."""

    def __init__(self, ts: TrajectorySet, alpha0=None):
        self.ts = ts
        self.alpha0 = None if alpha0 is None else Fraction(alpha0)
        self.d = ts.dim
        self.slices: list[SliceComplex] = []
        for i, t in enumerate(ts.frame_times):
            sl = delaunay(ts.frame_points(i), ts.dim, t)
            self.slices.append(alpha_values(sl, self.alpha0) if self.alpha0 is not None else sl)
        colors = ts.colors()
        self.targets: list[Target] = []
        if self.alpha0 is not None:
            self.targets += [Target(ALPHA, mono(c)) for c in colors] + [Target(ALPHA, MULTI)]
        self.targets += [Target(DELAUNAY, mono(c)) for c in colors] + [Target(DELAUNAY, MULTI)]
        self._sets: dict[Target, list[set]] = {}
        self.pairs = [self._fill_pair(i) for i in range(ts.frames - 1)]

    def simplices(self, target: Target, frame: int) -> set[tuple[int, ...]]:
        cache = self._sets.get(target)
        if cache is None:
            if target.kind == ALPHA and self.alpha0 is None:
                raise ValueError("alpha complexes need alpha0")
            cache = []
            for sl in self.slices:
                sub = restrict_scope(sl, target.scope)
                cache.append(sub.alpha_simplices() if target.kind == ALPHA else sub.delaunay_simplices())
            self._sets[target] = cache
        return cache[frame]

    def tops(self, target: Target, frame: int) -> set[tuple[int, ...]]:
        n = self.d + 1
        return {s for s in self.simplices(target, frame) if len(s) == n}

    def _fill_pair(self, i: int) -> _PairRecord:
        rec = _PairRecord()
        d = self.d
        for target in self.targets:
            a, b = self.tops(target, i), self.tops(target, i + 1)
            sym = a ^ b
            if not sym:
                rec.incomplete[target] = 0
                continue
            union = sorted(a | b)
            index = {s: k for k, s in enumerate(union)}
            span = _Span()
            owned = {f.vertices for f in rec.fillers if f.shape == "simplex"}
            for f in rec.fillers:
                if f.boundary <= index.keys():
                    if not span.add(_bits(f.boundary, index)):
                        raise AssertionError("dependent fillers inside one complex")
            # flips: (d+2)-sets whose facets all lie in the union
            by_face: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
            for s in union:
                for k in range(d + 1):
                    by_face.setdefault(s[:k] + s[k + 1:], []).append(s)
            candidates = set()
            for s in sym:
                for k in range(d + 1):
                    for t in by_face[s[:k] + s[k + 1:]]:
                        if t != s:
                            candidates.add(tuple(sorted(set(s) | set(t))))
            incomplete = 0
            for cand in sorted(candidates):
                facets = [cand[:k] + cand[k + 1:] for k in range(d + 2)]
                if not all(f in index for f in facets):
                    incomplete += 1
                    continue
                if cand in owned:
                    continue
                if span.add(_bits(facets, index)):
                    rec.fillers.append(Filler(i, frozenset(facets), "simplex"))
            rec.incomplete[target] = incomplete
            # whatever cycles remain are filled by one cell each
            for z in _cycle_basis(union):
                r = span.reduce(z)
                if r:
                    span.add(r)
                    bnd = frozenset(union[k] for k in range(len(union)) if r >> k & 1)
                    rec.fillers.append(Filler(i, bnd, "cycle"))
        return rec

    def fillers_for(self, target: Target, pair: int) -> list[Filler]:
        union = self.tops(target, pair) | self.tops(target, pair + 1)
        return [f for f in self.pairs[pair].fillers if f.boundary <= union]

    def midpoint(self, pair: int) -> Fraction:
        t = self.ts.frame_times
        return (t[pair] + t[pair + 1]) / 2


@lru_cache(maxsize=8)
def prepare(ts: TrajectorySet, alpha0=None) -> SpaceTime:
    return SpaceTime(ts, alpha0)


# -- diagnostics -------------------------------------------------------------

@dataclass
class PairDiagnostics:
    frames: tuple[int, int]
    symmetric_difference: int
    fillers: int
    simplex_fillers: int
    cycle_fillers: int
    incomplete_candidates: int

    @property
    def unresolved(self) -> int:
        # transitions that are not a single flip and needed a cycle filler
        return self.cycle_fillers

    def to_dict(self) -> dict:
        return {
            "frames": list(self.frames),
            "symmetric_difference": self.symmetric_difference,
            "fillers": self.fillers,
            "simplex_fillers": self.simplex_fillers,
            "cycle_fillers": self.cycle_fillers,
            "unresolved": self.unresolved,
            "incomplete_candidates": self.incomplete_candidates,
        }


@dataclass
class BuildDiagnostics:
    target: str
    pairs: list[PairDiagnostics] = field(default_factory=list)

    @property
    def fillers(self) -> int:
        return sum(p.fillers for p in self.pairs)

    @property
    def unresolved(self) -> int:
        return sum(p.unresolved for p in self.pairs)

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "fillers": self.fillers,
            "unresolved": self.unresolved,
            "pairs": [p.to_dict() for p in self.pairs],
        }


# -- assembly ----------------------------------------------------------------

@dataclass(frozen=True)
class Built:
    medusa: Medusa
    diagnostics: BuildDiagnostics
    keys: tuple  # per cell: ("run", first, last) or ("filler", pair, boundary)


def _faces(s: tuple[int, ...]):
    for k in range(1, len(s) + 1):
        yield from combinations(s, k)


def _runs(frames: list[int]) -> list[tuple[int, int]]:
    out = []
    for f in frames:
        if out and out[-1][1] == f - 1:
            out[-1] = (out[-1][0], f)
        else:
            out.append((f, f))
    return out


@lru_cache(maxsize=32)
def _build(ts: TrajectorySet, alpha0, target: Target) -> Built:
    st = prepare(ts, alpha0)
    times = ts.frame_times
    m = ts.frames
    presence: dict[tuple[int, ...], list[int]] = {}
    for i in range(m):
        for s in st.simplices(target, i):
            presence.setdefault(s, []).append(i)

    diag = BuildDiagnostics(str(target))
    fillers: list[Filler] = []
    stretched: list[set] = []  # per pair: simplices touched by that pair's fillers
    for p in range(m - 1):
        own = st.fillers_for(target, p)
        fillers += own
        touched = set()
        for f in own:
            for s in f.boundary:
                touched.update(_faces(s))
        stretched.append(touched)
        a, b = st.tops(target, p), st.tops(target, p + 1)
        diag.pairs.append(PairDiagnostics(
            (p, p + 1), len(a ^ b), len(own),
            sum(f.shape == "simplex" for f in own), sum(f.shape == "cycle" for f in own),
            st.pairs[p].incomplete.get(target, 0),
        ))

    specs = []  # (vertices, f_min, f_max, kind, key)
    for s, frames in presence.items():
        for first, last in _runs(frames):
            lo = st.midpoint(first - 1) if first > 0 and s in stretched[first - 1] else times[first]
            hi = st.midpoint(last) if last < m - 1 and s in stretched[last] else times[last]
            specs.append((s, lo, hi, PRISM, ("run", first, last)))
    for f in fillers:
        t = st.midpoint(f.pair)
        specs.append((f.vertices, t, t, FILLER, ("filler", f.pair, f.boundary)))

    d = ts.dim
    specs.sort(key=lambda c: (d + 1 if c[3] == FILLER else len(c[0]) - 1, c[0], c[1], c[2],
                              sorted(c[4][2]) if c[3] == FILLER else ()))
    run_no: dict[tuple[int, ...], int] = {}
    where: dict[tuple[int, ...], list[tuple[int, int, int]]] = {}
    for cid, (verts, _, _, kind, key) in enumerate(specs):
        if kind == PRISM:
            where.setdefault(verts, []).append((key[1], key[2], cid))

    def run_at(s, frame):
        for first, last, cid in where[s]:
            if first <= frame <= last:
                return cid
        raise AssertionError(f"simplex {s} missing at frame {frame}")

    cells = []
    for verts, lo, hi, kind, key in specs:
        run = run_no.get(verts, 0)
        run_no[verts] = run + 1
        if kind == PRISM:
            first = key[1]
            bnd = [run_at(verts[:k] + verts[k + 1:], first) for k in range(len(verts))] if len(verts) > 1 else []
            dim = len(verts) - 1
        else:
            p = key[1]
            bnd = [run_at(s, p if s in presence and p in presence[s] else p + 1) for s in key[2]]
            dim = d + 1
        cells.append(Cell(verts, run, dim, lo, hi, kind, tuple(sorted(bnd))))

    grid = sorted(set(times) | {st.midpoint(f.pair) for f in fillers})
    medusa = Medusa(tuple(cells), d, target.scope, tuple(grid), target.kind,
                    st.alpha0 if target.kind == ALPHA else None)
    return Built(medusa, diag, tuple(spec[4] for spec in specs))


def build_medusa(ts: TrajectorySet, alpha0=None, complex_kind: str = ALPHA, color_scope: Scope = MULTI):
    """Build the medusa of one complex; returns ``(medusa, diagnostics)``."""
    if complex_kind not in (ALPHA, DELAUNAY):
        raise ValueError(f"unknown complex kind {complex_kind!r}")
    if complex_kind == ALPHA and alpha0 is None:
        raise ValueError("alpha complexes need alpha0")
    if not color_scope.is_multi and color_scope.color not in ts.colors():
        raise ValueError(f"color {color_scope.color} is not used by any trajectory")
    a0 = None if alpha0 is None else Fraction(alpha0)
    built = _build(ts, a0, Target(complex_kind, color_scope))
    return built.medusa, built.diagnostics



def clear_caches() -> None:
    """Forget memoized slices and medusas (they are keyed on the input, so this only frees memory)."""
    _build.cache_clear()
    prepare.cache_clear()

SUPPORTED_INCLUSIONS = (
    "alpha-mono ⊆ delaunay-mono (same color)",
    "alpha-mono ⊆ alpha-multi",
    "alpha-multi ⊆ delaunay-multi",
    "identity",
)


def is_supported(sub: Target, ambient: Target) -> bool:
    if sub == ambient:
        return True
    if not sub.scope.is_multi and sub.kind == ALPHA:
        if ambient == Target(DELAUNAY, sub.scope) or ambient == Target(ALPHA, MULTI):
            return True
    return sub == Target(ALPHA, MULTI) and ambient == Target(DELAUNAY, MULTI)


def build_inclusion(sub: Target, ambient: Target, ts: TrajectorySet, alpha0=None) -> InclusionMap:
    """Cell map from the ``sub`` medusa into the ``ambient`` one."""
    if not is_supported(sub, ambient):
        raise IncompatibleInclusion(f"{sub} ⊆ {ambient} is not a supported inclusion")
    a0 = None if alpha0 is None else Fraction(alpha0)
    bs, ba = _build(ts, a0, sub), _build(ts, a0, ambient)
    if sub == ambient:
        return InclusionMap.identity(bs.medusa)
    runs: dict[tuple[int, ...], list[tuple[int, int, int]]] = {}
    fills: dict[tuple, int] = {}
    for cid, (cell, key) in enumerate(zip(ba.medusa.cells, ba.keys)):
        if key[0] == "run":
            runs.setdefault(cell.vertices, []).append((key[1], key[2], cid))
        else:
            fills[(key[1], key[2])] = cid
    out = []
    for cid, (cell, key) in enumerate(zip(bs.medusa.cells, bs.keys)):
        if key[0] == "run":
            hit = [c for lo, hi, c in runs.get(cell.vertices, ()) if lo <= key[1] and key[2] <= hi]
            if len(hit) != 1:
                raise UnmappableCell(cid, f"(vertices {cell.vertices}, frames {key[1]}..{key[2]})")
            out.append(hit[0])
        else:
            target = fills.get((key[1], key[2]))
            if target is None:
                raise UnmappableCell(cid, f"(filler on vertices {cell.vertices}, frames {key[1]}..{key[1] + 1})")
            out.append(target)
    return InclusionMap(bs.medusa, ba.medusa, tuple(out))
