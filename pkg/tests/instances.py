"""Seeded instance generators shared by the test modules."""
from __future__ import annotations

import random
from fractions import Fraction
from pathlib import Path

from medusa.builder import ALPHA, DELAUNAY, Target, TrajectorySet
from medusa.complex import MULTI, mono

FIXTURES = Path(__file__).parent / "fixtures"


def random_trajectories(seed: int, dim: int = 2, max_points: int = 10, max_frames: int = 6,
                        box: float = 6.0, step: float = 1.0) -> tuple[TrajectorySet, Fraction]:
    """Random walks with random supports and colors, plus a random alpha radius.

    One trajectory always spans every frame so that no frame is empty.
    """
    rng = random.Random(seed)
    n = rng.randint(1, max_points - 1)
    m = rng.randint(2, max_frames)
    samples = {}
    for k in range(n):
        a = rng.randrange(m)
        b = rng.randrange(a, m)
        if rng.random() < 0.5:
            a, b = 0, m - 1
        x = [rng.uniform(0, box) for _ in range(dim)]
        pos = []
        for _ in range(a, b + 1):
            pos.append(tuple(round(v, 3) for v in x))
            x = [v + rng.gauss(0, step) for v in x]
        samples[k] = (rng.choice([1, 2]), a, pos)
    samples[n] = (1, 0, [tuple(rng.uniform(0, box) for _ in range(dim))] * m)
    alpha0 = Fraction(rng.choice([8, 10, 12, 15, 20])) / 10
    return TrajectorySet.from_samples(dim, list(range(m)), samples), alpha0


def targets(ts: TrajectorySet) -> list[Target]:
    return [Target(ALPHA, MULTI), Target(DELAUNAY, MULTI)] + [Target(ALPHA, mono(c)) for c in ts.colors()]


def inclusion_pairs(ts: TrajectorySet) -> list[tuple[Target, Target]]:
    pairs = [(Target(ALPHA, mono(c)), Target(ALPHA, MULTI)) for c in ts.colors()]
    pairs += [(Target(ALPHA, mono(c)), Target(DELAUNAY, mono(c))) for c in ts.colors()]
    pairs.append((Target(ALPHA, MULTI), Target(DELAUNAY, MULTI)))
    return pairs


def kite_flip() -> TrajectorySet:
    """Four points whose Delaunay diagonal flips exactly once between two frames."""
    before = [(-2, 0), (0, -3), (2, 0), (0, 3)]
    after = [(-3, 0), (0, -2), (3, 0), (0, 2)]
    return TrajectorySet.from_samples(2, [0, 1], {k: (1, 0, [before[k], after[k]]) for k in range(4)})


def run_overlaps(medusa) -> list[tuple[int, ...]]:
    """Vertex sets whose prism runs overlap in time (a valid medusa has none)."""
    by_vertices: dict[tuple[int, ...], list] = {}
    for c in medusa.cells:
        if c.kind == "prism":
            by_vertices.setdefault(c.vertices, []).append((c.f_min, c.f_max))
    bad = []
    for v, ivs in by_vertices.items():
        ivs.sort()
        if any(a[1] >= b[0] for a, b in zip(ivs, ivs[1:])):
            bad.append(v)
    return bad


def generic_alpha(slice_, lo: float = 1.0, hi: float = 3.0) -> float:
    """An alpha radius in [lo, hi] as far as possible from every alpha value of the slice."""
    cuts = sorted({lo, hi} | {r for r in (slice_.rho(s) for s in slice_.simplices) if lo < r < hi})
    a, b = max(zip(cuts, cuts[1:]), key=lambda ab: ab[1] - ab[0])
    return (a + b) / 2
