"""Deterministic synthetic trajectory datasets.

Points start on a square or cubic grid and move by overdamped pairwise
adhesion plus seeded noise.  Like-colored pairs bind with color-specific
strengths (red-red strongest by default), which is enough to make mixed
populations sort over time.  All randomness comes from SplitMix64 so a
dataset is reproducible from its config alone, in any language.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from itertools import product
from typing import Mapping

import numpy as np

from .builder import TrajectorySet
from .errors import ConfigInvalid
from .geometry.delaunay import QUANTUM_BITS

MASK64 = (1 << 64) - 1
RED, BLUE = 1, 2
DYNAMICS = ("static", "random_walk", "segregation", "mono_control")
COLORINGS = ("fair_coin", "all_one", "split_existing")


class SplitMix64:
    """SplitMix64 (Steele, Lea, Flood); ``uniform`` uses the top 53 bits."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * 2.0 ** -53

    def symmetric(self, amplitude: float) -> float:
        return (2.0 * self.uniform() - 1.0) * amplitude

    def coin(self) -> bool:
        return self.next_u64() >> 63 == 1


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 0
    dimension: int = 2
    grid_side: int = 4
    frames: int = 10
    dynamics: str = "segregation"
    colors: str = "fair_coin"
    # bond strengths per color pair; keys are "a-b" with a <= b
    adhesion: Mapping[str, float] = field(default_factory=lambda: {"1-1": 1.0, "2-2": 0.45, "1-2": 0.15})
    noise: float = 0.6
    spacing: float = 4.0
    substeps: int = 10
    dt: float = 0.1

    def __post_init__(self):
        problems = []
        if self.dimension not in (2, 3):
            problems.append("dimension must be 2 or 3")
        if self.grid_side < 1:
            problems.append("grid_side must be at least 1")
        if self.frames < 2:
            problems.append("frames must be at least 2")
        if self.dynamics not in DYNAMICS:
            problems.append(f"dynamics must be one of {', '.join(DYNAMICS)}")
        if self.colors not in COLORINGS:
            problems.append(f"colors must be one of {', '.join(COLORINGS)}")
        if not all(np.isfinite(float(w)) for w in self.adhesion.values()):
            problems.append("adhesion weights must be finite")
        for name in ("noise", "spacing", "dt"):
            v = float(getattr(self, name))
            if not np.isfinite(v) or v < 0 or (name != "noise" and v == 0):
                problems.append(f"{name} must be a positive finite number")
        if self.substeps < 1:
            problems.append("substeps must be at least 1")
        if not 0 <= self.seed <= MASK64:
            problems.append("seed must fit in 64 bits")
        if problems:
            raise ConfigInvalid("; ".join(problems))

    @classmethod
    def from_dict(cls, data: Mapping) -> "SynthConfig":
        known = set(cls.__dataclass_fields__)
        extra = sorted(set(data) - known)
        if extra:
            raise ConfigInvalid(f"unknown synth settings: {', '.join(extra)}")
        try:
            return cls(**dict(data))
        except TypeError as exc:
            raise ConfigInvalid(str(exc)) from None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    def weight(self, a: int, b: int) -> float:
        a, b = min(a, b), max(a, b)
        return float(self.adhesion.get(f"{a}-{b}", 0.0))


def _quantize(x: np.ndarray) -> np.ndarray:
    return np.rint(x * (1 << QUANTUM_BITS)).astype(np.int64)


def _initial(cfg: SynthConfig) -> np.ndarray:
    side = cfg.grid_side
    return np.array(list(product(range(side), repeat=cfg.dimension)), dtype=float) * cfg.spacing


def _forces(pos: np.ndarray, weights: np.ndarray, rest: float, reach: float) -> np.ndarray:
    diff = pos[None, :, :] - pos[:, None, :]
    dist = np.sqrt((diff ** 2).sum(axis=2))
    np.fill_diagonal(dist, np.inf)
    unit = diff / dist[..., None]
    # springs toward the rest length; pulling only between bound (nearby) pairs
    stretch = dist - rest
    pull = np.where((stretch > 0) & (dist < reach), weights * stretch, 0.0)
    push = np.where(stretch < 0, 2.0 * stretch, 0.0)
    return ((pull + push)[..., None] * unit).sum(axis=1)


def _colors(cfg: SynthConfig, n: int, rng: SplitMix64) -> list[int]:
    if cfg.colors == "all_one":
        return [RED] * n
    return [RED if rng.coin() else BLUE for _ in range(n)]


def generate(cfg: SynthConfig) -> TrajectorySet:
    rng = SplitMix64(cfg.seed)
    pos = _initial(cfg)
    n, d = pos.shape
    colors = _colors(cfg, n, rng) if cfg.colors == "fair_coin" else [RED] * n
    if cfg.dynamics == "mono_control":
        weights = np.full((n, n), cfg.weight(BLUE, BLUE))
    else:
        weights = np.array([[cfg.weight(a, b) for b in colors] for a in colors])
    rest, reach = cfg.spacing, 1.75 * cfg.spacing
    frames = [_quantize(pos)]
    for _ in range(cfg.frames - 1):
        if cfg.dynamics != "static":
            for _ in range(cfg.substeps):
                noise = np.array([[rng.symmetric(cfg.noise) for _ in range(d)] for _ in range(n)])
                drift = _forces(pos, weights, rest, reach) if cfg.dynamics != "random_walk" else 0.0
                pos = pos + cfg.dt * drift + np.sqrt(cfg.dt) * noise
        frames.append(_separate(_quantize(pos), rng))
    samples = {k: (colors[k], 0, [tuple(int(v) for v in f[k]) for f in frames]) for k in range(n)}
    ts = _from_quanta(d, list(range(cfg.frames)), samples)
    if cfg.colors == "split_existing":
        ts = split_colors(ts, rng.next_u64())
    return ts


def _separate(q: np.ndarray, rng: SplitMix64) -> np.ndarray:
    """Nudge later points off positions already taken in this frame."""
    seen = set()
    out = q.copy()
    for k in range(len(out)):
        key = tuple(out[k])
        while key in seen:
            out[k] += np.array([1 + (rng.next_u64() & 7) for _ in range(out.shape[1])])
            key = tuple(out[k])
        seen.add(key)
    return out


def _from_quanta(d: int, times, samples) -> TrajectorySet:
    scale = float(1 << QUANTUM_BITS)
    real = {k: (c, s, [tuple(v / scale for v in p) for p in pos]) for k, (c, s, pos) in samples.items()}
    return TrajectorySet.from_samples(d, times, real)


def split_colors(ts: TrajectorySet, seed: int) -> TrajectorySet:
    """Recolor every trajectory 1 or 2 by a seeded fair coin, positions untouched."""
    rng = SplitMix64(seed)
    return ts.with_colors({t.id: RED if rng.coin() else BLUE for t in ts.trajectories})


def same_color_fraction(ts: TrajectorySet, frame: int, neighbors: int | None = None) -> float:
    """Mean fraction of each point's nearest neighbors that share its color."""
    pts = ts.frame_points(frame)
    if len(pts) < 2:
        return 1.0
    k = min(neighbors or 2 * ts.dim, len(pts) - 1)
    xy = np.array([p.coords for p in pts], dtype=float)
    col = np.array([p.color for p in pts])
    d2 = ((xy[:, None, :] - xy[None, :, :]) ** 2).sum(axis=2)
    np.fill_diagonal(d2, np.inf)
    nearest = np.argsort(d2, axis=1, kind="stable")[:, :k]
    return float((col[nearest] == col[:, None]).mean())
