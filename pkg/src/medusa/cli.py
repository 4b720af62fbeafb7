"""Command line: ``medusa analyze | synth | oracle``.

Exit codes: 0 success, 1 malformed input or settings, 2 verification
failure, 3 unsupported inclusion.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import complex as cx
from .builder import ALPHA, DELAUNAY, Target, TrajectorySet, build_inclusion, build_medusa, is_supported, prepare
from .complex import MULTI, mono
from .errors import ConfigInvalid, IncompatibleInclusion, InvalidMedusa, MedusaError, TooLarge
from .frames import read_frames, write_frames
from .geometry.alpha import restrict_scope
from .oracle import (
    MAX_CELLS,
    diagram_from_ranks,
    raster_compare,
    rank_table_extended,
    rank_table_image,
    simplicial_betti,
)
from .persistence import PersistenceDiagram, diagram_csv, extended_persistence, image_persistence
from .render import RenderOptions, render_diagram
from .summary import hole_type, summarize
from .synth import SynthConfig, generate

OUTPUT_ENV = "MEDUSA_OUTPUT_DIR"
DEFAULT_OUTPUT = "medusa_out"
EXIT_OK, EXIT_INPUT, EXIT_VERIFY, EXIT_INCLUSION = 0, 1, 2, 3


@dataclass
class AnalysisConfig:
    alpha0: Fraction = Fraction(4)
    complexes: list[Target] | None = None  # None: the default set for the data's colors
    inclusions: list[tuple[Target, Target]] | None = None
    min_persistence: Fraction = Fraction(0)
    output_dir: str = DEFAULT_OUTPUT
    oracle_check: bool = False
    max_oracle_cells: int = MAX_CELLS
    extra: dict = field(default_factory=dict)

    def resolve(self, ts: TrajectorySet) -> tuple[list[Target], list[tuple[Target, Target]]]:
        colors = ts.colors()
        targets = self.complexes
        if targets is None:
            targets = [Target(ALPHA, MULTI)] + [Target(ALPHA, mono(c)) for c in colors] + \
                      [Target(DELAUNAY, mono(c)) for c in colors]
        incs = self.inclusions
        if incs is None:
            incs = []
            for c in colors:
                incs.append((Target(ALPHA, mono(c)), Target(DELAUNAY, mono(c))))
                incs.append((Target(ALPHA, mono(c)), Target(ALPHA, MULTI)))
        for t in targets:
            if not t.scope.is_multi and t.scope.color not in colors:
                raise ConfigInvalid(f"{t}: color {t.scope.color} does not occur in the input")
        for sub, amb in incs:
            if not is_supported(sub, amb):
                raise IncompatibleInclusion(f"{sub} ⊆ {amb} is not a supported inclusion")
            for t in (sub, amb):
                if not t.scope.is_multi and t.scope.color not in colors:
                    raise ConfigInvalid(f"{t}: color {t.scope.color} does not occur in the input")
        seen = []
        for t in list(targets) + [t for pair in incs for t in pair]:
            if t not in seen:
                seen.append(t)
        return seen, list(incs)


def parse_inclusion(text: str) -> tuple[Target, Target]:
    for sep in ("<=", "⊆", ","):
        if sep in text:
            a, b = text.split(sep, 1)
            return Target.parse(a), Target.parse(b)
    raise ValueError(f"inclusion {text!r} should look like alpha:mono1<=alpha:multi")


def _fraction(text) -> Fraction:
    try:
        v = Fraction(str(text))
    except (ValueError, ZeroDivisionError):
        raise ConfigInvalid(f"{text!r} is not a number") from None
    return v


def load_json(path: str | None) -> dict:
    if not path:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigInvalid(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigInvalid("config must be a JSON object")
    return data


_ANALYSIS_KEYS = {"alpha0", "complexes", "inclusions", "min_persistence", "output_dir", "oracle_check",
                  "max_oracle_cells"}


def analysis_config(args, data: dict) -> AnalysisConfig:
    unknown = sorted(set(data) - _ANALYSIS_KEYS)
    if unknown:
        raise ConfigInvalid(f"unknown settings: {', '.join(unknown)}")
    cfg = AnalysisConfig()
    merged = dict(data)
    for key in _ANALYSIS_KEYS:
        v = getattr(args, key, None)
        if v is not None and v != []:
            merged[key] = v
    try:
        if "alpha0" in merged:
            cfg.alpha0 = _fraction(merged["alpha0"])
        if cfg.alpha0 <= 0:
            raise ConfigInvalid("alpha0 must be positive")
        if "complexes" in merged:
            cfg.complexes = [Target.parse(t) for t in merged["complexes"]]
        if "inclusions" in merged:
            cfg.inclusions = [parse_inclusion(t) for t in merged["inclusions"]]
    except ValueError as exc:
        raise ConfigInvalid(str(exc)) from None
    if "min_persistence" in merged:
        cfg.min_persistence = _fraction(merged["min_persistence"])
    cfg.oracle_check = bool(merged.get("oracle_check", False))
    cfg.max_oracle_cells = int(merged.get("max_oracle_cells", MAX_CELLS))
    # explicit flag, then environment, then config file
    cfg.output_dir = getattr(args, "output_dir", None) or os.environ.get(OUTPUT_ENV) or \
        data.get("output_dir") or DEFAULT_OUTPUT
    return cfg


# -- analysis ------------------------------------------------------------------

def _dot_record(d, ambient_dim: int) -> dict:
    return {
        "dim": d.dim, "subdiagram": d.subdiagram,
        "birth": str(d.birth), "death": str(d.death), "persistence": str(d.persistence),
        "hole_type": hole_type(d, ambient_dim), "creator": d.creator, "destroyer": d.destroyer,
    }


def _diff(engine: PersistenceDiagram, oracle: PersistenceDiagram) -> list[str]:
    a, b = engine.multiset(), oracle.multiset()
    out = []
    for key in sorted(set(a) | set(b), key=lambda k: (k[0], k[1], k[2], k[3])):
        if a.get(key, 0) != b.get(key, 0):
            dim, sub, birth, death = key
            out.append(f"dim {dim} {sub} ({birth}, {death}): engine {a.get(key, 0)} oracle {b.get(key, 0)}")
    return out


def _safe(name: str) -> str:
    return name.replace(" ", "-")


class Bundle:
    """Files of one analysis, kept in memory until written."""

    def __init__(self):
        self.files: dict[str, str] = {}

    def add(self, name: str, text: str) -> None:
        self.files[name] = text

    def write(self, out: Path, meta: dict) -> None:
        out.mkdir(parents=True, exist_ok=True)
        for name, text in sorted(self.files.items()):
            (out / name).write_text(text)
        manifest = dict(meta)
        manifest["files"] = {n: hashlib.sha256(t.encode()).hexdigest() for n, t in sorted(self.files.items())}
        (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def run_analysis(ts: TrajectorySet, cfg: AnalysisConfig) -> tuple[Bundle, dict, list[str]]:
    targets, incs = cfg.resolve(ts)
    bundle = Bundle()
    report: dict = {"alpha0": str(cfg.alpha0), "targets": {}, "inclusions": {}}
    diagnostics: dict = {}
    failures: list[str] = []
    opts = RenderOptions(min_persistence=float(cfg.min_persistence))
    for tgt in targets:
        name = str(tgt)
        med, diag = build_medusa(ts, cfg.alpha0, tgt.kind, tgt.scope)
        dg = extended_persistence(med)
        table = summarize(_shown(dg), ts.dim, cfg.min_persistence)
        bundle.add(f"{name}.diagram.csv", diagram_csv(_shown(dg), min_persistence=cfg.min_persistence))
        bundle.add(f"{name}.summary.csv", table.to_csv())
        bundle.add(f"{name}.svg", render_diagram(dg, opts))
        bundle.add(f"{name}.medusa", cx.dumps(med))
        diagnostics[name] = diag.to_dict()
        entry = {"cells": len(med), "dots": [_dot_record(d, ts.dim) for d in _shown(dg).dots],
                 "instant_dots": len(dg.dots) - len(dg.visible()), "summary": table.to_dict()}
        if cfg.oracle_check:
            entry["oracle"] = _check(lambda: diagram_from_ranks(rank_table_extended(med, cfg.max_oracle_cells)),
                                     dg, name, failures)
        report["targets"][name] = entry
    for sub, amb in incs:
        name = f"image-{sub}-in-{amb}"
        inc = build_inclusion(sub, amb, ts, cfg.alpha0)
        dg = image_persistence(inc)
        table = summarize(_shown(dg), ts.dim, cfg.min_persistence)
        bundle.add(f"{name}.diagram.csv", diagram_csv(_shown(dg), min_persistence=cfg.min_persistence))
        bundle.add(f"{name}.summary.csv", table.to_csv())
        bundle.add(f"{name}.svg", render_diagram(dg, opts))
        entry = {"sub": str(sub), "ambient": str(amb),
                 "dots": [_dot_record(d, ts.dim) for d in _shown(dg).dots], "summary": table.to_dict()}
        if cfg.oracle_check:
            entry["oracle"] = _check(lambda: diagram_from_ranks(rank_table_image(inc, cfg.max_oracle_cells)),
                                     dg, name, failures)
        report["inclusions"][name] = entry
    bundle.add("diagnostics.json", json.dumps(diagnostics, indent=2, sort_keys=True) + "\n")
    report["input"] = _input_meta(ts)
    bundle.add("report.json", json.dumps(report, indent=2, sort_keys=True) + "\n")
    return bundle, report, failures


def _shown(dg: PersistenceDiagram) -> PersistenceDiagram:
    """Dots spanning more than one filtration position; the rest only witness the pairing."""
    return PersistenceDiagram(tuple(dg.visible()), dg.source, dg.flavor, dg.ambient_dim, dg.grid, dg.columns)


def _check(compute, dg, name, failures) -> dict:
    try:
        oracle = compute()
    except TooLarge as exc:
        return {"status": "skipped", "reason": str(exc)}
    diff = _diff(dg, oracle)
    if diff:
        failures.append(f"{name}: " + "; ".join(diff))
    return {"status": "agree" if not diff else "disagree", "diff": diff}


def _input_meta(ts: TrajectorySet) -> dict:
    raw = ts.raw_times
    return {
        "dimension": ts.dim, "frames": ts.frames, "trajectories": len(ts.trajectories),
        "colors": ts.colors(),
        "time_map": {"origin": str(raw[0]), "span": str(raw[-1] - raw[0]) if raw[-1] != raw[0] else "0",
                     "rule": "t_normalized = (t - origin) / span"},
    }


# -- verbs -----------------------------------------------------------------------

def cmd_analyze(args) -> int:
    cfg = analysis_config(args, load_json(args.config))
    ts = read_frames(args.frames)
    bundle, report, failures = run_analysis(ts, cfg)
    meta = {"alpha0": str(cfg.alpha0), "time_map": report["input"]["time_map"],
            "input_sha256": hashlib.sha256(Path(args.frames).read_bytes()).hexdigest()}
    out = Path(cfg.output_dir)
    bundle.write(out, meta)
    for name, entry in report["targets"].items():
        print(f"{name}: {entry['cells']} cells, {len(entry['dots'])} dots")
    for name, entry in report["inclusions"].items():
        print(f"{name}: {len(entry['dots'])} dots")
    print(f"wrote {len(bundle.files) + 1} files to {out}")
    if failures:
        for f in failures:
            print(f"oracle mismatch: {f}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


_SYNTH_FLAGS = ("seed", "dimension", "grid_side", "frames", "dynamics", "colors", "noise", "spacing", "substeps")


def cmd_synth(args) -> int:
    data = load_json(args.config)
    for key in _SYNTH_FLAGS:
        v = getattr(args, key, None)
        if v is not None:
            data[key] = v
    cfg = SynthConfig.from_dict(data)
    text = write_frames(generate(cfg))
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text)
        print(f"wrote {text.count(chr(10)) - 1} rows to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def raster_rows(ts: TrajectorySet, alpha0) -> list[dict]:
    """Per frame and scope: alpha-subcomplex Betti numbers against the raster."""
    st = prepare(ts, Fraction(alpha0))
    rows = []
    for i in range(ts.frames):
        pts = ts.frame_points(i)
        for scope in [MULTI] + [mono(c) for c in ts.colors()]:
            sl = restrict_scope(st.slices[i], scope)
            want = simplicial_betti(sl.alpha_simplices(), 1)
            ok, seen, res = raster_compare(pts, scope, alpha0, want)
            rows.append({"frame": i, "scope": str(scope), "alpha": want, "raster": tuple(seen),
                         "resolution": res, "agree": ok})
    return rows


def cmd_oracle(args) -> int:
    cfg = analysis_config(args, load_json(args.config))
    ts = read_frames(args.frames)
    problems = 0
    if args.medusa:
        text = Path(args.medusa).read_text()
        try:
            loaded = cx.loads(text)
        except ValueError as exc:
            print(f"{args.medusa}: unreadable medusa: {exc}")
            return EXIT_VERIFY
        tgt = Target(loaded.complex_kind, loaded.color_scope)
        a0 = loaded.alpha0 if loaded.alpha0 is not None else cfg.alpha0
        report = cx.validate(loaded)
        if report:
            print(f"{args.medusa}: invalid medusa")
            for v in report.violations:
                print(f"  {v}")
            return EXIT_VERIFY
        rebuilt, _ = build_medusa(ts, a0, tgt.kind, tgt.scope)
        diff = _diff(extended_persistence(loaded), diagram_from_ranks(rank_table_extended(rebuilt, cfg.max_oracle_cells)))
        print(f"{tgt} from {args.medusa}: {'empty diff' if not diff else f'{len(diff)} differences'}")
        for line in diff:
            print(f"  {line}")
        return EXIT_VERIFY if diff else EXIT_OK
    targets, incs = cfg.resolve(ts)
    for tgt in targets:
        med, _ = build_medusa(ts, cfg.alpha0, tgt.kind, tgt.scope)
        try:
            diff = _diff(extended_persistence(med), diagram_from_ranks(rank_table_extended(med, cfg.max_oracle_cells)))
        except TooLarge as exc:
            print(f"{tgt}: skipped ({exc})")
            continue
        problems += bool(diff)
        print(f"{tgt}: {'empty diff' if not diff else f'{len(diff)} differences'}")
        for line in diff:
            print(f"  {line}")
    for sub, amb in incs:
        inc = build_inclusion(sub, amb, ts, cfg.alpha0)
        try:
            diff = _diff(image_persistence(inc), diagram_from_ranks(rank_table_image(inc, cfg.max_oracle_cells)))
        except TooLarge as exc:
            print(f"image {sub} in {amb}: skipped ({exc})")
            continue
        problems += bool(diff)
        print(f"image {sub} in {amb}: {'empty diff' if not diff else f'{len(diff)} differences'}")
        for line in diff:
            print(f"  {line}")
    if ts.dim == 2:
        print("alpha complex vs rasterized union of restricted Voronoi cells")
        print(f"{'frame':>5} {'scope':>8} {'alpha b0,b1':>12} {'raster b0,b1':>13} {'res':>5}")
        for row in raster_rows(ts, cfg.alpha0):
            problems += not row["agree"]
            a, r = row["alpha"], row["raster"]
            print(f"{row['frame']:>5} {row['scope']:>8} {a[0]:>6},{a[1]:<5} {r[0]:>7},{r[1]:<5} {row['resolution']:>5}"
                  + ("" if row["agree"] else "  MISMATCH"))
    return EXIT_VERIFY if problems else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="medusa", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="verb", required=True)

    def analysis_flags(q):
        q.add_argument("frames", help="frames CSV (frame,time,point_id,color,x,y[,z])")
        q.add_argument("--alpha0", help="alpha radius in input units (default 4.0)")
        q.add_argument("--complex", dest="complexes", action="append", default=[],
                       help="target such as alpha:multi, alpha:mono1, delaunay:mono2 (repeatable)")
        q.add_argument("--inclusion", dest="inclusions", action="append", default=[],
                       help="image target SUB<=AMBIENT, e.g. alpha:mono1<=alpha:multi (repeatable)")
        q.add_argument("--max-oracle-cells", dest="max_oracle_cells", type=int)
        q.add_argument("--config", help="JSON file with the same settings")

    a = sub.add_parser("analyze", help="build medusas and write diagrams, summaries and plots")
    analysis_flags(a)
    a.add_argument("--min-persistence", dest="min_persistence", help="hide dots below this persistence")
    a.add_argument("--out", dest="output_dir", help=f"output directory (env {OUTPUT_ENV}, default {DEFAULT_OUTPUT})")
    a.add_argument("--oracle-check", dest="oracle_check", action="store_const", const=True,
                   help="cross-check every diagram against the brute-force oracle")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("synth", help="generate a synthetic frames file")
    s.add_argument("--seed", type=int)
    s.add_argument("--dimension", type=int)
    s.add_argument("--grid-side", dest="grid_side", type=int)
    s.add_argument("--frames", type=int)
    s.add_argument("--dynamics")
    s.add_argument("--colors")
    s.add_argument("--noise", type=float)
    s.add_argument("--spacing", type=float)
    s.add_argument("--substeps", type=int)
    s.add_argument("--config", help="JSON file with synth settings")
    s.add_argument("--out", help="output CSV (default: stdout)")
    s.set_defaults(func=cmd_synth)

    o = sub.add_parser("oracle", help="compare the engine with the brute-force oracle")
    analysis_flags(o)
    o.add_argument("--medusa", help="check a serialized medusa against the rebuilt one")
    o.set_defaults(func=cmd_oracle, output_dir=None, min_persistence=None, oracle_check=None)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except IncompatibleInclusion as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCLUSION
    except InvalidMedusa as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (MedusaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
