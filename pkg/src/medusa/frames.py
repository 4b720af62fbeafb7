"""The frames CSV: ``frame,time,point_id,color,x,y[,z]``, one row per sample."""
from __future__ import annotations

import csv
import io
from fractions import Fraction
from pathlib import Path

from .builder import TrajectorySet
from .errors import FramesFormatError, MedusaError
from .geometry.delaunay import QUANTUM_BITS

HEADER_2D = ["frame", "time", "point_id", "color", "x", "y"]
HEADER_3D = HEADER_2D + ["z"]


def _num(text: str, line: int, what: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise FramesFormatError(line, f"{what} {text!r} is not a number") from None


def _int(text: str, line: int, what: str) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise FramesFormatError(line, f"{what} {text!r} is not an integer") from None


def parse_frames(text: str) -> TrajectorySet:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise FramesFormatError(1, "empty file")
    header = [h.strip() for h in rows[0]]
    if header == HEADER_2D:
        dim = 2
    elif header == HEADER_3D:
        dim = 3
    else:
        raise FramesFormatError(1, f"header must be {','.join(HEADER_2D)}[,z], got {','.join(header)}")
    times: dict[int, Fraction] = {}
    points: dict[int, dict] = {}
    last_key = None
    width = len(header)
    for n, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != width:
            raise FramesFormatError(n, f"expected {width} fields, got {len(row)}")
        frame = _int(row[0], n, "frame")
        t = _num(row[1], n, "time")
        pid = _int(row[2], n, "point_id")
        color = _int(row[3], n, "color")
        xyz = tuple(_num(v, n, "coordinate") for v in row[4:])
        if color <= 0:
            raise FramesFormatError(n, f"color must be a positive integer, got {color}")
        key = (frame, pid)
        if key == last_key:
            raise FramesFormatError(n, f"duplicate row for frame {frame}, point {pid}")
        if last_key is not None and key < last_key:
            raise FramesFormatError(n, "rows must be sorted by frame, then point_id")
        last_key = key
        if frame in times:
            if times[frame] != t:
                raise FramesFormatError(n, f"frame {frame} has two different times")
        else:
            if times and t <= times[max(times)]:
                raise FramesFormatError(n, f"time of frame {frame} does not increase")
            if times and frame != max(times) + 1:
                raise FramesFormatError(n, f"frame {max(times) + 1} has no rows")
            times[frame] = t
        rec = points.get(pid)
        if rec is None:
            points[pid] = {"color": color, "first": frame, "last": frame, "pos": [xyz], "line": n}
            continue
        if rec["color"] != color:
            raise FramesFormatError(n, f"point {pid} changes color")
        if frame != rec["last"] + 1:
            raise FramesFormatError(n, f"point {pid} skips frames (support must be contiguous)")
        rec["last"] = frame
        rec["pos"].append(xyz)
    if not times:
        raise FramesFormatError(2, "no data rows")
    first = min(times)
    order = sorted(times)
    samples = {pid: (r["color"], r["first"] - first, r["pos"]) for pid, r in points.items()}
    try:
        return TrajectorySet.from_samples(dim, [times[f] for f in order], samples)
    except FramesFormatError:
        raise
    except MedusaError as exc:
        raise FramesFormatError(None, str(exc)) from None


def read_frames(path) -> TrajectorySet:
    return parse_frames(Path(path).read_text())


def _fmt_time(t: Fraction) -> str:
    return str(t.numerator) if t.denominator == 1 else repr(float(t))


def write_frames(ts: TrajectorySet) -> str:
    """CSV text; coordinates are exact (quanta are dyadic, so floats print losslessly)."""
    times = ts.raw_times if len(set(ts.raw_times)) == ts.frames else ts.frame_times
    scale = float(1 << QUANTUM_BITS)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER_3D if ts.dim == 3 else HEADER_2D)
    for i in range(ts.frames):
        for t in ts.trajectories:
            c = t.at(i)
            if c is not None:
                w.writerow([i, _fmt_time(times[i]), t.id, t.color, *(repr(v / scale) for v in c)])
    return buf.getvalue()
