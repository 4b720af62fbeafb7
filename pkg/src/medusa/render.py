"""Four-panel SVG plots of persistence diagrams (one panel per subdiagram)."""
from __future__ import annotations

from dataclasses import dataclass
from xml.sax.saxutils import escape

from .persistence import SUBDIAGRAMS, PersistenceDiagram

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")
_TITLES = {"Ord": "ordinary", "Hor": "horizontal", "Ver": "vertical", "Rel": "relative"}


@dataclass(frozen=True)
class RenderOptions:
    panel: int = 220  # side of one plot square, px
    margin: int = 40
    radius: float = 4.0
    min_persistence: float = 0.0
    title: str | None = None
    show_instant: bool = False


def _glyph(dim: int, x: float, y: float, r: float) -> str:
    color = _COLORS[dim % len(_COLORS)]
    style = f'fill="{color}" fill-opacity="0.75" stroke="{color}"'
    if dim == 0:
        return f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{r:.2f}" {style}/>'
    if dim == 1:
        return f'<rect x="{x - r:.2f}" y="{y - r:.2f}" width="{2 * r:.2f}" height="{2 * r:.2f}" {style}/>'
    if dim == 2:
        pts = [(x, y - r * 1.2), (x - r * 1.1, y + r * 0.8), (x + r * 1.1, y + r * 0.8)]
    else:
        pts = [(x, y - r * 1.3), (x + r * 1.3, y), (x, y + r * 1.3), (x - r * 1.3, y)]
    return f'<polygon points="{" ".join(f"{a:.2f},{b:.2f}" for a, b in pts)}" {style}/>'


def render_diagram(diagram: PersistenceDiagram, options: RenderOptions | None = None) -> str:
    """SVG text; byte-identical for identical diagrams and options."""
    opt = options or RenderOptions()
    side, mg = opt.panel, opt.margin
    width = 4 * side + 5 * mg
    height = side + 2 * mg + 30
    title = opt.title if opt.title is not None else diagram.source
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{mg}" y="18" font-size="13">{escape(title)}</text>',
    ]
    dots = diagram.dots if opt.show_instant else diagram.visible()
    keep = [d for d in dots if float(d.persistence) >= opt.min_persistence]
    for k, sub in enumerate(SUBDIAGRAMS):
        x0 = mg + k * (side + mg)
        y0 = mg + 10
        out.append(f'<g class="panel" id="{sub}">')
        out.append(f'<rect x="{x0}" y="{y0}" width="{side}" height="{side}" fill="none" stroke="#444"/>')
        out.append(f'<line x1="{x0}" y1="{y0 + side}" x2="{x0 + side}" y2="{y0}" stroke="#bbb" stroke-dasharray="4 3"/>')
        out.append(f'<text x="{x0 + side / 2:.1f}" y="{y0 - 6}" text-anchor="middle">{_TITLES[sub]}</text>')
        for v in (0, 0.5, 1):
            tx = x0 + v * side
            ty = y0 + side - v * side
            out.append(f'<text x="{tx:.1f}" y="{y0 + side + 14}" text-anchor="middle">{v:g}</text>')
            out.append(f'<text x="{x0 - 4}" y="{ty + 4:.1f}" text-anchor="end">{v:g}</text>')
        out.append(f'<text x="{x0 + side / 2:.1f}" y="{y0 + side + 28}" text-anchor="middle">birth</text>')
        for d in (d for d in keep if d.subdiagram == sub):
            gx = x0 + float(d.birth) * side
            gy = y0 + side - float(d.death) * side
            out.append(_glyph(d.dim, gx, gy, opt.radius))
        out.append("</g>")
    lx = width - mg - 4 * 60
    for dim in range(4):
        out.append(_glyph(dim, lx + dim * 60, height - 12, 4))
        out.append(f'<text x="{lx + dim * 60 + 8}" y="{height - 8}">dim {dim}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
