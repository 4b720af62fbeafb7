from fractions import Fraction as F

from instances import FIXTURES
from medusa.builder import ALPHA, build_medusa
from medusa.complex import MULTI
from medusa.frames import read_frames
from medusa.persistence import HOR, ORD, REL, VER, Dot, PersistenceDiagram, extended_persistence
from medusa.render import RenderOptions, render_diagram
from medusa.summary import ARTIFACT, GAP, TUNNEL, VOID, hole_type, summarize


def dot(dim, sub, b, d):
    return Dot(dim, sub, F(b), F(d), 0, 0, 1, 2)


def diagram(*dots, ambient_dim=2):
    return PersistenceDiagram(tuple(dots), "test", ambient_dim=ambient_dim)


def test_hole_types_follow_table_one():
    assert hole_type(dot(1, VER, 1, 0), 3) == GAP
    assert hole_type(dot(0, ORD, 0, 1), 3) == GAP
    assert hole_type(dot(2, REL, 1, 0), 3) == TUNNEL
    assert hole_type(dot(2, HOR, 0, 1), 3) == VOID
    assert hole_type(dot(3, VER, 1, 0), 3) == VOID
    assert hole_type(dot(1, HOR, 0, 1), 2) == TUNNEL


def test_impossible_slots_are_artifacts():
    assert hole_type(dot(0, VER, 1, 0), 2) == ARTIFACT
    assert hole_type(dot(2, ORD, 0, 1), 2) == ARTIFACT
    assert hole_type(dot(3, ORD, 0, 1), 3) == ARTIFACT


def test_single_component_summary():
    table = summarize(diagram(dot(0, HOR, 0, 1)))
    assert (table.count(GAP, HOR), table.norm(GAP, HOR)) == (1, 1)
    assert table.count() == 1
    assert "gap,Hor,1,1.00" in table.to_csv().splitlines()


def test_empty_summary():
    table = summarize(diagram())
    assert table.count() == 0 and table.norm() == 0
    assert all(c == 0 for _, _, c, _ in table.rows())


def test_norm_is_exact_sum_of_persistence():
    table = summarize(diagram(dot(1, ORD, F(1, 5), F(1, 2)), dot(1, ORD, F(1, 10), F(2, 5))))
    assert table.count(TUNNEL, ORD) == 2
    assert table.norm(TUNNEL, ORD) == F(3, 5)
    assert "tunnel,Ord,2,0.60" in table.to_csv().splitlines()
    assert "sum,sum,2,0.60" in table.to_csv().splitlines()


def test_min_persistence_filter():
    table = summarize(diagram(dot(1, ORD, 0, F(1, 10)), dot(0, HOR, 0, 1)), min_persistence=F(1, 2))
    assert table.count() == 1


def test_empty_render_has_four_panels():
    svg = render_diagram(diagram())
    assert svg.count('class="panel"') == 4
    assert "<circle" not in svg.split("</g>")[-2]


def test_single_dot_lands_in_its_panel():
    svg = render_diagram(diagram(dot(0, VER, 1, 0)), RenderOptions(panel=100, margin=10))
    ver = svg.split('id="Ver"')[1].split("</g>")[0]
    # birth 1 -> right edge of the Ver panel (x0 = 10 + 2 * 110), death 0 -> bottom
    assert '<circle cx="330.00" cy="120.00"' in ver


def test_hexagon_plot_has_two_glyphs_in_the_horizontal_panel():
    m, _ = build_medusa(read_frames(FIXTURES / "hexagon.csv"), 3, ALPHA, MULTI)
    svg = render_diagram(extended_persistence(m))
    panels = {name: svg.split(f'id="{name}"')[1].split("</g>")[0] for name in (ORD, HOR, VER, REL)}
    glyphs = {k: v.count("<circle") + v.count("<rect x=") - 1 for k, v in panels.items()}
    assert glyphs == {ORD: 0, HOR: 2, VER: 0, REL: 0}


def test_render_is_deterministic():
    dg = diagram(dot(0, HOR, 0, 1), dot(1, REL, 1, F(1, 2)))
    assert render_diagram(dg) == render_diagram(diagram(*dg.dots))
