from dataclasses import replace
from fractions import Fraction as F

import pytest

from medusa.complex import (MULTI, Cell, Medusa, Scope, dumps, euler_characteristic_at, from_simplices,
                            is_face_closed, loads, mono, sublevel_cells, superlevel_cells, validate)


def two_vertices_and_edge():
    return from_simplices({(0,): (0, 1), (1,): (0, 1), (0, 1): (0, 1)})


def hexagon_cycle():
    simplices = {(k,): (0, 1) for k in range(6)}
    simplices.update({tuple(sorted((k, (k + 1) % 6))): (0, 1) for k in range(6)})
    return from_simplices(simplices)


def test_scope_parsing():
    assert Scope.parse("multi") == MULTI
    assert Scope.parse("mono1") == mono(1) == Scope.parse("mono:1")
    assert str(mono(2)) == "mono2"
    with pytest.raises(ValueError):
        Scope.parse("poly")


def test_valid_fixture_passes():
    assert validate(two_vertices_and_edge()).ok


def test_euler_characteristic_of_a_cycle_is_zero():
    assert euler_characteristic_at(hexagon_cycle(), F(1, 2)) == 0


def test_sublevel_and_superlevel_sets():
    m = from_simplices({(0,): (0, F(1, 2)), (1,): (F(1, 2), 1), (0, 1): (F(1, 2), F(1, 2))})
    assert validate(m).ok
    assert len(sublevel_cells(m, 0)) == 1
    assert len(sublevel_cells(m, F(1, 2))) == 3
    assert len(superlevel_cells(m, 1)) == 1
    assert is_face_closed(m, sublevel_cells(m, F(1, 2)))


def test_monotonicity_violation_is_reported():
    m = two_vertices_and_edge()
    cells = list(m.cells)
    cells[2] = replace(cells[2], f_min=F(0), f_max=F(1))
    cells[0] = replace(cells[0], f_min=F(1, 2))
    bad = replace(m, cells=tuple(cells), time_grid=(F(0), F(1, 2), F(1)))
    assert "monotonicity" in validate(bad).kinds()


def test_boundary_of_boundary_violation_is_reported():
    m = from_simplices({(0,): (0, 1), (1,): (0, 1), (2,): (0, 1), (0, 1): (0, 1), (0, 2): (0, 1),
                        (1, 2): (0, 1), (0, 1, 2): (0, 1)})
    cells = list(m.cells)
    tri = cells[-1]
    cells[-1] = replace(tri, boundary=tri.boundary[:2])
    assert "boundary" in validate(replace(m, cells=tuple(cells))).kinds()


def test_other_violations():
    m = two_vertices_and_edge()
    c = list(m.cells)
    assert "off-grid" in validate(replace(m, cells=(replace(c[0], f_max=F(1, 3)),) + tuple(c[1:]))).kinds()
    assert "dangling" in validate(replace(m, cells=tuple(c[:2]) + (replace(c[2], boundary=(0, 7)),))).kinds()
    assert "duplicate" in validate(replace(m, cells=tuple(c) + (c[0],))).kinds()
    assert "grid" in validate(replace(m, time_grid=(F(0), F(1, 2)))).kinds()


def test_text_round_trip():
    m = hexagon_cycle()
    assert loads(dumps(m)) == m


def test_loading_garbage_raises():
    with pytest.raises(ValueError):
        loads("# medusa v1\nnot a cell line\n")
    with pytest.raises(ValueError):
        loads("hello")
