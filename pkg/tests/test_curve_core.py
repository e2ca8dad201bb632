from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import apply_cell_map, hilbert2_cells, peano_cells, signed_permutations
from peano_lab.curve_core import (
    CellAddress,
    DyadicParam,
    cell_of,
    hilbert_cell_corner,
    hilbert_eval,
    hilbert_index,
    hilbert_point,
    iter_cells,
    peano_eval,
    peano_point,
    preimage_of_cell,
)
from peano_lab.errors import DepthOverflow, InvalidCell, UnsupportedDimension


@pytest.mark.parametrize("depth", [1, 2, 3, 4])
def test_hilbert2_matches_subdivision_oracle(depth):
    assert [c.corner() for c in iter_cells(2, depth)] == hilbert2_cells(depth)


@pytest.mark.parametrize("depth", [1, 2, 3])
def test_peano_matches_serpentine_oracle(depth):
    assert [c.corner() for c in iter_cells(2, depth, "peano")] == peano_cells(depth)


@pytest.mark.parametrize("dim", [2, 3])
def test_endpoints(dim):
    assert hilbert_eval(0, dim, 5).coords == (0,) * dim
    assert hilbert_eval(1, dim, 5).coords == (1,) + (0,) * (dim - 1)


def test_spot_values():
    assert hilbert_eval(Fraction(1, 4), 2, 1).coords == (0, Fraction(1, 2))
    assert cell_of(Fraction(3, 4), 2, 1).digits == (2,)
    assert peano_eval(1, 3).coords == (1, 1)
    assert peano_eval(0, 3).coords == (0, 0)


def _visit_order(dim, depth):
    return [hilbert_cell_corner(Fraction(i, 2 ** (dim * depth)), dim, depth) for i in range(2 ** (dim * depth))]


@pytest.mark.parametrize("dim,depth", [(2, 1), (2, 4), (3, 1), (3, 2), (3, 3)])
def test_bijection_and_adjacency(dim, depth):
    cells = _visit_order(dim, depth)
    assert len(set(cells)) == 2 ** (dim * depth)
    for a, b in zip(cells, cells[1:]):
        assert sum(abs(x - y) for x, y in zip(a, b)) == 1
    for i, c in enumerate(cells):
        assert hilbert_index(c, depth) == i


@pytest.mark.parametrize("dim,depth", [(2, 4), (3, 2)])
def test_continuity_at_cell_boundaries(dim, depth):
    n = 2 ** (dim * depth)
    for i in range(1, n):
        t = Fraction(i, n)
        assert hilbert_point(t, dim, depth, "left") == hilbert_point(t, dim, depth)


def test_peano_continuity():
    for i in range(1, 81):
        t = Fraction(i, 81)
        assert peano_point(t, 2, "left") == peano_point(t, 2)


@pytest.mark.parametrize("depth", [2, 3])
def test_hilbert3_self_similar(depth):
    """Each octant's sub-curve is a signed axis permutation of the coarser curve."""
    coarse = _visit_order(3, depth - 1)
    fine = _visit_order(3, depth)
    m = 2 ** (depth - 1)
    block = len(coarse)
    for octant in range(8):
        part = fine[octant * block:(octant + 1) * block]
        origin = tuple((c // m) * m for c in part[0])
        local = [tuple(x - o for x, o in zip(c, origin)) for c in part]
        assert any(
            [apply_cell_map(p, s, c, m) for c in coarse] == local
            for p, s in signed_permutations(3)
        )


def test_deeper_evaluation_is_stable():
    # depth-d value at a level-d parameter is the exact limit
    for i in range(17):
        t = Fraction(i, 16)
        assert hilbert_eval(t, 2, 2) == hilbert_eval(t, 2, 12)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 4 ** 6 - 1))
def test_cell_of_contains_image_of_its_interval(i):
    t = Fraction(i, 4 ** 6)
    cell = cell_of(t, 2, 6)
    lo, hi = preimage_of_cell(cell)
    assert lo == t and hi == t + Fraction(1, 4 ** 6)
    assert cell.contains(hilbert_point(lo, 2, 6).coords)
    assert cell.contains(hilbert_point(hi, 2, 6, "left").coords)
    mid = lo + (hi - lo) / 3
    assert cell.contains(hilbert_point(mid, 2, 20).coords)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 9 ** 3 - 1))
def test_peano_preimage_roundtrip(i):
    cell = cell_of(Fraction(i, 9 ** 3), 2, 3, "peano")
    assert preimage_of_cell(cell)[0] == Fraction(i, 9 ** 3)


def test_dyadic_param_canonical():
    assert DyadicParam(4, 2) == DyadicParam(1, 1)
    assert DyadicParam(4, 2).depth == 1
    assert DyadicParam.from_value("3/16").numerator == 3
    with pytest.raises(ValueError):
        DyadicParam(17, 2)


def test_errors():
    with pytest.raises(UnsupportedDimension):
        hilbert_eval(Fraction(1, 2), 4, 3)
    with pytest.raises(DepthOverflow):
        hilbert_eval(Fraction(1, 2), 2, 40)
    with pytest.raises(InvalidCell):
        CellAddress((9,), 2, "hilbert")
    with pytest.raises(InvalidCell):
        preimage_of_cell((0, 1))


def test_cell_address_roundtrip():
    cell = CellAddress.from_corner((5, 2), 3)
    assert cell.corner() == (5, 2)
    assert cell.bounds() == [(Fraction(5, 8), Fraction(6, 8)), (Fraction(2, 8), Fraction(3, 8))]
