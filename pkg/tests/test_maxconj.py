import random

import pytest
from gmpy2 import mpq

from plqconj.conjpiece import edge_atom
from plqconj.core import LinFn, QuadFn, discriminant
from plqconj.errors import BothNonlinear
from plqconj.geometry import ParabolicInequality, ParabolicRegion
from plqconj.maxconj import (
    IntersectionCell,
    conjugate_plq,
    fold_partials,
    max_of_linears,
    max_on_region,
    max_piecewise,
    merge_equal_adjacent,
    pair_intersections,
)
from plqconj.plqmodel import PiecewiseFn, PLQFunction

from conftest import DATA, XY, conjugate, instance, poly

# the hexagon's conjugate, as seven canonical functions
HEXAGON_CONJ = {
    LinFn(-5, -4, -20),
    LinFn(-5, 5, 25),
    LinFn(1, 3, -3),
    LinFn(2, 1, -2),
    LinFn(2, 0, 0),
    QuadFn(mpq(1, 8), mpq(1, 2), mpq(1, 2), 1, -2, 2),
    LinFn(0, -4, 0),
}


def _keys(fns):
    return {f.key() for f in fns}


def _rand_s(rng, n, lo=-30, hi=30):
    return [(mpq(rng.randint(lo * 100, hi * 100), 100), mpq(rng.randint(lo * 100, hi * 100), 100)) for _ in range(n)]


def test_max_of_linears_is_pointwise_max():
    lins = [LinFn(1, 0, 0), LinFn(-1, 0, 0), LinFn(0, 1, -1), LinFn(0, 0, -10), LinFn(1, 0, 0)]
    cells = max_of_linears(lins)
    assert len(cells) == 3  # duplicate merged, dominated constant dropped
    F = PiecewiseFn(cells)
    rng = random.Random(0)
    for s in _rand_s(rng, 100):
        assert F(s) == max(L(*s) for L in lins)


def test_max_on_region_linear_vs_linear_splits():
    R = ParabolicRegion()
    out = max_on_region(IntersectionCell(R, LinFn(1, 0, 0), LinFn(0, 0, 0)))
    assert len(out) == 2
    assert {f.key() for f, _ in out} == {LinFn(1, 0, 0).key(), LinFn(0, 0, 0).key()}


def test_max_on_region_dominated_keeps_one():
    R = ParabolicRegion([ParabolicInequality.from_fn(LinFn(-1, 0, 1))])  # s1 >= 1
    out = max_on_region(IntersectionCell(R, LinFn(1, 0, 0), LinFn(0, 0, 0)))
    assert len(out) == 1 and out[0][0] == LinFn(1, 0, 0)


def test_max_on_region_parabolic_switch():
    R = ParabolicRegion()
    f1 = QuadFn(1, 0, 0)
    out = max_on_region(IntersectionCell(R, f1, LinFn(0, 1, 0)))
    assert len(out) == 2
    for _, C in out:
        for h in C.inequalities:
            a, b, c = h.coeffs[:3]
            assert b * b == 4 * a * c


def test_max_on_region_non_parabolic_raises():
    # s1^2 vs s2^2 + s2 switches on a hyperbola
    with pytest.raises(BothNonlinear):
        max_on_region(IntersectionCell(ParabolicRegion(), QuadFn(1, 0, 0), QuadFn(0, 0, 1, 0, 1, 0)))


def test_max_on_region_two_lines():
    # s1^2 vs s2^2 switches along the two lines s1 = +-s2
    f1 = QuadFn(1, 0, 0)
    h = QuadFn(1, 0, -1)  # (s1 - s2)(s1 + s2)
    assert discriminant(h) != 0
    out = max_on_region(IntersectionCell(ParabolicRegion(), f1, f1 - h))
    assert len(out) == 4
    rng = random.Random(1)
    F = PiecewiseFn(merge_equal_adjacent(out))
    for s in _rand_s(rng, 50):
        assert F(s) == max(f1(*s), (f1 - h)(*s))


def test_pair_intersections_and_max_piecewise():
    A = max_of_linears([LinFn(1, 0, 0), LinFn(-1, 0, 0)])
    B = max_of_linears([LinFn(0, 1, 0), LinFn(0, -1, 0)])
    assert len(pair_intersections(A, B)) == 4
    M = PiecewiseFn(max_piecewise(A, B))
    rng = random.Random(2)
    for s in _rand_s(rng, 80):
        assert M(s) == max(abs(s[0]), abs(s[1]))


def test_fold_partial_edge_atom():
    cells = max_of_linears([LinFn(0, -4, 0), LinFn(2, 0, 0)])  # vertices (0,-4), (2,0) of xy
    atom = edge_atom((0, -4), (2, 0), 8, -8, 0)
    F = PiecewiseFn(fold_partials(cells, [atom]))
    rng = random.Random(3)
    for s in _rand_s(rng, 60, -10, 10):
        t = min(max((2 * s[0] + 4 * s[1] + 8) / 16, 0), 1)
        want = s[0] * 2 * t + s[1] * (-4 + 4 * t) - (2 * t) * (-4 + 4 * t)
        assert F(s) == want


def test_hexagon_golden():
    F = conjugate("hexagon_one_piece")
    assert F.function_keys() == _keys(HEXAGON_CONJ)
    assert F.piece_count == 7
    assert F.meta["domain_vertices"] == 6 and F.meta["domain_convex_edges"] == 1


@pytest.mark.parametrize("name", ["hexagon_two_pieces", "hexagon_alt_split"])
def test_subdivision_invariance(name):
    F, G = conjugate("hexagon_one_piece"), conjugate(name)
    assert F.function_keys() == G.function_keys()
    rng = random.Random(4)
    for s in _rand_s(rng, 150):
        assert F(s) == G(s)


def test_quad_subdivision_invariance():
    F, G = conjugate("quad_one_piece"), conjugate("quad_two_pieces")
    assert F.function_keys() == G.function_keys()
    rng = random.Random(5)
    for s in _rand_s(rng, 150):
        assert F(s) == G(s)


def test_piece_count_can_be_below_cell_count():
    F = conjugate("hexagon_one_piece")
    assert len(F) >= F.piece_count


def test_fallback_note_for_edge_edge_piece():
    F = conjugate("hexagon_two_pieces")
    assert any("piece 1" in n for n in F.meta["notes"])


def test_two_convex_edges_alone_outside_class():
    f = PLQFunction([(XY, poly((0, -4), (2, 0), (2, 1), (1, 3)))])
    with pytest.raises(BothNonlinear):
        conjugate_plq(f)


def test_timings_recorded_per_piece():
    F = conjugate("hexagon_two_pieces")
    rows = F.meta["timings"]
    assert [r["piece"] for r in rows] == [0, 1]
    assert all(r[k] >= 0 for r in rows for k in ("step1", "step2", "step3a"))
    assert F.meta["step3b"] >= 0


def test_every_conjugate_piece_has_zero_discriminant():
    for name in ("hexagon_one_piece", "indefinite_triangle", "semidefinite", "concave_cap"):
        for fn in conjugate(name).functions():
            assert discriminant(fn) == 0


def test_linear_pieces_only_for_concave():
    F = conjugate("concave_cap")
    assert all(isinstance(fn, LinFn) for fn in F.functions())
    assert F.piece_count == len(instance("concave_cap").vertices)


def test_circle_switch_next_to_strictly_convex_piece_is_reported():
    # the switching curve between the bowl's face conjugate and a vertex of the
    # neighbouring piece is a circle; it must be detected, not silently dropped
    from plqconj import plqmodel

    f = plqmodel.load(DATA / "unsupported" / "strictly_convex_next_to_indefinite.json")
    with pytest.raises(BothNonlinear):
        conjugate_plq(f)
