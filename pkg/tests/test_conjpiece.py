import random

import pytest
from gmpy2 import mpq

from plqconj.conjpiece import (
    conj_envelope_piece,
    conj_linear,
    conj_quadratic_convex,
    conj_rational,
    edge_atom,
    face_atom,
    normal_cone,
    quadratic_atoms,
    rational_atoms,
    zeta_coefficients,
)
from plqconj.core import LinFn, QuadFn, RationalFn, discriminant, normalize_rational
from plqconj.envelope import envelope_piece, rational_piece, vertex_edge_piece
from plqconj.errors import DegenerateEdge, FractionalFormEncountered, InvariantError
from plqconj.plqmodel import PLQFunction
from plqconj.verify import OracleConfig, denominator_vertex_check, oracle_many, zeta_identity_fuzz

from conftest import HEXAGON, XY, poly

S124 = QuadFn(mpq(1, 28), mpq(1, 2), mpq(7, 4), mpq(2, 7), -2, mpq(4, 7))


def test_zeta_golden_from_vertex_edge_psi():
    r = vertex_edge_piece(XY, (-5, 5), (0, -4), (1, 3))
    assert zeta_coefficients(r.psi, 7, -4) == S124


def test_zeta_golden_from_normalized_psi():
    r = normalize_rational(RationalFn(QuadFn(35, 4, 5, 155, -5, -100), LinFn(7, -1, 40)))
    assert zeta_coefficients(r.psi, 7, -4) == S124


def test_zeta_matches_direct_edge_conjugate():
    r = rational_piece((-5, 5), 7, -4)
    _, (atom,) = rational_atoms(r, poly((-5, 5), (0, -4), (1, 3)), ((0, -4), (1, 3)))
    assert atom.fn == S124


def test_zeta_rejects_nonconstant_xi2():
    with pytest.raises(ValueError):
        zeta_coefficients((LinFn(1, 0, 0), LinFn(1, 1, 0), LinFn(0, 0, 0)), 1, 0)


def test_zeta_fuzz_and_denominator_check():
    ok, acc, rej = zeta_identity_fuzz(300, seed=7)
    assert ok and acc > 200
    assert denominator_vertex_check(150, seed=7)


def test_edge_atom_strip():
    # xy along (0,-4) -> (2,0) is 8t^2 - 8t
    assert XY.along((0, -4), (2, 4)) == (8, -8, 0)
    a = edge_atom((0, -4), (2, 0), 8, -8, 0)
    assert discriminant(a.fn) == 0

    def inside(s):
        return all(h(*s) <= 0 for h in a.inside)

    # tau = 2*s1 + 4*s2 + 8 must lie in [0, 16]
    assert inside((0, 0)) and inside((4, 0)) and inside((-4, 0))
    assert not inside((5, 0)) and not inside((-5, 0))
    assert sum(all(h(*s) <= 0 for h in c) for c in a.outside for s in [(5, 0)]) == 1
    with pytest.raises(DegenerateEdge):
        edge_atom((0, 0), (1, 0), 0, 1, 0)


def test_edge_atom_value_is_edge_supremum():
    g = XY
    a, b = (0, -4), (2, 0)
    k2, k1, k0 = g.along(a, (2, 4))
    atom = edge_atom(a, b, k2, k1, k0)
    rng = random.Random(0)
    for _ in range(50):
        s = (mpq(rng.randint(-40, 40), 4), mpq(rng.randint(-40, 40), 4))
        if all(h(*s) <= 0 for h in atom.inside):
            ts = [mpq(i, 400) for i in range(401)]
            best = max(s[0] * (a[0] + 2 * t) + s[1] * (a[1] + 4 * t) - g(a[0] + 2 * t, a[1] + 4 * t) for t in ts)
            assert best <= atom.fn(*s) <= best + mpq(1, 1000) * (1 + abs(s[0]) + abs(s[1])) ** 2


def test_normal_cone_of_square_vertex():
    P = poly((0, 0), (1, 0), (1, 1), (0, 1))
    cone = normal_cone(P, (1, 1))
    assert all(h(2, 3) <= 0 for h in cone)
    assert any(h(-1, 3) > 0 for h in cone)


def test_conj_linear_is_support_function():
    P = poly((0, 0), (2, 0), (0, 1))
    g = LinFn(1, -1, 3)
    F = conj_linear(g, P)
    assert F.piece_count == 3
    for s in [(5, 0), (0, 5), (-3, -3), (mpq(1, 2), mpq(7, 3))]:
        want = max(s[0] * v[0] + s[1] * v[1] - g(v) for v in P.vertices)
        assert F(s) == want


def test_face_atom_of_round_bowl():
    g = QuadFn(1, 0, 1)
    P = poly((-1, -1), (1, -1), (1, 1), (-1, 1))
    atom = face_atom(g, P)
    assert atom.fn == QuadFn(mpq(1, 4), 0, mpq(1, 4))
    assert len(atom.outside) == 4


def test_quadratic_atoms_counts():
    lin, part = quadratic_atoms(QuadFn(1, 0, 1), poly((0, 0), (1, 0), (0, 1)))
    assert len(lin) == 3 and len(part) == 4  # face plus three strictly convex edges
    lin, part = quadratic_atoms(QuadFn(1, 2, 1), poly((0, 0), (1, 0), (0, 1)))
    assert len(part) == 2  # edge along (1,-1) is flat; semidefinite face has no face atom


def test_restriction_must_be_quadratic():
    r = RationalFn(QuadFn(1, 0, 0, 0, 0, 1), LinFn(1, 1, 1))
    with pytest.raises(FractionalFormEncountered):
        rational_atoms(r, poly((0, 0), (1, 0), (0, 1)), ((0, 0), (1, 0)))


def test_psi_cross_check_catches_mismatch():
    r = rational_piece((-5, 5), 7, -4)
    bad = RationalFn(r.num, r.den, vertex=r.vertex, vertex_value=r.vertex_value)
    bad.psi = normalize_rational(rational_piece((-5, 5), 2, -4)).psi  # psi of another piece
    with pytest.raises(InvariantError):
        rational_atoms(bad, poly((-5, 5), (0, -4), (1, 3)), ((0, -4), (1, 3)))


@pytest.mark.parametrize(
    "g,verts",
    [
        (XY, HEXAGON),
        (QuadFn(1, 0, 1), [(-1, -1), (2, -1), (2, 1), (-1, 2)]),
        (QuadFn(2, -1, -1, 1, 0, 0), [(0, 0), (2, 0), (1, 2)]),
    ],
)
def test_piece_conjugates_against_oracle(g, verts):
    """Each envelope piece's conjugate matches brute force over that piece."""
    P = poly(*verts)
    E = envelope_piece(g, P)
    rng = random.Random(5)
    cfg = OracleConfig()
    for (fn, R), sup in zip(E.pieces, E.meta["support"]):
        F = conj_envelope_piece(fn, R, sup)
        assert F.stage == "piece_conjugate"
        if isinstance(fn, RationalFn):
            continue  # covered below against the vertex and edge directly
        S = [(mpq(rng.randint(-300, 300), 10), mpq(rng.randint(-300, 300), 10)) for _ in range(40)]
        vals = oracle_many(PLQFunction([(fn, R)]), S, cfg)
        for s, o in zip(S, vals):
            assert abs(float(F(s)) - o) <= 4 * float(cfg.h) * (1 + abs(float(s[0])) + abs(float(s[1])))


def test_conj_rational_piece_matches_edge_and_vertex():
    r = rational_piece((-5, 5), 2, -4)
    T = poly((-5, 5), (0, -4), (2, 0))
    F = conj_rational(r, T, ((0, -4), (2, 0)))
    # conj of conv(q + I_T) equals the max over the vertex and the convex edge
    rng = random.Random(2)
    for _ in range(60):
        s = (mpq(rng.randint(-200, 200), 10), mpq(rng.randint(-200, 200), 10))
        ts = [mpq(i, 200) for i in range(201)]
        edge = max(s[0] * (2 * t) + s[1] * (-4 + 4 * t) - (2 * t) * (-4 + 4 * t) for t in ts)
        vert = max(s[0] * v[0] + s[1] * v[1] - v[0] * v[1] for v in T.vertices)
        lo = max(edge, vert)
        assert lo <= F(s) <= lo + mpq(1, 100) * (1 + abs(s[0]) + abs(s[1])) ** 2


def test_conj_quadratic_convex_requires_convex():
    with pytest.raises(ValueError):
        conj_quadratic_convex(XY, poly((0, 0), (1, 0), (0, 1)))
