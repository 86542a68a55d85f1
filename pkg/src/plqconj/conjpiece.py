"""Conjugates of single envelope pieces.

A piece's conjugate is the maximum of a few *atoms*, one per entity that can
carry the supremum:

* vertex ``w``: the affine function ``s.w - g(w)`` on the whole plane;
* strictly convex edge ``[a, b]``: ``sup_t s.(a + t d) - g(a + t d)``
  restricted to the strip where the maximiser ``t*(s)`` lies in ``[0, 1]``;
  outside the strip the atom is ``-inf`` (an endpoint atom takes over);
* face of a strictly convex quadratic: its unconstrained conjugate on
  ``grad g(P)``, ``-inf`` elsewhere.

A partial atom is stored as its finite region plus a list of disjoint cells
covering the rest of the plane.
"""
from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

from .core import LinFn, QuadFn, RationalFn, as_quad, classify_form, discriminant, normalize_rational, q
from .errors import DegenerateEdge, FractionalFormEncountered, InvariantError, NotStrictlyConvexFace
from .geometry import ParabolicInequality, ParabolicRegion, Polytope
from .plqmodel import PiecewiseFn

S1 = LinFn(1, 0, 0)
S2 = LinFn(0, 1, 0)


@dataclass(frozen=True)
class PartialAtom:
    fn: QuadFn
    inside: tuple  # ParabolicInequality conjunction where fn is finite
    outside: tuple  # tuple of conjunctions covering the complement
    source: tuple  # ("edge", a, b) | ("face", vertices)

    def key(self):
        return (self.fn.key(), frozenset(h.key() for h in self.inside))


def vertex_atom(w, value) -> LinFn:
    return LinFn(w[0], w[1], -q(value))


def _complement_cells(ineqs):
    """Disjoint conjunctions whose union is the closure of the complement."""
    cells = []
    for i, h in enumerate(ineqs):
        cells.append(tuple(ineqs[:i]) + (h.negated(),))
    return tuple(cells)


def edge_atom(a, b, k2, k1, k0) -> PartialAtom:
    """Atom of ``[a, b]`` for a restriction ``k0 + k1*t + k2*t^2``, ``k2 > 0``."""
    a = (q(a[0]), q(a[1]))
    b = (q(b[0]), q(b[1]))
    k2, k1, k0 = q(k2), q(k1), q(k0)
    if k2 <= 0:
        raise DegenerateEdge("edge atom needs a strictly convex restriction")
    d = (b[0] - a[0], b[1] - a[1])
    tau = LinFn(d[0], d[1], -k1)  # t*(s) = tau/(2 k2)
    fn = vertex_atom(a, k0) + (tau * tau) / (4 * k2)
    lo = ParabolicInequality.from_fn(-tau)
    hi = ParabolicInequality.from_fn(tau - 2 * k2)
    inside = (lo, hi)
    outside = (
        (ParabolicInequality.from_fn(tau),),
        (ParabolicInequality.from_fn(2 * k2 - tau),),
    )
    if discriminant(fn) != 0:
        raise InvariantError("edge atom with nonzero discriminant")
    return PartialAtom(fn, inside, outside, ("edge", a, b))


def _compose(g: QuadFn, X: LinFn, Y: LinFn) -> QuadFn:
    """g(X(s), Y(s)) for affine X, Y."""
    return as_quad(
        (X * X) * g.qxx + (X * Y) * g.qxy + (Y * Y) * g.qyy + X * g.qx + Y * g.qy + g.q0
    )


def _inverse_gradient(g: QuadFn):
    """Affine x(s) with grad g(x(s)) = s."""
    a, b, c = 2 * g.qxx, g.qxy, 2 * g.qyy
    det = a * c - b * b
    if det == 0:
        raise NotStrictlyConvexFace("gradient map is singular")
    # [a b; b c] x = s - (qx, qy)
    X = LinFn(c / det, -b / det, -(c * g.qx - b * g.qy) / det)
    Y = LinFn(-b / det, a / det, -(-b * g.qx + a * g.qy) / det)
    return X, Y


def face_atom(g, P: Polytope) -> PartialAtom:
    g = as_quad(g)
    X, Y = _inverse_gradient(g)
    fn = as_quad(S1 * X + S2 * Y) - _compose(g, X, Y)
    inside = tuple(ParabolicInequality.from_fn(h.cx * X + h.cy * Y + h.c0) for h in P.halfplanes)
    return PartialAtom(fn, inside, _complement_cells(inside), ("face", P.vertices))


def normal_cone(P: Polytope, v, shift=(0, 0)):
    """Inequalities of ``shift + N_P(v)``."""
    c = (q(shift[0]), q(shift[1]))
    vs = P.vertices
    if len(vs) == 1:
        return ()
    i = vs.index(v)
    nbrs = [vs[1 - i]] if len(vs) == 2 else [vs[i - 1], vs[(i + 1) % len(vs)]]
    return tuple(
        ParabolicInequality.from_fn(LinFn(u[0] - v[0], u[1] - v[1], -(c[0] * (u[0] - v[0]) + c[1] * (u[1] - v[1]))))
        for u in nbrs
    )


def conj_linear(g, P: Polytope) -> PiecewiseFn:
    """Conjugate of an affine function plus the indicator of P: one affine
    piece per vertex, on the shifted normal cone of P there."""
    g = as_quad(g).linear_part() if not isinstance(g, LinFn) else g
    c = g.grad()
    pieces = []
    for v in P.vertices:
        R = ParabolicRegion(normal_cone(P, v, c))
        pieces.append((vertex_atom(v, g(v)), R))
    return PiecewiseFn(pieces, kind="parabolic", stage="piece_conjugate", meta={"sources": list(P.vertices)})


# ---------------------------------------------------------------------------
# atoms of envelope pieces


def quadratic_atoms(g, P: Polytope):
    """(vertex atoms, partial atoms) for a convex quadratic over P."""
    g = as_quad(g)
    lin = [vertex_atom(v, g(v)) for v in P.vertices]
    partial = []
    if P.dim == 2 and classify_form(g) == "convex" and 4 * g.qxx * g.qyy - g.qxy * g.qxy > 0:
        partial.append(face_atom(g, P))
    for a, b in P.edges():
        k2, k1, k0 = g.along(a, (b[0] - a[0], b[1] - a[1]))
        if k2 > 0:
            partial.append(edge_atom(a, b, k2, k1, k0))
    return lin, partial


def _restrict_rational(r: RationalFn, a, b):
    """Coefficients (k2, k1, k0) of ``t -> r(a + t(b - a))``; raises unless
    the restriction is a polynomial of degree <= 2."""
    pts = [mpq(0), mpq(1, 2), mpq(1)]
    vals = [r(a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])) for t in pts]
    k0 = vals[0]
    k2 = 2 * (vals[2] - 2 * vals[1] + vals[0])
    k1 = vals[2] - vals[0] - k2
    for t in (mpq(1, 3), mpq(3, 4), mpq(2)):
        x = (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))
        if r.den(*x) == 0 or r(*x) != k0 + k1 * t + k2 * t * t:
            raise FractionalFormEncountered("edge restriction is not quadratic in the edge parameter")
    return k2, k1, k0


def rational_atoms(r: RationalFn, P: Polytope, edge):
    a, b = ((q(p[0]), q(p[1])) for p in edge)
    lin = [vertex_atom(w, r(w)) for w in P.vertices]
    k2, k1, k0 = _restrict_rational(r, a, b)
    if k2 <= 0:
        raise DegenerateEdge("rational piece on an edge that is not strictly convex")
    atom = edge_atom(a, b, k2, k1, k0)
    if a[0] != b[0]:
        m = (b[1] - a[1]) / (b[0] - a[0])
        qe = a[1] - m * a[0]
        rr = r if r.psi is not None else normalize_rational(r)
        try:
            zeta = zeta_coefficients(rr.psi, m, qe)
        except ValueError as exc:
            raise InvariantError(f"psi-form does not fit its convex edge: {exc}") from exc
        if zeta.key() != atom.fn.key():
            raise InvariantError("edge conjugate disagrees with its psi-form coefficients")
    return lin, [atom]


def piece_atoms(fn, region: Polytope, support):
    if isinstance(fn, RationalFn):
        return rational_atoms(fn, region, support[2])
    g = as_quad(fn)
    if g.is_linear():
        return [vertex_atom(v, g(v)) for v in region.vertices], []
    return quadratic_atoms(g, region)


def _fold(lin, partial, stage="piece_conjugate"):
    from .maxconj import cells_to_piecewise, fold_partials, max_of_linears

    cells = max_of_linears(lin)
    cells = fold_partials(cells, partial)
    return cells_to_piecewise(cells, stage=stage)


def conj_quadratic_convex(g, P: Polytope) -> PiecewiseFn:
    g = as_quad(g)
    if classify_form(g) not in ("convex", "affine"):
        raise ValueError("conj_quadratic_convex needs a convex quadratic")
    if g.is_linear():
        return conj_linear(g, P)
    return _fold(*quadratic_atoms(g, P))


def conj_rational(r: RationalFn, P: Polytope, convex_edge) -> PiecewiseFn:
    return _fold(*rational_atoms(r, P, convex_edge))


def conj_envelope_piece(fn, region: Polytope, support) -> PiecewiseFn:
    if isinstance(fn, RationalFn):
        return conj_rational(fn, region, support[2])
    if as_quad(fn).is_linear():
        return conj_linear(fn, region)
    return conj_quadratic_convex(fn, region)


# ---------------------------------------------------------------------------


def zeta_coefficients(psi, m, q_e) -> QuadFn:
    """Unconstrained conjugate along the edge ``y = m x + q_e`` of
    ``xi1^2/xi2 + xi0``, as a quadratic in ``s``.

    ``psi = (xi1, xi2, xi0)``; ``xi2`` must be constant on the edge.
    """
    xi1, xi2, xi0 = psi
    m, q_e = q(m), q(q_e)
    p11, p12, p13 = xi1.coeffs
    p21, p22, p23 = xi2.coeffs
    p01, p02, p03 = xi0.coeffs
    if p21 + m * p22 != 0:
        raise ValueError("xi2 is not constant along the edge")
    K = p11 + m * p12
    w = p23 + q_e * p22  # value of xi2 on the edge
    if K == 0 or w == 0:
        raise DegenerateEdge("edge restriction is degenerate")
    t0 = -(p01 + m * p02) / (2 * K)
    t1 = 1 / (2 * K)
    t2 = m / (2 * K)
    g10 = t1 * w / K
    g01 = t2 * w / K
    g00 = (t0 * w - p13 - q_e * p12) / K
    C = p13 + p11 * g00 + p12 * (q_e + m * g00)
    a, b = K * g10, K * g01
    z11 = -a * a / w + g10
    z12 = -2 * a * b / w + g01 + m * g10
    z22 = -b * b / w + m * g01
    z10 = -2 * a * C / w + g00 - m * p02 * g10 - p01 * g10
    z01 = -2 * b * C / w + m * g00 + q_e - (p01 + m * p02) * g01
    z00 = -C * C / w - p03 - p01 * g00 - p02 * (m * g00 + q_e)
    out = QuadFn(z11, z12, z22, z10, z01, z00)
    if discriminant(out) != 0:
        raise InvariantError("zeta coefficients with nonzero discriminant")
    return out
