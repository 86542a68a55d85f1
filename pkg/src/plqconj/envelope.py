"""Convex envelope of a quadratic over a convex polygon.

The envelope of an indefinite or concave quadratic over a polygon P is
generated by the vertices of P together with its convex edges (edges along
which q restricts to a strictly convex parabola).  Away from the convex edges
it is the lower hull of the lifted vertices; next to a convex edge ``[a, b]``
it is supported by a vertex ``v`` and the edge, which gives a quadratic over
affine piece on the triangle ``(v, a, b)``.

The implementation enumerates apex choices for the convex edges, assembles
the candidate function and accepts the first candidate that is convex across
every interior edge.  A convex candidate that agrees with q on the
generating set and is built from convex combinations of values of q there is
the envelope, so the check is a certificate rather than a heuristic.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

from gmpy2 import mpq

from .core import LinFn, QuadFn, RationalFn, as_quad, classify_form, q
from .errors import DegenerateDenominator, EnvelopeAssemblyFailure, UnsupportedField
from .geometry import Polytope, convex_intersection, cross, hull_and_orient
from .plqmodel import PiecewiseFn


@dataclass(frozen=True)
class EnvelopePiece:
    fn: object
    region: Polytope
    support: tuple  # ("whole",) | ("facet", verts) | ("vertex_edge", v, (a, b))


def _plane(p1, p2, p3, z1, z2, z3):
    det = cross(p1, p2, p3)
    # z = alpha*x + beta*y + gamma through the three lifted points
    alpha = ((z2 - z1) * (p3[1] - p1[1]) - (z3 - z1) * (p2[1] - p1[1])) / det
    beta = ((p2[0] - p1[0]) * (z3 - z1) - (p3[0] - p1[0]) * (z2 - z1)) / det
    return LinFn(alpha, beta, z1 - alpha * p1[0] - beta * p1[1])


def lower_hull_pieces(points, values):
    """Facets of the lower convex hull of ``(p, value)`` as (LinFn, Polytope).

    Coplanar facets are merged into one polygon.
    """
    pts = [(q(x), q(y)) for x, y in points]
    vals = [q(z) for z in values]
    planes = {}
    for i, j, k in combinations(range(len(pts)), 3):
        if cross(pts[i], pts[j], pts[k]) == 0:
            continue
        L = _plane(pts[i], pts[j], pts[k], vals[i], vals[j], vals[k])
        if L.key() in planes:
            continue
        if all(L(p) <= z for p, z in zip(pts, vals)):
            planes[L.key()] = L
    out = []
    for L in planes.values():
        on = [p for p, z in zip(pts, vals) if L(p) == z]
        out.append((L, hull_and_orient(on)))
    return out


def envelope_concave(g, P: Polytope) -> PiecewiseFn:
    """Lower hull of the lifted vertices (also correct for any q without convex edges)."""
    g = as_quad(g)
    pieces = [
        EnvelopePiece(L, R, ("facet", R.vertices))
        for L, R in lower_hull_pieces(P.vertices, [g(v) for v in P.vertices])
    ]
    return _wrap(pieces)


def rational_piece(v, m, q_e, scale=1) -> RationalFn:
    """Envelope of ``scale*x*y`` on the triangle spanned by ``v`` and a piece of
    the line ``y = m*x + q_e``, written as quadratic over affine.

    The denominator vanishes only at ``v``; it is made positive on the side of
    the line, and the function is extended there by continuity.
    """
    x1, y1 = q(v[0]), q(v[1])
    m, q_e, scale = q(m), q(q_e), q(scale)
    side = q_e + m * x1 - y1
    if side == 0:
        raise DegenerateDenominator("the vertex lies on the edge's line")
    num = QuadFn(-m * y1, q_e, x1, -q_e * y1 + m * x1 * y1, -q_e * x1 - x1 * y1, q_e * x1 * y1)
    den = LinFn(-m, 1, m * x1 - y1)
    if side < 0:
        num, den = -num, -den
    return RationalFn(num * scale, den, vertex=(x1, y1), vertex_value=scale * x1 * y1).canonical()


def _affine_coords(v, a, b):
    """Affine mu, sigma with x = v + mu*(a - v) + sigma*(b - a)."""
    e = (a[0] - v[0], a[1] - v[1])
    d = (b[0] - a[0], b[1] - a[1])
    det = e[0] * d[1] - e[1] * d[0]
    if det == 0:
        raise DegenerateDenominator("the vertex lies on the edge's line")
    # Cramer on [e d] (mu, sigma)^T = x - v
    mu = LinFn(d[1] / det, -d[0] / det, -(d[1] * v[0] - d[0] * v[1]) / det)
    sigma = LinFn(-e[1] / det, e[0] / det, (e[1] * v[0] - e[0] * v[1]) / det)
    return mu, sigma


def vertex_edge_piece(g, v, a, b) -> RationalFn:
    """Envelope of ``g`` on conv{v, a, b} supported by vertex ``v`` and the
    strictly convex edge ``[a, b]``, with its psi-form attached."""
    g = as_quad(g)
    v, a, b = ((q(p[0]), q(p[1])) for p in (v, a, b))
    d = (b[0] - a[0], b[1] - a[1])
    kappa = g.quad_form(*d)
    if kappa <= 0:
        raise ValueError("edge is not strictly convex for this quadratic")
    mu, sigma = _affine_coords(v, a, b)
    ga = g.grad(a)
    slope = ga[0] * d[0] + ga[1] * d[1]
    xi0 = (1 - mu) * g(v) + mu * g(a) + sigma * slope
    xi2 = mu / kappa
    num = mu * xi0 + (sigma * sigma) * kappa
    r = RationalFn(num, mu, psi=(sigma, xi2, xi0), vertex=v, vertex_value=g(v))
    return r.canonical()


# ---------------------------------------------------------------------------


def convex_edges(g, P: Polytope):
    g = as_quad(g)
    return [(a, b) for a, b in P.edges() if g.quad_form(b[0] - a[0], b[1] - a[1]) > 0]


def _split(cycle, chord):
    i, j = sorted((cycle.index(chord[0]), cycle.index(chord[1])))
    return cycle[i : j + 1], cycle[j:] + cycle[: i + 1]


def split_polygon(P: Polytope, chords):
    """Cut P along non-crossing diagonals (vertex pairs)."""
    polys = [list(P.vertices)]
    for c in chords:
        for k, cyc in enumerate(polys):
            if c[0] in cyc and c[1] in cyc:
                n = len(cyc)
                i, j = cyc.index(c[0]), cyc.index(c[1])
                if (i - j) % n in (1, n - 1):
                    break  # already an edge of this part
                A, B = _split(cyc, c)
                polys[k : k + 1] = [A, B]
                break
    return [Polytope(c) for c in polys]


def _grad(fn, p):
    return fn.grad(p)


def _is_convex_assembly(pieces):
    """Convexity across every edge shared by two pieces (exact)."""
    for A, B in combinations(pieces, 2):
        X = convex_intersection(A.region, B.region)
        if X is None or X.dim != 1:
            continue
        p0, p1 = X.vertices
        mid = ((p0[0] + p1[0]) / 2, (p0[1] + p1[1]) / 2)
        if A.fn(mid) != B.fn(mid):
            return False
        # outward normal of A along the shared edge
        c = A.region.centroid()
        n = (p1[1] - p0[1], -(p1[0] - p0[0]))
        if n[0] * (c[0] - mid[0]) + n[1] * (c[1] - mid[1]) > 0:
            n = (-n[0], -n[1])
        ga, gb = _grad(A.fn, mid), _grad(B.fn, mid)
        if (gb[0] - ga[0]) * n[0] + (gb[1] - ga[1]) * n[1] < 0:
            return False
    return True


def _assemble(g, P, edges, apexes):
    tris = []
    for (a, b), v in zip(edges, apexes):
        T = Polytope([v, a, b]) if cross(v, a, b) > 0 else Polytope([v, b, a])
        tris.append((T, v, (a, b)))
    for (T1, _, _), (T2, _, _) in combinations(tris, 2):
        X = convex_intersection(T1, T2)
        if X is not None and X.dim == 2:
            return None
    chords = []
    for T, v, (a, b) in tris:
        chords += [(v, a), (v, b)]
    parts = split_polygon(P, chords)
    tri_sets = {frozenset(T.vertices): (T, v, e) for T, v, e in tris}
    pieces = []
    for part in parts:
        hit = tri_sets.get(frozenset(part.vertices))
        if hit is not None:
            T, v, (a, b) = hit
            pieces.append(EnvelopePiece(vertex_edge_piece(g, v, a, b), T, ("vertex_edge", v, (a, b))))
        else:
            for L, R in lower_hull_pieces(part.vertices, [g(p) for p in part.vertices]):
                pieces.append(EnvelopePiece(L, R, ("facet", R.vertices)))
    if len(pieces) < len(tris):
        return None
    return pieces if _is_convex_assembly(pieces) else None


def envelope_indefinite(g, P: Polytope) -> PiecewiseFn:
    g = as_quad(g)
    edges = convex_edges(g, P)
    if not edges:
        return envelope_concave(g, P)
    options = [[w for w in P.vertices if w not in e] for e in edges]
    for apexes in product(*options):
        pieces = _assemble(g, P, edges, apexes)
        if pieces is not None:
            return _wrap(pieces)
    raise EnvelopeAssemblyFailure(
        "no vertex/convex-edge assembly is convex; the envelope needs a piece type outside the supported class"
    )


def envelope_piece(g, P: Polytope) -> PiecewiseFn:
    """Convex envelope of ``g + indicator(P)`` as a polyhedral piecewise function."""
    if any(not isinstance(c, type(mpq(0))) for c in as_quad(g).coeffs):
        raise UnsupportedField("envelope needs rational coefficients")
    g = as_quad(g)
    kind = classify_form(g)
    if kind in ("convex", "affine"):
        return _wrap([EnvelopePiece(g.simplify(), P, ("whole",))])
    if kind == "concave":
        return envelope_concave(g, P)
    return envelope_indefinite(g, P)


def _wrap(pieces) -> PiecewiseFn:
    return PiecewiseFn(
        [(p.fn, p.region) for p in pieces],
        kind="polyhedral",
        stage="envelope",
        meta={"support": [p.support for p in pieces]},
    )
