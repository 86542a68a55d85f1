"""Pointwise maximum of piecewise conjugates and the full pipeline.

Cells are ``(fn, region)`` pairs where ``fn`` is a LinFn/QuadFn, or None for
``-inf`` (the outside of a partial atom).
"""
from __future__ import annotations

import logging
import time
from collections import defaultdict
from dataclasses import dataclass
from itertools import product

from gmpy2 import mpq

from ._cad import find_interior_point
from .conjpiece import PartialAtom, piece_atoms, quadratic_atoms
from .core import LinFn, QuadFn, as_quad, discriminant, simplify
from .envelope import convex_edges, envelope_piece
from .errors import BothNonlinear, EnvelopeAssemblyFailure
from .geometry import (
    ParabolicInequality,
    ParabolicRegion,
    conjoin,
    hull_and_orient,
    interior_point,
    intersect_regions,
    merge_complementary,
    prune_redundant,
)
from .plqmodel import PiecewiseFn, PLQFunction, fn_key

log = logging.getLogger(__name__)


@dataclass
class IntersectionCell:
    region: ParabolicRegion
    f1: object
    f2: object


def _key(fn):
    return None if fn is None else fn_key(fn)


def _diff(f1, f2):
    return simplify(as_quad(f1) - as_quad(f2))


def _probe(R: ParabolicRegion, h):
    """Witness of R ∧ {h < 0}, or None."""
    hq = as_quad(h)
    if hq.is_zero():
        return None
    hints = [R.witness] if R.witness is not None else []
    return find_interior_point([g.coeffs for g in R.inequalities] + [hq.coeffs], hints)


def _side(R, h, w):
    """R ∧ {h <= 0} with a known interior witness."""
    return ParabolicRegion(R.inequalities + (ParabolicInequality.from_fn(h),), witness=w)


def max_on_region(cell: IntersectionCell):
    """One or two cells carrying max(f1, f2) on the cell's region."""
    R, f1, f2 = cell.region, cell.f1, cell.f2
    if f1 is None:
        return [(f2, R)]
    if f2 is None or _key(f1) == _key(f2):
        return [(f1, R)]
    h = _diff(f1, f2)
    if isinstance(h, LinFn) and h.is_constant():
        return [(f1, R)] if h.c0 >= 0 else [(f2, R)]
    w2 = _probe(R, h)  # f2 strictly larger somewhere
    if w2 is None:
        return [(f1, R)]
    w1 = _probe(R, -h)
    if w1 is None:
        return [(f2, R)]
    if discriminant(h) != 0:
        return _split_by_factors(R, f1, f2, h)
    return [(f1, _side(R, -h, w1)), (f2, _side(R, h, w2))]


def _split_by_factors(R, f1, f2, h):
    """Split R by the sign of h when h factors over Q into parabolic factors
    (e.g. two lines); otherwise the switching curve is not parabolic."""
    lead, factors = _rational_factors(h)
    odd = [g for g, mult in factors if mult % 2]
    if not odd or any(discriminant(g) != 0 for g in odd):
        raise BothNonlinear(
            f"maximum of {f1.pretty(('s1', 's2'))} and {f2.pretty(('s1', 's2'))} "
            "switches along a non-parabolic curve"
        )
    out = []
    for signs in product((1, -1), repeat=len(odd)):
        extra = [ParabolicInequality.from_fn(g * (-sg)) for g, sg in zip(odd, signs)]  # sg*g >= 0
        C = conjoin(R, extra)
        if C is None:
            continue
        positive = (lead > 0) == (signs.count(-1) % 2 == 0)
        out.append((f1 if positive else f2, C))
    return out


def _rational_factors(h):
    import sympy

    x, y = sympy.symbols("x y")
    hq = as_quad(h)
    cs = [sympy.Rational(int(c.numerator), int(c.denominator)) for c in hq.coeffs]
    expr = cs[0] * x**2 + cs[1] * x * y + cs[2] * y**2 + cs[3] * x + cs[4] * y + cs[5]
    lead, facs = sympy.factor_list(expr, x, y)
    out = []
    for fac, mult in facs:
        P = sympy.Poly(fac, x, y)
        co = [P.coeff_monomial(mon) for mon in (x**2, x * y, y**2, x, y, 1)]
        out.append((QuadFn(*(mpq(int(c.p), int(c.q)) for c in co)), mult))
    return mpq(int(sympy.Rational(lead).p), int(sympy.Rational(lead).q)), out


def pair_intersections(A, B):
    """All nonempty-interior intersections of a cell of A with a cell of B."""
    out = []
    for fa, Ra in _cells(A):
        for fb, Rb in _cells(B):
            R = intersect_regions(Ra, Rb)
            if R is not None:
                out.append(IntersectionCell(R, fa, fb))
    return out


def _cells(F):
    return F.pieces if isinstance(F, PiecewiseFn) else F


def merge_equal_adjacent(cells):
    """Merge cells with identical functions whose regions differ in one
    complementary inequality, until nothing changes."""
    groups = defaultdict(list)
    order = []
    for fn, R in _cells(cells):
        k = _key(fn)
        if k not in groups:
            order.append(k)
        groups[k].append((fn, R))
    out = []
    for k in order:
        items = groups[k]
        fn = items[0][0]
        regions = []
        seen = set()
        for _, R in items:
            R = prune_redundant(R)
            ks = R.key_set()
            if ks not in seen:
                seen.add(ks)
                regions.append(R)
        changed = True
        while changed and len(regions) > 1:
            changed = False
            for i in range(len(regions)):
                for j in range(i + 1, len(regions)):
                    M = merge_complementary(regions[i], regions[j])
                    if M is not None:
                        M = prune_redundant(M)
                        regions = [r for t, r in enumerate(regions) if t not in (i, j)] + [M]
                        changed = True
                        break
                if changed:
                    break
        out.extend((fn, R) for R in regions)
    return out


def max_piecewise(A, B):
    cells = []
    for cell in pair_intersections(A, B):
        cells.extend(max_on_region(cell))
    return merge_equal_adjacent(cells)


def max_of_linears(lins):
    """Cells of the maximum of finitely many affine functions."""
    uniq = {}
    for L in lins:
        uniq.setdefault(L.key(), L)
    lins = list(uniq.values())
    if len(lins) == 1:
        return [(lins[0], ParabolicRegion(witness=(0, 0)))]
    cells = []
    for L in lins:
        ineqs = []
        for M in lins:
            if M is L:
                continue
            h = M - L
            if h.is_constant():
                if h.c0 > 0:
                    break
                continue
            ineqs.append(ParabolicInequality.from_fn(h))
        else:
            R = ParabolicRegion(ineqs)
            if interior_point(R) is not None:
                cells.append((L, prune_redundant(R)))
    return cells


def _fold_one(cells, atom: PartialAtom):
    inside = atom.inside
    out = []
    for f, R in cells:
        T = conjoin(R, inside)
        if T is None:
            out.append((f, R))
            continue
        if f is not None and _probe(T, _diff(f, atom.fn)) is None:
            # the atom never exceeds f on T
            out.append((f, R))
            continue
        for C in atom.outside:
            U = conjoin(R, C)
            if U is not None:
                out.append((f, U))
        out.extend(max_on_region(IntersectionCell(T, f, atom.fn)))
    return merge_equal_adjacent(out)


def fold_partials(cells, atoms):
    """Fold partial atoms into a cell list.  An atom whose comparison would
    need a non-parabolic split is retried after the others."""
    queue = []
    seen = set()
    for a in sorted(atoms, key=lambda a: a.source[0] != "face"):
        if a.key() not in seen:
            seen.add(a.key())
            queue.append(a)
    while queue:
        deferred = []
        err = None
        for a in queue:
            try:
                cells = _fold_one(cells, a)
            except BothNonlinear as exc:
                deferred.append(a)
                err = exc
        if len(deferred) == len(queue):
            raise err
        queue = deferred
    return cells


def cells_to_piecewise(cells, stage="max_conjugate", meta=None) -> PiecewiseFn:
    if any(fn is None for fn, _ in cells):
        raise AssertionError("unbounded-below cell left in a conjugate")
    return PiecewiseFn([(simplify(fn), R) for fn, R in cells], kind="parabolic", stage=stage, meta=meta or {})


# ---------------------------------------------------------------------------
# pipeline


def _domain_report(f: PLQFunction):
    """(vertices, convex edges) of the overall domain when it is one convex
    polygon carrying one quadratic, else None."""
    gs = {g.key() for g, _ in f.pieces}
    H = hull_and_orient([v for _, P in f.pieces for v in P.vertices])
    if len(gs) != 1 or H.area2() != sum((P.area2() for _, P in f.pieces), 0 * H.area2()):
        return None
    g = f.pieces[0][0]
    return len(H.vertices), len(convex_edges(g, H))


def conjugate_plq(f: PLQFunction) -> PiecewiseFn:
    """Conjugate of a PLQ function as a piecewise function on a parabolic subdivision."""
    rows = []
    lin_per_piece = []
    partials = []
    notes = []
    for i, (g, P) in enumerate(f.pieces):
        t0 = time.perf_counter()
        try:
            E = envelope_piece(g, P)
            env_pieces = list(zip(E.pieces, E.meta["support"]))
        except EnvelopeAssemblyFailure as exc:
            env_pieces = None
            notes.append(f"piece {i}: {exc}; conjugated from its vertices and convex edges")
        t1 = time.perf_counter()
        lin, part = [], []
        if env_pieces is None:
            lin, part = quadratic_atoms(g, P)
        else:
            for (fn, R), sup in env_pieces:
                l_, p_ = piece_atoms(fn, R, sup)
                lin += l_
                part += p_
        t2 = time.perf_counter()
        cells = max_of_linears(lin)
        lin_per_piece.extend(fn for fn, _ in cells)
        partials.extend(part)
        t3 = time.perf_counter()
        rows.append(
            {
                "piece": i,
                "envelope_pieces": len(env_pieces) if env_pieces else 0,
                "step1": t1 - t0,
                "step2": t2 - t1,
                "step3a": t3 - t2,
            }
        )
    t3 = time.perf_counter()
    cells = max_of_linears(lin_per_piece)
    cells = fold_partials(cells, partials)
    cells = merge_equal_adjacent(cells)
    t4 = time.perf_counter()
    F = cells_to_piecewise(cells)
    F.meta.update({"timings": rows, "step3b": t4 - t3, "notes": notes})
    rep = _domain_report(f)
    if rep is not None:
        F.meta["domain_vertices"], F.meta["domain_convex_edges"] = rep
    for n in notes:
        log.info(n)
    return F
