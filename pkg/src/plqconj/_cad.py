"""Exact strict-feasibility test for a conjunction of bivariate quadratic
inequalities ``H_i(x, y) < 0``.

Vertical scan lines are placed in every open x-interval between critical
abscissae: roots of the y-discriminant or y-leading coefficient of each
constraint, and roots of the pairwise resultants in y.  Over such an interval
the y-roots of the constraints do not cross, so one line per interval is
enough; along a line the same argument is applied in y.  Candidate points are
rational and every accepted point is checked in exact arithmetic.

Real roots of the univariate critical polynomials are located in floating
point.  Rational roots are recovered exactly; whenever two distinct roots are
too close for a float midpoint to separate them safely, the sample set is
rebuilt from an exact joint isolation (sympy).
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np
from gmpy2 import mpq
from sympy.polys.domains import QQ
from sympy.polys.rootisolation import dup_isolate_real_roots_list, dup_refine_real_root
from sympy.polys.sqfreetools import dup_sqf_part

ZERO = mpq(0)
_CLOSE = 1e-7


# univariate dense polynomials, highest degree first -------------------------


def _strip(p):
    i = 0
    while i < len(p) and p[i] == 0:
        i += 1
    return p[i:]


def _add(p, r):
    if len(p) < len(r):
        p, r = r, p
    out = list(p)
    off = len(p) - len(r)
    for i, c in enumerate(r):
        out[off + i] += c
    return _strip(out)


def _neg(p):
    return [-c for c in p]


def _sub(p, r):
    return _add(p, _neg(r))


def _mul(p, r):
    if not p or not r:
        return []
    out = [ZERO] * (len(p) + len(r) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(r):
                out[i + j] += a * b
    return _strip(out)


def _peval(p, x):
    acc = ZERO
    for c in p:
        acc = acc * x + c
    return acc


# bivariate constraints as univariate-in-y with coefficients in x ------------


def _ycoeffs(h):
    a, b, c, d, e, f = h
    return _strip([c]), _strip([b, e]), _strip([a, d, f])


def _ydeg(h):
    a, b, c, d, e, f = h
    if c:
        return 2
    if b or e:
        return 1
    return 0


def _resultant_y(h1, h2):
    d1, d2 = _ydeg(h1), _ydeg(h2)
    if d1 == 0 or d2 == 0:
        return None
    A1, B1, C1 = _ycoeffs(h1)
    A2, B2, C2 = _ycoeffs(h2)
    if d1 == 1 and d2 == 1:
        return _sub(_mul(B1, C2), _mul(B2, C1))
    if d1 == 2 and d2 == 1:
        A1, B1, C1, A2, B2, C2 = A2, B2, C2, A1, B1, C1
        d1, d2 = d2, d1
    if d1 == 1:
        # Res(B1*y + C1, A2*y^2 + B2*y + C2)
        return _add(_sub(_mul(A2, _mul(C1, C1)), _mul(B2, _mul(B1, C1))), _mul(C2, _mul(B1, B1)))
    t1 = _sub(_mul(A1, C2), _mul(C1, A2))
    t2 = _sub(_mul(A1, B2), _mul(B1, A2))
    t3 = _sub(_mul(B1, C2), _mul(C1, B2))
    return _sub(_mul(t1, t1), _mul(t2, t3))


def _own_critical(h):
    A, B, C = _ycoeffs(h)
    deg = _ydeg(h)
    if deg == 2:
        return _sub(_mul(B, B), _mul([mpq(4)], _mul(A, C)))
    if deg == 1:
        return B
    return C


def _proportional(h1, h2):
    r = None
    for u, v in zip(h1, h2):
        if (u == 0) != (v == 0):
            return False
        if u:
            if r is None:
                r = u / v
            elif u != r * v:
                return False
    return True


def _factor_constraint(h):
    """Irreducible factors over Q of a quadratic constraint (rare path)."""
    import sympy

    x, y = sympy.symbols("x y")
    a, b, c, d, e, f = (sympy.Rational(int(t.numerator), int(t.denominator)) for t in h)
    expr = a * x**2 + b * x * y + c * y**2 + d * x + e * y + f
    _, facs = sympy.factor_list(expr, x, y)
    out = []
    for fac, _m in facs:
        P = sympy.Poly(fac, x, y)
        cf = [mpq(int(P.coeff_monomial(mon).p), int(P.coeff_monomial(mon).q)) for mon in (x**2, x * y, y**2, x, y, 1)]
        out.append(tuple(cf))
    return out


def critical_polys(cons):
    curves = []
    for h in cons:
        curves.append(h)
    polys = []
    extra = []
    for i, h in enumerate(curves):
        polys.append(_own_critical(h))
        for h2 in curves[i + 1 :]:
            r = _resultant_y(h, h2)
            if r is None:
                continue
            if not r:
                if _proportional(h, h2):
                    continue
                # shared component: work with the factors of both curves
                extra.extend(_factor_constraint(h))
                extra.extend(_factor_constraint(h2))
                continue
            polys.append(r)
    if extra:
        uniq = []
        for g in extra:
            if not any(_proportional(g, u) for u in uniq):
                uniq.append(g)
        for i, g in enumerate(uniq):
            polys.append(_own_critical(g))
            for g2 in uniq[i + 1 :]:
                r = _resultant_y(g, g2)
                if r:
                    polys.append(r)
    return [p for p in polys if len(p) > 1]


# real roots and separating samples ------------------------------------------


def _is_square(v: mpq):
    import gmpy2

    if v < 0:
        return None
    n, d = v.numerator, v.denominator
    if gmpy2.is_square(n) and gmpy2.is_square(d):
        return mpq(gmpy2.isqrt(n), gmpy2.isqrt(d))
    return None


def _approx_roots(p):
    """List of (float value, exact mpq or None) covering the real roots of p.

    Spurious extra entries are harmless; missing real roots are not.
    """
    deg = len(p) - 1
    if deg <= 0:
        return []
    if deg == 1:
        r = -p[1] / p[0]
        return [(float(r), r)]
    if deg == 2:
        a, b, c = p
        disc = b * b - 4 * a * c
        if disc < 0:
            return []
        if disc == 0:
            r = -b / (2 * a)
            return [(float(r), r)]
        s = _is_square(disc)
        if s is not None:
            return [(float(r), r) for r in ((-b - s) / (2 * a), (-b + s) / (2 * a))]
        sd = float(disc) ** 0.5
        fa, fb = float(a), float(b)
        # numerically stable pair
        qq = -0.5 * (fb + (sd if fb >= 0 else -sd))
        r1 = qq / fa
        r2 = float(c) / qq if qq != 0 else -fb / (2 * fa)
        return [(r1, None), (r2, None)]
    p = dup_sqf_part(p, QQ)
    if len(p) - 1 <= 2:
        return _approx_roots(p)
    lead = p[0]
    coeffs = [float(c / lead) for c in p]
    out = []
    for z in np.roots(coeffs):
        re = float(z.real)
        if abs(z.imag) > 1e-6 * (1.0 + abs(re)):
            continue
        fr = Fraction(re).limit_denominator(10**6)
        cand = mpq(fr.numerator, fr.denominator)
        if _peval(p, cand) == 0:
            out.append((float(cand), cand))
        else:
            out.append((re, None))
    return out


def _rational_between(lo, hi):
    """A short rational strictly inside the float interval (lo, hi)."""
    mid = 0.5 * (lo + hi)
    width = hi - lo
    for den in (1, 2, 4, 8, 16, 64, 256, 1024, 2**14, 2**20, 2**30, 2**40):
        fr = Fraction(mid).limit_denominator(den)
        if abs(float(fr) - mid) < 0.25 * width:
            return mpq(fr.numerator, fr.denominator)
    fr = Fraction(mid)
    return mpq(fr.numerator, fr.denominator)


def _separate(ivals, sqf):
    """Refine isolating intervals until neighbours are strictly apart.

    Intervals from the joint isolation may share an endpoint; a sample
    between two such roots needs narrower intervals.
    """
    ivs = [[mpq(a), mpq(b), sqf[min(idx)]] for (a, b), idx in ivals]
    for _ in range(200):
        touching = [i for i in range(len(ivs) - 1) if ivs[i][1] >= ivs[i + 1][0]]
        if not touching:
            break
        for i in touching:
            for iv in (ivs[i], ivs[i + 1]):
                a, b, p = iv
                if a == b:
                    continue
                (a2, b2) = dup_refine_real_root(p, QQ(a), QQ(b), QQ, eps=QQ(b - a) / 4)
                iv[0], iv[1] = mpq(a2), mpq(b2)
    return ivs


def _exact_samples(polys):
    sqf = []
    for p in polys:
        if len(p) > 1:
            sqf.append(dup_sqf_part(p, QQ))
    ivals = dup_isolate_real_roots_list(sqf, QQ) if sqf else []
    if not ivals:
        return [ZERO]
    ivs = _separate(ivals, sqf)
    pts = [ivs[0][0] - 1]
    for (_, b, _p), (a2, _, _q) in zip(ivs, ivs[1:]):
        pts.append((a2 + b) / 2)
    pts.append(ivs[-1][1] + 1)
    return pts


def cell_samples(polys):
    """Rational points, at least one in every open interval cut out by the
    real roots of ``polys`` (including the two unbounded ones)."""
    roots = []
    for p in polys:
        roots.extend(_approx_roots(p))
    if not roots:
        return [ZERO]
    roots.sort(key=lambda r: r[0])
    merged = [roots[0]]
    for r in roots[1:]:
        last = merged[-1]
        if r[1] is not None and last[1] is not None and r[1] == last[1]:
            continue
        if r[0] - last[0] <= _CLOSE * (1.0 + abs(r[0])):
            if r[1] is not None and last[1] is not None:
                merged.append(r)
                continue
            return _exact_samples(polys)
        merged.append(r)
    first, last = merged[0], merged[-1]
    pts = [(first[1] if first[1] is not None else mpq(int(np.floor(first[0])))) - 1]
    for (f0, e0), (f1, e1) in zip(merged, merged[1:]):
        if e0 is not None and e1 is not None:
            pts.append((e0 + e1) / 2)
        else:
            pts.append(_rational_between(f0, f1))
    pts.append((last[1] if last[1] is not None else mpq(int(np.ceil(last[0])))) + 1)
    return pts


# feasibility ---------------------------------------------------------------


def _eval(h, x, y):
    a, b, c, d, e, f = h
    return (a * x + b * y + d) * x + (c * y + e) * y + f


def strictly_feasible(cons, p):
    x, y = p
    return all(_eval(h, x, y) < 0 for h in cons)


def _clean(cons):
    out = []
    for h in cons:
        if not any(h[:5]):
            if h[5] < 0:
                continue
            return None
        out.append(tuple(mpq(c) for c in h))
    return out


def find_interior_point(cons, hints=()):
    """A rational point with every ``H(p) < 0``, or None if there is none."""
    cons = _clean(cons)
    if cons is None:
        return None
    if not cons:
        return (ZERO, ZERO)
    for h in hints:
        if h is not None and strictly_feasible(cons, h):
            return h
    fcons = [tuple(float(c) for c in h) for h in cons]
    for x0 in cell_samples(critical_polys(cons)):
        ypolys = []
        dead = False
        for a, b, c, d, e, f in cons:
            p = _strip([c, b * x0 + e, (a * x0 + d) * x0 + f])
            if len(p) <= 1:
                if not p or p[0] >= 0:
                    dead = True
                    break
                continue
            ypolys.append(p)
        if dead:
            continue
        fx = float(x0)
        for y0 in cell_samples(ypolys):
            fy = float(y0)
            ok = True
            for (a, b, c, d, e, f) in fcons:
                v = (a * fx + b * fy + d) * fx + (c * fy + e) * fy + f
                if v > 1e-9 * (1.0 + abs(f) + abs(fx) + abs(fy)) ** 2:
                    ok = False
                    break
            if ok and strictly_feasible(cons, (x0, y0)):
                return (x0, y0)
    return None
