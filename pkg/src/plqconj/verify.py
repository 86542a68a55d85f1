"""Brute-force conjugate oracle and exact invariant checks.

The oracle is the only floating-point component of the package; its output
is compared with the exact pipeline but never fed back into it.
"""
from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field

import numpy as np
from gmpy2 import mpq

from .core import LinFn, QuadFn, discriminant
from .envelope import rational_piece, vertex_edge_piece
from .conjpiece import zeta_coefficients
from .errors import DegenerateEdge, InvariantError, OutsideDomain, PLQError
from .geometry import ParabolicInequality
from .oracle_backend import grid_max
from .plqmodel import PiecewiseFn, PLQFunction

log = logging.getLogger(__name__)


@dataclass
class OracleConfig:
    h: mpq = mpq(1, 50)
    box: tuple = (-30, 30, -30, 30)
    samples: int = 200
    C: mpq = mpq(4)
    seed: int = 0

    def __post_init__(self):
        self.h, self.C = mpq(self.h), mpq(self.C)
        if self.h <= 0:
            raise ValueError("grid step must be positive")
        if self.samples < 0:
            raise ValueError("sample count must be nonnegative")


def oracle_points(f: PLQFunction, h):
    """Grid of dom f with spacing h, plus every vertex and edge samples at
    spacing h; returns float arrays (X, F)."""
    h = float(h)
    pts, vals = [], []
    for g, P in f.pieces:
        A = np.array([[float(c) for c in H.coeffs] for H in P.halfplanes])
        x0, x1, y0, y1 = (float(c) for c in P.bbox())
        xs = np.arange(math.floor(x0 / h), math.ceil(x1 / h) + 1) * h
        ys = np.arange(math.floor(y0 / h), math.ceil(y1 / h) + 1) * h
        GX, GY = np.meshgrid(xs, ys)
        cand = [np.column_stack([GX.ravel(), GY.ravel()])]
        cand.append(np.array([[float(v[0]), float(v[1])] for v in P.vertices]))
        for a, b in P.edges():
            a = np.array([float(a[0]), float(a[1])])
            b = np.array([float(b[0]), float(b[1])])
            k = max(1, int(math.ceil(np.linalg.norm(b - a) / h)))
            t = np.linspace(0.0, 1.0, k + 1)[:, None]
            cand.append(a + t * (b - a))
        Xp = np.vstack(cand)
        inside = (Xp @ A[:, :2].T + A[:, 2] <= 1e-12).all(axis=1)
        Xp = Xp[inside]
        c = [float(v) for v in g.coeffs]
        x, y = Xp[:, 0], Xp[:, 1]
        pts.append(Xp)
        vals.append(c[0] * x * x + c[1] * x * y + c[2] * y * y + c[3] * x + c[4] * y + c[5])
    X = np.vstack(pts)
    F = np.concatenate(vals)
    # min over pieces at shared points
    order = np.lexsort((F, X[:, 1], X[:, 0]))
    X, F = X[order], F[order]
    keep = np.ones(len(X), dtype=bool)
    keep[1:] = (np.diff(X, axis=0) != 0).any(axis=1)
    return np.ascontiguousarray(X[keep]), np.ascontiguousarray(F[keep])


def oracle_conjugate(f: PLQFunction, s, cfg: OracleConfig | None = None) -> float:
    """Float value of sup_x s.x - f(x) over the oracle grid."""
    return float(oracle_many(f, [s], cfg)[0])


def oracle_many(f: PLQFunction, S, cfg: OracleConfig | None = None, points=None):
    cfg = cfg or OracleConfig()
    X, F = points if points is not None else oracle_points(f, cfg.h)
    A = np.array([[float(a), float(b)] for a, b in S], dtype=np.float64).reshape(-1, 2)
    return grid_max(A, X, F)


def random_dual_points(rng: random.Random, box, n, den=1000):
    x0, x1, y0, y1 = (mpq(c) for c in box)
    return [
        (mpq(rng.randint(int(x0 * den), int(x1 * den)), den), mpq(rng.randint(int(y0 * den), int(y1 * den)), den))
        for _ in range(n)
    ]


def random_primal_points(rng: random.Random, f: PLQFunction, n, den=97):
    out = []
    for _ in range(n):
        _, P = f.pieces[rng.randrange(len(f.pieces))]
        w = [mpq(rng.randint(0, den)) for _ in P.vertices]
        tot = sum(w) or mpq(1)
        out.append((sum(a * v[0] for a, v in zip(w, P.vertices)) / tot, sum(a * v[1] for a, v in zip(w, P.vertices)) / tot))
    return out


@dataclass
class CheckReport:
    passed: bool
    seed: int
    worst_deviation: float = 0.0
    worst_s: tuple | None = None
    checks: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def summary(self) -> dict:
        return {
            "passed": self.passed,
            "seed": self.seed,
            "worst_deviation": self.worst_deviation,
            "worst_s": None if self.worst_s is None else [str(c) for c in self.worst_s],
            "checks": self.checks,
            "warnings": self.warnings,
        }

    def text(self) -> str:
        lines = [f"{'PASS' if self.passed else 'FAIL'} (seed {self.seed})"]
        for k, v in self.checks.items():
            lines.append(f"  {k}: {'pass' if v['passed'] else 'FAIL'}  {v.get('detail', '')}".rstrip())
        lines += [f"  warning: {w}" for w in self.warnings]
        return "\n".join(lines)


def _safe_eval(F, s):
    try:
        return F(s)
    except (OutsideDomain, InvariantError):
        return None


def check_conjugate(f: PLQFunction, F: PiecewiseFn, cfg: OracleConfig | None = None, fy_pairs=200, convex_pairs=1000):
    """Oracle agreement, Fenchel-Young and midpoint convexity at random samples."""
    cfg = cfg or OracleConfig()
    rng = random.Random(cfg.seed)
    rep = CheckReport(passed=True, seed=cfg.seed)
    S = random_dual_points(rng, cfg.box, cfg.samples)
    if not S:
        rep.warnings.append("no dual samples; oracle check is vacuous")
    vals = [_safe_eval(F, s) for s in S]
    missing = sum(v is None for v in vals)
    worst, worst_ratio, worst_s, ok = 0.0, 0.0, None, missing == 0
    if S:
        orc = oracle_many(f, S, cfg)
        for s, v, o in zip(S, vals, orc):
            if v is None:
                continue
            dev = abs(float(v) - o)
            tol = float(cfg.C * cfg.h) * (1 + abs(float(s[0])) + abs(float(s[1])))
            if dev / tol >= worst_ratio:
                worst, worst_ratio, worst_s = dev, dev / tol, s
            if dev > tol:
                ok = False
    rep.worst_deviation, rep.worst_s = worst, worst_s
    rep.checks["oracle"] = {"passed": ok, "detail": f"worst |F*-oracle| = {worst:.3g} ({worst_ratio:.2f} of tolerance), {missing} samples uncovered"}

    # Fenchel-Young: F*(s) + f(x) >= s.x, exact
    Xs = random_primal_points(rng, f, fy_pairs)
    Sy = S[:fy_pairs] if len(S) >= fy_pairs else S + random_dual_points(rng, cfg.box, fy_pairs - len(S))
    Fs = [_safe_eval(F, s) for s in Sy]
    fx = [f(x) for x in Xs]
    bad = sum(
        1 for s, v in zip(Sy, Fs) for x, w in zip(Xs, fx) if v is None or v + w < s[0] * x[0] + s[1] * x[1]
    )
    rep.checks["fenchel_young"] = {"passed": bad == 0, "detail": f"{len(Sy)}x{len(Xs)} pairs, {bad} violations"}

    bad = 0
    P2 = random_dual_points(rng, cfg.box, 2 * convex_pairs, den=100)
    for s, t in zip(P2[::2], P2[1::2]):
        m = ((s[0] + t[0]) / 2, (s[1] + t[1]) / 2)
        a, b, c = _safe_eval(F, s), _safe_eval(F, t), _safe_eval(F, m)
        if None in (a, b, c) or 2 * c > a + b:
            bad += 1
    rep.checks["convexity"] = {"passed": bad == 0, "detail": f"{convex_pairs} midpoint pairs, {bad} violations"}
    rep.passed = all(v["passed"] for v in rep.checks.values())
    return rep


# ---------------------------------------------------------------------------
# structural checks


def face_conjugate_keys(f: PLQFunction):
    """Keys of the unconstrained conjugates of strictly convex input pieces.

    These are the only conjugate pieces allowed a nonzero discriminant.
    """
    from .conjpiece import face_atom

    keys = set()
    for g, P in f.pieces:
        if g.qxx > 0 and 4 * g.qxx * g.qyy - g.qxy * g.qxy > 0:
            keys.add(face_atom(g, P).fn.key())
    return keys


def parabolic_law(F: PiecewiseFn, f: PLQFunction | None = None):
    """Every inequality and every quadratic piece has zero discriminant.

    With ``f`` given, face conjugates of strictly convex pieces of ``f`` are
    exempt from the piece test (their boundaries are still checked).
    """
    exempt = face_conjugate_keys(f) if f is not None else set()
    for fn, R in F.pieces:
        if isinstance(fn, QuadFn) and discriminant(fn) != 0 and fn.key() not in exempt:
            return False
        for h in getattr(R, "inequalities", ()):
            a, b, c = h.coeffs[:3]
            if b * b != 4 * a * c:
                return False
    return True


def rational_points_on(h: ParabolicInequality, rng: random.Random, n, span=30):
    """Rational points on the curve h = 0 (lines and parabolas)."""
    a, b, c, d, e, f = h.coeffs
    out = []
    if not (a or b or c):
        for _ in range(n):
            t = mpq(rng.randint(-span * 100, span * 100), 100)
            out.append((t, -(d * t + f) / e) if e else (-f / d, t))
        return out
    # quadratic part is (al*x + be*y)^2 up to a factor; use u = al*x + be*y
    if a:
        al, be = a, b / 2
    else:
        al, be = b / 2, c
    lam = a / (al * al) if a else c / (be * be)
    # pick (x, y) = u*(al, be)/(al^2+be^2) + v*(-be, al)
    nn = al * al + be * be
    for _ in range(n):
        u = mpq(rng.randint(-span * 100, span * 100), 100)
        # h = lam*u^2 + d*x + e*y + f, linear in v
        x0, y0 = u * al / nn, u * be / nn
        cv = -d * be + e * al
        if cv == 0:
            continue
        v = -(lam * u * u + d * x0 + e * y0 + f) / cv
        out.append((x0 - v * be, y0 + v * al))
    return out


def tiling_check(F: PiecewiseFn, rng: random.Random, n=1000, box=(-30, 30, -30, 30)):
    """Every sample (interior and boundary) is covered, with agreement."""
    pts = random_dual_points(rng, box, n // 2)
    ineqs = [h for _, R in F.pieces for h in R.inequalities]
    if ineqs:
        per = max(1, (n - len(pts)) // len(ineqs))
        for h in ineqs:
            pts += rational_points_on(h, rng, per)
    bad = 0
    for p in pts:
        try:
            F(p)
        except PLQError:
            bad += 1
    return bad == 0, len(pts), bad


def zeta_identity_fuzz(n=1000, seed=0):
    """Random psi-forms with xi2 constant on the edge: the edge conjugate
    always has zero discriminant.  Returns (passed, accepted, rejected)."""
    rng = random.Random(seed)

    def r():
        return mpq(rng.randint(-50, 50), rng.randint(1, 12))

    accepted = rejected = 0
    for _ in range(n):
        m, qe, t = r(), r(), r()
        xi2 = LinFn(-m * t, t, r())
        xi1, xi0 = LinFn(r(), r(), r()), LinFn(r(), r(), r())
        try:
            z = zeta_coefficients((xi1, xi2, xi0), m, qe)
        except (ValueError, DegenerateEdge):
            rejected += 1  # degenerate draw
            continue
        except InvariantError:
            return False, accepted, rejected
        if discriminant(z) != 0:
            return False, accepted, rejected
        accepted += 1
    return True, accepted, rejected


def denominator_vertex_check(n=500, seed=0):
    """The rational piece's denominator vanishes at its vertex and is positive
    inside its triangle; for convex edges it also matches the general
    vertex/edge construction."""
    rng = random.Random(seed)

    def r(lo=-20, hi=20):
        return mpq(rng.randint(lo * 4, hi * 4), 4)

    done = 0
    while done < n:
        v = (r(), r())
        m, qe = r(), r()
        scale = mpq(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 3))
        if qe + m * v[0] - v[1] == 0:
            continue
        x_a = r()
        x_b = x_a + mpq(rng.randint(1, 40), 4)
        A, B = (x_a, m * x_a + qe), (x_b, m * x_b + qe)
        rp = rational_piece(v, m, qe, scale)
        if rp.den(*v) != 0:
            return False
        for _ in range(5):
            w = [mpq(rng.randint(1, 50)) for _ in range(3)]
            tot = sum(w)
            p = tuple((w[0] * v[i] + w[1] * A[i] + w[2] * B[i]) / tot for i in range(2))
            if rp.den(*p) <= 0:
                return False
        if scale * m > 0:
            ref = vertex_edge_piece(QuadFn(0, scale, 0), v, A, B)
            if ref.key() != rp.key():
                return False
        done += 1
    return True
