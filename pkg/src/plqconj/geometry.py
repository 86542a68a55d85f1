"""Exact planar geometry: convex polytopes, subdivision validation, and
regions cut out by parabolic inequalities."""
from __future__ import annotations

import threading
from dataclasses import dataclass
from itertools import combinations

from gmpy2 import mpq

from ._cad import find_interior_point
from .core import LinFn, fmt, primitive, q
from .errors import InvalidSubdivision

ZERO = mpq(0)


def _pt(p):
    return (q(p[0]), q(p[1]))


def cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


# ---------------------------------------------------------------------------
# polytopes


def _halfplane_through(p, r) -> LinFn:
    """Affine form that is <= 0 on the left of the directed line p -> r."""
    nx, ny = r[1] - p[1], -(r[0] - p[0])
    cx, cy, c0 = primitive((nx, ny, -(nx * p[0] + ny * p[1])))
    return LinFn(cx, cy, c0)


class Polytope:
    """Bounded convex polygon (or segment, or point) in V- and H-representation.

    ``vertices`` are counterclockwise and in strictly convex position; use
    :func:`hull_and_orient` to build one from arbitrary points.
    """

    __slots__ = ("vertices", "halfplanes")

    def __init__(self, vertices):
        vs = tuple(_pt(v) for v in vertices)
        if not vs:
            raise ValueError("a polytope needs at least one vertex")
        if len(set(vs)) != len(vs):
            raise ValueError("repeated vertex")
        if len(vs) >= 3:
            n = len(vs)
            for i in range(n):
                if cross(vs[i - 1], vs[i], vs[(i + 1) % n]) <= 0:
                    raise ValueError("vertices are not in strictly convex counterclockwise order")
        self.vertices = vs
        self.halfplanes = tuple(self._hrep())

    def _hrep(self):
        vs = self.vertices
        if len(vs) >= 3:
            return [_halfplane_through(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]
        if len(vs) == 2:
            a, b = vs
            line = _halfplane_through(a, b)
            d = (b[0] - a[0], b[1] - a[1])
            cap_b = LinFn(*primitive((d[0], d[1], -(d[0] * b[0] + d[1] * b[1]))))
            cap_a = LinFn(*primitive((-d[0], -d[1], d[0] * a[0] + d[1] * a[1])))
            return [line, -line, cap_b, cap_a]
        (x0, y0), = vs
        return [LinFn(*primitive((1, 0, -x0))), LinFn(*primitive((-1, 0, x0))),
                LinFn(*primitive((0, 1, -y0))), LinFn(*primitive((0, -1, y0)))]

    @property
    def dim(self) -> int:
        return min(len(self.vertices) - 1, 2)

    def edges(self):
        vs = self.vertices
        if len(vs) == 1:
            return []
        if len(vs) == 2:
            return [(vs[0], vs[1])]
        return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]

    def contains(self, p) -> bool:
        p = _pt(p)
        return all(h(p) <= 0 for h in self.halfplanes)

    def contains_strictly(self, p) -> bool:
        p = _pt(p)
        return self.dim == 2 and all(h(p) < 0 for h in self.halfplanes)

    def area2(self):
        vs = self.vertices
        if len(vs) < 3:
            return ZERO
        return sum((cross(vs[0], vs[i], vs[i + 1]) for i in range(1, len(vs) - 1)), ZERO)

    def centroid(self):
        n = len(self.vertices)
        return (sum((v[0] for v in self.vertices), ZERO) / n, sum((v[1] for v in self.vertices), ZERO) / n)

    def bbox(self):
        xs = [v[0] for v in self.vertices]
        ys = [v[1] for v in self.vertices]
        return min(xs), max(xs), min(ys), max(ys)

    def entities(self):
        out = [Entity("vertex", (v,), self) for v in self.vertices]
        out += [Entity("edge", e, self) for e in self.edges()]
        if self.dim == 2:
            out.append(Entity("face", self.vertices, self))
        return out

    def to_region(self) -> "ParabolicRegion":
        return ParabolicRegion([ParabolicInequality(0, 0, 0, *h.coeffs) for h in self.halfplanes])

    def __eq__(self, other):
        return isinstance(other, Polytope) and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)

    def __repr__(self):
        return "Polytope([" + ", ".join(f"({fmt(x)},{fmt(y)})" for x, y in self.vertices) + "])"


def hull_and_orient(points) -> Polytope:
    """Convex hull, counterclockwise, duplicates and collinear points dropped."""
    pts = sorted(set(_pt(p) for p in points))
    if not pts:
        raise ValueError("no points")
    if len(pts) <= 2:
        return Polytope(pts)
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2 and hull[0] == hull[1]:
        hull = hull[:1]
    return Polytope(hull)


@dataclass(frozen=True)
class Entity:
    """A vertex, edge or face of a polytope."""

    kind: str
    points: tuple
    owner: Polytope

    @property
    def slope_form(self):
        """``('slope', m, q)`` for y = m*x + q, or ``('vertical', c)`` for x = c."""
        if self.kind != "edge":
            raise ValueError("slope form is defined for edges only")
        (x0, y0), (x1, y1) = self.points
        if x0 == x1:
            return ("vertical", x0)
        m = (y1 - y0) / (x1 - x0)
        return ("slope", m, y0 - m * x0)


# ---------------------------------------------------------------------------
# subdivision validation


def _seg_intersection(p1, p2, p3, p4):
    """Points of [p1,p2] ∩ [p3,p4]: the single crossing, or the overlap endpoints."""
    d1 = cross(p3, p4, p1)
    d2 = cross(p3, p4, p2)
    d3 = cross(p1, p2, p3)
    d4 = cross(p1, p2, p4)
    if d1 == 0 and d2 == 0:
        # collinear; project on the dominant axis
        ax = 0 if p1[0] != p2[0] else 1
        lo1, hi1 = sorted((p1, p2), key=lambda p: p[ax])
        lo2, hi2 = sorted((p3, p4), key=lambda p: p[ax])
        lo = max(lo1, lo2, key=lambda p: p[ax])
        hi = min(hi1, hi2, key=lambda p: p[ax])
        if lo[ax] > hi[ax]:
            return []
        return [lo, hi]
    if (d1 > 0 and d2 > 0) or (d1 < 0 and d2 < 0) or (d3 > 0 and d4 > 0) or (d3 < 0 and d4 < 0):
        return []
    t = d1 / (d1 - d2)
    return [(p1[0] + t * (p2[0] - p1[0]), p1[1] + t * (p2[1] - p1[1]))]


def _segments(P: Polytope):
    vs = P.vertices
    if len(vs) == 1:
        return [(vs[0], vs[0])]
    return P.edges()


def convex_intersection(A: Polytope, B: Polytope):
    """A ∩ B as a (possibly degenerate) Polytope, or None when empty."""
    cand = [v for v in A.vertices if B.contains(v)]
    cand += [v for v in B.vertices if A.contains(v)]
    for s in _segments(A):
        for t in _segments(B):
            cand += _seg_intersection(s[0], s[1], t[0], t[1])
    if not cand:
        return None
    return hull_and_orient(cand)


def _check_pair(A: Polytope, B: Polytope, i, j):
    X = convex_intersection(A, B)
    if X is None:
        return
    if X.dim == 2:
        raise InvalidSubdivision(f"pieces {i} and {j} overlap in a 2-D region", (i, j))
    if X.dim == 0:
        v = X.vertices[0]
        if v not in A.vertices or v not in B.vertices:
            raise InvalidSubdivision(f"pieces {i} and {j} touch at {X!r}, which is not a vertex of both", (i, j))
        return
    seg = set(X.vertices)
    ea = {frozenset(e) for e in A.edges()}
    eb = {frozenset(e) for e in B.edges()}
    if frozenset(seg) not in ea or frozenset(seg) not in eb:
        raise InvalidSubdivision(f"pieces {i} and {j} share {X!r}, which is not a full edge of both", (i, j))


def validate_subdivision(polys) -> None:
    """Raise InvalidSubdivision unless pairwise intersections are empty, a
    common vertex, or a common full edge."""
    polys = list(polys)
    for (i, A), (j, B) in combinations(enumerate(polys), 2):
        _check_pair(A, B, i, j)


# ---------------------------------------------------------------------------
# parabolic inequalities and regions


class ParabolicInequality:
    """``a x^2 + b xy + c y^2 + d x + e y + f  rel  0`` with ``b^2 = 4ac``.

    Coefficients are scaled by a positive factor to coprime integers, so the
    direction of the inequality is kept and equal inequalities compare equal.
    """

    __slots__ = ("coeffs", "rel")

    def __init__(self, a, b, c, d, e, f, rel="le"):
        cf = primitive((a, b, c, d, e, f))
        if not any(cf):
            raise ValueError("all coefficients are zero")
        a, b, c = cf[:3]
        if b * b != 4 * a * c:
            raise ValueError("not a parabolic inequality: b^2 - 4ac != 0")
        if rel not in ("le", "lt"):
            raise ValueError(f"bad relation {rel!r}")
        self.coeffs = cf
        self.rel = rel

    @classmethod
    def from_fn(cls, fn, rel="le"):
        """``fn <= 0`` for a LinFn or QuadFn ``fn``."""
        if isinstance(fn, LinFn):
            return cls(0, 0, 0, *fn.coeffs, rel=rel)
        return cls(*fn.coeffs, rel=rel)

    def __call__(self, x, y):
        a, b, c, d, e, f = self.coeffs
        return (a * x + b * y + d) * x + (c * y + e) * y + f

    def holds(self, p) -> bool:
        v = self(*_pt(p))
        return v <= 0 if self.rel == "le" else v < 0

    @property
    def is_constant(self):
        return not any(self.coeffs[:5])

    @property
    def is_linear(self):
        return not any(self.coeffs[:3])

    def negated(self) -> "ParabolicInequality":
        """The closed complement side ``-H <= 0``."""
        return ParabolicInequality(*(-c for c in self.coeffs), rel="le")

    def curve_key(self):
        """(curve, side): the curve up to sign and which side of it is kept."""
        lead = next(c for c in self.coeffs if c)
        s = 1 if lead > 0 else -1
        return tuple(c * s for c in self.coeffs), s

    def key(self):
        return self.coeffs + (self.rel,)

    def __eq__(self, other):
        return isinstance(other, ParabolicInequality) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def pretty(self, vars=("s1", "s2")):
        x, y = vars
        from .core import QuadFn

        return QuadFn(*self.coeffs).pretty(vars) + (" <= 0" if self.rel == "le" else " < 0")

    def __repr__(self):
        return f"ParabolicInequality({self.pretty(('x', 'y'))})"


_UNSET = object()


class ParabolicRegion:
    """Conjunction of parabolic inequalities, with a write-once interior witness.

    Constant inequalities are folded away at construction: a true one is
    dropped, a false one marks the region as empty.
    """

    __slots__ = ("inequalities", "_witness", "_lock", "trivially_empty")

    def __init__(self, inequalities=(), witness=None):
        seen = {}
        empty = False
        for h in inequalities:
            if h.is_constant:
                f = h.coeffs[5]
                if f < 0 or (f == 0 and h.rel == "le"):
                    continue
                empty = True
                continue
            seen.setdefault(h.key(), h)
        self.inequalities = tuple(seen.values())
        self.trivially_empty = empty
        self._lock = threading.Lock()
        self._witness = _UNSET
        if witness is not None:
            self._set_witness(_pt(witness))

    def _set_witness(self, w):
        with self._lock:
            if self._witness is _UNSET:
                if w is not None and not self.strictly_contains(w):
                    raise AssertionError("witness does not satisfy the region strictly")
                self._witness = w
            return self._witness

    @property
    def witness(self):
        w = self._witness
        return None if w is _UNSET else w

    def strict_tuples(self):
        return [h.coeffs for h in self.inequalities]

    def contains(self, p) -> bool:
        if self.trivially_empty:
            return False
        p = _pt(p)
        return all(h(*p) <= 0 if h.rel == "le" else h(*p) < 0 for h in self.inequalities)

    def strictly_contains(self, p) -> bool:
        if self.trivially_empty:
            return False
        p = _pt(p)
        return all(h(*p) < 0 for h in self.inequalities)

    def key_set(self):
        return frozenset(h.key() for h in self.inequalities)

    def __len__(self):
        return len(self.inequalities)

    def __iter__(self):
        return iter(self.inequalities)

    def __repr__(self):
        return "ParabolicRegion{" + "; ".join(h.pretty() for h in self.inequalities) + "}"


def interior_point(R: ParabolicRegion, hints=()):
    """A rational point strictly inside R, or None when R has empty interior.

    The result is cached on R.
    """
    if R._witness is not _UNSET:
        return R._witness
    if R.trivially_empty:
        return R._set_witness(None)
    w = find_interior_point(R.strict_tuples(), hints)
    return R._set_witness(w)


def is_empty(R: ParabolicRegion, hints=()) -> bool:
    return interior_point(R, hints) is None


def intersect_regions(R1: ParabolicRegion, R2: ParabolicRegion, extra_hints=()):
    """R1 ∩ R2 if its interior is nonempty, else None."""
    if R1 is R2 or R1.key_set() == R2.key_set():
        return R1 if interior_point(R1) is not None else None
    R = ParabolicRegion(R1.inequalities + R2.inequalities)
    hints = [w for w in (R1.witness, R2.witness) if w is not None] + list(extra_hints)
    return R if interior_point(R, hints) is not None else None


def conjoin(R: ParabolicRegion, extra, hints=()):
    """R with extra inequalities added, or None when the interior is empty."""
    out = ParabolicRegion(R.inequalities + tuple(extra))
    hs = ([R.witness] if R.witness is not None else []) + list(hints)
    return out if interior_point(out, hs) is not None else None


def merge_complementary(R1: ParabolicRegion, R2: ParabolicRegion):
    """Union of two regions that differ only in one complementary pair of
    inequalities on the same curve, else None."""
    k1, k2 = R1.key_set(), R2.key_set()
    if k1 == k2:
        return None
    only1 = [h for h in R1.inequalities if h.key() not in k2]
    only2 = [h for h in R2.inequalities if h.key() not in k1]
    if len(only1) != 1 or len(only2) != 1:
        return None
    (c1, s1), (c2, s2) = only1[0].curve_key(), only2[0].curve_key()
    if c1 != c2 or s1 == s2:
        return None
    common = [h for h in R1.inequalities if h.key() in k2]
    hints = [w for w in (R1.witness, R2.witness) if w is not None]
    out = ParabolicRegion(common, witness=hints[0] if hints else None)
    return out


def prune_redundant(R: ParabolicRegion) -> ParabolicRegion:
    """Drop inequalities implied by the others (tested by exact emptiness of
    the others together with the violated inequality)."""
    ineqs = list(R.inequalities)
    i = 0
    while i < len(ineqs) and len(ineqs) > 1:
        h = ineqs[i]
        rest = ineqs[:i] + ineqs[i + 1 :]
        probe = [g.coeffs for g in rest] + [tuple(-c for c in h.coeffs)]
        if find_interior_point(probe) is None:
            ineqs = rest
        else:
            i += 1
    if len(ineqs) == len(R.inequalities):
        return R
    return ParabolicRegion(ineqs, witness=R.witness)
