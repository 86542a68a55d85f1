"""Exact scalars and the algebra of bivariate affine, quadratic and
quadratic-over-affine functions.

Rationals are ``gmpy2.mpq``.  :class:`Surd` extends them by one fixed square
root; it is used for parsing and arithmetic on instance files, while the
conjugation pipeline itself only ever sees rationals.
"""
from __future__ import annotations

import re
from math import gcd

import gmpy2
from gmpy2 import mpq, mpz

from .errors import DivisionByZero, NoPsiForm, ParseError

Q = mpq
ZERO = mpq(0)
ONE = mpq(1)


def q(value) -> mpq:
    """Coerce ints, strings, Fractions and mpq to an exact rational."""
    if isinstance(value, type(ZERO)):
        return value
    if isinstance(value, float):
        raise TypeError("floats are not allowed in exact arithmetic")
    if isinstance(value, str):
        return parse_rational(value)
    return mpq(value)


_RAT = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rational(text: str) -> mpq:
    m = _RAT.match(text)
    if not m:
        raise ParseError(f"not a rational number: {text!r}")
    den = int(m.group(2)) if m.group(2) else 1
    if den == 0:
        raise ParseError(f"zero denominator in {text!r}")
    return mpq(int(m.group(1)), den)


def squarefree_part(n: int) -> int:
    """Square-free part of a nonnegative integer (0 -> 0)."""
    if n < 0:
        raise ValueError("negative")
    if n in (0, 1):
        return n
    out, d = 1, 2
    while d * d <= n:
        while n % (d * d) == 0:
            n //= d * d
        if n % d == 0:
            out *= d
            n //= d
        d += 1
    return out * n


class Surd:
    """Element ``p + r*sqrt(D)`` of the field Q(sqrt D), D square-free.

    Values with ``r == 0`` compare equal to the plain rational ``p``.
    """

    __slots__ = ("p", "r", "D")

    def __init__(self, p, r=0, D=0):
        p, r, D = q(p), q(r), int(D)
        if D < 0 or (D > 1 and squarefree_part(D) != D):
            raise ValueError(f"D must be a nonnegative square-free integer, got {D}")
        if D in (0, 1):
            p, r, D = p + (r if D == 1 else 0), ZERO, 0
        self.p, self.r, self.D = p, r, D

    def _coerce(self, other):
        if isinstance(other, Surd):
            if other.r and self.r and other.D != self.D:
                raise ValueError("mixing different square-root extensions")
            return other
        return Surd(q(other), 0, self.D)

    def _field(self, other):
        return self.D if self.r else other.D

    def __add__(self, other):
        o = self._coerce(other)
        return Surd(self.p + o.p, self.r + o.r, self._field(o))

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.p, -self.r, self.D)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        D = self._field(o)
        return Surd(self.p * o.p + self.r * o.r * D, self.p * o.r + self.r * o.p, D)

    __rmul__ = __mul__

    def conjugate(self):
        return Surd(self.p, -self.r, self.D)

    def norm(self) -> mpq:
        return self.p * self.p - self.r * self.r * self.D

    def __truediv__(self, other):
        o = self._coerce(other)
        n = o.norm()
        if n == 0:
            raise DivisionByZero("division by zero in Q(sqrt D)")
        num = self * o.conjugate()
        return Surd(num.p / n, num.r / n, num.D)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def sign(self) -> int:
        # sign of p + r*sqrt(D) without evaluating the root
        sp = (self.p > 0) - (self.p < 0)
        sr = (self.r > 0) - (self.r < 0)
        if sr == 0:
            return sp
        if sp == 0 or sp == sr:
            return sr
        return sp if self.p * self.p > self.r * self.r * self.D else -sp

    def __eq__(self, other):
        try:
            return (self - other).sign() == 0
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.p, self.r, self.D if self.r else 0))

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    @property
    def is_rational(self) -> bool:
        return self.r == 0

    def __float__(self):
        return float(self.p) + float(self.r) * float(gmpy2.sqrt(self.D))

    def __str__(self):
        if not self.r:
            return fmt(self.p)
        return f"{fmt(self.p)}+{fmt(self.r)}*sqrt({self.D})"

    def __repr__(self):
        return f"Surd({self})"


_SURD = re.compile(r"^\s*([+-]?\d+(?:/\d+)?)\s*([+-])\s*(\d+(?:/\d+)?)\s*\*\s*sqrt\(\s*(\d+)\s*\)\s*$")


def parse_scalar(text):
    """Parse ``"p/q"`` or ``"p/q+r/s*sqrt(D)"``; plain rationals come back as mpq."""
    if isinstance(text, int):
        return mpq(text)
    if not isinstance(text, str):
        raise ParseError(f"scalar must be a string, got {type(text).__name__}")
    m = _SURD.match(text)
    if m:
        r = parse_rational(m.group(3))
        if m.group(2) == "-":
            r = -r
        n = int(m.group(4))
        d = squarefree_part(n)
        if d:
            r *= gmpy2.isqrt(n // d)
        s = Surd(parse_rational(m.group(1)), r, d)
        return s.p if s.is_rational else s
    return parse_rational(text)


def fmt(x) -> str:
    if isinstance(x, Surd):
        return str(x)
    x = q(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def primitive(coeffs):
    """Scale rationals by a positive factor to coprime integers (zero stays zero)."""
    coeffs = [q(c) for c in coeffs]
    if not any(coeffs):
        return tuple(coeffs)
    lcm = mpz(1)
    for c in coeffs:
        lcm = gmpy2.lcm(lcm, c.denominator)
    ints = [int(c * lcm) for c in coeffs]
    g = 0
    for v in ints:
        g = gcd(g, v)
    return tuple(mpq(v // g) for v in ints)


# ---------------------------------------------------------------------------
# affine and quadratic functions


class LinFn:
    """``cx*x + cy*y + c0``."""

    __slots__ = ("cx", "cy", "c0")
    degree = 1

    def __init__(self, cx=0, cy=0, c0=0):
        self.cx, self.cy, self.c0 = q(cx), q(cy), q(c0)

    @property
    def coeffs(self):
        return (self.cx, self.cy, self.c0)

    def __call__(self, x, y=None):
        if y is None:
            x, y = x
        return self.cx * x + self.cy * y + self.c0

    def __add__(self, other):
        if isinstance(other, QuadFn):
            return other + self
        if isinstance(other, LinFn):
            return LinFn(self.cx + other.cx, self.cy + other.cy, self.c0 + other.c0)
        return LinFn(self.cx, self.cy, self.c0 + q(other))

    __radd__ = __add__

    def __neg__(self):
        return LinFn(-self.cx, -self.cy, -self.c0)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, LinFn):
            a, b, c = self.coeffs
            d, e, f = other.coeffs
            return QuadFn(a * d, a * e + b * d, b * e, a * f + c * d, b * f + c * e, c * f)
        k = q(other)
        return LinFn(k * self.cx, k * self.cy, k * self.c0)

    __rmul__ = __mul__

    def __truediv__(self, k):
        k = q(k)
        return LinFn(self.cx / k, self.cy / k, self.c0 / k)

    def grad(self, x=None, y=None):
        return (self.cx, self.cy)

    def is_zero(self):
        return not (self.cx or self.cy or self.c0)

    def is_constant(self):
        return not (self.cx or self.cy)

    def to_quad(self) -> "QuadFn":
        return QuadFn(0, 0, 0, self.cx, self.cy, self.c0)

    def key(self):
        return ("lin",) + self.coeffs

    def __eq__(self, other):
        if isinstance(other, QuadFn):
            return other == self
        return isinstance(other, LinFn) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"LinFn({', '.join(fmt(c) for c in self.coeffs)})"

    def pretty(self, vars=("x", "y")):
        return _pretty(((self.cx, vars[0]), (self.cy, vars[1]), (self.c0, "")))


class QuadFn:
    """``qxx*x^2 + qxy*x*y + qyy*y^2 + qx*x + qy*y + q0``."""

    __slots__ = ("qxx", "qxy", "qyy", "qx", "qy", "q0")
    degree = 2

    def __init__(self, qxx=0, qxy=0, qyy=0, qx=0, qy=0, q0=0):
        self.qxx, self.qxy, self.qyy = q(qxx), q(qxy), q(qyy)
        self.qx, self.qy, self.q0 = q(qx), q(qy), q(q0)

    @property
    def coeffs(self):
        return (self.qxx, self.qxy, self.qyy, self.qx, self.qy, self.q0)

    def __call__(self, x, y=None):
        if y is None:
            x, y = x
        return (self.qxx * x + self.qxy * y + self.qx) * x + (self.qyy * y + self.qy) * y + self.q0

    def _as_quad(self, other):
        if isinstance(other, QuadFn):
            return other
        if isinstance(other, LinFn):
            return other.to_quad()
        return QuadFn(q0=q(other))

    def __add__(self, other):
        o = self._as_quad(other)
        return QuadFn(*(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return QuadFn(*(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self._as_quad(other))

    def __rsub__(self, other):
        return self._as_quad(other) - self

    def __mul__(self, k):
        k = q(k)
        return QuadFn(*(k * a for a in self.coeffs))

    __rmul__ = __mul__

    def __truediv__(self, k):
        k = q(k)
        return QuadFn(*(a / k for a in self.coeffs))

    def grad(self, x, y=None):
        if y is None:
            x, y = x
        return (2 * self.qxx * x + self.qxy * y + self.qx, self.qxy * x + 2 * self.qyy * y + self.qy)

    def quad_form(self, dx, dy):
        """Value of the quadratic part at the direction ``(dx, dy)``."""
        return self.qxx * dx * dx + self.qxy * dx * dy + self.qyy * dy * dy

    def along(self, p0, d):
        """Coefficients ``(k2, k1, k0)`` of ``t -> f(p0 + t*d)``."""
        gx, gy = self.grad(p0)
        return (self.quad_form(*d), gx * d[0] + gy * d[1], self(p0))

    def is_linear(self):
        return not (self.qxx or self.qxy or self.qyy)

    def linear_part(self) -> LinFn:
        return LinFn(self.qx, self.qy, self.q0)

    def simplify(self):
        return self.linear_part() if self.is_linear() else self

    def is_zero(self):
        return not any(self.coeffs)

    def key(self):
        if self.is_linear():
            return self.linear_part().key()
        return ("quad",) + self.coeffs

    def __eq__(self, other):
        if isinstance(other, (QuadFn, LinFn)):
            return self.key() == other.key()
        return NotImplemented

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"QuadFn({', '.join(fmt(c) for c in self.coeffs)})"

    def pretty(self, vars=("x", "y")):
        x, y = vars
        return _pretty(
            (
                (self.qxx, f"{x}^2"),
                (self.qxy, f"{x}*{y}"),
                (self.qyy, f"{y}^2"),
                (self.qx, x),
                (self.qy, y),
                (self.q0, ""),
            )
        )


def _pretty(terms):
    out = []
    for c, m in terms:
        if not c:
            continue
        s = fmt(abs(c))
        body = (s if s != "1" or not m else "") + ("*" if m and s != "1" else "") + m
        out.append(("-" if c < 0 else "+") + body)
    if not out:
        return "0"
    text = "".join(out)
    return text[1:] if text[0] == "+" else text


def as_quad(f) -> QuadFn:
    return f if isinstance(f, QuadFn) else f.to_quad()


def simplify(f):
    """Demote a QuadFn with zero quadratic part to a LinFn."""
    return f.simplify() if isinstance(f, QuadFn) else f


def discriminant(f) -> mpq:
    f = as_quad(f)
    return f.qxy * f.qxy - 4 * f.qxx * f.qyy


def classify_form(f) -> str:
    """'convex' | 'concave' | 'indefinite' | 'affine', by exact sign tests."""
    f = as_quad(f)
    if f.is_linear():
        return "affine"
    det4 = 4 * f.qxx * f.qyy - f.qxy * f.qxy  # 4*det of the Hessian/2
    if det4 < 0:
        return "indefinite"
    lead = f.qxx if f.qxx else f.qyy
    return "convex" if lead > 0 else "concave"


# ---------------------------------------------------------------------------
# quadratic over affine


class RationalFn:
    """``num/den`` with optional psi-form ``xi1^2/xi2 + xi0``.

    ``vertex`` is the point where the denominator vanishes inside the piece
    region; there the function is extended by continuity with ``vertex_value``.
    """

    __slots__ = ("num", "den", "psi", "vertex", "vertex_value")
    degree = 3

    def __init__(self, num, den, psi=None, vertex=None, vertex_value=None):
        self.num = as_quad(num)
        self.den = den if isinstance(den, LinFn) else as_quad(den).linear_part()
        if self.den.is_zero():
            raise DivisionByZero("identically zero denominator")
        self.psi = psi
        self.vertex = tuple(q(c) for c in vertex) if vertex is not None else None
        self.vertex_value = q(vertex_value) if vertex_value is not None else None
        if psi is not None:
            check_psi_identity(self.num, self.den, psi)

    def __call__(self, x, y=None):
        if y is None:
            x, y = x
        d = self.den(x, y)
        if d == 0:
            if self.vertex is not None and (q(x), q(y)) == self.vertex:
                return self.vertex_value
            raise DivisionByZero(f"denominator vanishes at ({fmt(x)}, {fmt(y)})")
        return self.num(x, y) / d

    def grad(self, x, y=None):
        if y is None:
            x, y = x
        d = self.den(x, y)
        if d == 0:
            raise DivisionByZero("gradient undefined where the denominator vanishes")
        n = self.num(x, y)
        nx, ny = self.num.grad(x, y)
        return ((nx * d - n * self.den.cx) / (d * d), (ny * d - n * self.den.cy) / (d * d))

    def canonical(self) -> "RationalFn":
        """Scale num and den by one positive factor so den is a primitive integer form."""
        k = primitive(self.den.coeffs)
        nz = next(i for i, c in enumerate(self.den.coeffs) if c)
        factor = k[nz] / self.den.coeffs[nz]
        return RationalFn(self.num * factor, self.den * factor, self.psi, self.vertex, self.vertex_value)

    def key(self):
        c = self.canonical()
        return ("rat",) + c.num.coeffs + c.den.coeffs

    def __eq__(self, other):
        return isinstance(other, RationalFn) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        c = self.canonical()
        return f"RationalFn(({c.num.pretty()})/({c.den.pretty()}))"

    def pretty(self, vars=("x", "y")):
        c = self.canonical()
        return f"({c.num.pretty(vars)})/({c.den.pretty(vars)})"


def check_psi_identity(num: QuadFn, den: LinFn, psi) -> None:
    """Assert ``num/den == xi1^2/xi2 + xi0`` by cross-multiplication.

    With ``den = lam*xi2`` the identity reads ``num == lam*(xi1^2 + xi0*xi2)``.
    """
    xi1, xi2, xi0 = psi
    ratio = None
    for a, b in zip(den.coeffs, xi2.coeffs):
        if b:
            ratio = a / b
            break
    if ratio is None or any(a != ratio * b for a, b in zip(den.coeffs, xi2.coeffs)):
        raise NoPsiForm("xi2 is not proportional to the denominator")
    rhs = (xi1 * xi1 + xi0 * xi2) * ratio
    if num.coeffs != rhs.coeffs:
        raise NoPsiForm("psi-form does not reproduce the numerator")


def _point_on_line(f: LinFn):
    if f.cy:
        return (ZERO, -f.c0 / f.cy)
    return (-f.c0 / f.cx, ZERO)


def normalize_rational(r: RationalFn) -> RationalFn:
    """Attach a psi-form ``xi1^2/xi2 + xi0`` with rational linear ``xi``.

    On the line ``den = 0`` the numerator must be ``alpha*(tau - tau0)^2`` in
    an affine parameter ``tau``.  Then ``xi1 = tau - tau0``, ``xi2 = den/alpha``
    and ``xi0 = (num - alpha*xi1^2)/den``, which is affine.  ``xi2`` is scaled
    rather than taking a square root of ``alpha``.
    """
    den, num = r.den, r.num
    p0 = _point_on_line(den)
    w = (-den.cy, den.cx)
    k2, k1, k0 = num.along(p0, w)
    if k2 == 0:
        if k1 == 0 and k0 == 0:
            # numerator divisible by the denominator: xi1 = 0
            xi0 = _divide_exact(num, den)
            return RationalFn(num, den, (LinFn(), den, xi0), r.vertex, r.vertex_value)
        raise NoPsiForm("numerator is not a perfect square on the pole line")
    if k1 * k1 != 4 * k2 * k0:
        raise NoPsiForm("numerator is not a perfect square on the pole line")
    tau0 = -k1 / (2 * k2)
    ww = w[0] * w[0] + w[1] * w[1]
    # tau(x, y) = w.(p - p0)/|w|^2 restricts to the parameter on the line
    xi1 = LinFn(w[0] / ww, w[1] / ww, -(w[0] * p0[0] + w[1] * p0[1]) / ww - tau0)
    xi0 = _divide_exact(num - (xi1 * xi1) * k2, den)
    return RationalFn(num, den, (xi1, den / k2, xi0), r.vertex, r.vertex_value)


def _divide_exact(n: QuadFn, d: LinFn) -> LinFn:
    """Quotient of a quadratic by an affine form; raises unless exact."""
    a, b, c = d.coeffs
    # solve for l = (u, v, w) with l*d == n: 6 equations, pick a nonzero pivot
    if a:
        u = n.qxx / a
        v = (n.qxy - u * b) / a
        w = (n.qx - u * c) / a
    else:
        v = n.qyy / b
        u = n.qxy / b
        w = (n.qy - v * c) / b
    out = LinFn(u, v, w)
    if (out * d).coeffs != n.coeffs:
        raise NoPsiForm("quadratic not divisible by the affine form")
    return out


def evaluate(f, p):
    """Exact value of a LinFn, QuadFn or RationalFn at ``p``."""
    return f(q(p[0]), q(p[1]))
