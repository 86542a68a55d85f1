"""Input PLQ functions, piecewise results, and their JSON form."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .core import LinFn, QuadFn, RationalFn, Surd, fmt, parse_scalar, q, simplify
from .errors import InvariantError, OutsideDomain, ParseError, UnsupportedField
from .geometry import ParabolicInequality, ParabolicRegion, Polytope, hull_and_orient, validate_subdivision

STAGES = ("envelope", "piece_conjugate", "max_conjugate")


@dataclass
class PLQFunction:
    """``min_i q_i + indicator(P_i)`` over a polyhedral subdivision."""

    pieces: list
    field_D: int = 0

    def __post_init__(self):
        self.pieces = [(q_ if isinstance(q_, QuadFn) else q_.to_quad(), P) for q_, P in self.pieces]
        for _, P in self.pieces:
            if P.dim != 2:
                raise ParseError("every input piece must be a 2-D polygon")
        validate_subdivision([P for _, P in self.pieces])

    @property
    def vertices(self):
        seen = {}
        for _, P in self.pieces:
            for v in P.vertices:
                seen.setdefault(v, None)
        return list(seen)

    def __call__(self, x, y=None):
        """Exact value; +inf outside the domain is reported as None."""
        if y is None:
            x, y = x
        vals = [g(q(x), q(y)) for g, P in self.pieces if P.contains((x, y))]
        return min(vals) if vals else None


@dataclass
class PiecewiseFn:
    """List of ``(fn, region)`` pairs.

    Several cells may carry the same function; :meth:`functions` lists the
    distinct ones.  ``kind`` is ``"polyhedral"`` (Polytope regions) or
    ``"parabolic"`` (ParabolicRegion regions).
    """

    pieces: list
    kind: str = "parabolic"
    stage: str = "max_conjugate"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("polyhedral", "parabolic"):
            raise ValueError(f"bad kind {self.kind!r}")
        if self.stage not in STAGES:
            raise ValueError(f"bad stage {self.stage!r}")
        want = Polytope if self.kind == "polyhedral" else ParabolicRegion
        for fn, R in self.pieces:
            if not isinstance(R, want):
                raise InvariantError(f"{self.kind} piecewise function with a {type(R).__name__} region")
            if self.stage != "envelope" and isinstance(fn, RationalFn):
                raise InvariantError("fractional form in a conjugate")

    def __len__(self):
        return len(self.pieces)

    def functions(self):
        out = {}
        for fn, _ in self.pieces:
            out.setdefault(fn_key(fn), fn)
        return list(out.values())

    @property
    def piece_count(self):
        return len(self.functions())

    def function_keys(self):
        return {fn_key(fn) for fn, _ in self.pieces}

    def containing(self, p):
        return [(fn, R) for fn, R in self.pieces if R.contains(p)]

    def __call__(self, x, y=None):
        if y is None:
            x, y = x
        return eval_piecewise(self, (x, y))


def fn_key(fn):
    if isinstance(fn, (LinFn, QuadFn)):
        return simplify(fn).key()
    return fn.key()


def eval_piecewise(F: PiecewiseFn, p):
    """Value at p; every region containing p must give the same value."""
    p = (q(p[0]), q(p[1]))
    vals = {fn(*p) for fn, _ in F.containing(p)}
    if not vals:
        raise OutsideDomain(f"({fmt(p[0])}, {fmt(p[1])}) lies in no region")
    if len(vals) > 1:
        raise InvariantError(f"pieces disagree at ({fmt(p[0])}, {fmt(p[1])}): {sorted(vals)}")
    return vals.pop()


# ---------------------------------------------------------------------------
# JSON

_QKEYS = ("xx", "xy", "yy", "x", "y", "c")
_LKEYS = ("x", "y", "c")
_RKEYS = ("a", "b", "c", "d", "e", "f")


def _scalar(v, D):
    try:
        s = parse_scalar(v)
    except ParseError:
        raise
    if isinstance(s, Surd):
        if s.D != D:
            raise UnsupportedField(f"{v!r} is not in Q(sqrt {D})")
        raise UnsupportedField(
            f"irrational coefficient {v!r}: only rational instances can be conjugated exactly"
        )
    return s


def plq_from_dict(data) -> PLQFunction:
    if not isinstance(data, dict) or "pieces" not in data:
        raise ParseError("expected an object with a 'pieces' list")
    D = data.get("field_D", 0)
    if not isinstance(D, int) or D < 0:
        raise ParseError("field_D must be a nonnegative integer")
    pieces = []
    for k, pc in enumerate(data["pieces"]):
        try:
            qd = pc["q"]
            coeffs = [_scalar(qd.get(key, "0"), D) for key in _QKEYS]
            verts = [(_scalar(x, D), _scalar(y, D)) for x, y in pc["vertices"]]
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, (ParseError, UnsupportedField)):
                raise
            raise ParseError(f"piece {k}: malformed entry ({exc})") from exc
        P = hull_and_orient(verts)
        if len(P.vertices) != len(set(verts)):
            raise ParseError(f"piece {k}: vertices are not in convex position")
        pieces.append((QuadFn(*coeffs), P))
    return PLQFunction(pieces, D)


def plq_to_dict(f: PLQFunction):
    return {
        "field_D": f.field_D,
        "pieces": [
            {
                "q": dict(zip(_QKEYS, (fmt(c) for c in g.coeffs))),
                "vertices": [[fmt(x), fmt(y)] for x, y in P.vertices],
            }
            for g, P in f.pieces
        ],
    }


def load(path) -> PLQFunction:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return plq_from_dict(data)


def _fn_to_dict(fn):
    fn = simplify(fn) if isinstance(fn, (LinFn, QuadFn)) else fn
    if isinstance(fn, LinFn):
        return {"type": "linear", "coeffs": dict(zip(_LKEYS, map(fmt, fn.coeffs)))}
    if isinstance(fn, QuadFn):
        return {"type": "quadratic", "coeffs": dict(zip(_QKEYS, map(fmt, fn.coeffs)))}
    c = fn.canonical()
    out = {
        "type": "rational",
        "num": dict(zip(_QKEYS, map(fmt, c.num.coeffs))),
        "den": dict(zip(_LKEYS, map(fmt, c.den.coeffs))),
    }
    if c.vertex is not None:
        out["vertex"] = [fmt(c.vertex[0]), fmt(c.vertex[1])]
        out["vertex_value"] = fmt(c.vertex_value)
    return out


def _fn_from_dict(d):
    t = d.get("type")
    if t == "linear":
        return LinFn(*(parse_scalar(d["coeffs"][k]) for k in _LKEYS))
    if t == "quadratic":
        return simplify(QuadFn(*(parse_scalar(d["coeffs"][k]) for k in _QKEYS)))
    if t == "rational":
        num = QuadFn(*(parse_scalar(d["num"][k]) for k in _QKEYS))
        den = LinFn(*(parse_scalar(d["den"][k]) for k in _LKEYS))
        v = d.get("vertex")
        return RationalFn(
            num,
            den,
            vertex=[parse_scalar(c) for c in v] if v else None,
            vertex_value=parse_scalar(d["vertex_value"]) if v else None,
        )
    raise ParseError(f"unknown function type {t!r}")


def _ineq_to_dict(h: ParabolicInequality):
    out = dict(zip(_RKEYS, map(fmt, h.coeffs)))
    out["rel"] = h.rel
    return out


def piecewise_to_dict(F: PiecewiseFn):
    ids = {}
    entries = []
    for fn, R in F.pieces:
        pid = ids.setdefault(fn_key(fn), len(ids))
        entry = {"piece_id": pid, "fn": _fn_to_dict(fn)}
        if isinstance(R, Polytope):
            entry["vertices"] = [[fmt(x), fmt(y)] for x, y in R.vertices]
            R = R.to_region()
        entry["region"] = [_ineq_to_dict(h) for h in R.inequalities]
        if R.witness is not None:
            entry["witness"] = [fmt(R.witness[0]), fmt(R.witness[1])]
        entries.append(entry)
    return {"kind": F.kind, "stage": F.stage, "piece_count": len(ids), "pieces": entries}


def piecewise_from_dict(data) -> PiecewiseFn:
    try:
        return _piecewise_from_dict(data)
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ParseError(f"malformed piecewise function: {exc}") from exc


def _piecewise_from_dict(data) -> PiecewiseFn:
    kind = data.get("kind", "parabolic")
    pieces = []
    for e in data["pieces"]:
        fn = _fn_from_dict(e["fn"])
        if kind == "polyhedral":
            R = Polytope([(parse_scalar(x), parse_scalar(y)) for x, y in e["vertices"]])
        else:
            ineqs = [
                ParabolicInequality(*(parse_scalar(h[k]) for k in _RKEYS), rel=h.get("rel", "le"))
                for h in e["region"]
            ]
            w = e.get("witness")
            R = ParabolicRegion(ineqs, witness=[parse_scalar(c) for c in w] if w else None)
        pieces.append((fn, R))
    return PiecewiseFn(pieces, kind=kind, stage=data.get("stage", "max_conjugate"))


def dumps(obj) -> str:
    if isinstance(obj, PLQFunction):
        data = plq_to_dict(obj)
    else:
        data = piecewise_to_dict(obj)
    return json.dumps(data, indent=1, sort_keys=False) + "\n"


def save(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))


def load_piecewise(path) -> PiecewiseFn:
    try:
        with open(path, encoding="utf-8") as fh:
            return piecewise_from_dict(json.load(fh))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
