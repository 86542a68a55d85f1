"""Command-line interface.

Exit codes: 0 ok, 1 verification failure, 2 input error, 3 internal invariant
violation.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import random
import sys
import time

import numpy as np
from gmpy2 import mpq

from . import plqmodel
from .core import QuadFn, parse_scalar
from .envelope import envelope_piece
from .errors import InputError, InvariantError, ParseError, PLQError
from .geometry import hull_and_orient
from .maxconj import conjugate_plq
from .plqmodel import PiecewiseFn, PLQFunction
from .verify import (
    OracleConfig,
    check_conjugate,
    denominator_vertex_check,
    parabolic_law,
    tiling_check,
    zeta_identity_fuzz,
)

log = logging.getLogger("plqconj")


def _scalar_arg(text):
    try:
        return parse_scalar(text)
    except ParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def square_family(n: int) -> PLQFunction:
    """xy on [-1, 1]^2 cut into n^2 congruent squares."""
    h = mpq(2, n)
    pieces = []
    for i in range(n):
        for j in range(n):
            x, y = -1 + i * h, -1 + j * h
            pieces.append((QuadFn(0, 1, 0), hull_and_orient([(x, y), (x + h, y), (x + h, y + h), (x, y + h)])))
    return PLQFunction(pieces)


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def _write(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------


def cmd_envelope(args):
    f = plqmodel.load(args.inp)
    pieces = []
    for i, (g, P) in enumerate(f.pieces):
        try:
            E = envelope_piece(g, P)
        except PLQError as exc:
            raise type(exc)(f"piece {i}: {exc}") from exc
        pieces += E.pieces
    E = PiecewiseFn(pieces, kind="polyhedral", stage="envelope")
    _write(plqmodel.dumps(E), args.out)
    return 0


def cmd_conjugate(args):
    f = plqmodel.load(args.inp)
    F = conjugate_plq(f)
    _write(plqmodel.dumps(F), args.out)
    print(f"{F.piece_count} pieces on {len(F)} cells", file=sys.stderr)
    for note in F.meta.get("notes", []):
        print(f"note: {note}", file=sys.stderr)
    return 0


def cmd_verify(args):
    f = plqmodel.load(args.inp)
    if args.conj:
        F = plqmodel.load_piecewise(args.conj)
    else:
        F = conjugate_plq(f)
    cfg = OracleConfig(h=args.grid, box=tuple(args.box), samples=args.samples, C=args.tol, seed=args.seed)
    rep = check_conjugate(f, F, cfg)
    rep.checks["parabolic_law"] = {"passed": parabolic_law(F, f)}
    ok, n, bad = tiling_check(F, random.Random(args.seed), box=tuple(args.box))
    rep.checks["tiling"] = {"passed": ok, "detail": f"{n} samples, {bad} uncovered or disagreeing"}
    if args.structural:
        zok, acc, rej = zeta_identity_fuzz(1000, args.seed)
        rep.checks["zeta_fuzz"] = {"passed": zok, "detail": f"{acc} accepted, {rej} rejected draws"}
        rep.checks["denominator_vertex"] = {"passed": denominator_vertex_check(500, args.seed)}
    rep.passed = all(v["passed"] for v in rep.checks.values())
    print(rep.text())
    if args.out:
        _write(json.dumps(rep.summary(), indent=1) + "\n", args.out)
    return 0 if rep.passed else 1


def _curve_points(coeffs, box, resolution):
    """Float points on the curve coeffs = 0 inside the box."""
    a, b, c, d, e, f = (float(v) for v in coeffs)
    x0, x1, y0, y1 = box
    if a == b == c == 0:
        if abs(e) >= abs(d):
            xs = np.linspace(x0, x1, resolution)
            return np.column_stack([xs, -(d * xs + f) / e])
        ys = np.linspace(y0, y1, resolution)
        return np.column_stack([-(e * ys + f) / d, ys])
    # quadratic part lam*(al*x + be*y)^2
    if a:
        al, be = a, b / 2
    else:
        al, be = b / 2, c
    lam = a / (al * al) if a else c / (be * be)
    nn = al * al + be * be
    cv = -d * be + e * al
    if cv == 0:
        return np.empty((0, 2))
    R = math.hypot(*[abs(v) for v in box]) * math.sqrt(nn) * 1.5
    u = np.linspace(-R, R, resolution * 8)
    xu, yu = u * al / nn, u * be / nn
    v = -(lam * u * u + d * xu + e * yu + f) / cv
    return np.column_stack([xu - v * be, yu + v * al])


def export_rows(F: PiecewiseFn, box, resolution):
    rows = []
    curve_id = 0
    ids = {}
    for fn, R in F.pieces:
        pid = ids.setdefault(plqmodel.fn_key(fn), len(ids))
        ineqs = list(R.inequalities)
        for k, h in enumerate(ineqs):
            P = _curve_points(h.coeffs, box, resolution)
            if not len(P):
                continue
            ok = (P[:, 0] >= box[0]) & (P[:, 0] <= box[1]) & (P[:, 1] >= box[2]) & (P[:, 1] <= box[3])
            for j, g in enumerate(ineqs):
                if j == k:
                    continue
                ga, gb, gc, gd, ge, gf = (float(v) for v in g.coeffs)
                x, y = P[:, 0], P[:, 1]
                val = ga * x * x + gb * x * y + gc * y * y + gd * x + ge * y + gf
                ok &= val <= 1e-9 * (1 + np.abs(x) + np.abs(y)) ** 2
            run = []
            for p, good in zip(P, ok):
                if good:
                    run.append(p)
                elif run:
                    rows += [(curve_id, pid, float(x), float(y)) for x, y in run]
                    curve_id += 1
                    run = []
            if run:
                rows += [(curve_id, pid, float(x), float(y)) for x, y in run]
                curve_id += 1
    return rows


def cmd_export_plot(args):
    data = _read_json(args.inp)
    if "kind" in data:
        F = plqmodel.piecewise_from_dict(data)
    else:
        F = conjugate_plq(plqmodel.plq_from_dict(data))
    rows = export_rows(F, tuple(float(b) for b in args.box), args.resolution)
    out = sys.stdout if args.out in (None, "-") else open(args.out, "w", newline="", encoding="utf-8")
    try:
        w = csv.writer(out)
        w.writerow(["curve_id", "piece_id", "x", "y"])
        for r in rows:
            w.writerow([r[0], r[1], repr(r[2]), repr(r[3])])
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def bench_table(rows, step3b, total) -> str:
    """Rows are steps, columns are input pieces plus Total and Avg."""
    k = len(rows)
    head = ["Step"] + [str(r["piece"] + 1) for r in rows] + ["Total", "Avg"]
    body = [["convex pieces"] + [str(r["envelope_pieces"]) for r in rows] + [str(sum(r["envelope_pieces"] for r in rows)), ""]]
    per_piece = 0.0
    for label, col in (("Step 1", "step1"), ("Step 2", "step2"), ("Step 3a", "step3a")):
        vals = [r[col] for r in rows]
        per_piece += sum(vals) / k
        body.append([label] + [f"{v:.4f}" for v in vals] + [f"{sum(vals):.4f}", f"{sum(vals) / k:.4f}"])
    pad = [""] * k
    body.append(["Average per piece"] + pad + ["", f"{per_piece:.4f}"])
    body.append(["Step 3b"] + pad + [f"{step3b:.4f}", ""])
    body.append(["Total"] + pad + [f"{total:.4f}", ""])
    widths = [max(len(r[c]) for r in [head] + body) for c in range(len(head))]
    fmt_row = lambda r: "  ".join(x.ljust(w) if c == 0 else x.rjust(w) for c, (x, w) in enumerate(zip(r, widths)))
    return "\n".join([fmt_row(head)] + [fmt_row(r) for r in body])


def cmd_bench(args):
    if args.family != "square":
        raise InputError(f"unknown benchmark family {args.family!r}")
    for n in args.n or [1, 2, 3, 4]:
        f = square_family(n)
        t0 = time.perf_counter()
        F = conjugate_plq(f)
        total = time.perf_counter() - t0
        print(f"family=square n={n}: {len(f.pieces)} input pieces, {F.piece_count} conjugate pieces")
        print(bench_table(F.meta["timings"], F.meta["step3b"], total))
        print()
    return 0


# ---------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="plqconj", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True)

    def io(sp, need_out=True):
        sp.add_argument("--in", dest="inp", required=True, metavar="PATH")
        sp.add_argument("--out", metavar="PATH", default=None if not need_out else "-")

    io(sub.add_parser("envelope", help="write the convex envelope of every piece"))
    io(sub.add_parser("conjugate", help="write the conjugate"))

    v = sub.add_parser("verify", help="check a conjugate against the brute-force oracle and invariants")
    io(v, need_out=False)
    v.add_argument("--conj", metavar="PATH", help="conjugate file to check (default: compute it)")
    v.add_argument("--grid", type=_scalar_arg, default=mpq(1, 50), metavar="H")
    v.add_argument("--tol", type=_scalar_arg, default=mpq(4), metavar="C")
    v.add_argument("--samples", type=int, default=200, metavar="K")
    v.add_argument("--seed", type=int, default=0, metavar="S")
    v.add_argument("--box", type=float, nargs=4, default=[-30, 30, -30, 30], metavar=("XMIN", "XMAX", "YMIN", "YMAX"))
    v.add_argument("--structural", action="store_true", help="also run the zeta and denominator fuzzers")

    e = sub.add_parser("export-plot", help="write region boundaries as CSV polylines")
    io(e)
    e.add_argument("--box", type=float, nargs=4, default=[-10, 10, -10, 10], metavar=("XMIN", "XMAX", "YMIN", "YMAX"))
    e.add_argument("--resolution", type=int, default=200, metavar="R")

    b = sub.add_parser("bench", help="per-stage timings on a scalable family")
    b.add_argument("--family", default="square")
    b.add_argument("--n", type=int, nargs="*", metavar="N")
    return p


COMMANDS = {
    "envelope": cmd_envelope,
    "conjugate": cmd_conjugate,
    "verify": cmd_verify,
    "export-plot": cmd_export_plot,
    "bench": cmd_bench,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return COMMANDS[args.cmd](args)
    except (InputError, OSError) as exc:
        where = getattr(args, "inp", None)
        print(f"input error{f' in {where}' if where else ''}: {exc}", file=sys.stderr)
        return 2
    except (InvariantError, PLQError, AssertionError) as exc:
        print(f"internal invariant violated: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
