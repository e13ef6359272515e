"""Command-line front end.

Subcommands parse variety and class descriptions from JSON files and flag
strings, dispatch to the library, and emit JSON, OFF or CSV artifacts.
Domain errors exit with status 2 and a machine-readable JSON object on
stderr; I/O and parse errors exit with status 1.  Output is byte-identical
for identical inputs, tolerance, mode and seed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from math import factorial

from . import bundle as bd
from . import measure as ms
from . import polytope as pt
from . import toric as tc
from . import verify as vf
from .errors import NokError
from .rational import format_rational, parse_rational


def _parse_pair(text):
    parts = [p.strip() for p in str(text).split(",")]
    if len(parts) != 2:
        raise ValueError(f"expected two comma-separated rationals, got {text!r}")
    return parse_rational(parts[0]), parse_rational(parts[1])


def _parse_omega(text):
    return bd.FlagPermutation([int(p) for p in str(text).split(",")])


def _load_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _emit(text, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(data):
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def _num_meta(value, exact=True):
    if isinstance(value, Fraction):
        return format_rational(value) if exact else float(value)
    return value


def _load_hn(args):
    data = _load_json(args.hn)
    hn = bd.HNData.from_json_dict(data["hn"] if "hn" in data else data)
    omega = None
    if getattr(args, "omega", None):
        omega = _parse_omega(args.omega)
    elif isinstance(data, dict) and data.get("omega"):
        omega = bd.FlagPermutation(data["omega"])
    return data, hn, omega


def _divisor_from(args, data):
    if getattr(args, "divisor", None):
        x, y = _parse_pair(args.divisor)
    elif isinstance(data, dict) and "divisor" in data:
        x = parse_rational(data["divisor"]["x"])
        y = parse_rational(data["divisor"]["y"])
    else:
        raise ValueError("no divisor class given (flag --divisor or input file)")
    return bd.DivisorClass(x, y)


def _curve_from(args, data):
    if getattr(args, "curve", None):
        c1, c2 = _parse_pair(args.curve)
    elif isinstance(data, dict) and "curve" in data:
        c1 = parse_rational(data["curve"]["c1"])
        c2 = parse_rational(data["curve"]["c2"])
    else:
        raise ValueError("no curve class given (flag --curve or input file)")
    return bd.CurveClass(c1, c2)


def _slice_csv(decomposition):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["slice_index", "nu1_lo", "nu1_hi", "volume"])
    for s in decomposition.all_slices:
        writer.writerow(
            [s.index, float(s.lo), float(s.hi), float(s.body.volume())]
        )
    return buf.getvalue()


def _body_payload(body, meta):
    return _dump({"body": body.to_json_dict(), "meta": meta})


def _write_body(body, meta, args, decomposition=None):
    fmt = getattr(args, "format", "json") or "json"
    if fmt == "json":
        _emit(_body_payload(body, meta), args.out)
    elif fmt == "off":
        _emit(pt.to_off(body), args.out)
    elif fmt == "csv":
        if decomposition is None:
            raise ValueError("csv output is only available for sliced bodies")
        _emit(_slice_csv(decomposition), args.out)
    else:
        raise ValueError(f"unknown format {fmt!r}")


def _divisor_meta(divisor, hn, body, label):
    exact = body.mode == pt.EXACT
    vol = factorial(hn.rank) * body.volume()
    return {
        "sigma": [format_rational(s) for s in hn.sigma],
        "d": format_rational(hn.degree),
        "a": format_rational(divisor.x),
        "t": format_rational(divisor.t),
        "classification": label,
        "volume": _num_meta(vol, exact),
    }


def cmd_body_div(args):
    data, hn, omega = _load_hn(args)
    divisor = _divisor_from(args, data)
    body = bd.body_of_divisor(divisor, hn, omega)
    dec = bd.body_slices(body, divisor, hn, omega)
    meta = _divisor_meta(divisor, hn, body, bd.classify_divisor(divisor, hn))
    _write_body(body, meta, args, dec)
    return 0


def cmd_body_curve(args):
    data, hn, omega = _load_hn(args)
    curve = _curve_from(args, data)
    mz = bd.movable_zariski(curve, hn)
    body = bd.body_of_curve(curve, hn, omega)
    dv = bd.dual_volume(curve, hn)
    exact = body.mode == pt.EXACT
    meta = {
        "sigma": [format_rational(s) for s in hn.sigma],
        "d": format_rational(hn.degree),
        "classification": bd.classify_curve(curve, hn),
        "u_star": _num_meta(mz.u_star, mz.exact),
        "lambda": _num_meta(mz.lam, mz.exact),
        "nonnef": mz.nonnef,
        "M": _num_meta(dv.value_exact, exact) if dv.value_exact is not None else dv.value,
        "volume": _num_meta(factorial(hn.rank) * body.volume(), exact),
    }
    divisor = bd.DivisorClass(1, -mz.u_star)
    dec = bd.body_slices(
        bd.body_of_divisor(divisor, hn, omega), divisor, hn, omega
    )
    _write_body(body, meta, args, dec)
    return 0


def cmd_blaschke(args):
    a = pt.Polytope.from_json_dict(_load_json(args.first))
    b = pt.Polytope.from_json_dict(_load_json(args.second))
    body = ms.blaschke_sum(a, b, args.tol)
    meta = {"tol": args.tol, "operands": [args.first, args.second]}
    _write_body(body, meta, args)
    return 0


def cmd_blaschke_closed(args):
    data, hn, omega = _load_hn(args)
    x1, y1 = _parse_pair(args.d1)
    x2, y2 = _parse_pair(args.d2)
    result = bd.blaschke_closed_form(
        bd.DivisorClass(x1, y1), bd.DivisorClass(x2, y2), hn, omega
    )
    meta = {
        "b": _num_meta(result.b, result.exact),
        "t3": format_rational(result.t3),
        "exact": result.exact,
    }
    _write_body(result.body, meta, args)
    return 0


def cmd_minkowski_solve(args):
    measure = ms.AreaMeasure.from_json_dict(_load_json(args.measure))
    result = ms.solve_minkowski(measure, args.tol)
    meta = {
        "iterations": result.iterations,
        "residual": result.residual,
        "restarts": result.restarts,
        "tol": args.tol,
    }
    _write_body(result.body, meta, args)
    return 0


def cmd_cones(args):
    _, hn, _ = _load_hn(args)
    table = bd.cones(hn)
    payload = table.to_json_dict()
    payload["sigma"] = [format_rational(s) for s in hn.sigma]
    payload["d"] = format_rational(hn.degree)
    _emit(_dump(payload), args.out)
    return 0


def cmd_classify(args):
    data, hn, _ = _load_hn(args)
    out = {}
    if getattr(args, "divisor", None) or (isinstance(data, dict) and "divisor" in data):
        divisor = _divisor_from(args, data)
        out["divisor"] = bd.classify_divisor(divisor, hn)
    if getattr(args, "curve", None) or (isinstance(data, dict) and "curve" in data):
        curve = _curve_from(args, data)
        out["curve"] = bd.classify_curve(curve, hn)
    if not out:
        raise ValueError("nothing to classify: give --divisor and/or --curve")
    _emit(_dump(out), args.out)
    return 0


def cmd_dual_volume(args):
    data, hn, _ = _load_hn(args)
    curve = _curve_from(args, data)
    dv = bd.dual_volume(curve, hn)
    payload = {
        "M": format_rational(dv.value_exact) if dv.value_exact is not None else dv.value,
        "M_float": dv.value,
        "u_star": format_rational(Fraction(dv.u_star)),
        "on_nef_piece": dv.on_nef_piece,
    }
    _emit(_dump(payload), args.out)
    return 0


def cmd_toric_body(args):
    data = _load_json(args.input)
    fan = tc.FanData.from_json_dict(data)
    intersections = [parse_rational(v) for v in data["intersections"]]
    body = tc.toric_curve_polytope(fan, intersections, args.tol)
    meta = {
        "rays": [list(u) for u in fan.rays],
        "intersections": [format_rational(v) for v in intersections],
        "movable": tc.toric_movability(fan, intersections),
    }
    _write_body(body, meta, args)
    return 0


def cmd_toric_blaschke(args):
    data = _load_json(args.input)
    fan = tc.FanData.from_json_dict(data)
    alpha = [parse_rational(v) for v in data["alpha"]]
    beta = [parse_rational(v) for v in data["beta"]]
    report = tc.toric_blaschke_check(fan, alpha, beta, args.tol)
    payload = {
        "ok": report.ok,
        "distance": report.distance,
        "diameter": report.diameter,
        "tol": report.tol,
        "facet_residuals": {
            ",".join(map(str, k)): v for k, v in sorted(report.facet_residuals.items())
        },
    }
    _emit(_dump(payload), args.out)
    return 0 if report.ok else 2


def cmd_verify(args):
    report = vf.run_suite(
        args.suite, samples=args.samples, tol=args.tol, seed=args.seed, jobs=args.jobs
    )
    text = "\n".join(report.lines()) + "\n"
    _emit(text, args.out)
    if args.out:
        sys.stdout.write(text)
    return 0 if report.ok else 2


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nok",
        description=(
            "Newton-Okounkov bodies of divisor and curve classes on projective "
            "bundles over curves, Blaschke sums, and polytope verification suites."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, fmt=False):
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--tol", type=float, default=1e-9, help="tolerance")
        if fmt:
            p.add_argument(
                "--format", choices=("json", "off", "csv"), default="json",
                help="output format (off only for dim <= 3; csv is the slice table)",
            )

    p = sub.add_parser("body-div", help="body of a divisor class")
    p.add_argument("--hn", required=True, help="JSON file with Harder-Narasimhan data")
    p.add_argument("--divisor", help='divisor class "x,y" (class x*chi + y*f)')
    p.add_argument("--omega", help="flag permutation, e.g. 1,2,3")
    add_common(p, fmt=True)
    p.set_defaults(func=cmd_body_div)

    p = sub.add_parser("body-curve", help="body of a movable curve class")
    p.add_argument("--hn", required=True)
    p.add_argument("--curve", help='curve class "c1,c2"')
    p.add_argument("--omega")
    add_common(p, fmt=True)
    p.set_defaults(func=cmd_body_curve)

    p = sub.add_parser("blaschke", help="Blaschke sum of two polytopes")
    p.add_argument("--first", required=True, help="polytope JSON")
    p.add_argument("--second", required=True, help="polytope JSON")
    add_common(p, fmt=True)
    p.set_defaults(func=cmd_blaschke)

    p = sub.add_parser("blaschke-closed", help="closed-form Blaschke sum of nef bodies")
    p.add_argument("--hn", required=True)
    p.add_argument("--d1", required=True, help='first divisor "x,y"')
    p.add_argument("--d2", required=True, help='second divisor "x,y"')
    p.add_argument("--omega")
    add_common(p, fmt=True)
    p.set_defaults(func=cmd_blaschke_closed)

    p = sub.add_parser("minkowski-solve", help="reconstruct a polytope from an area measure")
    p.add_argument("--measure", required=True, help="area measure JSON")
    add_common(p, fmt=True)
    p.set_defaults(func=cmd_minkowski_solve)

    p = sub.add_parser("cones", help="positivity cone table")
    p.add_argument("--hn", required=True)
    add_common(p)
    p.set_defaults(func=cmd_cones)

    p = sub.add_parser("classify", help="positivity labels of classes")
    p.add_argument("--hn", required=True)
    p.add_argument("--divisor")
    p.add_argument("--curve")
    add_common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("dual-volume", help="dual volume of a movable curve class")
    p.add_argument("--hn", required=True)
    p.add_argument("--curve")
    add_common(p)
    p.set_defaults(func=cmd_dual_volume)

    p = sub.add_parser("toric-body", help="polytope of a toric curve class")
    p.add_argument("--input", required=True, help='JSON {"rays": ..., "intersections": ...}')
    add_common(p, fmt=True)
    p.set_defaults(func=cmd_toric_body)

    p = sub.add_parser("toric-blaschke", help="toric Blaschke equality check")
    p.add_argument("--input", required=True, help='JSON {"rays": ..., "alpha": ..., "beta": ...}')
    add_common(p)
    p.set_defaults(func=cmd_toric_blaschke)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", help=f"one of: {', '.join(sorted(vf.SUITES))}")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NokError as err:
        sys.stderr.write(json.dumps(err.to_json(), sort_keys=True) + "\n")
        return 2
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as err:
        payload = {"error": type(err).__name__, "detail": str(err)}
        sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
