"""Command-line front end.

Usage::

    poincare-convex eigen --d 3 --n 3
    poincare-convex coeffs --d 3 --l 1 --m 2
    poincare-convex summary body.json
    poincare-convex check body.json --theorems theorem1,theorem2 --format csv
    poincare-convex sweep family.json

Exit codes: 0 all inequalities hold, 1 some inequality fails, 2 usage,
parse or validation error.
"""
from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import math
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

from . import convex_body as cb
from . import gallery
from . import inequalities as ineq
from .harmonic_transform import DEFAULT_BAND_LIMIT
from .spectral_core import (
    EigenSystem,
    PreconditionError,
    closed_form_coeff1,
    closed_form_coeff2,
    eigenvalue,
    expand_C,
    general_m_coeff1,
    general_m_coeff2,
)

THEOREMS = ("poincare", "m2", "gap", "eg4", "eg5", "theorem1", "theorem2", "theorem3",
            "general_m", "mixed")
BASE_COLUMNS = ["name", "lhs", "rhs", "deficit", "holds", "equality", "convexity_flag"]


class UsageError(Exception):
    pass


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


_FLOAT_MARK = re.compile(r'"\\u0000([^"\\]*)\\u0000"')


def _mark_floats(obj):
    if isinstance(obj, float):
        if math.isfinite(obj):
            text = f"{obj:.17g}"
            if not any(c in text for c in ".e"):
                text += ".0"
        else:
            text = "NaN" if math.isnan(obj) else ("Infinity" if obj > 0 else "-Infinity")
        return f"\0{text}\0"
    if isinstance(obj, dict):
        return {k: _mark_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_mark_floats(v) for v in obj]
    return obj


def _dumps(obj) -> str:
    """JSON text with every float written to 17 significant digits."""
    text = json.dumps(_mark_floats(obj), indent=2)
    return _FLOAT_MARK.sub(lambda m: m.group(1), text) + "\n"


def _bool_arg(text: str) -> bool:
    low = text.lower()
    if low in ("true", "1", "yes"):
        return True
    if low in ("false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected true/false, got {text!r}")


def _write(text: str, path):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def reports_to_rows(reports, prefix=()):
    """CSV header and rows for a list of reports (related reports flattened)."""
    flat = [r for rep in reports for r in rep.flatten()]
    term_keys = sorted({k for r in flat for k in r.terms})
    header = list(prefix) + BASE_COLUMNS + [f"term.{k}" for k in term_keys]
    rows = [
        [r.name, r.lhs, r.rhs, r.deficit, r.holds, r.equality, r.convexity_flag]
        + [r.terms.get(k, "") for k in term_keys]
        for r in flat
    ]
    return header, rows


# --------------------------------------------------------------------------
# eigen / coeffs


def cmd_eigen(args) -> int:
    if args.d < 2:
        raise UsageError(f"--d must be >= 2, got {args.d}")
    rows = [
        [n, eigenvalue(n, args.d), "-" if n == 0 else eigenvalue(n, args.d) - (args.d - 1)]
        for n in range(args.n + 1)
    ]
    if args.format == "json":
        _write(_dumps([dict(zip(("n", "lambda", "gamma"), r)) for r in rows]), args.output)
    else:
        _write(_csv_text(["n", "lambda", "gamma"], rows), args.output)
    return 0


def cmd_coeffs(args) -> int:
    if args.d < 2:
        raise UsageError(f"--d must be >= 2, got {args.d}")
    if args.l < 1 or args.m < args.l:
        raise UsageError(f"need 1 <= l <= m, got l={args.l}, m={args.m}")
    eigs = EigenSystem.sphere(args.d, args.m)
    poly = expand_C(args.l, args.m, eigs)
    out = {"d": args.d, "l": args.l, "m": args.m, "coefficients": [int(c) for c in poly.coeffs]}
    if args.l == 1 and args.m >= 2:
        out["coeff1"] = {"signed": int(general_m_coeff1(args.m, eigs)),
                         "closed_form": int(closed_form_coeff1(args.m, args.d))}
        out["coeff2"] = {"signed": int(general_m_coeff2(args.m, eigs)),
                         "closed_form": int(closed_form_coeff2(args.m, args.d))}
    if args.format == "json":
        _write(_dumps(out), args.output)
    else:
        rows = [[k, c] for k, c in enumerate(out["coefficients"])]
        text = _csv_text(["k", "c"], rows)
        for key in ("coeff1", "coeff2"):
            if key in out:
                text += f"# {key} signed={out[key]['signed']} closed_form={out[key]['closed_form']}\n"
        _write(text, args.output)
    return 0


# --------------------------------------------------------------------------
# bodies and checks


def _load_json(path):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _build(data, args) -> cb.SupportBody:
    spec = gallery.BodySpec.from_json(data, args.d)
    return gallery.build(spec, band_limit=args.band_limit, require_convex=args.require_convex)


def load_bodies(data, args):
    """A single body, or a pair given as {"K": spec, "L": spec}."""
    if isinstance(data, dict) and "K" in data and "L" in data:
        return _build(data["K"], args), _build(data["L"], args)
    return _build(data, args), None


def _parse_theorems(text: str) -> list:
    names = [t.strip() for t in text.split(",") if t.strip()]
    if names == ["all"]:
        return list(THEOREMS)
    bad = [t for t in names if t not in THEOREMS]
    if bad:
        raise UsageError(f"unknown theorem(s) {bad}; choose from {THEOREMS} or 'all'")
    return names


def run_theorems(K, L, theorems, ms, tol) -> list:
    reports = []
    bodies = [("", K)] if L is None else [("K:", K), ("L:", L)]
    for name in theorems:
        if name == "mixed":
            reports.append(ineq.theorem_mixed(K, K if L is None else L, tol))
            continue
        for tag, body in bodies:
            if name == "general_m":
                batch = [ineq.theorem_general_m(body, m, tol) for m in ms]
            else:
                batch = [ineq.SINGLE_BODY[name](body, tol)]
            for r in batch:
                reports.append(_retag(r, tag))
    return reports


def _retag(report, tag):
    if not tag:
        return report
    return replace(report, name=tag + report.name,
                   related=tuple(_retag(r, tag) for r in report.related))


def _emit_reports(reports, args, header_extra=None):
    if args.format == "json":
        payload = {"reports": [r.as_dict() for r in reports]}
        if header_extra:
            payload.update(header_extra)
        _write(_dumps(payload), args.output)
    else:
        header, rows = reports_to_rows(reports)
        _write(_csv_text(header, rows), args.output)


def _all_hold(reports) -> bool:
    return all(r.holds for rep in reports for r in rep.flatten())


def cmd_check(args) -> int:
    data = _load_json(args.body)
    K, L = load_bodies(data, args)
    reports = run_theorems(K, L, _parse_theorems(args.theorems), args.m, args.tol)
    _emit_reports(reports, args, {"input": data})
    return 0 if _all_hold(reports) else 1


def cmd_summary(args) -> int:
    data = _load_json(args.body)
    K, L = load_bodies(data, args)
    out = {}
    for tag, body in (("K", K), ("L", L)):
        if body is None:
            continue
        entry = cb.summary(body).as_dict()
        entry["convexity_flag"] = body.convexity_flag
        entry["tail_energy"] = body.tail_energy
        if body.certificate is not None:
            entry["min_curvature_radius"] = body.certificate.min_eigenvalue
        out[tag] = entry
    if L is not None:
        out["mixed_volume"] = cb.mixed_volume(K, L)
        out["delta2"] = cb.delta2(K, L)
    _write(_dumps(out if L is not None else out["K"]), args.output)
    return 0


# --------------------------------------------------------------------------
# sweeps


def set_path(obj, path: str, value):
    """Set ``obj[a][b]...`` for a dotted path; integer parts index lists."""
    parts = path.split(".")
    target = obj
    try:
        for p in parts[:-1]:
            target = target[int(p)] if isinstance(target, list) else target[p]
        last = parts[-1]
        if isinstance(target, list):
            target[int(last)] = value
        else:
            target[last] = value
    except (KeyError, IndexError, ValueError, TypeError):
        raise UsageError(f"parameter path {path!r} does not exist in the base spec") from None


def cmd_sweep(args) -> int:
    family = _load_json(args.family)
    try:
        base, path, values = family["base"], family["parameter"], list(family["values"])
    except (KeyError, TypeError):
        raise UsageError("sweep file needs 'base', 'parameter' and 'values'") from None
    theorems = _parse_theorems(",".join(family.get("theorems", ["theorem1", "theorem2", "theorem3"])))
    ms = family.get("m", args.m)

    def point(value):
        spec = copy.deepcopy(base)
        set_path(spec, path, value)
        K, L = load_bodies(spec, args)
        return run_theorems(K, L, theorems, ms, args.tol)

    with ThreadPoolExecutor(max_workers=max(args.jobs, 1)) as pool:
        results = list(pool.map(point, values))

    rows, keys = [], set()
    for reps in results:
        keys.update(k for rep in reps for r in rep.flatten() for k in r.terms)
    term_keys = sorted(keys)
    for idx, (value, reps) in enumerate(zip(values, results)):
        for r in (r for rep in reps for r in rep.flatten()):
            rows.append([idx, value, r.name, r.lhs, r.rhs, r.deficit, r.holds, r.equality,
                         r.convexity_flag] + [r.terms.get(k, "") for k in term_keys])
    header = ["index", "value"] + BASE_COLUMNS + [f"term.{k}" for k in term_keys]
    _write(_csv_text(header, rows), args.output)
    return 0 if all(_all_hold(r) for r in results) else 1


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="poincare-convex",
        description="Higher-order Poincare forms on spheres and Minkowski-type "
        "inequalities for convex bodies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, body=True):
        p.add_argument("--format", choices=("json", "csv"), default="json" if body else "csv")
        p.add_argument("--output", "-o", default=None, help="output file (default stdout)")
        if body:
            p.add_argument("--d", type=int, default=None, help="dimension if absent from the spec")
            p.add_argument("--band-limit", type=int, default=DEFAULT_BAND_LIMIT)
            p.add_argument("--tol", type=float, default=ineq.DEFAULT_TOL)
            p.add_argument("--require-convex", type=_bool_arg, default=False)
            p.add_argument("--m", type=int, nargs="+", default=[2, 3, 4],
                           help="orders for the general-m theorem")

    p = sub.add_parser("eigen", help="table of lambda_n and gamma_n")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    common(p, body=False)
    p.set_defaults(func=cmd_eigen)

    p = sub.add_parser("coeffs", help="coefficients of C_{l,m}")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    common(p, body=False)
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("summary", help="geometric summary of a body (or pair)")
    p.add_argument("body")
    common(p)
    p.set_defaults(func=cmd_summary)

    p = sub.add_parser("check", help="evaluate inequalities on a body (or pair)")
    p.add_argument("body")
    p.add_argument("--theorems", default="all")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sweep", help="deficits along a one-parameter family (CSV)")
    p.add_argument("family")
    p.add_argument("--jobs", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, gallery.SpecError, PreconditionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
