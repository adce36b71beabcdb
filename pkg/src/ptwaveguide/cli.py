"""Command-line interface.

Subcommands
    eval       evaluate F(k) at one point
    zeros      find and classify zeros in a rectangular window
    ladder     large-distance ladder predictions
    design     spectral-singularity parameters for a prescribed wavenumber
    scan       minimal-(gamma, ell) table over a wavenumber grid
    gap        forbidden-amplitude-gap certificate
    threshold  symmetry-breaking threshold curve gamma*(ell)
    atlas      spectral-singularity curves in the (ell, gamma) plane
    trace      zero trajectory under a driven parameter

Output is CSV (default) or JSON with 15-significant-digit numbers;
complex values are emitted as separate re/im columns.  Exit codes:
0 success, 2 usage error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys

from .model import ModelParams, eval_F
from .zerofinder import SearchRegion, find_zeros
from .asymptotics import ladder_count, ladder_predict
from .singularities import design_for_k, gap_certificate, min_scan
from .continuation import atlas, threshold_curve, trace_zero

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3


def _fmt(x) -> str:
    return "%.15g" % float(x)


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.strip().replace("i", "j").replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}")


def _parse_window(text: str):
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("window needs re0,re1,im0,im1")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad window: {text!r}")


def _parse_range(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("range needs a,b")
    try:
        return (float(parts[0]), float(parts[1]))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range: {text!r}")


def _emit(columns, rows, args, extra=None) -> None:
    """Write the result table as CSV or JSON to --out or stdout."""
    if args.format == "json":
        def conv(v):
            if isinstance(v, bool) or v is None:
                return v
            if isinstance(v, int):
                return v
            if isinstance(v, float):
                return float("%.15g" % v)
            return str(v)

        payload = {"columns": list(columns),
                   "rows": [[conv(v) for v in row] for row in rows]}
        if extra:
            payload.update(extra)
        text = json.dumps(payload, sort_keys=True) + "\n"
    else:
        buf = io.StringIO()
        buf.write(",".join(columns) + "\n")
        for row in rows:
            cells = []
            for v in row:
                if isinstance(v, bool):
                    cells.append("true" if v else "false")
                elif isinstance(v, (int, float)):
                    cells.append(_fmt(v))
                elif v is None:
                    cells.append("")
                else:
                    s = str(v)
                    cells.append('"%s"' % s.replace('"', '""')
                                 if "," in s or '"' in s else s)
            buf.write(",".join(cells) + "\n")
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _branch_rows(branches):
    rows = []
    for br in branches:
        flags = ";".join(str(f) for f in br.flags)
        for p in br.points:
            rows.append([p.ell, p.gamma, p.k.real, p.k.imag,
                         br.kind.value, br.origin, flags])
    return rows


_BRANCH_COLUMNS = ("ell", "gamma", "re_k", "im_k", "kind", "seed_id", "flags")


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_eval(args) -> int:
    fv = eval_F(args.k, ModelParams(args.gamma, args.ell))
    _emit(("k_re", "k_im", "f_re", "f_im", "df_re", "df_im", "log_scale"),
          [[args.k.real, args.k.imag, fv.f.real, fv.f.imag,
            fv.df.real, fv.df.imag, fv.log_scale]], args)
    return EXIT_OK


def _cmd_zeros(args) -> int:
    re0, re1, im0, im1 = args.window
    region = SearchRegion(re0, re1, im0, im1)
    recs = find_zeros(region, params=ModelParams(args.gamma, args.ell),
                      tol=args.tol)
    rows = [[r.k.real, r.k.imag, r.classification.value, r.multiplicity,
             r.residual, ";".join(str(f) for f in r.flags)] for r in recs]
    _emit(("k_re", "k_im", "class", "multiplicity", "residual", "flags"),
          rows, args)
    return EXIT_OK


def _cmd_ladder(args) -> int:
    params = ModelParams(args.gamma, args.ell)
    if args.n is not None:
        ns = [args.n]
    else:
        N = ladder_count(params)
        ns = list(range(-N, N + 1))
    rows = []
    for n in ns:
        pred = ladder_predict(n, params)
        rows.append([n, pred.k_pred.real, pred.k_pred.imag, pred.radius,
                     pred.admissible])
    _emit(("n", "k_pred_re", "k_pred_im", "radius", "admissible"), rows, args)
    return EXIT_OK


def _cmd_design(args) -> int:
    res = design_for_k(args.k.real)
    rows = [[p.k, p.gamma, p.ell, p.u, p.beta, p.n, p.residual]
            for p in res.points]
    _emit(("k", "gamma", "ell", "u", "beta", "n", "residual"), rows, args,
          extra={"range_exhausted": res.range_exhausted})
    return EXIT_OK


def _cmd_scan(args) -> int:
    rows = []
    for r in min_scan(args.kmax, args.dk):
        fam = list(r.ell_family[1:4]) + [None] * (3 - len(r.ell_family[1:4]))
        rows.append([r.k, r.gamma_min, r.ell_min] + fam)
    _emit(("k", "gamma_min", "ell_min", "ell_1", "ell_2", "ell_3"), rows, args)
    return EXIT_OK


def _cmd_gap(args) -> int:
    cert = gap_certificate()
    lo, hi = cert.gamma_gap
    _emit(("beta_lo", "beta_hi", "beta_star", "u_star",
           "gamma_lo", "gamma_hi", "grid_margin"),
          [[cert.beta_lo, cert.beta_hi, cert.beta_star, cert.u_star,
            lo, hi, cert.grid_margin]], args)
    return EXIT_OK


def _cmd_threshold(args) -> int:
    rng = args.range or (0.0, 3.0)
    br = threshold_curve(ell_max=rng[1], step=args.step or 0.05)
    _emit(_BRANCH_COLUMNS, _branch_rows([br]), args)
    return EXIT_OK


def _cmd_atlas(args) -> int:
    res = atlas(args.gamma_max, args.ell_max)
    extra = {"intersections": [[float("%.15g" % v[0]), float("%.15g" % v[1]),
                                v[2], v[3]] for v in res["intersections"]]}
    _emit(_BRANCH_COLUMNS, _branch_rows(res["branches"]), args, extra=extra)
    return EXIT_OK


def _cmd_trace(args) -> int:
    if args.range is None:
        raise ValueError("trace requires --range")
    params = ModelParams(args.gamma, args.ell)
    br = trace_zero(args.k, params, args.drive, args.range, step=args.step,
                    tol=args.tol)
    _emit(_BRANCH_COLUMNS, _branch_rows([br]), args,
          extra={"events": [[float("%.15g" % e[0]), e[1],
                             float("%.15g" % e[2].real),
                             float("%.15g" % e[2].imag)]
                            for e in br.events]})
    return EXIT_OK


_HANDLERS = {
    "eval": _cmd_eval,
    "zeros": _cmd_zeros,
    "ladder": _cmd_ladder,
    "design": _cmd_design,
    "scan": _cmd_scan,
    "gap": _cmd_gap,
    "threshold": _cmd_threshold,
    "atlas": _cmd_atlas,
    "trace": _cmd_trace,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ptwaveguide",
        description="Zeros and spectral singularities of a PT-symmetric "
                    "double-step waveguide.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, gamma=False, ell=False, k=False, window=False,
               scan=False, drive=False, bounds=False, n=False):
        p.add_argument("--tol", type=float, default=1e-10)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", default=None)
        if gamma:
            p.add_argument("--gamma", type=float, required=True)
        if ell:
            p.add_argument("--ell", type=float, required=True)
        if k:
            p.add_argument("--k", type=_parse_complex, required=True)
        if window:
            p.add_argument("--window", type=_parse_window, required=True)
        if scan:
            p.add_argument("--kmax", type=float, required=True)
            p.add_argument("--dk", type=float, required=True)
        if drive:
            p.add_argument("--drive", choices=("ell", "gamma"), default="ell")
            p.add_argument("--range", type=_parse_range, default=None)
            p.add_argument("--step", type=float, default=None)
        if bounds:
            p.add_argument("--gamma-max", type=float, required=True)
            p.add_argument("--ell-max", type=float, required=True)
        if n:
            p.add_argument("--n", type=int, default=None)

    common(sub.add_parser("eval"), gamma=True, ell=True, k=True)
    common(sub.add_parser("zeros"), gamma=True, ell=True, window=True)
    common(sub.add_parser("ladder"), gamma=True, ell=True, n=True)
    common(sub.add_parser("design"), k=True)
    common(sub.add_parser("scan"), scan=True)
    common(sub.add_parser("gap"))
    common(sub.add_parser("threshold"), drive=True)
    common(sub.add_parser("atlas"), bounds=True)
    common(sub.add_parser("trace"), gamma=True, ell=True, k=True, drive=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.tol <= 0:
        parser.error("--tol must be positive")
    try:
        return _HANDLERS[args.command](args)
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        record = {"error": str(exc), "module": type(exc).__module__,
                  "type": type(exc).__name__, "command": args.command}
        sys.stderr.write(json.dumps(record, sort_keys=True) + "\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
