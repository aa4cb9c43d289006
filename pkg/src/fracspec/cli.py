"""Command-line front end.

Exit codes: 0 success, 2 usage or configuration error, 3 numerical failure,
4 a ``compare`` run whose verdict is FAIL.
"""

import argparse
import json
import math
import os
import sys

import numpy as np
from threadpoolctl import threadpool_limits

from ._validation import NumericalError
from .asymptotics import BoundaryConditions, bc_model, process_model, reduced_problem
from .galerkin import eigen_galerkin, galerkin_rows
from .kernels import PROCESS_KINDS, ProcessSpec
from .nystrom import diagnostic_rows, eigen_nystrom, rows_to_csv, format_float
from .rh import report_json, verify_rates
from .smallball import constants_table, smallball_report

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_FAIL = 0, 2, 3, 4

BC_NAMES = ("kappa0", "kappa1", "kappa2", "dirichlet", "mixed", "neumann", "periodic",
            "antiperiodic", "nonsep", "robin", "almost")


class UsageError(Exception):
    pass


def _float_list(text):
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _add_common(p):
    p.add_argument("--format", choices=("json", "csv"), default=None)
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.add_argument("--config", default=None, help="key=value file; explicit flags win")


def _add_problem(p, with_bc=True):
    p.add_argument("--process", choices=sorted(set(PROCESS_KINDS)))
    p.add_argument("--hurst", type=float)
    p.add_argument("--gamma", type=float, default=None,
                   help="Slepian perturbation, or non-separated coefficient")
    p.add_argument("--beta", type=float, default=None,
                   help="OU drift, or non-separated coefficient")
    p.add_argument("--sigma", type=float, default=0.0, help="OU initial standard deviation")
    if with_bc:
        p.add_argument("--bc", choices=BC_NAMES)
        p.add_argument("--alpha", type=float)
        p.add_argument("--delta", type=float, default=0.0)
        p.add_argument("--gamma0", type=float, default=0.0)
        p.add_argument("--gamma1", type=float, default=None)
        p.add_argument("--gamma-hat", type=float, default=0.0)
        p.add_argument("--potential", type=float, default=0.0)


def build_parser():
    parser = argparse.ArgumentParser(prog="fracspec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eigen", help="numerical eigenvalues with two-term diagnostics")
    _add_problem(p)
    p.add_argument("--method", choices=("nystrom", "galerkin"), default=None)
    p.add_argument("--n", type=int, default=10, help="number of eigenvalues")
    p.add_argument("--grid", type=int, default=2000, help="grid points or elements")
    _add_common(p)

    p = sub.add_parser("asym", help="two-term predictions")
    _add_problem(p)
    p.add_argument("--n", type=int, default=10)
    _add_common(p)

    p = sub.add_parser("compare", help="numerical vs predicted roots with a verdict")
    _add_problem(p)
    p.add_argument("--method", choices=("nystrom", "galerkin"), default=None)
    p.add_argument("--n", type=int, default=30, help="last index of the window")
    p.add_argument("--n-start", type=int, default=5, help="first index of the window")
    p.add_argument("--grid", type=int, default=4000)
    p.add_argument("--bound", type=float, default=1.0,
                   help="PASS needs max n^eps |delta_n| <= bound over the window")
    p.add_argument("--require-decay", action="store_true",
                   help="also require |delta_last| < |delta_first|")
    _add_common(p)

    p = sub.add_parser("rh-verify", help="rates of the p-functions at z = i")
    p.add_argument("--alpha", type=float, required=False)
    p.add_argument("--nu", type=_float_list, default=[50.0, 100.0, 200.0])
    _add_common(p)

    p = sub.add_parser("smallball", help="small-ball constants and Monte Carlo estimates")
    _add_problem(p, with_bc=False)
    p.add_argument("--table", action="store_true", help="print the constants table")
    p.add_argument("--eps", type=_float_list, default=[0.3, 0.25, 0.2])
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--K", type=int, default=10_000)
    p.add_argument("--J", type=int, default=20)
    _add_common(p)
    return parser


def read_config(path):
    """Plain ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def _apply_config(subparser, cfg):
    actions = {a.dest: a for a in subparser._actions}
    defaults = {}
    for key, raw in cfg.items():
        act = actions.get(key)
        if act is None or key in ("config", "help"):
            raise UsageError(f"unknown config key {key!r}")
        if act.nargs == 0:
            defaults[key] = raw.lower() in ("1", "true", "yes", "on")
            continue
        try:
            value = act.type(raw) if act.type else raw
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise UsageError(f"config key {key!r}: {exc}") from exc
        if act.choices is not None and value not in act.choices:
            raise UsageError(f"config key {key!r}: {value!r} not in {sorted(act.choices)}")
        defaults[key] = value
    subparser.set_defaults(**defaults)


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        cfg = read_config(args.config)
        sub = parser._subparsers._group_actions[0].choices[args.command]
        _apply_config(sub, cfg)
        args = parser.parse_args(argv)
    return args


# problem resolution -----------------------------------------------------------

def _process_spec(args):
    if args.hurst is None:
        raise UsageError("--process requires --hurst")
    kw = {"sigma": args.sigma}
    if args.gamma is not None:
        kw["gamma"] = args.gamma
    if args.beta is not None:
        kw["beta"] = args.beta
    return ProcessSpec(args.process, args.hurst, **kw)


def _bc_from_args(args):
    coef = {
        "beta": 1.0 if args.beta is None else args.beta,
        "gamma": 1.0 if args.gamma is None else args.gamma,
        "delta": args.delta,
        "gamma0": args.gamma0,
        "gamma1": args.gamma1,
        "gamma_hat": args.gamma_hat,
    }
    if args.bc != "almost" and coef["gamma1"] is None:
        coef.pop("gamma1")
    elif coef["gamma1"] is None:
        coef["gamma1"] = 0.0
    return BoundaryConditions.from_name(args.bc, **coef)


def _resolve(args):
    """Return ``("process", spec)`` or ``("bc", (bc, alpha))``; rejects conflicts."""
    has_process = getattr(args, "process", None) is not None
    has_bc = getattr(args, "bc", None) is not None
    if has_process and has_bc:
        raise UsageError("--process and --bc are mutually exclusive")
    if has_process:
        if getattr(args, "alpha", None) is not None:
            raise UsageError("--alpha conflicts with --process (use --hurst)")
        return "process", _process_spec(args)
    if has_bc:
        if args.alpha is None:
            if args.hurst is None:
                raise UsageError("--bc requires --alpha")
            args.alpha = 2.0 - 2.0 * args.hurst
        return "bc", (_bc_from_args(args), args.alpha)
    raise UsageError("one of --process or --bc is required")


# output -----------------------------------------------------------------------

def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _dump_json(obj):
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def _emit(args, text):
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _generic_csv(rows, columns):
    lines = [",".join(columns)]
    for r in rows:
        vals = []
        for c in columns:
            v = r[c]
            vals.append(format_float(v) if isinstance(v, float) else str(v))
        lines.append(",".join(vals))
    return "\n".join(lines) + "\n"


# commands ---------------------------------------------------------------------

def _numeric_rows(args, n_lo, n_hi):
    kind, obj = _resolve(args)
    method = args.method or ("nystrom" if kind == "process" else "galerkin")
    if kind == "process" and method == "nystrom":
        spec = obj
        seq = eigen_nystrom(spec, args.grid, n_hi)
        model = process_model(spec)
        lo = max(n_lo, model.first_index)
        idx = np.arange(lo, n_hi + 1)
        rows = diagnostic_rows(model, seq.values[idx - 1], idx)
        return rows, model, ()
    if kind == "process":
        reduced = reduced_problem(obj)
        if reduced is None:
            raise UsageError(f"galerkin cannot treat {obj.kind}: boundary conditions "
                             "contain the spectral parameter")
        bc, pot = reduced
        alpha = obj.alpha
        mixture = 2 if obj.is_mixture else 1
    else:
        if method == "nystrom":
            raise UsageError("--method nystrom needs --process")
        bc, alpha = obj
        pot = args.potential
        mixture = 1
    if not 0.0 < alpha < 1.0:
        raise UsageError("galerkin requires alpha in (0, 1)")
    seq = eigen_galerkin(args.grid, alpha, bc, n_hi, pot or None)
    model = bc_model(bc, alpha)
    lo = max(n_lo, model.first_index)
    idx = np.arange(lo, n_hi + 1)
    rows = galerkin_rows(seq, bc, idx)
    if mixture != 1:
        for r in rows:
            r["lambda"] *= mixture
    return rows, model, ("bc",)


def cmd_eigen(args):
    rows, _, extra = _numeric_rows(args, 1, args.n)
    fmt = args.format or "csv"
    _emit(args, rows_to_csv(rows, extra) if fmt == "csv" else _dump_json({"rows": rows}))
    return EXIT_OK


def cmd_asym(args):
    kind, obj = _resolve(args)
    model = process_model(obj) if kind == "process" else bc_model(*obj)
    first = model.first_index
    n = np.arange(first, first + args.n)
    rows = [{"n": int(i), "lambda_pred": float(l), "nu_pred": float(v), "shift": float(s)}
            for i, l, v, s in zip(n, model.eigenvalue(n), model.nu(n), model.shift(n))]
    fmt = args.format or "csv"
    if fmt == "csv":
        text = _generic_csv(rows, ("n", "lambda_pred", "nu_pred", "shift"))
    else:
        text = _dump_json({"model": model.label, "offset": model.offset,
                           "remainder_exponent": model.remainder_exponent, "rows": rows})
    _emit(args, text)
    return EXIT_OK


def cmd_compare(args):
    if args.n_start < 1 or args.n < args.n_start:
        raise UsageError("need 1 <= --n-start <= --n")
    rows, model, extra = _numeric_rows(args, args.n_start, args.n)
    scaled = [abs(r["scaled_delta"]) for r in rows]
    worst = max(scaled)
    ok = worst <= args.bound
    if args.require_decay:
        ok = ok and abs(rows[-1]["delta"]) < abs(rows[0]["delta"])
    verdict = "PASS" if ok else "FAIL"
    fmt = args.format or "json"
    if fmt == "csv":
        text = rows_to_csv(rows, extra)
    else:
        text = _dump_json({"rows": rows, "max_scaled_delta": worst, "bound": args.bound,
                           "remainder_exponent": model.remainder_exponent,
                           "verdict": verdict})
    _emit(args, text)
    print(f"{verdict}: max n^eps|delta_n| = {worst:.4g} (bound {args.bound:g})",
          file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_rh_verify(args):
    if args.alpha is None:
        raise UsageError("rh-verify requires --alpha")
    rep = report_json(verify_rates(args.alpha, args.nu))
    fmt = args.format or "json"
    if fmt == "json":
        text = _dump_json(rep)
    else:
        rows = []
        for i, nu in enumerate(rep["nu"]):
            row = {"nu": nu}
            row.update({k: v[i] for k, v in rep["scaled_deviations"].items()})
            rows.append(row)
        text = _generic_csv(rows, ["nu"] + sorted(rep["scaled_deviations"]))
    _emit(args, text)
    return EXIT_OK


def cmd_smallball(args):
    fmt = args.format or "json"
    if args.table:
        hurst = 0.5 if args.hurst is None else args.hurst
        rows = [c.as_dict() for c in constants_table(hurst)]
        cols = ("process", "H", "B_X", "D_X", "D", "B")
    else:
        if args.process is None:
            raise UsageError("smallball needs --process (or --table)")
        spec = _process_spec(args)
        rows = smallball_report(spec, args.eps, args.samples, args.seed, args.K, args.J)
        cols = ("process", "H", "eps", "estimate", "ci_low", "ci_high", "log_estimate",
                "log_asymptote", "K", "J", "seed")
    if fmt == "json":
        text = _dump_json(rows)
    else:
        text = _generic_csv([{c: ("" if r[c] is None else r[c]) for c in cols} for r in rows],
                            cols)
    _emit(args, text)
    return EXIT_OK


COMMANDS = {
    "eigen": cmd_eigen,
    "asym": cmd_asym,
    "compare": cmd_compare,
    "rh-verify": cmd_rh_verify,
    "smallball": cmd_smallball,
}


def _thread_limit():
    raw = os.environ.get("FRACSPEC_THREADS")
    if not raw:
        return None
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"FRACSPEC_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise UsageError("FRACSPEC_THREADS must be >= 1")
    return n


def main(argv=None):
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except (UsageError, OSError) as exc:
        print(f"fracspec: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        limit = _thread_limit()
        with threadpool_limits(limits=limit):
            return COMMANDS[args.command](args)
    except (UsageError, ValueError, TypeError) as exc:
        print(f"fracspec: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"fracspec: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
