"""Command-line interface.

Subcommands: coeffs, sensitivity, error-table, aof, noise-sim.  Output is
CSV (RFC-4180 quoting) or JSON on stdout or a file; floats carry 12
significant digits.  Exit codes: 0 success, 2 invalid arguments,
3 numerical failure.  Long-running solves report progress on stderr so
stdout stays machine-parseable.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import analysis
from .aof import NotPositiveDefiniteError, aof_factorization
from .factor import (
    KINDS,
    banded_sqrt_column,
    banded_sqrt_left_factor,
    invsqrt_series,
    make_factorization,
    sqrt_column,
)
from .noise import simulate_mechanism
from .sensitivity import (
    ENUMERATION_CAP,
    MonotonicityError,
    ParticipationSchema,
    sens_banded,
    sens_decreasing_toeplitz,
    sens_enumerated,
    sens_nondecreasing_toeplitz,
)
from .toeplitz import SingularMatrixError, ToeplitzColumn
from .workload import WorkloadSpec, workload_column

AOF_N_CAP = 2000


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _json_value(value):
    if isinstance(value, float):
        return float(f"{value:.12g}")
    return value


def emit(rows: list[dict], columns: tuple[str, ...], fmt: str, output: str | None) -> None:
    """Write rows as CSV or JSON with a fixed column order."""
    if fmt == "json":
        payload = [{c: _json_value(row.get(c)) for c in columns} for row in rows]
        text = json.dumps(payload, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row.get(c)) for c in columns])
        text = buf.getvalue()
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w") as fh:
            fh.write(text)


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _kind_list(text: str) -> list[str]:
    kinds = [tok.strip() for tok in text.split(",") if tok.strip()]
    for kind in kinds:
        if kind not in KINDS:
            raise argparse.ArgumentTypeError(f"unknown kind {kind!r}; choose from {', '.join(KINDS)}")
    return kinds


def _k_rule(text: str):
    return text if text == "auto" else int(text)


def cmd_coeffs(args) -> int:
    spec = WorkloadSpec(args.n, args.alpha, args.beta)
    p = args.p if args.p is not None else spec.n
    a = workload_column(spec)
    r = invsqrt_series(spec.n)
    c = sqrt_column(spec)
    cb = banded_sqrt_column(spec, p)
    b = banded_sqrt_left_factor(spec, p)
    rows = [
        {"j": j, "a": a.coeffs[j], "r": r[j], "c": c.coeffs[j],
         "c_banded": cb.coeffs[j], "b": b.coeffs[j]}
        for j in range(spec.n)
    ]
    emit(rows, ("j", "a", "r", "c", "c_banded", "b"), args.format, args.output)
    return 0


def cmd_sensitivity(args) -> int:
    spec = WorkloadSpec(args.n, args.alpha, args.beta)
    schema = ParticipationSchema(args.n, args.b, args.k)
    p = args.p if args.p is not None else args.b
    if args.kind == "bsr":
        col = banded_sqrt_column(spec, p)
    elif args.kind == "sqrt":
        col = sqrt_column(spec)
    elif args.kind == "id-b":
        col = workload_column(spec)
    else:  # id-c
        e = np.zeros(spec.n)
        e[0] = 1.0
        col = ToeplitzColumn(e, bandwidth=1)
    exact = True
    if args.method == "auto":
        value, exact, method = analysis.sensitivity_of(col, schema, cap=args.enum_cap)
    elif args.method == "closed":
        method = "closed-form"
        try:
            value = sens_decreasing_toeplitz(col, schema)
        except MonotonicityError:
            value = sens_nondecreasing_toeplitz(col, schema)
    elif args.method == "banded":
        method = "banded-dp"
        value = sens_banded(col, schema)
    else:
        method = "enumeration"
        value, exact = sens_enumerated(col, schema, cap=args.enum_cap)
    row = {"n": args.n, "alpha": args.alpha, "beta": args.beta, "b": args.b,
           "k": args.k, "p": p if args.kind == "bsr" else None, "kind": args.kind,
           "method": method, "sens": value, "exact": exact}
    emit([row], ("n", "alpha", "beta", "b", "k", "p", "kind", "method", "sens", "exact"),
         args.format, args.output)
    return 0


def cmd_error_table(args) -> int:
    aof_options = {"max_iters": args.aof_max_iters, "tol": args.aof_tol}
    rows = analysis.error_table(
        args.n,
        args.alpha,
        args.beta,
        b=args.b,
        k=args.k,
        p=args.p,
        kinds=args.kinds,
        cap=args.enum_cap,
        aof_options=aof_options,
        threads=args.threads,
    )
    for row in rows:
        if row["error"] is not None:
            cell = f"n={row['n']} alpha={row['alpha']} beta={row['beta']} kind={row['kind']}"
            print(f"warning: {cell}: {row['error']}", file=sys.stderr)
    emit(rows, analysis.TABLE_COLUMNS, args.format, args.output)
    if args.plot is not None:
        from .plots import save_error_plot

        save_error_plot(rows, args.plot)
    return 0


def cmd_aof(args) -> int:
    if args.n > AOF_N_CAP and not args.force:
        print(
            f"error: n={args.n} exceeds the dense-solver cap {AOF_N_CAP}; "
            "pass --force to run anyway",
            file=sys.stderr,
        )
        return 2
    spec = WorkloadSpec(args.n, args.alpha, args.beta)
    schema = ParticipationSchema(args.n, args.b, args.k)

    def progress(step, value):
        if step % 200 == 0:
            print(f"step {step}: objective {value:.10g}", file=sys.stderr)

    f, solution = aof_factorization(
        spec, band=args.b, max_iters=args.max_iters, tol=args.tol, callback=progress
    )
    report = analysis.expected_error(f, schema)
    if not solution.converged:
        print("warning: solver hit max-iters before the tolerance", file=sys.stderr)
    if args.dump_c is not None:
        np.savetxt(args.dump_c, solution.c, delimiter=",")
    row = {
        "n": args.n, "alpha": args.alpha, "beta": args.beta, "b": args.b, "k": args.k,
        "objective": solution.objective_trace, "iterations": solution.iterations,
        "converged": solution.converged, "floor_applied": solution.floor_applied,
        "sens": report.sens, "b_fro": report.b_frobenius,
        "expected_error": report.expected_error, "exact_sens": report.sens_exact,
    }
    emit([row], ("n", "alpha", "beta", "b", "k", "objective", "iterations", "converged",
                 "floor_applied", "sens", "b_fro", "expected_error", "exact_sens"),
         args.format, args.output)
    return 0


def cmd_noise_sim(args) -> int:
    spec = WorkloadSpec(args.n, args.alpha, args.beta)
    schema = ParticipationSchema(args.n, args.b, args.k)
    p = args.p if args.p is not None else args.b
    f = make_factorization(args.kind, spec, p=p if args.kind == "bsr" else None)
    report = simulate_mechanism(
        f, schema, d=args.d, sigma=args.sigma, trials=args.trials, seed=args.seed
    )
    row = {
        "n": args.n, "alpha": args.alpha, "beta": args.beta, "b": args.b, "k": args.k,
        "p": f.p, "kind": args.kind, "d": args.d, "sigma": args.sigma,
        "trials": args.trials, "seed": args.seed, "estimate": report.estimate,
        "std_error": report.std_error, "analytic": report.analytic.expected_error,
        "sens": report.analytic.sens, "b_fro": report.analytic.b_frobenius,
    }
    emit([row], ("n", "alpha", "beta", "b", "k", "p", "kind", "d", "sigma", "trials",
                 "seed", "estimate", "std_error", "analytic", "sens", "b_fro"),
         args.format, args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dpfactor",
        description="Noise-correlation factorizations for differentially private SGD.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--output", default=None, help="write to a file instead of stdout")

    def workload_args(p, n_list=False):
        if n_list:
            p.add_argument("--n", type=_int_list, required=True,
                           help="comma-separated list of step counts")
            p.add_argument("--alpha", type=_float_list, default=[1.0])
            p.add_argument("--beta", type=_float_list, default=[0.0])
        else:
            p.add_argument("--n", type=int, required=True)
            p.add_argument("--alpha", type=float, default=1.0)
            p.add_argument("--beta", type=float, default=0.0)

    p = sub.add_parser("coeffs", help="workload, root, and banded-root coefficients")
    workload_args(p)
    p.add_argument("--p", type=int, default=None, help="bandwidth (default: full length)")
    common(p)
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("sensitivity", help="sensitivity of a factor under participation")
    workload_args(p)
    p.add_argument("--b", type=int, default=1)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--p", type=int, default=None, help="bsr bandwidth (default: b)")
    p.add_argument("--kind", choices=("bsr", "sqrt", "id-c", "id-b"), default="sqrt")
    p.add_argument("--method", choices=("auto", "closed", "banded", "enum"), default="auto")
    p.add_argument("--enum-cap", type=int, default=ENUMERATION_CAP)
    common(p)
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("error-table", help="expected-error comparison over a grid")
    workload_args(p, n_list=True)
    p.add_argument("--b", type=int, default=1)
    p.add_argument("--k", type=_k_rule, default=1, help="participations, or 'auto' for ceil(n/b)")
    p.add_argument("--p", type=int, default=None, help="bsr bandwidth (default: b)")
    p.add_argument("--kinds", type=_kind_list, default=list(KINDS[:4]),
                   help="comma-separated subset of " + ",".join(KINDS))
    p.add_argument("--enum-cap", type=int, default=ENUMERATION_CAP)
    p.add_argument("--aof-max-iters", type=int, default=5000)
    p.add_argument("--aof-tol", type=float, default=1e-8)
    p.add_argument("--threads", type=int, default=1, help="parallel grid evaluation")
    p.add_argument("--plot", default=None, help="also render the table to this figure file")
    common(p)
    p.set_defaults(func=cmd_error_table)

    p = sub.add_parser("aof", help="solve the banded optimization problem")
    workload_args(p)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--max-iters", type=int, default=5000)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--force", action="store_true",
                   help=f"allow n beyond the dense cap of {AOF_N_CAP}")
    p.add_argument("--dump-c", default=None, help="write the noise factor C as CSV")
    common(p)
    p.set_defaults(func=cmd_aof)

    p = sub.add_parser("noise-sim", help="Monte-Carlo check of the expected error")
    workload_args(p)
    p.add_argument("--b", type=int, default=1)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--p", type=int, default=None, help="bsr bandwidth (default: b)")
    p.add_argument("--kind", choices=("bsr", "sqrt", "id-c", "id-b"), default="bsr")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_noise_sim)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (MonotonicityError, NotPositiveDefiniteError, SingularMatrixError,
            np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
