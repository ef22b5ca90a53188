"""Expected approximation error of a factorization, with reference bounds.

Adding correlated Gaussian noise through the factor pair (B, C) inflates
the released iterates by expected_error = sens(C) * ||B||_F / sqrt(n),
where the sensitivity is taken under the participation schema.  This
module evaluates that functional for any factorization, attaches the
theoretical reference curves, and builds comparison tables over grids of
configurations.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math

import numpy as np

from .factor import Factorization, make_factorization
from .sensitivity import (
    ENUMERATION_CAP,
    MonotonicityError,
    ParticipationSchema,
    leftmost_set_contribution_norm,
    sens_banded,
    sens_decreasing_toeplitz,
    sens_enumerated,
    sens_nondecreasing_toeplitz,
)
from .toeplitz import ToeplitzColumn

TABLE_COLUMNS = (
    "n", "alpha", "beta", "b", "k", "p", "kind",
    "sens", "b_fro", "expected_error", "lower_bound", "exact_sens", "error",
)


@dataclass(frozen=True)
class ErrorReport:
    """Sensitivity, left-factor norm, expected error, and reference bounds."""

    kind: str
    n: int
    alpha: float
    beta: float
    b: int
    k: int
    p: int | None
    sens: float
    sens_exact: bool
    sens_method: str
    b_frobenius: float
    expected_error: float
    bounds: dict[str, float]


def sensitivity_of(c, schema: ParticipationSchema, cap: int = ENUMERATION_CAP):
    """Dispatch to the cheapest valid sensitivity path for the factor C.

    Returns (value, exact, method).  Toeplitz columns try the monotone
    closed forms, then the banded dynamic program; dense matrices the
    banded program; enumeration handles small leftovers.  Beyond the
    enumeration cap the leftmost-set evaluation is reported with
    exact=False (a lower estimate of the true maximum).
    """
    if not isinstance(c, ToeplitzColumn) and np.asarray(c).ndim == 1:
        c = ToeplitzColumn(np.asarray(c, dtype=np.float64))
    if isinstance(c, ToeplitzColumn):
        try:
            return sens_decreasing_toeplitz(c, schema), True, "closed-form-decreasing"
        except MonotonicityError:
            pass
        if c.effective_bandwidth <= schema.b:
            return sens_banded(c, schema), True, "banded-dp"
        try:
            return sens_nondecreasing_toeplitz(c, schema), True, "closed-form-nondecreasing"
        except MonotonicityError:
            pass
        if schema.n <= cap:
            value, exact = sens_enumerated(c, schema, cap=cap)
            return value, exact, "enumeration"
        return leftmost_set_contribution_norm(c.coeffs, schema), False, "leftmost-estimate"
    dense = np.asarray(c, dtype=np.float64)
    try:
        return sens_banded(dense, schema), True, "banded-dp"
    except ValueError:
        pass
    if schema.n <= cap:
        value, exact = sens_enumerated(dense, schema, cap=cap)
        return value, exact, "enumeration"
    # last resort: Gram mass of the leftmost admissible set only
    gram = dense.T @ dense
    idx = np.arange(0, 1 + (schema.k - 1) * schema.b, schema.b)
    value = math.sqrt(float(np.sum(np.abs(gram[np.ix_(idx, idx)]))))
    return value, False, "leftmost-estimate"


def lower_bound(spec, schema: ParticipationSchema) -> float:
    """Error floor for any factorization with entrywise non-negative Gram.

    sqrt(k) * log(n+1) / pi when alpha = 1, else sqrt(k).
    """
    if spec.alpha == 1.0:
        return math.sqrt(schema.k) * math.log(schema.n + 1) / math.pi
    return math.sqrt(schema.k)


def sqrt_error_upper_bound(spec) -> float:
    """Single-participation error ceiling for the square-root factorization.

    (1 + log n) / (1-beta)^2 when alpha = 1, else
    log(1 / (1-alpha^2)) / (alpha-beta)^2.
    """
    if spec.alpha == 1.0:
        return (1.0 + math.log(spec.n)) / (1.0 - spec.beta) ** 2
    return math.log(1.0 / (1.0 - spec.alpha ** 2)) / (spec.alpha - spec.beta) ** 2


def sqrt_error_lower_bound(spec) -> float:
    """Single-participation companion floor for the square-root factorization."""
    if spec.alpha == 1.0:
        return max(1.0, (math.log(spec.n + 1) - 1.0) / 4.0)
    return 1.0


def baseline_asymptotics(spec, schema: ParticipationSchema) -> dict[str, float]:
    """Leading-order reference values for the two baseline factorizations.

    Reporting aids only; measured errors come from ``expected_error``.
    Keys: input_* for (B=A, C=Id), output_* for (B=Id, C=A); *_leading are
    single-participation leading terms, *_multi_lower repeated-participation
    floors.
    """
    n, k = schema.n, schema.k
    if spec.alpha == 1.0:
        return {
            "input_leading": math.sqrt(n) / (math.sqrt(2.0) * (1.0 - spec.beta)),
            "output_leading": math.sqrt(n) / (1.0 - spec.beta),
            "input_multi_lower": math.sqrt(n * k / 2.0),
            "output_multi_lower": k * math.sqrt(n) / math.sqrt(3.0),
        }
    limit = math.sqrt(
        (1.0 + spec.alpha * spec.beta)
        / ((1.0 - spec.alpha * spec.beta) * (1.0 - spec.alpha ** 2) * (1.0 - spec.beta ** 2))
    )
    return {
        "input_leading": limit,
        "output_leading": limit,
        "input_multi_lower": math.sqrt(k),
        "output_multi_lower": math.sqrt(k),
    }


def expected_error(
    f: Factorization,
    schema: ParticipationSchema,
    cap: int = ENUMERATION_CAP,
) -> ErrorReport:
    """Evaluate sens(C) * ||B||_F / sqrt(n) for a factorization."""
    spec = f.spec
    if schema.n != spec.n:
        raise ValueError(f"schema n={schema.n} does not match workload n={spec.n}")
    sens, exact, method = sensitivity_of(f.c, schema, cap=cap)
    b_fro = math.sqrt(f.b_frobenius_sq())
    bounds = {
        "lower": lower_bound(spec, schema),
        "sqrt_upper": sqrt_error_upper_bound(spec),
        "sqrt_lower": sqrt_error_lower_bound(spec),
    }
    bounds.update(baseline_asymptotics(spec, schema))
    return ErrorReport(
        kind=f.kind,
        n=spec.n,
        alpha=spec.alpha,
        beta=spec.beta,
        b=schema.b,
        k=schema.k,
        p=f.p,
        sens=sens,
        sens_exact=exact,
        sens_method=method,
        b_frobenius=b_fro,
        expected_error=sens * b_fro / math.sqrt(spec.n),
        bounds=bounds,
    )


def report_row(report: ErrorReport) -> dict:
    """Flatten a report into the fixed external column set."""
    return {
        "n": report.n,
        "alpha": report.alpha,
        "beta": report.beta,
        "b": report.b,
        "k": report.k,
        "p": report.p,
        "kind": report.kind,
        "sens": report.sens,
        "b_fro": report.b_frobenius,
        "expected_error": report.expected_error,
        "lower_bound": report.bounds["lower"],
        "exact_sens": report.sens_exact,
        "error": None,
    }


def resolve_k(rule: int | str, n: int, b: int) -> int:
    """Literal k, or 'auto' for the densest schedule ceil(n/b)."""
    if rule == "auto":
        return max(1, math.ceil(n / b))
    return int(rule)


def error_table(
    ns,
    alphas,
    betas,
    *,
    b: int = 1,
    k: int | str = 1,
    p: int | None = None,
    kinds=("bsr", "sqrt", "id-c", "id-b"),
    cap: int = ENUMERATION_CAP,
    aof_options: dict | None = None,
    threads: int = 1,
) -> list[dict]:
    """Cross-product comparison table; one row per (n, alpha, beta, kind).

    Rows are sorted by (n, kind) and serialize to the fixed column set.
    Failures of a single cell are recorded in that row's ``error`` field
    and never abort the rest of the grid.
    """
    from .workload import WorkloadSpec

    cells = [
        (n, alpha, beta, kind)
        for n in ns
        for alpha in alphas
        for beta in betas
        for kind in kinds
    ]

    def evaluate(cell):
        n, alpha, beta, kind = cell
        row = {
            "n": n, "alpha": alpha, "beta": beta, "b": b, "k": None,
            "p": None, "kind": kind, "sens": None, "b_fro": None,
            "expected_error": None, "lower_bound": None, "exact_sens": None,
            "error": None,
        }
        try:
            spec = WorkloadSpec(n, alpha, beta)
            schema = ParticipationSchema(n, b, resolve_k(k, n, b))
            row["k"] = schema.k
            if kind == "aof":
                from .aof import aof_factorization

                f, _solution = aof_factorization(spec, band=b, **(aof_options or {}))
            else:
                f = make_factorization(kind, spec, p=(p or b) if kind == "bsr" else None)
            report = expected_error(f, schema, cap=cap)
            row.update(report_row(report))
        except Exception as exc:  # noqa: BLE001 - per-cell capture is the contract
            row["error"] = f"{type(exc).__name__}: {exc}"
        return row

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(evaluate, cells))
    else:
        rows = [evaluate(cell) for cell in cells]
    rows.sort(key=lambda r: (r["n"], r["kind"], r["alpha"], r["beta"]))
    return rows
