"""Sensitivity of the correlated-noise factor under min-separated participation.

A data item may contribute to at most k of the n steps, with at least b
steps between consecutive contributions.  The sensitivity of C is the
worst case, over admissible index sets pi and unit-norm per-step vectors,
of the norm of the combined contribution through C.

Fast paths:
  * Toeplitz C with non-increasing non-negative column: the leftmost
    admissible set {0, b, 2b, ...} attains the maximum (classical result
    for this family), giving an O(n k) formula.
  * Toeplitz C with non-decreasing non-negative column: the leftmost set
    is again optimal.  Shifting any selected suffix one step earlier
    replaces the running contribution total by its upward shift plus a
    fresh non-negative bottom entry; when the column is entrywise
    non-decreasing every per-column profile is non-decreasing along rows,
    so the cross terms only grow.  Gram entries are non-negative, hence
    the leftmost value is the exact maximum.  Verified exhaustively
    against enumeration in the test suite.
  * C with bandwidth <= b: selected columns have disjoint supports, so
    the squared sensitivity is the best sum of k squared column norms
    over separated positions, found by dynamic programming.
Everything else falls back to explicit enumeration of the admissible
sets, which is exponential and capped by default.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .toeplitz import ToeplitzColumn, to_dense

ENUMERATION_CAP = 16

# Analytic monotonicity of the root coefficients can be blurred by
# floating-point noise; violations up to this size are ignored.
MONOTONE_TOL = 1e-12


class MonotonicityError(ArithmeticError):
    """Column fails the shape precondition of a closed-form sensitivity path."""


@dataclass(frozen=True)
class ParticipationSchema:
    """Participation pattern: n steps, min separation b, at most k contributions.

    Requires 1 + (k-1) b <= n so at least one maximal set exists.  k = 1
    models single participation (any b); b = 1, k = n is unrestricted.
    """

    n: int
    b: int
    k: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.b < 1:
            raise ValueError("b must be >= 1")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if 1 + (self.k - 1) * self.b > self.n:
            raise ValueError(
                f"no admissible set of size k={self.k} with separation b={self.b} fits in n={self.n}"
            )


def leftmost_set_contribution_norm(m: np.ndarray, schema: ParticipationSchema) -> float:
    """Norm of the summed columns at the leftmost admissible set {0, b, ..., (k-1)b}.

    For a Toeplitz C this is sqrt(sum_i (sum_{j <= min(k-1, i//b)} m_{i-jb})^2).
    Exact sensitivity when a monotone closed-form path applies; otherwise a
    lower estimate of the enumeration maximum.
    """
    n = schema.n
    m = np.asarray(m, dtype=np.float64)[:n]
    total = np.zeros(n)
    for j in range(schema.k):
        lo = j * schema.b
        if lo >= n:
            break
        total[lo:lo + m.size] += m[:n - lo]
    return float(np.linalg.norm(total))


def _column(m: ToeplitzColumn | np.ndarray) -> np.ndarray:
    return m.coeffs if isinstance(m, ToeplitzColumn) else np.asarray(m, dtype=np.float64)


def _as_dense(c: ToeplitzColumn | np.ndarray) -> np.ndarray:
    """Dense matrix view: columns (Toeplitz or 1-d) expand, matrices pass through."""
    if isinstance(c, ToeplitzColumn):
        return to_dense(c)
    arr = np.asarray(c, dtype=np.float64)
    if arr.ndim == 1:
        return to_dense(ToeplitzColumn(arr))
    return arr


def sens_decreasing_toeplitz(m: ToeplitzColumn | np.ndarray, schema: ParticipationSchema) -> float:
    """Exact sensitivity for a non-increasing non-negative Toeplitz column."""
    col = _column(m)
    if np.any(col < -MONOTONE_TOL):
        raise MonotonicityError("column has negative entries")
    if np.any(np.diff(col) > MONOTONE_TOL):
        raise MonotonicityError("column is not non-increasing")
    return leftmost_set_contribution_norm(col, schema)


def sens_nondecreasing_toeplitz(m: ToeplitzColumn | np.ndarray, schema: ParticipationSchema) -> float:
    """Exact sensitivity for a non-decreasing non-negative Toeplitz column.

    Covers workloads used as the noise factor (output perturbation) when
    alpha = 1, whose columns grow toward 1/(1-beta).
    """
    col = _column(m)
    if np.any(col < -MONOTONE_TOL):
        raise MonotonicityError("column has negative entries")
    if np.any(np.diff(col) < -MONOTONE_TOL):
        raise MonotonicityError("column is not non-decreasing")
    return leftmost_set_contribution_norm(col, schema)


def sens_banded(c: ToeplitzColumn | np.ndarray, schema: ParticipationSchema) -> float:
    """Exact sensitivity for C with bandwidth <= b, any signs.

    Columns at admissible positions never overlap, so the maximum is a
    best-sum-of-column-norms problem solved by dynamic programming over
    (position, contributions used) in O(n k).
    """
    n, b, k = schema.n, schema.b, schema.k
    if not isinstance(c, ToeplitzColumn) and np.asarray(c).ndim == 1:
        c = ToeplitzColumn(np.asarray(c, dtype=np.float64))
    if isinstance(c, ToeplitzColumn):
        nonzero = np.nonzero(c.coeffs)[0]
        tight = int(nonzero[-1]) + 1 if nonzero.size else 1
        if min(c.effective_bandwidth, tight) > b:
            raise ValueError(f"bandwidth {min(c.effective_bandwidth, tight)} exceeds separation {b}")
        m = c.coeffs[:min(c.n, b)]
        sq = m * m
        # column i covers rows i..i+p-1 truncated at n
        norms = np.full(n, float(np.sum(sq)))
        tail = np.cumsum(sq[::-1])  # tail[t] = sum of last t+1 squares
        cut = min(m.size, n)
        if cut > 1:
            # column n-cut+1+t is short by its last t+1 coefficients
            norms[n - cut + 1:] -= tail[:cut - 1]
    else:
        dense = np.asarray(c, dtype=np.float64)
        i, j = np.indices(dense.shape)
        if np.any(dense[(i - j >= b) | (i < j)] != 0.0):
            raise ValueError(f"matrix entries outside bandwidth {b}")
        norms = np.sum(dense * dense, axis=0)
    # best[s] = max total over suffixes processed so far using s picks
    best = np.zeros((n + b, k + 1))
    for i in range(n - 1, -1, -1):
        best[i] = best[i + 1]
        picked = norms[i] + best[min(i + b, n + b - 1), :-1]
        best[i, 1:] = np.maximum(best[i, 1:], picked)
    return float(np.sqrt(best[0, k]))


def participation_sets(schema: ParticipationSchema):
    """Yield every admissible index set (0-based tuples, including the empty set)."""

    def extend(prefix, start):
        yield tuple(prefix)
        if len(prefix) == schema.k:
            return
        for i in range(start, schema.n):
            prefix.append(i)
            yield from extend(prefix, i + schema.b)
            prefix.pop()

    yield from extend([], 0)


def count_participation_sets(schema: ParticipationSchema) -> int:
    """Closed-form count: sum_s C(n - (s-1)(b-1), s) over set sizes s <= k."""
    total = 0
    for s in range(schema.k + 1):
        slots = schema.n - (s - 1) * (schema.b - 1)
        if slots < s:
            continue
        total += math.comb(slots, s)
    return total


def sens_enumerated(
    c: ToeplitzColumn | np.ndarray,
    schema: ParticipationSchema,
    cap: int = ENUMERATION_CAP,
) -> tuple[float, bool]:
    """Maximize sqrt(sum_{i,j in pi} |(C^T C)_{ij}|) over all admissible sets.

    Returns (value, exact): the value is the exact sensitivity when every
    Gram entry is non-negative, otherwise an upper bound.  Exponential in
    n; refuses instances beyond ``cap`` unless the caller raises it.
    """
    if schema.n > cap:
        raise ValueError(
            f"enumeration over n={schema.n} exceeds cap {cap}; "
            "use a closed-form or banded path, or raise the cap explicitly"
        )
    dense = _as_dense(c)
    gram = dense.T @ dense
    exact = bool(np.all(gram >= -MONOTONE_TOL))
    abs_gram = np.abs(gram)
    best = 0.0
    for pi in participation_sets(schema):
        if not pi:
            continue
        idx = np.array(pi)
        best = max(best, float(np.sum(abs_gram[np.ix_(idx, idx)])))
    return float(np.sqrt(best)), exact
