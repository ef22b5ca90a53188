"""Factorizations A = B C of the workload matrix.

Available kinds, by their command-line tokens:

==========  ============================================================
``sqrt``    triangular square root, B = C with C C = A
``bsr``     banded square root of bandwidth p: C keeps the first p root
            coefficients, B = A C^{-1}
``id-c``    input perturbation, B = A and C = Id (plain noisy SGD)
``id-b``    output perturbation, B = Id and C = A
``aof``     numerically optimized banded factorization (see ``aof``)
==========  ============================================================

The square root of the workload has a closed-form column: the convolution
of (alpha^i r_i) with (beta^i r_i), where r is the power series of
(1 - x)^{-1/2}.  Everything here is exact Toeplitz arithmetic; the aof
kind is produced by its own module and carries dense factors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .toeplitz import (
    ToeplitzColumn,
    convolve_truncated,
    ltt_frobenius_norm_sq,
    ltt_inverse,
    ltt_multiply,
    to_dense,
)
from .workload import WorkloadSpec, workload_column

KINDS = ("bsr", "sqrt", "id-c", "id-b", "aof")


def invsqrt_series(count: int) -> np.ndarray:
    """First ``count`` power-series coefficients of (1 - x)^{-1/2}.

    r_0 = 1 and r_i = r_{i-1} * (2i - 1) / (2i); the values equal
    |binom(-1/2, i)| but the recurrence avoids factorial overflow.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    i = np.arange(1, count, dtype=np.float64)
    return np.concatenate([[1.0], np.cumprod((2.0 * i - 1.0) / (2.0 * i))])


def sqrt_column(spec: WorkloadSpec, count: int | None = None) -> ToeplitzColumn:
    """First column of the triangular square root of the workload matrix.

    c_j depends only on (alpha, beta, j), so ``count`` can request just a
    prefix: the cost is O(count log count) regardless of spec.n.
    """
    m = spec.n if count is None else count
    if not 1 <= m <= spec.n:
        raise ValueError(f"count {m} out of range for n={spec.n}")
    r = invsqrt_series(m)
    powers = spec.alpha ** np.arange(m, dtype=np.float64)
    if spec.beta == 0.0:
        c = powers * r
    else:
        q = (spec.beta ** np.arange(m, dtype=np.float64)) * r
        c = convolve_truncated(powers * r, q, m)
    return ToeplitzColumn(c)


def banded_sqrt_column(spec: WorkloadSpec, p: int) -> ToeplitzColumn:
    """Square-root column truncated to its first p coefficients (bandwidth p)."""
    if not 1 <= p <= spec.n:
        raise ValueError(f"bandwidth {p} out of range for n={spec.n}")
    prefix = sqrt_column(spec, count=p).coeffs
    col = np.zeros(spec.n)
    col[:p] = prefix
    return ToeplitzColumn(col, bandwidth=p)


def banded_sqrt_left_factor(spec: WorkloadSpec, p: int) -> ToeplitzColumn:
    """Left factor B = A C^{-1} of the banded square-root factorization.

    Computed as the workload column times the inverse of the banded root;
    B is lower-triangular Toeplitz but generally unbanded.
    """
    c = banded_sqrt_column(spec, p)
    return ltt_multiply(workload_column(spec), ltt_inverse(c))


@dataclass(frozen=True)
class Factorization:
    """A factor pair (B, C) with B C equal to the workload matrix.

    b and c are ToeplitzColumn for the closed-form kinds and dense
    lower-triangular ndarrays for aof.  p is the bandwidth of C where one
    applies (bsr, aof), else None.
    """

    kind: str
    spec: WorkloadSpec
    b: ToeplitzColumn | np.ndarray
    c: ToeplitzColumn | np.ndarray
    p: int | None = None

    def b_dense(self) -> np.ndarray:
        return to_dense(self.b) if isinstance(self.b, ToeplitzColumn) else self.b

    def c_dense(self) -> np.ndarray:
        return to_dense(self.c) if isinstance(self.c, ToeplitzColumn) else self.c

    def b_frobenius_sq(self) -> float:
        if isinstance(self.b, ToeplitzColumn):
            return ltt_frobenius_norm_sq(self.b)
        return float(np.sum(self.b * self.b))


def make_factorization(kind: str, spec: WorkloadSpec, p: int | None = None) -> Factorization:
    """Assemble one of the closed-form factorizations (all kinds but aof)."""
    n = spec.n
    if kind == "bsr":
        if p is None:
            raise ValueError("bsr requires a bandwidth p")
        c = banded_sqrt_column(spec, p)
        return Factorization("bsr", spec, banded_sqrt_left_factor(spec, p), c, p=p)
    if p is not None:
        raise ValueError(f"kind {kind!r} does not take a bandwidth")
    if kind == "sqrt":
        c = sqrt_column(spec)
        return Factorization("sqrt", spec, c, c)
    e = np.zeros(n)
    e[0] = 1.0
    unit = ToeplitzColumn(e, bandwidth=1)
    if kind == "id-c":
        return Factorization("id-c", spec, workload_column(spec), unit)
    if kind == "id-b":
        return Factorization("id-b", spec, unit, workload_column(spec))
    raise ValueError(f"unknown factorization kind {kind!r}")


def reconstruction_error(f: Factorization) -> float:
    """Relative Frobenius error of B C against the workload matrix."""
    a = workload_column(f.spec)
    if isinstance(f.b, ToeplitzColumn) and isinstance(f.c, ToeplitzColumn):
        prod = ltt_multiply(f.b, f.c)
        num = ltt_frobenius_norm_sq(ToeplitzColumn(prod.coeffs - a.coeffs))
        return float(np.sqrt(num / ltt_frobenius_norm_sq(a)))
    prod = f.b_dense() @ f.c_dense()
    dense_a = to_dense(a)
    return float(np.linalg.norm(prod - dense_a) / np.linalg.norm(dense_a))
