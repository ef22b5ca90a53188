"""Workload matrices of SGD with weight decay and momentum.

Running SGD for n steps with weight decay alpha and heavy-ball momentum
beta expresses every iterate as a fixed linear combination of the update
vectors.  The combination matrix is lower-triangular Toeplitz with first
column a_j = (alpha^{j+1} - beta^{j+1}) / (alpha - beta), and it factors
as the product of the two geometric-column matrices for alpha and beta.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .toeplitz import ToeplitzColumn


@dataclass(frozen=True)
class WorkloadSpec:
    """Problem size and optimizer constants.

    n: number of update steps (>= 1).
    alpha: weight-decay multiplier, 0 < alpha <= 1.
    beta: momentum, 0 <= beta < 1 and beta < alpha.
    The learning rate only rescales the workload and never changes which
    factorization is best, so it is not part of the model.
    """

    n: int
    alpha: float
    beta: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must be in (0, 1]")
        if not 0.0 <= self.beta < 1.0:
            raise ValueError("beta must be in [0, 1)")
        if self.beta >= self.alpha:
            raise ValueError("beta must be strictly less than alpha")


def workload_column(spec: WorkloadSpec) -> ToeplitzColumn:
    """First column of the workload matrix: a_j = sum_i alpha^i beta^{j-i}.

    Uses the ratio form (alpha^{j+1} - beta^{j+1}) / (alpha - beta); when
    alpha - beta < 1e-12 the ratio cancels catastrophically and the
    recurrence a_j = alpha * a_{j-1} + beta^j is used instead.
    """
    n, alpha, beta = spec.n, spec.alpha, spec.beta
    j = np.arange(1, n + 1, dtype=np.float64)
    if alpha - beta < 1e-12:
        a = np.empty(n)
        a[0] = 1.0
        for m in range(1, n):
            a[m] = alpha * a[m - 1] + beta ** m
        return ToeplitzColumn(a)
    a = (alpha ** j - beta ** j) / (alpha - beta)
    return ToeplitzColumn(a)


def geometric_column(t: float, n: int) -> ToeplitzColumn:
    """Column (1, t, t^2, ..., t^{n-1}); the workload factors as two of these."""
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must be in [0, 1]")
    col = t ** np.arange(n, dtype=np.float64)
    return ToeplitzColumn(col, bandwidth=1 if t == 0.0 and n > 1 else None)


def prefix_sum_singular_value(i: int, n: int) -> float:
    """i-th largest singular value of the n x n all-ones LTT (prefix-sum) matrix.

    Closed form 1 / (2 sin((i - 1/2) / (n + 1/2) * pi / 2)), 1-based i.
    The inverse Gram of the prefix-sum matrix is an almost-Toeplitz
    tridiagonal whose eigenvalues are 4 sin^2 of those angles; exact for
    every n >= 1 (dense SVD cross-check in the test suite).
    """
    if not 1 <= i <= n:
        raise IndexError(f"index {i} out of range for n={n}")
    return 1.0 / (2.0 * math.sin((i - 0.5) / (n + 0.5) * math.pi / 2.0))


def prefix_sum_singular_values(n: int) -> np.ndarray:
    """All n singular values of the prefix-sum matrix, descending."""
    i = np.arange(1, n + 1, dtype=np.float64)
    return 1.0 / (2.0 * np.sin((i - 0.5) / (n + 0.5) * np.pi / 2.0))


def nuclear_norm_lower_bound(spec: WorkloadSpec) -> float:
    """Reference lower bound on the workload's nuclear norm (not the exact value).

    (1/pi) * n * log(n+1) / (1+beta) when alpha = 1, else n.  The alpha=1
    constant comes from sigma_i >= (n+1/2)/(pi (i-1/2)) for the prefix-sum
    spectrum and summing 1/(i-1/2) >= log(n+1).
    """
    if spec.alpha == 1.0:
        return spec.n * math.log(spec.n + 1) / (math.pi * (1.0 + spec.beta))
    return float(spec.n)
