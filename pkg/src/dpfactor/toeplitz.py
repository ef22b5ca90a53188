"""Arithmetic on lower-triangular Toeplitz (LTT) matrices stored as first columns.

An n x n lower-triangular Toeplitz matrix is determined by its first column
(m_0, ..., m_{n-1}): entry (i, j) is m_{i-j} for i >= j and 0 above the
diagonal.  The family is closed under multiplication (truncated convolution
of first columns) and, when m_0 != 0, under inversion (a short recurrence).
All routines here work on the column representation; ``to_dense`` exists for
oracles and for the dense solvers elsewhere in the package.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

# Truncated convolutions switch from the direct O(n^2) path to FFT above
# this output length.  The direct path doubles as the oracle for the FFT
# path in the test suite; both must agree to 1e-10 relative.
DIRECT_CONV_THRESHOLD = 512


class SingularMatrixError(ArithmeticError):
    """Leading coefficient is zero, so the triangular matrix is singular."""


@dataclass(frozen=True)
class ToeplitzColumn:
    """First column of a lower-triangular Toeplitz matrix.

    coeffs: the column (m_0, ..., m_{n-1}), length >= 1.
    bandwidth: optional p <= n asserting m_j = 0 for j >= p, i.e. the
        matrix has at most p nonzero diagonals.  Construction fails if the
        tail is not exactly zero; use ``banded`` to truncate instead.
    """

    coeffs: np.ndarray
    bandwidth: int | None = None

    def __post_init__(self):
        arr = np.asarray(self.coeffs, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("coefficient column must be 1-d and non-empty")
        if self.bandwidth is not None:
            p = self.bandwidth
            if not 1 <= p <= arr.size:
                raise ValueError(f"bandwidth {p} out of range for length {arr.size}")
            if p < arr.size and np.any(arr[p:] != 0.0):
                raise ValueError("coefficients beyond the stated bandwidth must be zero")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @classmethod
    def banded(cls, coeffs, p: int) -> "ToeplitzColumn":
        """Zero all coefficients at index >= p and tag the bandwidth."""
        arr = np.array(coeffs, dtype=np.float64)
        if not 1 <= p <= arr.size:
            raise ValueError(f"bandwidth {p} out of range for length {arr.size}")
        arr[p:] = 0.0
        return cls(arr, bandwidth=p)

    @property
    def n(self) -> int:
        return self.coeffs.size

    def __len__(self) -> int:
        return self.coeffs.size

    @property
    def effective_bandwidth(self) -> int:
        """Stated bandwidth, or the full length when untagged."""
        return self.bandwidth if self.bandwidth is not None else self.n


def convolve_truncated(a: np.ndarray, b: np.ndarray, length: int) -> np.ndarray:
    """First ``length`` coefficients of the polynomial product a*b.

    Direct convolution below DIRECT_CONV_THRESHOLD, FFT above.  Only the
    input prefixes that can reach the requested output length are touched,
    so the cost depends on ``length``, not on the full input sizes.
    """
    a = np.asarray(a, dtype=np.float64)[:length]
    b = np.asarray(b, dtype=np.float64)[:length]
    if length <= DIRECT_CONV_THRESHOLD:
        out = np.convolve(a, b)[:length]
    else:
        out = fftconvolve(a, b)[:length]
    if out.size < length:
        out = np.concatenate([out, np.zeros(length - out.size)])
    return out


def ltt_multiply(a: ToeplitzColumn, b: ToeplitzColumn) -> ToeplitzColumn:
    """Product of two LTT matrices: truncated convolution of the columns."""
    if a.n != b.n:
        raise ValueError(f"length mismatch: {a.n} vs {b.n}")
    out = convolve_truncated(a.coeffs, b.coeffs, a.n)
    p = None
    if a.bandwidth is not None and b.bandwidth is not None:
        p = min(a.n, a.bandwidth + b.bandwidth - 1)
        out[p:] = 0.0  # clear convolution roundoff beyond the exact support
    return ToeplitzColumn(out, bandwidth=p)


def ltt_inverse(a: ToeplitzColumn) -> ToeplitzColumn:
    """Column of the inverse LTT matrix.

    Recurrence: g_0 = 1/m_0 and g_j = -(1/m_0) * sum_{i=1..j} m_i g_{j-i}.
    Only the coefficients inside the input bandwidth enter each step, so a
    p-banded input inverts in O(n*p).  The inverse is generally unbanded.
    """
    m = a.coeffs
    if m[0] == 0.0:
        raise SingularMatrixError("leading coefficient is zero")
    n = a.n
    w = a.effective_bandwidth
    g = np.empty(n)
    g[0] = 1.0 / m[0]
    for j in range(1, n):
        t = min(j, w - 1)  # m_i = 0 for i >= w
        acc = np.dot(m[1:t + 1], g[j - t:j][::-1]) if t > 0 else 0.0
        g[j] = -acc / m[0]
    return ToeplitzColumn(g)


def banded_forward_solve(c: ToeplitzColumn, rhs: np.ndarray) -> np.ndarray:
    """Solve C Y = rhs by forward substitution with a rolling window.

    c: column with bandwidth p (untagged columns use the full length).
    rhs: array of shape (n,) or (n, d).
    Each output row needs only the previous p-1 rows:
    y_i = (rhs_i - sum_{j=1..min(i, p-1)} c_j y_{i-j}) / c_0.
    """
    m = c.coeffs
    if m[0] == 0.0:
        raise SingularMatrixError("leading coefficient is zero")
    z = np.asarray(rhs, dtype=np.float64)
    squeeze = z.ndim == 1
    if squeeze:
        z = z[:, None]
    if z.shape[0] != c.n:
        raise ValueError(f"rhs has {z.shape[0]} rows, expected {c.n}")
    p = c.effective_bandwidth
    y = np.empty_like(z)
    for i in range(c.n):
        w = min(i, p - 1)
        acc = m[1:w + 1] @ y[i - w:i][::-1] if w > 0 else 0.0
        y[i] = (z[i] - acc) / m[0]
    return y[:, 0] if squeeze else y


def ltt_frobenius_norm_sq(a: ToeplitzColumn) -> float:
    """Squared Frobenius norm: sum_j (n - j) m_j^2.

    Coefficient m_j fills the j-th subdiagonal, which has n - j entries.
    Summation is index-ascending and fixed, so results are reproducible.
    """
    m = a.coeffs
    weights = np.arange(a.n, 0, -1, dtype=np.float64)
    return float(np.sum(weights * m * m))


def to_dense(a: ToeplitzColumn) -> np.ndarray:
    """Materialize the full lower-triangular matrix (oracle/plumbing only)."""
    n = a.n
    out = np.zeros((n, n))
    for j in range(n):
        out[j:, j] = a.coeffs[:n - j]
    return out
