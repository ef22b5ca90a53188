"""Streaming correlated-noise generation and Monte-Carlo validation.

Releasing privatized SGD updates requires the rows of C^{-1} Z one at a
time, where Z has i.i.d. Gaussian entries scaled by sigma * sens(C).
For a factor with bandwidth p the forward-substitution recurrence needs
only the previous p - 1 noise rows, so the generator runs in O(p * d)
memory regardless of the number of steps.  The Monte-Carlo driver checks
the closed-form expected error against simulation of the mechanism.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .analysis import ErrorReport, expected_error
from .factor import Factorization
from .sensitivity import ParticipationSchema
from .toeplitz import SingularMatrixError, ToeplitzColumn, convolve_truncated


class NoiseStream:
    """Row-at-a-time generator of zeta * [C^{-1} Z]_i.

    c: noise factor column, bandwidth p (untagged columns keep a full
        window, which is permitted but needs O(n d) memory).
    sens: sensitivity of C under the caller's participation schema; the
        Gaussian scale is sigma * sens per coordinate.
    Draw order is one length-d row per step, so a (n, d) matrix drawn
    from the same seeded generator consumes identical variates.
    """

    def __init__(
        self,
        c: ToeplitzColumn,
        *,
        sens: float,
        sigma: float = 1.0,
        zeta: float = 1.0,
        d: int = 1,
        seed=None,
        rng: np.random.Generator | None = None,
    ):
        if c.coeffs[0] == 0.0:
            raise SingularMatrixError("leading coefficient is zero")
        if d < 1:
            raise ValueError("d must be >= 1")
        self.c = c
        self.d = d
        self.sigma = sigma
        self.zeta = zeta
        self.scale = sigma * sens
        self._rng = rng if rng is not None else np.random.default_rng(seed)
        self._buffer: deque[np.ndarray] = deque(maxlen=c.effective_bandwidth - 1)
        self._emitted = 0

    @property
    def steps_emitted(self) -> int:
        return self._emitted

    @property
    def buffer_rows(self) -> int:
        return len(self._buffer)

    def next_row(self) -> np.ndarray:
        """Advance one step; raises RuntimeError after n rows."""
        if self._emitted >= self.c.n:
            raise RuntimeError("noise stream exhausted")
        m = self.c.coeffs
        z = self._rng.normal(0.0, self.scale, size=self.d)
        acc = np.zeros(self.d)
        for j, row in enumerate(reversed(self._buffer), start=1):
            acc += m[j] * row
        y = (z - acc) / m[0]
        self._buffer.append(y)
        self._emitted += 1
        return self.zeta * y

    def __iter__(self):
        while self._emitted < self.c.n:
            yield self.next_row()


@dataclass(frozen=True)
class MonteCarloReport:
    """Empirical estimate of the expected error against the analytic value."""

    estimate: float
    std_error: float
    analytic: ErrorReport
    trials: int
    d: int
    sigma: float
    seed: int


def simulate_mechanism(
    f: Factorization,
    schema: ParticipationSchema,
    *,
    d: int = 1,
    sigma: float = 1.0,
    trials: int = 1000,
    seed: int = 0,
) -> MonteCarloReport:
    """Estimate sqrt(E ||B Z||_F^2 / n) / sigma by sampling the mechanism.

    Z is drawn with per-entry scale sigma * sens(C), so for any sigma > 0
    the estimate targets the analytic expected error.  Trials use
    independently spawned child seeds; results are reproducible for a
    fixed master seed.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    report = expected_error(f, schema)
    n = f.spec.n
    scale = sigma * report.sens
    toeplitz_b = f.b if isinstance(f.b, ToeplitzColumn) else None
    dense_b = None if toeplitz_b is not None else f.b_dense()
    values = np.empty(trials)
    for t, child in enumerate(np.random.SeedSequence(seed).spawn(trials)):
        rng = np.random.default_rng(child)
        z = rng.normal(0.0, scale, size=(n, d))
        if toeplitz_b is not None:
            bz = np.column_stack(
                [convolve_truncated(toeplitz_b.coeffs, z[:, j], n) for j in range(d)]
            )
        else:
            bz = dense_b @ z
        values[t] = float(np.sum(bz * bz))
    if sigma == 0.0:
        estimate, std_error = 0.0, 0.0
    else:
        values /= n * sigma * sigma
        mean = float(np.mean(values))
        estimate = float(np.sqrt(mean))
        if trials > 1 and mean > 0.0:
            std_error = float(np.std(values, ddof=1) / (2.0 * np.sqrt(mean * trials)))
        else:
            std_error = 0.0
    return MonteCarloReport(
        estimate=estimate,
        std_error=std_error,
        analytic=report,
        trials=trials,
        d=d,
        sigma=sigma,
        seed=seed,
    )
