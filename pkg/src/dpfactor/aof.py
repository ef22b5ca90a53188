"""Numerically optimized banded factorization of the workload Gram.

Minimizes trace(A^T A S^{-1}) over symmetric positive-definite S with
unit diagonal and S_ij = 0 for |i - j| >= b, by projected gradient
descent with a line search that preserves positive definiteness.  The
noise factor C is then the lower-triangular matrix with C^T C = S,
recovered by a reversed Cholesky factorization after flooring the
eigenvalues of S, and B = A C^{-1}.

Because feasible S has unit diagonal and band support, the columns of C
are unit-norm with pairwise-disjoint supports at admissible positions,
so the sensitivity is exactly sqrt(k) and the objective equals
||B||_F^2.  Dense linear algebra throughout; intended for n up to a few
thousand.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
import math

import numpy as np
import scipy.linalg

from .factor import Factorization
from .toeplitz import to_dense
from .workload import WorkloadSpec, workload_column


class NotPositiveDefiniteError(ArithmeticError):
    """Matrix is not positive definite where the algorithm requires it."""


@dataclass(frozen=True)
class AofProblem:
    """Dense optimization instance: workload Gram plus the band constraint."""

    spec: WorkloadSpec
    band: int
    gram: np.ndarray  # A^T A, symmetric positive definite


@dataclass(frozen=True)
class AofSolution:
    """Solver output.

    s: final feasible iterate (unit diagonal, band zeros, PD).
    c: lower-triangular factor of s after eigenvalue flooring.
    objective_trace: trace(A^T A s^{-1}) at the final iterate.
    iterations: accepted descent steps.
    converged: tolerance met or no feasible descent left (stall); False
        only when max_iters ran out.
    floor_applied: an eigenvalue of s was below the extraction floor.
    """

    s: np.ndarray
    c: np.ndarray
    objective_trace: float
    iterations: int
    converged: bool
    floor_applied: bool


def aof_problem(spec: WorkloadSpec, band: int) -> AofProblem:
    if not 1 <= band <= spec.n:
        raise ValueError(f"band {band} out of range for n={spec.n}")
    a = to_dense(workload_column(spec))
    return AofProblem(spec, band, a.T @ a)


def _cholesky(s: np.ndarray) -> np.ndarray:
    try:
        return scipy.linalg.cholesky(s, lower=True, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(str(exc)) from exc


def aof_objective(s: np.ndarray, gram: np.ndarray) -> float:
    """trace(gram @ s^{-1}) via a Cholesky solve (no explicit inverse)."""
    low = _cholesky(s)
    x = scipy.linalg.cho_solve((low, True), gram, check_finite=False)
    return float(np.trace(x))


def aof_gradient(s: np.ndarray, gram: np.ndarray) -> np.ndarray:
    """Gradient of the objective: -s^{-1} gram s^{-1}, symmetrized."""
    low = _cholesky(s)
    sinv = scipy.linalg.cho_solve((low, True), np.eye(s.shape[0]), check_finite=False)
    m = -sinv @ gram @ sinv
    return (m + m.T) / 2.0


def project_feasible(s: np.ndarray, band: int) -> np.ndarray:
    """Zero entries outside the band and reset the diagonal to one."""
    n = s.shape[0]
    i = np.arange(n)
    out = np.where(np.abs(i[:, None] - i[None, :]) < band, s, 0.0)
    np.fill_diagonal(out, 1.0)
    return out


def aof_solve(
    problem: AofProblem,
    *,
    max_iters: int = 5000,
    tol: float = 1e-8,
    window: int = 5,
    max_backtracks: int = 60,
    initial: np.ndarray | None = None,
    floor: float | None = None,
    callback=None,
) -> AofSolution:
    """Projected gradient descent with a PD-preserving line search.

    The step size starts at 1, halves until the projected iterate is
    positive definite and the objective strictly decreases, and doubles
    after each accepted step (it may grow again later, it is not forced
    to shrink monotonically).  Convergence: relative objective change
    below ``tol`` across ``window`` accepted steps.  ``callback``
    receives (accepted_steps, objective) after each accepted step.
    """
    gram, band = problem.gram, problem.band
    s = np.eye(problem.spec.n) if initial is None else project_feasible(initial, band)
    value = aof_objective(s, gram)  # raises if the start is not PD
    eta = 1.0
    recent = deque([value], maxlen=window + 1)
    accepted = 0
    converged = False
    for _ in range(max_iters):
        grad = aof_gradient(s, gram)
        step_ok = False
        for _ in range(max_backtracks):
            candidate = project_feasible(s - eta * grad, band)
            try:
                candidate_value = aof_objective(candidate, gram)
            except NotPositiveDefiniteError:
                eta *= 0.5
                continue
            if candidate_value < value:
                step_ok = True
                break
            eta *= 0.5
        if not step_ok:
            converged = True  # no feasible descent step left
            break
        s, value = candidate, candidate_value
        eta *= 2.0
        accepted += 1
        recent.append(value)
        if callback is not None:
            callback(accepted, value)
        if len(recent) == window + 1 and abs(recent[0] - value) < tol * abs(value):
            converged = True
            break
    c, floor_applied = extract_c_with_floor(s, floor=floor)
    return AofSolution(
        s=s,
        c=c,
        objective_trace=value,
        iterations=accepted,
        converged=converged,
        floor_applied=floor_applied,
    )


def extract_c_with_floor(
    s: np.ndarray, floor: float | None = None
) -> tuple[np.ndarray, bool]:
    """Lower-triangular C with C^T C = S, after flooring the spectrum of S.

    Eigenvalues below ``floor`` (default sqrt(1/n)) are raised to it, which
    guarantees a valid Cholesky factorization even for indefinite input.
    A plain Cholesky factor is upper-left oriented (L L^T = S); reversing
    row and column order before and after factoring yields the C^T C = S
    orientation while keeping any band structure.  Returns (C, whether a
    clamp occurred).
    """
    n = s.shape[0]
    if floor is None:
        floor = math.sqrt(1.0 / n)
    eigenvalues, vectors = np.linalg.eigh((s + s.T) / 2.0)
    floor_applied = bool(np.any(eigenvalues < floor))
    if floor_applied:
        s = (vectors * np.maximum(eigenvalues, floor)) @ vectors.T
        s = (s + s.T) / 2.0
    reverse = slice(None, None, -1)
    low = _cholesky(s[reverse, reverse])
    return low[reverse, reverse].T, floor_applied


def aof_factorization(
    spec: WorkloadSpec, band: int, **options
) -> tuple[Factorization, AofSolution]:
    """Solve the banded problem and package (B, C) with B = A C^{-1}."""
    solution = aof_solve(aof_problem(spec, band), **options)
    c = solution.c
    a = to_dense(workload_column(spec))
    b = scipy.linalg.solve_triangular(c, a.T, lower=True, trans="T", check_finite=False).T
    banded = (not solution.floor_applied) or band >= spec.n
    f = Factorization("aof", spec, b, c, p=band if banded else None)
    return f, solution
