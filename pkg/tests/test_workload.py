"""Workload construction and spectral reference values against dense oracles."""

import math

import numpy as np
import pytest

from dpfactor.toeplitz import ltt_multiply, to_dense
from dpfactor.workload import (
    WorkloadSpec,
    geometric_column,
    nuclear_norm_lower_bound,
    prefix_sum_singular_value,
    prefix_sum_singular_values,
    workload_column,
)

GRID = [
    (1.0, 0.0), (1.0, 0.5), (1.0, 0.9), (1.0, 0.99),
    (0.999, 0.0), (0.999, 0.9), (0.9, 0.0), (0.9, 0.5),
    (0.5, 0.0), (0.5, 0.25), (0.35, 0.3),
]


def summation_oracle(n, alpha, beta):
    """a_j = sum_{i=0..j} alpha^i beta^{j-i}, computed term by term."""
    return np.array(
        [sum(alpha ** i * beta ** (j - i) for i in range(j + 1)) for j in range(n)]
    )


class TestWorkloadSpec:
    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            WorkloadSpec(0, 1.0, 0.0)
        with pytest.raises(ValueError):
            WorkloadSpec(4, 0.0, 0.0)
        with pytest.raises(ValueError):
            WorkloadSpec(4, 1.1, 0.0)
        with pytest.raises(ValueError):
            WorkloadSpec(4, 1.0, 1.0)
        with pytest.raises(ValueError):
            WorkloadSpec(4, 1.0, -0.1)

    def test_rejects_beta_at_or_above_alpha(self):
        with pytest.raises(ValueError):
            WorkloadSpec(4, 0.5, 0.6)
        with pytest.raises(ValueError):
            WorkloadSpec(4, 0.5, 0.5)


class TestWorkloadColumn:
    def test_prefix_sums(self):
        col = workload_column(WorkloadSpec(5, 1.0, 0.0))
        np.testing.assert_array_equal(col.coeffs, np.ones(5))

    def test_pure_decay(self):
        col = workload_column(WorkloadSpec(3, 0.5, 0.0))
        np.testing.assert_allclose(col.coeffs, [1.0, 0.5, 0.25], rtol=1e-15)

    def test_momentum_hand_values(self):
        col = workload_column(WorkloadSpec(3, 1.0, 0.9))
        np.testing.assert_allclose(col.coeffs, [1.0, 1.9, 2.71], rtol=1e-12)

    def test_matches_summation_oracle(self):
        for alpha, beta in GRID:
            got = workload_column(WorkloadSpec(20, alpha, beta)).coeffs
            np.testing.assert_allclose(
                got, summation_oracle(20, alpha, beta), rtol=1e-12,
                err_msg=f"alpha={alpha} beta={beta}",
            )

    def test_near_degenerate_pair_avoids_cancellation(self):
        alpha, beta = 0.9, 0.9 - 1e-13
        got = workload_column(WorkloadSpec(30, alpha, beta)).coeffs
        # almost-equal decay rates: a_j ~ (j+1) alpha^j
        expect = (np.arange(30) + 1) * 0.9 ** np.arange(30)
        np.testing.assert_allclose(got, expect, rtol=1e-9)

    def test_factors_into_geometric_columns(self):
        for alpha, beta in GRID:
            a = workload_column(WorkloadSpec(64, alpha, beta))
            prod = ltt_multiply(geometric_column(alpha, 64), geometric_column(beta, 64))
            np.testing.assert_allclose(prod.coeffs, a.coeffs, rtol=1e-12, atol=1e-14)

    def test_nondecreasing_when_alpha_is_one(self):
        for beta in (0.0, 0.5, 0.9):
            col = workload_column(WorkloadSpec(1024, 1.0, beta)).coeffs
            assert np.all(np.diff(col) >= -1e-12)

    def test_dominates_pure_decay(self):
        # componentwise a_j >= alpha^j for every spec
        for alpha, beta in GRID:
            col = workload_column(WorkloadSpec(128, alpha, beta)).coeffs
            assert np.all(col >= alpha ** np.arange(128) - 1e-12)


class TestGeometricColumn:
    def test_endpoints(self):
        np.testing.assert_array_equal(geometric_column(0.0, 3).coeffs, [1.0, 0.0, 0.0])
        np.testing.assert_array_equal(geometric_column(1.0, 3).coeffs, [1.0, 1.0, 1.0])

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            geometric_column(-0.1, 3)
        with pytest.raises(ValueError):
            geometric_column(1.1, 3)


class TestPrefixSumSingularValues:
    def test_matches_dense_svd(self):
        for n in (2, 8, 32, 64):
            dense = np.linalg.svd(np.tril(np.ones((n, n))), compute_uv=False)
            got = prefix_sum_singular_values(n)
            np.testing.assert_allclose(got, dense, rtol=1e-8)

    def test_scalar_accessor_agrees_and_descends(self):
        n = 100
        values = [prefix_sum_singular_value(i, n) for i in range(1, n + 1)]
        np.testing.assert_allclose(values, prefix_sum_singular_values(n), rtol=1e-15)
        assert np.all(np.diff(values) < 0)

    def test_index_out_of_range(self):
        with pytest.raises(IndexError):
            prefix_sum_singular_value(0, 4)
        with pytest.raises(IndexError):
            prefix_sum_singular_value(5, 4)

    def test_n_equal_one_is_exact(self):
        # 1/(2 sin(pi/6)) = 1; the 1x1 prefix-sum matrix is [1]
        assert prefix_sum_singular_value(1, 1) == pytest.approx(1.0)

    def test_geometric_singular_values_within_band(self):
        for t in (0.0, 0.3, 0.7, 0.95):
            for n in (2, 16, 64):
                sv = np.linalg.svd(to_dense(geometric_column(t, n)), compute_uv=False)
                assert np.all(sv <= 1.0 / (1.0 - t) + 1e-9)
                assert np.all(sv >= 1.0 / (1.0 + t) - 1e-9)


class TestNuclearNormLowerBound:
    def test_alpha_below_one_is_n(self):
        assert nuclear_norm_lower_bound(WorkloadSpec(10, 0.5, 0.0)) == 10.0

    def test_alpha_one_formula(self):
        got = nuclear_norm_lower_bound(WorkloadSpec(100, 1.0, 0.0))
        assert got == pytest.approx(100 * math.log(101) / math.pi)

    def test_dense_nuclear_norm_dominates_bound(self):
        for alpha, beta in GRID:
            for n in (8, 32, 64):
                spec = WorkloadSpec(n, alpha, beta)
                dense = to_dense(workload_column(spec))
                nuclear = float(np.sum(np.linalg.svd(dense, compute_uv=False)))
                assert nuclear >= nuclear_norm_lower_bound(spec) - 1e-9, (alpha, beta, n)
