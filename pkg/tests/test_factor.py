"""Square-root, banded square-root, and baseline factorizations."""

import math

import numpy as np
import pytest

from dpfactor.factor import (
    KINDS,
    banded_sqrt_column,
    banded_sqrt_left_factor,
    invsqrt_series,
    make_factorization,
    reconstruction_error,
    sqrt_column,
)
from dpfactor.toeplitz import ToeplitzColumn, convolve_truncated, to_dense
from dpfactor.workload import WorkloadSpec, workload_column

GRID = [
    (1.0, 0.0), (1.0, 0.5), (1.0, 0.9), (1.0, 0.99),
    (0.999, 0.0), (0.999, 0.9), (0.9, 0.5), (0.5, 0.0),
]


def summation_root_oracle(spec):
    """c_j = sum_{i=0..j} alpha^{j-i} r_{j-i} r_i beta^i, term by term."""
    r = invsqrt_series(spec.n)
    return np.array(
        [
            sum(
                spec.alpha ** (j - i) * r[j - i] * r[i] * spec.beta ** i
                for i in range(j + 1)
            )
            for j in range(spec.n)
        ]
    )


class TestInvsqrtSeries:
    def test_first_values(self):
        np.testing.assert_allclose(invsqrt_series(4), [1.0, 0.5, 0.375, 0.3125])

    def test_rejects_nonpositive_count(self):
        with pytest.raises(ValueError):
            invsqrt_series(0)

    def test_bounds(self):
        r = invsqrt_series(65)
        j = np.arange(1, 65, dtype=np.float64)
        assert np.all(r[1:] >= 1.0 / (2.0 * np.sqrt(j)) - 1e-15)
        assert np.all(r[1:] <= 1.0 / np.sqrt(np.pi * j) + 1e-15)

    def test_squares_to_prefix_sum_column(self):
        r = invsqrt_series(32)
        conv = np.convolve(r, r)[:32]
        np.testing.assert_allclose(conv, np.ones(32), rtol=1e-12)


class TestSqrtColumn:
    def test_beta_zero_reduces_to_series(self):
        spec = WorkloadSpec(8, 1.0, 0.0)
        np.testing.assert_array_equal(sqrt_column(spec).coeffs, invsqrt_series(8))

    def test_second_coefficient_is_mean_of_rates(self):
        for alpha, beta in GRID:
            c = sqrt_column(WorkloadSpec(4, alpha, beta)).coeffs
            assert c[0] == pytest.approx(1.0)
            assert c[1] == pytest.approx((alpha + beta) / 2.0, rel=1e-12), (alpha, beta)

    def test_momentum_hand_value(self):
        c = sqrt_column(WorkloadSpec(4, 1.0, 0.9)).coeffs
        assert c[1] == pytest.approx(0.95)

    def test_matches_summation_oracle(self):
        for alpha, beta in GRID:
            spec = WorkloadSpec(24, alpha, beta)
            np.testing.assert_allclose(
                sqrt_column(spec).coeffs, summation_root_oracle(spec), rtol=1e-12,
                err_msg=f"alpha={alpha} beta={beta}",
            )

    def test_squares_to_workload(self):
        for alpha, beta in GRID:
            spec = WorkloadSpec(512, alpha, beta)
            c = sqrt_column(spec).coeffs
            sq = convolve_truncated(c, c, spec.n)
            a = workload_column(spec).coeffs
            np.testing.assert_allclose(sq, a, rtol=0, atol=1e-9, err_msg=f"{alpha},{beta}")

    def test_prefix_request_matches_full(self):
        # full-length run uses the FFT path, the prefix the direct one
        spec = WorkloadSpec(1000, 0.999, 0.9)
        np.testing.assert_allclose(
            sqrt_column(spec, count=40).coeffs, sqrt_column(spec).coeffs[:40], rtol=1e-12
        )

    def test_rejects_bad_count(self):
        with pytest.raises(ValueError):
            sqrt_column(WorkloadSpec(4, 1.0, 0.0), count=5)
        with pytest.raises(ValueError):
            sqrt_column(WorkloadSpec(4, 1.0, 0.0), count=0)

    def test_monotone_nonincreasing(self):
        for alpha, beta in GRID:
            c = sqrt_column(WorkloadSpec(1024, alpha, beta)).coeffs
            assert np.all(np.diff(c) <= 1e-12), (alpha, beta)
            # strict positivity is only observable above the conv noise floor;
            # the direct path at n <= 512 carries it exactly
            assert np.all(c > -1e-15), (alpha, beta)
            direct = sqrt_column(WorkloadSpec(512, alpha, beta)).coeffs
            assert np.all(direct > 0.0), (alpha, beta)

    def test_coefficient_sandwich(self):
        for alpha, beta in GRID:
            c = sqrt_column(WorkloadSpec(1024, alpha, beta)).coeffs
            j = np.arange(1, 1024, dtype=np.float64)
            low = alpha ** j / (2.0 * np.sqrt(j + 1.0))
            high = alpha ** j / ((1.0 - beta / alpha) * np.sqrt(j + 1.0))
            assert np.all(c[1:] >= low - 1e-15), (alpha, beta)
            assert np.all(c[1:] <= high + 1e-15), (alpha, beta)

    def test_partial_sum_bounds_alpha_one(self):
        for beta in (0.0, 0.5, 0.9):
            c = sqrt_column(WorkloadSpec(1024, 1.0, beta)).coeffs
            sums = np.cumsum(c * c)
            for j in (2, 16, 128, 1023):
                assert sums[j - 1] >= math.log(j + 1) / 4.0 - 1e-12, (beta, j)
                assert sums[j - 1] <= (1.0 + math.log(j)) / (1.0 - beta) ** 2 + 1e-12, (beta, j)


class TestBandedSqrt:
    def test_full_bandwidth_equals_sqrt(self):
        spec = WorkloadSpec(16, 1.0, 0.5)
        np.testing.assert_array_equal(
            banded_sqrt_column(spec, 16).coeffs, sqrt_column(spec).coeffs
        )

    def test_bandwidth_one_is_unit_column(self):
        col = banded_sqrt_column(WorkloadSpec(5, 0.9, 0.5), 1)
        np.testing.assert_array_equal(col.coeffs, [1.0, 0.0, 0.0, 0.0, 0.0])

    def test_truncation_example(self):
        col = banded_sqrt_column(WorkloadSpec(4, 1.0, 0.0), 2)
        np.testing.assert_array_equal(col.coeffs, [1.0, 0.5, 0.0, 0.0])
        assert col.bandwidth == 2

    def test_rejects_bad_bandwidth(self):
        with pytest.raises(ValueError):
            banded_sqrt_column(WorkloadSpec(4, 1.0, 0.0), 0)
        with pytest.raises(ValueError):
            banded_sqrt_column(WorkloadSpec(4, 1.0, 0.0), 5)

    def test_left_factor_hand_example(self):
        b = banded_sqrt_left_factor(WorkloadSpec(4, 1.0, 0.0), 2)
        np.testing.assert_allclose(b.coeffs, [1.0, 0.5, 0.75, 0.625], rtol=1e-12)

    def test_left_factor_at_full_bandwidth_is_sqrt(self):
        spec = WorkloadSpec(32, 1.0, 0.9)
        np.testing.assert_allclose(
            banded_sqrt_left_factor(spec, 32).coeffs,
            sqrt_column(spec).coeffs,
            rtol=1e-10,
        )

    def test_left_factor_identities(self):
        # first p coefficients equal c; the next p are doubled c
        for alpha, beta in [(1.0, 0.0), (1.0, 0.9), (0.999, 0.0)]:
            spec = WorkloadSpec(256, alpha, beta)
            p = 32
            b = banded_sqrt_left_factor(spec, p).coeffs
            c = sqrt_column(spec).coeffs
            np.testing.assert_allclose(b[:p], c[:p], rtol=1e-10, err_msg=f"{alpha},{beta}")
            np.testing.assert_allclose(
                b[p:2 * p], 2.0 * c[p:2 * p], rtol=1e-9, err_msg=f"{alpha},{beta}"
            )

    def test_left_factor_tail_stays_bounded(self):
        # weak decay check far beyond the band
        for alpha, beta in [(1.0, 0.0), (1.0, 0.9), (0.999, 0.0)]:
            spec = WorkloadSpec(256, alpha, beta)
            p = 32
            b = banded_sqrt_left_factor(spec, p).coeffs
            c = sqrt_column(spec).coeffs
            assert np.all(np.abs(b[2 * p:]) <= 2.0 * np.max(c[p:]) + 1e-12), (alpha, beta)


class TestMakeFactorization:
    def test_kind_table_is_public(self):
        assert KINDS == ("bsr", "sqrt", "id-c", "id-b", "aof")

    def test_bsr_requires_p(self):
        with pytest.raises(ValueError):
            make_factorization("bsr", WorkloadSpec(4, 1.0, 0.0))

    def test_non_bsr_rejects_p(self):
        with pytest.raises(ValueError):
            make_factorization("sqrt", WorkloadSpec(4, 1.0, 0.0), p=2)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            make_factorization("nope", WorkloadSpec(4, 1.0, 0.0))

    def test_aof_not_assembled_here(self):
        with pytest.raises(ValueError):
            make_factorization("aof", WorkloadSpec(4, 1.0, 0.0))

    def test_input_perturbation_shape(self):
        f = make_factorization("id-c", WorkloadSpec(4, 1.0, 0.0))
        np.testing.assert_array_equal(f.c.coeffs, [1.0, 0.0, 0.0, 0.0])
        np.testing.assert_array_equal(f.b.coeffs, np.ones(4))

    def test_output_perturbation_shape(self):
        f = make_factorization("id-b", WorkloadSpec(4, 1.0, 0.0))
        np.testing.assert_array_equal(f.b.coeffs, [1.0, 0.0, 0.0, 0.0])
        np.testing.assert_array_equal(f.c.coeffs, np.ones(4))

    def test_unit_diagonal_for_root_kinds(self):
        for kind, p in [("sqrt", None), ("bsr", 8)]:
            f = make_factorization(kind, WorkloadSpec(32, 1.0, 0.9), p=p)
            assert f.c.coeffs[0] == 1.0

    def test_reconstruction_all_kinds(self):
        for alpha, beta in GRID:
            spec = WorkloadSpec(64, alpha, beta)
            for kind, p in [("sqrt", None), ("bsr", 8), ("id-c", None), ("id-b", None)]:
                f = make_factorization(kind, spec, p=p)
                assert reconstruction_error(f) < 1e-8, (kind, alpha, beta)

    def test_reconstruction_dense_path(self):
        spec = WorkloadSpec(16, 1.0, 0.5)
        g = make_factorization("bsr", spec, p=4)
        from dpfactor.factor import Factorization

        dense = Factorization("bsr", spec, to_dense(g.b), g.c, p=4)
        assert reconstruction_error(dense) < 1e-10

    def test_dense_product_reconstruction(self):
        for alpha, beta in GRID:
            spec = WorkloadSpec(48, alpha, beta)
            a = to_dense(workload_column(spec))
            for kind, p in [("sqrt", None), ("bsr", 8), ("id-c", None), ("id-b", None)]:
                f = make_factorization(kind, spec, p=p)
                prod = f.b_dense() @ f.c_dense()
                rel = np.linalg.norm(prod - a) / np.linalg.norm(a)
                assert rel < 1e-8, (kind, alpha, beta)

    def test_b_frobenius_matches_dense(self):
        spec = WorkloadSpec(32, 1.0, 0.9)
        for kind, p in [("sqrt", None), ("bsr", 8), ("id-c", None), ("id-b", None)]:
            f = make_factorization(kind, spec, p=p)
            dense = float(np.sum(f.b_dense() ** 2))
            assert f.b_frobenius_sq() == pytest.approx(dense, rel=1e-12)

    def test_b_frobenius_dense_input(self):
        from dpfactor.factor import Factorization

        spec = WorkloadSpec(8, 1.0, 0.0)
        m = np.tril(np.ones((8, 8)))
        f = Factorization("aof", spec, m, m)
        assert f.b_frobenius_sq() == pytest.approx(float(np.sum(m * m)))
        c = ToeplitzColumn(np.ones(8))
        assert Factorization("id-b", spec, c, c).b_frobenius_sq() == pytest.approx(
            float(np.sum(np.tril(np.ones((8, 8))) ** 2))
        )
