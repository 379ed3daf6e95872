import math

import numpy as np
import pytest

from mvgamma import (
    AdmissibilityError,
    CorrelationMatrix,
    MvGammaParams,
    OracleParams,
    RngStream,
    ShapeParameter,
    cdf_mc,
    cdf_oracle,
    gamma_cdf,
    gamma_pdf,
    laplace_transform,
    lt_oracle,
    mixed_partial_cdf_mc,
    pdf_mc,
    random_correlation,
    validate_admissibility,
)
from mvgamma.estimators import DEFAULT_SERIES, factor_columns, run_chunked
from mvgamma.wishart import quad_forms

RHO_HALF = CorrelationMatrix([[1.0, 0.5], [0.5, 1.0]])


class TestAdmissibility:
    def test_integer_two_alpha_any_dimension(self):
        assert validate_admissibility(0.5, 10) is None

    def test_large_alpha(self):
        assert validate_admissibility(1.3, 3) is None  # 2.6 > 1

    def test_violation(self):
        msg = validate_admissibility(0.7, 5)
        assert msg is not None and "1.4" in msg

    def test_params_reject_inadmissible(self):
        r = random_correlation(5, seed=1, min_eig_floor=0.1)
        with pytest.raises(AdmissibilityError):
            MvGammaParams(ShapeParameter(0.7), r)


class TestLaplaceTransform:
    def test_zero_t(self):
        p = MvGammaParams(ShapeParameter(1.0), RHO_HALF)
        assert laplace_transform(p, [0.0, 0.0]) == 1.0

    def test_hand_value(self):
        p = MvGammaParams(ShapeParameter(1.0), RHO_HALF)
        assert laplace_transform(p, [1.0, 1.0]) == pytest.approx(1.0 / 3.75, rel=1e-14)

    def test_identity_factorizes(self):
        p = MvGammaParams(ShapeParameter(1.7), CorrelationMatrix(np.eye(3)))
        t = np.array([0.3, 1.1, 2.0])
        assert laplace_transform(p, t) == pytest.approx(float(np.prod((1 + t) ** -1.7)), rel=1e-14)

    def test_rejects_negative_t(self):
        p = MvGammaParams(ShapeParameter(1.0), RHO_HALF)
        with pytest.raises(ValueError):
            laplace_transform(p, [-0.1, 0.0])


class TestCdfMc:
    def test_identity_matrix_exact_zero_variance(self, backend):
        p = MvGammaParams(ShapeParameter(1.0), CorrelationMatrix(np.eye(3)))
        x = [1.0, 2.0, 0.5]
        est = cdf_mc(p, x, 5000, RngStream(3))
        exact = float(np.prod([gamma_cdf(1.0, v) for v in x]))
        assert est.value == pytest.approx(exact, abs=1e-13)
        assert est.std_err <= 1e-12

    def test_univariate_margin(self, backend):
        p = MvGammaParams(ShapeParameter(0.8), CorrelationMatrix([[1.0]]))
        est = cdf_mc(p, [1.3], 100, RngStream(4))
        assert est.value == pytest.approx(gamma_cdf(0.8, 1.3), abs=1e-13)
        assert est.std_err <= 1e-13

    def test_against_gaussian_oracle(self, backend):
        p = MvGammaParams(ShapeParameter(0.5), RHO_HALF)
        est = cdf_mc(p, [1.0, 1.0], 200_000, RngStream(42))
        oest = cdf_oracle(OracleParams(1, RHO_HALF), [1.0, 1.0], 200_000, RngStream(43))
        assert abs(est.value - oest.value) <= 3 * math.hypot(est.std_err, oest.std_err)

    def test_half_shape_gaussian_identity_across_correlations(self, backend):
        # alpha = 1/2 is the Gaussian-box law P(|Z_j| <= sqrt(2 x_j))
        cases = [
            (2, [[1.0, 0.3], [0.3, 1.0]]),
            (2, [[1.0, -0.6], [-0.6, 1.0]]),
            (3, [[1.0, 0.5, 0.2], [0.5, 1.0, 0.4], [0.2, 0.4, 1.0]]),
            (3, [[1.0, 0.7, 0.5], [0.7, 1.0, 0.6], [0.5, 0.6, 1.0]]),
        ]
        for k, (n, rows) in enumerate(cases):
            r = CorrelationMatrix(rows)
            x = [1.0] * n
            est = cdf_mc(MvGammaParams(ShapeParameter(0.5), r), x, 80_000, RngStream(60, k))
            orc = cdf_oracle(OracleParams(1, r), x, 160_000, RngStream(61, k))
            assert abs(est.value - orc.value) <= 3 * math.hypot(est.std_err, orc.std_err), (n, k)

    def test_estimates_lie_in_unit_interval(self, backend):
        for seed in range(3):
            r = random_correlation(3, seed=seed, min_eig_floor=0.1)
            p = MvGammaParams(ShapeParameter(1.0), r)
            est = cdf_mc(p, [0.5, 1.0, 2.0], 2000, RngStream(seed))
            assert 0.0 <= est.value <= 1.0

    def test_monotone_in_x_common_random_numbers(self, backend):
        r = random_correlation(3, seed=5, min_eig_floor=0.1)
        p = MvGammaParams(ShapeParameter(1.0), r)
        values = [
            cdf_mc(p, [x1, 1.0, 1.0], 20_000, RngStream(11)).value for x1 in (0.5, 1.0, 1.5, 2.0)
        ]
        assert all(b >= a for a, b in zip(values, values[1:]))  # exact per draw

    def test_rejects_bad_x(self):
        p = MvGammaParams(ShapeParameter(1.0), RHO_HALF)
        with pytest.raises(ValueError):
            cdf_mc(p, [1.0], 100, RngStream(0))
        with pytest.raises(ValueError):
            cdf_mc(p, [1.0, -1.0], 100, RngStream(0))
        with pytest.raises(ValueError):
            cdf_mc(p, [1.0, 1.0], 0, RngStream(0))


class TestPdfMc:
    def test_identity_matrix(self, backend):
        p = MvGammaParams(ShapeParameter(2.0), CorrelationMatrix(np.eye(2)))
        x = [1.0, 0.7]
        est = pdf_mc(p, x, 3000, RngStream(8))
        exact = float(np.prod([gamma_pdf(2.0, v) for v in x]))
        assert est.value == pytest.approx(exact, abs=1e-13)
        assert est.std_err <= 1e-12

    def test_quadrature_reproduces_cdf(self, backend):
        # integral of the pdf over [0, L]^2 equals F(L, L): Gauss-Legendre
        # nodes, every pdf estimate on common draws
        p = MvGammaParams(ShapeParameter(1.0), RHO_HALF)
        L = 4.0
        nodes, weights = np.polynomial.legendre.leggauss(24)
        pts = 0.5 * L * (nodes + 1.0)
        w = 0.5 * L * weights
        total, var_total = 0.0, 0.0
        for i, xi in enumerate(pts):
            for j, xj in enumerate(pts):
                est = pdf_mc(p, [xi, xj], 4000, RngStream(100))
                total += w[i] * w[j] * est.value
                var_total += (w[i] * w[j] * est.std_err) ** 2
        cdf = cdf_mc(p, [L, L], 400_000, RngStream(101))
        tol = 3 * math.sqrt(var_total + cdf.std_err**2) + 1e-4  # + quadrature error
        assert total == pytest.approx(cdf.value, abs=tol)

    def test_laplace_transform_consistency(self, backend):
        # E exp(-t.X) computed from oracle draws against the exact transform
        p = MvGammaParams(ShapeParameter(1.0), RHO_HALF)
        t = [0.6, 1.1]
        est = lt_oracle(OracleParams(2, RHO_HALF), t, 200_000, RngStream(55))
        assert abs(est.value - laplace_transform(p, t)) <= 3 * est.std_err


class TestMixedPartial:
    def test_empty_set_equals_cdf(self, backend):
        r = random_correlation(3, seed=2, min_eig_floor=0.1)
        p = MvGammaParams(ShapeParameter(1.0), r)
        a = mixed_partial_cdf_mc(p, [1.0, 1.0, 1.0], (), 5000, RngStream(6))
        b = cdf_mc(p, [1.0, 1.0, 1.0], 5000, RngStream(6))
        assert a == b  # identical draws, identical arithmetic

    def test_full_set_equals_pdf(self, backend):
        r = random_correlation(3, seed=2, min_eig_floor=0.1)
        p = MvGammaParams(ShapeParameter(1.0), r)
        a = mixed_partial_cdf_mc(p, [1.0, 1.0, 1.0], (1, 2, 3), 5000, RngStream(6))
        b = pdf_mc(p, [1.0, 1.0, 1.0], 5000, RngStream(6))
        assert a == b

    def test_nonnegative(self, backend):
        r = random_correlation(4, seed=9, min_eig_floor=0.1)
        p = MvGammaParams(ShapeParameter(1.5), r)
        est = mixed_partial_cdf_mc(p, [1.0, 0.5, 2.0, 1.0], (2, 4), 5000, RngStream(10))
        assert est.value >= 0.0

    def test_matches_finite_difference(self, backend):
        # d/dx1 F vs a common-random-number central difference, h = 1e-3
        p = MvGammaParams(ShapeParameter(0.5), RHO_HALF)
        x = np.array([1.0, 1.0])
        h = 1e-3
        deriv = mixed_partial_cdf_mc(p, x, (1,), 100_000, RngStream(20))
        lam, b = p.split.lam, p.split.b_rows
        no_mask = np.zeros(2, dtype=bool)

        def per_chunk(batch, count):
            q = quad_forms(batch, b)
            hi = factor_columns(0.5, lam, [x[0] + h, x[1]], q, no_mask, DEFAULT_SERIES).prod(axis=1)
            lo = factor_columns(0.5, lam, [x[0] - h, x[1]], q, no_mask, DEFAULT_SERIES).prod(axis=1)
            return ((hi - lo) / (2 * h))[:, np.newaxis]

        mean, se = run_chunked(p.wishart_spec(), RngStream(21), 100_000, per_chunk, 1)
        combined = math.hypot(deriv.std_err, float(se[0]))
        assert abs(deriv.value - float(mean[0])) <= 3 * combined + 1e-4  # + O(h^2)

    def test_rejects_out_of_range_index(self):
        p = MvGammaParams(ShapeParameter(1.0), RHO_HALF)
        with pytest.raises(ValueError):
            mixed_partial_cdf_mc(p, [1.0, 1.0], (3,), 100, RngStream(0))


class TestDeterminism:
    def test_workers_do_not_change_results(self, backend):
        r = random_correlation(3, seed=3, min_eig_floor=0.1)
        p = MvGammaParams(ShapeParameter(1.5), r)
        serial = cdf_mc(p, [1.0, 1.0, 1.0], 100_000, RngStream(77), chunk_size=8192, workers=1)
        threaded = cdf_mc(p, [1.0, 1.0, 1.0], 100_000, RngStream(77), chunk_size=8192, workers=4)
        assert serial == threaded

    def test_repeat_identical(self, backend):
        p = MvGammaParams(ShapeParameter(0.5), RHO_HALF)
        a = cdf_mc(p, [1.0, 1.0], 30_000, RngStream(12))
        b = cdf_mc(p, [1.0, 1.0], 30_000, RngStream(12))
        assert a == b

    def test_streams_change_results(self, backend):
        p = MvGammaParams(ShapeParameter(0.5), RHO_HALF)
        a = cdf_mc(p, [1.0, 1.0], 30_000, RngStream(12, 0))
        b = cdf_mc(p, [1.0, 1.0], 30_000, RngStream(12, 1))
        assert a.value != b.value
