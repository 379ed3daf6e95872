import json
import math

import numpy as np
import pytest

from mvgamma import (
    BlockPartition,
    CorrelationMatrix,
    MatrixError,
    RngStream,
    ShapeParameter,
    SubsetSplit,
    averaged_correlations,
    canonical_corr_sq,
    cdf_tau_derivative_decomposed,
    coefficient_c,
    det,
    gci_gap,
    interpolate,
    lt_tau_derivative_closed,
    random_correlation,
    subset_splits,
)
from mvgamma.gci import cdf_tau_fd, coefficients_csv, lt_tau_derivative_fd, path_cdf_estimates

RHO_HALF = CorrelationMatrix([[1.0, 0.5], [0.5, 1.0]])
PART2 = BlockPartition.of(2, 1)


class TestBlockPartition:
    def test_of(self):
        part = BlockPartition.of(5, 2)
        assert part.n1 == 2 and part.n2 == 3
        assert part.block1() == (1, 2) and part.block2() == (3, 4, 5)

    def test_validation(self):
        with pytest.raises(MatrixError):
            BlockPartition.of(3, 0)
        with pytest.raises(MatrixError):
            BlockPartition.of(3, 3)


class TestInterpolate:
    def test_tau_one_is_identity(self):
        r_tau = interpolate(RHO_HALF, PART2, 1.0)
        assert np.array_equal(r_tau.entries, RHO_HALF.entries)

    def test_tau_zero_is_block_diagonal(self):
        r = random_correlation(4, seed=3, min_eig_floor=0.1)
        r_tau = interpolate(r, BlockPartition.of(4, 2), 0.0)
        assert np.all(r_tau.entries[:2, 2:] == 0.0)
        assert np.array_equal(r_tau.entries[:2, :2], r.entries[:2, :2])

    def test_hand_case(self):
        r = CorrelationMatrix([[1.0, 0.8], [0.8, 1.0]])
        r_tau = interpolate(r, PART2, 0.5)
        assert r_tau.entries[0, 1] == pytest.approx(0.4, abs=1e-15)
        assert det(r_tau.entries) == pytest.approx(0.84, abs=1e-14)

    def test_rejects_tau_outside_unit_interval(self):
        with pytest.raises(ValueError):
            interpolate(RHO_HALF, PART2, 1.5)


class TestSubsetSplits:
    def test_counts(self):
        assert len(subset_splits(2, BlockPartition.of(2, 1))) == 1
        assert len(subset_splits(3, BlockPartition.of(3, 1))) == 3
        assert len(subset_splits(4, BlockPartition.of(4, 2))) == 9

    def test_single_split_case(self):
        (s,) = subset_splits(2, PART2)
        assert s == SubsetSplit((1,), (2,))

    def test_lexicographic_order(self):
        splits = subset_splits(4, BlockPartition.of(4, 2))
        labels = [s.label() for s in splits]
        assert labels == [
            "{1}|{3}", "{1}|{3,4}", "{1}|{4}",
            "{1,2}|{3}", "{1,2}|{3,4}", "{1,2}|{4}",
            "{2}|{3}", "{2}|{3,4}", "{2}|{4}",
        ]


class TestCoefficient:
    def test_zero_at_tau_zero(self):
        assert coefficient_c(RHO_HALF, PART2, 0.0, SubsetSplit((1,), (2,)), 1.0) == 0.0

    def test_hand_value(self):
        # single canonical correlation: the (1 - tau^2 rho^2) factors cancel,
        # leaving c = 2*alpha*tau*rho^2 = 0.25
        c = coefficient_c(RHO_HALF, PART2, 0.5, SubsetSplit((1,), (2,)), 1.0)
        assert c == pytest.approx(0.25, abs=1e-14)

    def test_zero_cross_block(self):
        r = CorrelationMatrix([[1.0, 0.4, 0.0], [0.4, 1.0, 0.0], [0.0, 0.0, 1.0]])
        c = coefficient_c(r, BlockPartition.of(3, 2), 0.7, SubsetSplit((1, 2), (3,)), 1.0)
        assert c == 0.0

    def test_nonnegative_everywhere(self):
        r = random_correlation(4, seed=8, min_eig_floor=0.1)
        part = BlockPartition.of(4, 2)
        for s in subset_splits(4, part):
            for tau in (0.0, 0.25, 0.5, 0.75, 0.99):
                assert coefficient_c(r, part, tau, s, 1.3) >= 0.0

    def test_split_must_respect_partition(self):
        with pytest.raises(MatrixError):
            coefficient_c(RHO_HALF, PART2, 0.5, SubsetSplit((2,), (3,)), 1.0)


class TestSplitDeterminantIdentity:
    def test_identity_along_tau(self):
        # |R_tau,J| = |R_J1| |R_J2| prod(1 - tau^2 rho_i^2)
        gen = np.random.default_rng(12)
        for trial in range(10):
            n = int(gen.integers(3, 7))
            n1 = int(gen.integers(1, n))
            part = BlockPartition.of(n, n1)
            r = random_correlation(n, seed=200 + trial, min_eig_floor=0.05)
            splits = subset_splits(n, part)
            s = splits[int(gen.integers(0, len(splits)))]
            tau = float(gen.uniform(0.0, 1.0))
            rho_sq = canonical_corr_sq(r, s)
            idx = np.asarray(s.joint) - 1
            sub = r.entries[np.ix_(idx, idx)].copy()
            k = len(s.j1)
            sub[:k, k:] *= tau
            sub[k:, :k] *= tau
            i1 = np.asarray(s.j1) - 1
            i2 = np.asarray(s.j2) - 1
            expected = (
                det(r.entries[np.ix_(i1, i1)])
                * det(r.entries[np.ix_(i2, i2)])
                * float(np.prod(1.0 - tau * tau * rho_sq))
            )
            assert det(sub) == pytest.approx(expected, rel=1e-10)


class TestClosedFormDerivative:
    def test_zero_t(self):
        assert lt_tau_derivative_closed(RHO_HALF, PART2, 0.5, 1.0, [0.0, 0.0]) == 0.0

    def test_bivariate_reduction(self):
        # single split: derivative = 2*a*tau*rho^2 * t1*t2 * |I+R_tau T|^{-(a+1)}
        alpha, tau, rho = 0.7, 0.4, 0.5
        t = np.array([0.9, 1.4])
        r_tau = interpolate(RHO_HALF, PART2, tau)
        base = det(np.eye(2) + r_tau.entries * t[np.newaxis, :]) ** (-(alpha + 1))
        expected = 2 * alpha * tau * rho**2 * t[0] * t[1] * base
        got = lt_tau_derivative_closed(RHO_HALF, PART2, tau, alpha, t)
        assert got == pytest.approx(expected, rel=1e-12)

    def test_matches_finite_difference(self):
        gen = np.random.default_rng(77)
        for trial in range(12):
            n = int(gen.integers(2, 7))
            n1 = int(gen.integers(1, n))
            part = BlockPartition.of(n, n1)
            r = random_correlation(n, seed=300 + trial, min_eig_floor=0.08)
            tau = float(gen.uniform(0.1, 0.9))
            alpha = float(gen.choice([0.5, 1.0, 2.3]))
            t = gen.uniform(0.2, 2.0, n)
            closed = lt_tau_derivative_closed(r, part, tau, alpha, t)
            fd = lt_tau_derivative_fd(r, part, tau, alpha, t)
            assert closed == pytest.approx(fd, rel=1e-6)


class TestDecomposition:
    def test_zero_at_tau_zero(self, backend):
        total, terms = cdf_tau_derivative_decomposed(
            RHO_HALF, PART2, 0.0, 0.5, [1.0, 1.0], 2000, RngStream(1)
        )
        assert total.value == 0.0
        assert all(c == 0.0 for (_, c, _) in terms)

    def test_matches_finite_difference(self, backend):
        total, terms = cdf_tau_derivative_decomposed(
            RHO_HALF, PART2, 0.5, 0.5, [1.0, 1.0], 120_000, RngStream(2)
        )
        fd = cdf_tau_fd(RHO_HALF, PART2, 0.5, 0.5, [1.0, 1.0], 120_000, RngStream(3))
        combined = math.hypot(total.std_err, fd.std_err)
        assert abs(total.value - fd.value) <= 3 * combined + 1e-4

    def test_zero_cross_block(self, backend):
        r = CorrelationMatrix([[1.0, 0.4, 0.0], [0.4, 1.0, 0.0], [0.0, 0.0, 1.0]])
        total, terms = cdf_tau_derivative_decomposed(
            r, BlockPartition.of(3, 2), 0.5, 1.0, [1.0, 1.0, 1.0], 2000, RngStream(4)
        )
        assert total.value == 0.0
        assert all(c == 0.0 for (_, c, _) in terms)

    def test_terms_nonnegative(self, backend):
        r = random_correlation(3, seed=6, min_eig_floor=0.15)
        _, terms = cdf_tau_derivative_decomposed(
            r, BlockPartition.of(3, 1), 0.6, 1.0, [1.0, 1.5, 0.8], 20_000, RngStream(5)
        )
        for _, c, est in terms:
            assert c >= 0.0
            assert est.value >= 0.0  # nonnegative integrand, draw by draw


class TestPathMonotonicity:
    def test_cdf_nondecreasing_in_tau(self, backend):
        r = random_correlation(3, seed=11, min_eig_floor=0.15)
        part = BlockPartition.of(3, 1)
        _, diffs = path_cdf_estimates(
            r, part, 0.5, [1.0, 1.0, 1.0], [0.0, 0.25, 0.5, 0.75, 1.0], 50_000, RngStream(7)
        )
        for d in diffs:
            assert d.value >= -3 * d.std_err


class TestGciGap:
    def test_block_diagonal_gap_is_noise(self, backend):
        r = CorrelationMatrix([[1.0, 0.6, 0.0], [0.6, 1.0, 0.0], [0.0, 0.0, 1.0]])
        rep = gci_gap(r, BlockPartition.of(3, 2), ShapeParameter(0.5), [1.0, 1.0, 1.0], 50_000, RngStream(8))
        assert rep.r12_rank == 0
        assert rep.relation == "="
        assert rep.note is not None
        assert abs(rep.gap) <= 3 * rep.gap_std_err

    def test_bivariate_gap_positive(self, backend):
        rep = gci_gap(RHO_HALF, PART2, ShapeParameter(0.5), [1.0, 1.0], 400_000, RngStream(9))
        assert rep.relation == ">"
        assert rep.gap > 3 * rep.gap_std_err

    def test_random_gaps_not_negative(self, backend):
        for seed in range(3):
            r = random_correlation(4, seed=400 + seed, min_eig_floor=0.1)
            rep = gci_gap(r, BlockPartition.of(4, 2), ShapeParameter(1.0), [1.0] * 4, 50_000, RngStream(10, seed))
            assert rep.gap >= -3 * rep.gap_std_err

    def test_report_with_tau_checks_serializes(self, backend):
        r = random_correlation(3, seed=21, min_eig_floor=0.15)
        rep = gci_gap(
            r,
            BlockPartition.of(3, 1),
            ShapeParameter(0.5),
            [1.0, 1.0, 1.0],
            20_000,
            RngStream(11),
            tau_checks=(0.25, 0.5, 0.75),
        )
        assert rep.tau_derivative_closed_form_check < 1e-6
        assert rep.decomposition_check < 5.0
        payload = rep.to_dict()
        text = json.dumps(payload)
        parsed = json.loads(text)
        assert len(parsed["tau_checks"]) == 3
        assert all(c["c"] >= 0.0 for tc in parsed["tau_checks"] for c in tc["coefficients"])

        def walk(obj):
            if isinstance(obj, dict):
                for v in obj.values():
                    walk(v)
            elif isinstance(obj, list):
                for v in obj:
                    walk(v)
            elif isinstance(obj, float):
                assert math.isfinite(obj)

        walk(parsed)


class TestAveragedCorrelations:
    def test_equicorrelated(self):
        r = CorrelationMatrix(np.full((4, 4), 0.3) + 0.7 * np.eye(4))
        ac = averaged_correlations(r, BlockPartition.of(4, 2))
        assert ac.rho1 == pytest.approx(0.3, abs=1e-14)
        assert ac.rho2 == pytest.approx(0.3, abs=1e-14)
        assert ac.rho_sq == pytest.approx(0.09, abs=1e-14)
        assert ac.admissible is True

    def test_zero_cross_block(self):
        r = CorrelationMatrix(
            [[1.0, 0.5, 0.0, 0.0], [0.5, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.2], [0.0, 0.0, 0.2, 1.0]]
        )
        ac = averaged_correlations(r, BlockPartition.of(4, 2))
        assert ac.rho_sq == 0.0
        assert ac.admissible is True  # rho1, rho2 > 0 and 0 <= rho1*rho2

    def test_brute_force(self):
        r = random_correlation(5, seed=31, min_eig_floor=0.05)
        ac = averaged_correlations(r, BlockPartition.of(5, 2))
        e = r.entries
        rho1 = 2 / (2 * 1) * sum(e[i, j] for i in range(2) for j in range(i + 1, 2))
        rho2 = 2 / (3 * 2) * sum(e[i, j] for i in range(2, 5) for j in range(i + 1, 5))
        cross = [e[i, j] for i in range(2) for j in range(2, 5)]
        assert ac.rho1 == pytest.approx(rho1, abs=1e-14)
        assert ac.rho2 == pytest.approx(rho2, abs=1e-14)
        assert ac.rho_sq == pytest.approx(np.mean(cross) ** 2, abs=1e-14)
        assert ac.rho_sq_alt == pytest.approx(np.mean(np.square(cross)), abs=1e-14)

    def test_singleton_block_undefined(self):
        ac = averaged_correlations(RHO_HALF, PART2)
        assert ac.rho1 is None and ac.rho2 is None and ac.admissible is None


class TestCoefficientsCsv:
    def test_layout(self):
        text = coefficients_csv(RHO_HALF, PART2, [0.25, 0.5], 1.0)
        lines = text.strip().splitlines()
        assert lines[0] == "j1,j2,rank,c_tau_0.25,c_tau_0.5"
        cells = lines[1].split(",")
        assert cells[0] == "1" and cells[1] == "2" and cells[2] == "1"
        assert float(cells[4]) == pytest.approx(0.25, abs=1e-14)
