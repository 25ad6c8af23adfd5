import math

import numpy as np
import pytest
from hypothesis import given, strategies as stn

from subtrack.exceptions import NegativeThreshold
from subtrack.signals import sparse_uniform_frame
from subtrack.sparsity import (
    SparsityProfile,
    ThresholdRule,
    apply_threshold,
    coordinate_noise_scale,
    default_signal_constant,
    effective_dimension,
    in_weak_lr_ball,
    schedule_constant_floor,
    signal_index_set,
    threshold_columns,
    threshold_schedule,
)

finite_floats = stn.floats(
    min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False
)
levels = stn.floats(min_value=0.0, max_value=1e6, allow_nan=False, allow_infinity=False)


class TestApplyThreshold:
    @pytest.mark.parametrize(
        "x, beta, expected", [(2.0, 1.0, 2.0), (0.5, 1.0, 0.0), (-1.5, 1.0, -1.5), (1.0, 1.0, 0.0)]
    )
    def test_hard_cases(self, x, beta, expected):
        assert apply_threshold(x, beta, "hard") == expected

    @pytest.mark.parametrize(
        "x, beta, expected", [(2.0, 1.0, 1.0), (-2.0, 1.0, -1.0), (0.5, 1.0, 0.0), (1.0, 1.0, 0.0)]
    )
    def test_soft_cases(self, x, beta, expected):
        assert apply_threshold(x, beta, "soft") == expected

    @pytest.mark.parametrize("kind", ["hard", "soft"])
    def test_zero_level_is_identity(self, kind):
        xs = np.array([-3.0, -0.1, 0.0, 2.5])
        np.testing.assert_array_equal(apply_threshold(xs, 0.0, kind), xs)

    def test_negative_level_rejected(self):
        with pytest.raises(NegativeThreshold):
            apply_threshold(1.0, -0.1, "hard")

    def test_unknown_rule(self):
        with pytest.raises(ValueError):
            apply_threshold(1.0, 1.0, "scad")

    @given(x=finite_floats, beta=levels)
    def test_contract_hard(self, x, beta):
        g = apply_threshold(x, beta, "hard")
        assert x - beta <= g <= x + beta
        if abs(x) <= beta:
            assert g == 0.0

    @given(x=finite_floats, beta=levels)
    def test_contract_soft_and_domination(self, x, beta):
        gs = apply_threshold(x, beta, "soft")
        gh = apply_threshold(x, beta, "hard")
        assert x - beta <= gs <= x + beta
        if abs(x) <= beta:
            assert gs == 0.0
        assert abs(gh) >= abs(gs)

    def test_column_levels(self):
        M = np.array([[2.0, 0.5], [-0.5, 3.0]])
        out = threshold_columns(M, np.array([1.0, 2.0]), "hard")
        np.testing.assert_array_equal(out, [[2.0, 0.0], [0.0, 3.0]])

    def test_column_levels_shape_check(self):
        with pytest.raises(ValueError):
            threshold_columns(np.ones((3, 2)), np.ones(3))


class TestThresholdRule:
    def test_valid(self):
        rule = ThresholdRule("soft", 2.0)
        assert rule.kind == "soft" and rule.a == 2.0

    def test_invalid_kind(self):
        with pytest.raises(ValueError):
            ThresholdRule("firm", 1.0)

    def test_negative_a(self):
        with pytest.raises(ValueError):
            ThresholdRule("hard", -1.0)


class TestThresholdSchedule:
    def test_zero_constant(self):
        np.testing.assert_array_equal(threshold_schedule(10, [5.0, 2.0], 64, 0.0), [0.0, 0.0])

    def test_frozen_value(self):
        # oracle: direct arithmetic, 1.5 * sqrt(6 * ln(1024) / 100)
        beta = threshold_schedule(100, [5.0], 1024, 1.5)
        assert beta[0] == pytest.approx(0.9673410431465865, rel=1e-12)

    def test_quadrupling_ratio(self):
        # beta(4t)/beta(t) = sqrt(log(max(n,4t)) / (4 log(max(n,t)))) once t >= n
        n, a = 32, 1.2
        for t in (40, 100, 333):
            b1 = threshold_schedule(t, [3.0], n, a)[0]
            b4 = threshold_schedule(4 * t, [3.0], n, a)[0]
            expected = math.sqrt(math.log(max(n, 4 * t)) / (4 * math.log(max(n, t))))
            assert b4 / b1 == pytest.approx(expected, rel=1e-12)

    def test_monotone_in_t(self):
        n = 16
        values = [threshold_schedule(t, [2.0], n, 1.0)[0] for t in range(n, 200)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_non_increasing_in_spike_index(self):
        betas = threshold_schedule(50, [9.0, 4.0, 1.0], 64, 1.5)
        assert np.all(np.diff(betas) <= 0)

    def test_t_below_one_rejected(self):
        with pytest.raises(ValueError):
            threshold_schedule(0, [1.0], 8, 1.0)


class TestScheduleFloor:
    def test_equal_horizon_and_warmup(self):
        assert schedule_constant_floor(64, 64, 64) == pytest.approx(3 * math.sqrt(2), rel=1e-12)

    def test_growing_horizon(self):
        assert schedule_constant_floor(64, 5000, 100) > schedule_constant_floor(64, 500, 100)


class TestSignalIndexSet:
    def test_large_t_recovers_support(self):
        V = sparse_uniform_frame(64, 2, 4)
        idx = signal_index_set(V, t=10**12, lambdas=[5.0, 3.0], b=0.1)
        np.testing.assert_array_equal(idx, np.arange(8))

    def test_membership_matches_direct_comparison(self):
        # oracle: per-index evaluation of the defining inequality
        n, t, lam, a, tau, d = 1024, 2000, 30.0, 1.5, 1.0, 1
        V = sparse_uniform_frame(n, 1, 16)
        b = default_signal_constant(a, tau, d)
        idx = signal_index_set(V, t, [lam], b)
        h = math.sqrt(lam + 1.0) / lam
        floor = b * h * math.sqrt(math.log(max(n, t)) / t)
        expected = [j for j in range(n) if abs(V[j, 0]) >= floor]
        np.testing.assert_array_equal(idx, expected)

    def test_small_b_keeps_all_nonzero_coordinates(self):
        V = sparse_uniform_frame(32, 1, 8)
        idx = signal_index_set(V, t=100, lambdas=[10.0], b=1e-9)
        np.testing.assert_array_equal(idx, np.arange(8))


class TestEffectiveDimension:
    def profile(self, r=1.0, s=(1.0,), b=0.1):
        return SparsityProfile(r=r, radii=s, b=b)

    def test_cap_at_ambient_dimension(self):
        # huge radii push the sum far beyond n
        m = effective_dimension(10, 16, [2.0], self.profile(s=(1e9,)))
        assert m == 16.0

    def test_frozen_value(self):
        # oracle: (s/h) * (ln(1024)/100)^(-1/2) with h = sqrt(6)/5
        m = effective_dimension(100, 1024, [5.0], self.profile())
        assert m == pytest.approx(7.753211809977429, rel=1e-12)

    def test_radius_equal_noise_scale(self):
        # with s_j = h_j each summand is (log/t)^(-r/2); as r -> 0+ that tends to 1
        lam = [5.0, 2.0]
        h = coordinate_noise_scale(lam)
        m = effective_dimension(200, 64, lam, self.profile(r=1e-9, s=tuple(h)))
        assert m == pytest.approx(2.0, rel=1e-6)

    def test_non_decreasing_in_t(self):
        # the noise floor sqrt(log/t) shrinks with t, so more coordinates count
        vals = [
            effective_dimension(t, 64, [4.0], self.profile()) for t in range(64, 500)
        ]
        assert all(a <= b for a, b in zip(vals, vals[1:]))

    def test_never_exceeds_n(self):
        for t in (1, 10, 100):
            assert effective_dimension(t, 32, [4.0], self.profile(s=(50.0,))) <= 32

    def test_radii_count_mismatch(self):
        with pytest.raises(ValueError):
            effective_dimension(10, 16, [2.0, 1.0], self.profile())


class TestWeakLrBall:
    def test_zero_vector(self):
        assert in_weak_lr_ball(np.zeros(5), s=0.5, r=1.0)

    def test_single_basis_vector(self):
        assert in_weak_lr_ball(np.eye(6)[0], s=1.0, r=0.7)

    def test_two_equal_entries_fail(self):
        v = np.zeros(8)
        v[:2] = 1.0
        assert not in_weak_lr_ball(v, s=1.0, r=1.0)  # second largest 1 > 1/2

    def test_boundary_is_inside(self):
        r = 1.0
        v = np.array([1.0, 0.5, 1.0 / 3.0])
        assert in_weak_lr_ball(v, s=1.0, r=r)

    def test_bad_parameters(self):
        with pytest.raises(ValueError):
            in_weak_lr_ball(np.ones(3), s=1.0, r=2.5)
        with pytest.raises(ValueError):
            in_weak_lr_ball(np.ones(3), s=0.0, r=1.0)


class TestProfileAndScales:
    def test_noise_scale_formula(self):
        np.testing.assert_allclose(
            coordinate_noise_scale([5.0, 2.0]),
            [math.sqrt(6.0) / 5.0, math.sqrt(3.0) / 2.0],
            rtol=1e-14,
        )

    def test_default_signal_constant(self):
        assert default_signal_constant(1.5, 1.0, 1) == pytest.approx(0.15, rel=1e-12)
        assert default_signal_constant(2.0, 4.0, 4) == pytest.approx(0.05, rel=1e-12)

    def test_profile_validation(self):
        with pytest.raises(ValueError):
            SparsityProfile(r=2.0, radii=(1.0,), b=0.1)
        with pytest.raises(ValueError):
            SparsityProfile(r=1.0, radii=(0.0,), b=0.1)
        with pytest.raises(ValueError):
            SparsityProfile(r=1.0, radii=(1.0,), b=0.0)
