import numpy as np
import pytest

from subtrack.exceptions import BadLength
from subtrack.wavelets import (
    WaveletFilter,
    default_levels,
    dwt,
    idwt,
    transform_matrix,
    wavelet_filter,
)

FILTERS = ["haar", "symmlet8"]


class TestFilters:
    @pytest.mark.parametrize("name", FILTERS)
    def test_unit_energy_and_double_shift_orthogonality(self, name):
        h = wavelet_filter(name).lowpass
        assert abs(h @ h - 1.0) <= 1e-12
        for m in range(1, h.size // 2):
            assert abs(h[: -2 * m] @ h[2 * m :]) <= 1e-12

    def test_symmlet8_has_sixteen_taps(self):
        assert wavelet_filter("symmlet8").lowpass.size == 16

    def test_highpass_is_orthogonal_to_lowpass(self):
        for name in FILTERS:
            f = wavelet_filter(name)
            assert abs(f.lowpass @ f.highpass) <= 1e-12

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            wavelet_filter("db4")

    def test_bad_taps_rejected(self):
        with pytest.raises(ValueError):
            WaveletFilter(name="bogus", lowpass=np.array([1.0, 1.0]))

    def test_default_levels(self):
        assert default_levels(1024) == 7
        assert default_levels(64) == 3
        assert default_levels(8) == 1


class TestHaarHandOracle:
    def test_constant_signal(self):
        # cascade of pairwise (a+b)/sqrt(2): (1,1,1,1) -> (2,0,0,0)
        c = dwt(np.ones(4), "haar", levels=2)
        np.testing.assert_allclose(c, [2.0, 0.0, 0.0, 0.0], atol=1e-14)

    def test_inverse_of_hand_case(self):
        x = idwt(np.array([2.0, 0.0, 0.0, 0.0]), "haar", levels=2)
        np.testing.assert_allclose(x, np.ones(4), atol=1e-14)

    def test_single_level_pairs(self):
        c = dwt(np.array([1.0, 3.0, 2.0, 2.0]), "haar", levels=1)
        s = np.sqrt(2.0)
        np.testing.assert_allclose(c, [4 / s, 4 / s, -2 / s, 0.0], atol=1e-14)

    def test_zero_maps_to_zero(self):
        np.testing.assert_array_equal(dwt(np.zeros(8), "haar", levels=2), np.zeros(8))


class TestOrthogonality:
    @pytest.mark.parametrize("name", FILTERS)
    @pytest.mark.parametrize("length", [64, 128, 256, 1024])
    def test_perfect_reconstruction(self, name, length):
        rng = np.random.default_rng(length)
        x = rng.standard_normal(length)
        for levels in range(1, 6):
            np.testing.assert_allclose(idwt(dwt(x, name, levels), name, levels), x, atol=1e-10)

    @pytest.mark.parametrize("name", FILTERS)
    @pytest.mark.parametrize("length", [64, 256, 1024])
    def test_parseval(self, name, length):
        rng = np.random.default_rng(length + 1)
        x = rng.standard_normal(length)
        for levels in range(1, 6):
            c = dwt(x, name, levels)
            assert abs(c @ c - x @ x) <= 1e-10 * (x @ x)

    @pytest.mark.parametrize("name", FILTERS)
    def test_inner_products_preserved(self, name):
        rng = np.random.default_rng(77)
        x, y = rng.standard_normal((2, 128))
        cx, cy = dwt(x, name, 4), dwt(y, name, 4)
        assert abs(cx @ cy - x @ y) <= 1e-10 * max(1.0, abs(x @ y))

    def test_linearity(self):
        rng = np.random.default_rng(5)
        c1, c2 = rng.standard_normal((2, 64))
        lhs = idwt(c1 + c2, "symmlet8", 3)
        rhs = idwt(c1, "symmlet8", 3) + idwt(c2, "symmlet8", 3)
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    def test_transform_matrix_is_orthogonal(self):
        for name in FILTERS:
            W = transform_matrix(64, name, 3)
            np.testing.assert_allclose(W.T @ W, np.eye(64), atol=1e-10)

    def test_transform_matrix_matches_dwt(self):
        rng = np.random.default_rng(9)
        X = rng.standard_normal((5, 64))
        W = transform_matrix(64, "symmlet8", 3)
        for row, mapped in zip(X, X @ W.T):
            np.testing.assert_allclose(mapped, dwt(row, "symmlet8", 3), atol=1e-12)


class TestLengthValidation:
    def test_indivisible_length(self):
        with pytest.raises(BadLength):
            dwt(np.ones(6), "haar", levels=2)

    def test_levels_too_deep(self):
        with pytest.raises(BadLength):
            dwt(np.ones(8), "haar", levels=4)

    def test_zero_levels(self):
        with pytest.raises(BadLength):
            dwt(np.ones(8), "haar", levels=0)

    def test_idwt_checks_too(self):
        with pytest.raises(BadLength):
            idwt(np.ones(6), "haar", levels=2)

    def test_matrix_input_rejected(self):
        with pytest.raises(BadLength):
            dwt(np.ones((4, 4)), "haar", levels=1)
