"""Tests for the rate and MSE model"""

import math

import numpy as np
import pytest

from capmimo.core.errors import ContractError, InvalidConfigError
from capmimo.core.rates import (
    alpha,
    cross_fields,
    effective_channel,
    effective_channels,
    interference_matrix,
    mmse_combiners,
    mse,
    mse_all,
    per_user_rates,
    sum_rate,
    sum_rate_det,
    surrogate,
)


def random_instance(seed: int, users: int = 3, terms: int = 4):
    rng = np.random.default_rng(seed)
    omega = rng.standard_normal((users, terms, 3, 3)) + 1j * rng.standard_normal((users, terms, 3, 3))
    w = rng.standard_normal((users, terms, 3)) + 1j * rng.standard_normal((users, terms, 3))
    return omega, 0.3 * w


class TestRates:
    """Test suite for rate formulas"""

    def setup_method(self):
        self.omega, self.w = random_instance(1)
        self.noise = 0.5

    def test_cross_fields_diagonal_is_alpha(self):
        fields = cross_fields(self.omega, self.w)
        assert fields.shape == (3, 3, 3)
        for k in range(3):
            np.testing.assert_allclose(fields[k, k], alpha(self.omega[k], self.w[k]))

    def test_sum_rate_is_sum_of_user_rates(self):
        rates = per_user_rates(self.omega, self.w, self.noise)
        assert sum_rate(self.omega, self.w, self.noise) == pytest.approx(math.fsum(rates), abs=1e-12)
        assert all(r > 0 for r in rates)

    def test_determinant_identity(self):
        assert sum_rate_det(self.omega, self.w, self.noise) == pytest.approx(
            sum_rate(self.omega, self.w, self.noise), abs=1e-10
        )

    def test_single_user_snr(self):
        omega, w = self.omega[:1], self.w[:1]
        desired = alpha(omega[0], w[0])
        expected = math.log2(1 + np.vdot(desired, desired).real / self.noise)
        assert sum_rate(omega, w, self.noise) == pytest.approx(expected, rel=1e-12)

    def test_interference_lowers_rate(self):
        silenced = self.w * np.array([1.0, 0.0, 0.0])[:, np.newaxis, np.newaxis]
        alone = per_user_rates(self.omega, silenced, self.noise)[0]
        shared = per_user_rates(self.omega, self.w, self.noise)[0]
        assert shared < alone

    def test_interference_matrix_hermitian_positive(self):
        j_k = interference_matrix(self.omega[0], self.w, 0, self.noise)
        np.testing.assert_allclose(j_k, j_k.conj().T)
        assert np.linalg.eigvalsh(j_k).min() >= self.noise * (1 - 1e-12)

    def test_noise_must_be_positive(self):
        with pytest.raises(InvalidConfigError):
            sum_rate(self.omega, self.w, 0.0)

    def test_index_set_mismatch(self):
        with pytest.raises(ContractError):
            cross_fields(self.omega, self.w[:, :2])


class TestMse:
    """Test suite for MSE, combiners and the weighted-MMSE surrogate"""

    def setup_method(self):
        self.omega, self.w = random_instance(2)
        self.noise = 0.2
        self.psi = mmse_combiners(self.omega, self.w, self.noise)

    def test_mmse_combiner_minimizes_mse(self):
        rng = np.random.default_rng(3)
        best = mse(self.psi[1], self.omega[1], self.w, 1, self.noise)
        for _ in range(10):
            perturbed = self.psi[1] + 1e-3 * (rng.standard_normal(3) + 1j * rng.standard_normal(3))
            assert mse(perturbed, self.omega[1], self.w, 1, self.noise) > best

    def test_mmse_error_matches_sinr(self):
        errors = mse_all(self.psi, self.omega, self.w, self.noise)
        rates = per_user_rates(self.omega, self.w, self.noise)
        np.testing.assert_allclose(-np.log2(errors), rates, rtol=1e-10)

    def test_surrogate_equals_sum_rate_at_optimal_weights(self):
        rho = 1.0 / mse_all(self.psi, self.omega, self.w, self.noise)
        value = surrogate(rho, self.psi, self.w, self.omega, self.noise)
        assert value == pytest.approx(sum_rate(self.omega, self.w, self.noise), abs=1e-10)

    def test_surrogate_is_lower_bound(self):
        rho = np.array([0.5, 2.0, 1.0])
        assert surrogate(rho, self.psi, self.w, self.omega, self.noise) <= sum_rate(self.omega, self.w, self.noise)

    def test_surrogate_rejects_non_positive_weights(self):
        with pytest.raises(ContractError):
            surrogate(np.array([1.0, 0.0, 1.0]), self.psi, self.w, self.omega, self.noise)

    def test_effective_channel_reproduces_combined_field(self):
        h = effective_channels(self.omega, self.psi)
        assert h.shape == (3, 12)
        fields = cross_fields(self.omega, self.w)
        for k in range(3):
            for j in range(3):
                combined = np.vdot(self.psi[k], fields[k, j])
                assert np.vdot(h[k], self.w[j].reshape(-1)) == pytest.approx(combined, rel=1e-12)

    def test_single_user_effective_channel_matches_stack(self):
        h = effective_channels(self.omega, self.psi)
        np.testing.assert_allclose(effective_channel(self.omega[2], self.psi[2]), h[2])
