"""Tests for the WDM baseline and interference-free bound"""

import numpy as np
import pytest

from capmimo.core.baselines import (
    evaluate_with_mmse,
    interference_free_rate,
    interference_free_rates,
    lowest_frequency_order,
    wdm_assignment,
    wdm_patterns,
)
from capmimo.core.channel import build_channel
from capmimo.core.errors import InvalidConfigError
from capmimo.core.fourier import coefficient_power, index_set
from capmimo.core.models import FourierIndex
from capmimo.core.rates import sum_rate

from .factories import small_config


class TestWdm:
    """Test suite for wavenumber-division assignment"""

    def setup_method(self):
        self.indices = index_set(5, 5, 0)

    def test_lowest_frequencies_first(self):
        order = lowest_frequency_order(self.indices)
        assert order[0] == FourierIndex(0, 0, 0)
        assert order[1:5] == [FourierIndex(-1, 0, 0), FourierIndex(0, -1, 0), FourierIndex(0, 1, 0), FourierIndex(1, 0, 0)]

    def test_default_assignment(self):
        assignment = wdm_assignment(8, self.indices)
        assert len(set(assignment.indices)) == 8
        np.testing.assert_allclose(assignment.polarizations, np.tile([1.0, 0.0, 0.0], (8, 1)))

    def test_patterns_use_full_power_on_single_indices(self):
        w = wdm_patterns(8, self.indices, 1e-4)
        assert coefficient_power(w) == pytest.approx(1e-4, rel=1e-12)
        occupied = np.any(w != 0, axis=2)
        assert np.all(occupied.sum(axis=1) == 1)
        assert len({int(np.flatnonzero(row)[0]) for row in occupied}) == 8

    def test_polarization_is_normalized(self):
        assignment = wdm_assignment(2, self.indices, polarization=(1.0, 1.0, 0.0))
        np.testing.assert_allclose(np.linalg.norm(assignment.polarizations, axis=1), 1.0)

    def test_explicit_indices(self):
        assignment = wdm_assignment(2, self.indices, chosen=[(1, 1, 0), (-2, 0, 0)])
        assert assignment.indices == (FourierIndex(1, 1, 0), FourierIndex(-2, 0, 0))

    def test_too_many_users(self):
        with pytest.raises(InvalidConfigError):
            wdm_assignment(2, index_set(0, 0, 0))

    def test_invalid_explicit_indices(self):
        with pytest.raises(InvalidConfigError):
            wdm_assignment(2, self.indices, chosen=[(0, 0, 0), (0, 0, 0)])
        with pytest.raises(InvalidConfigError):
            wdm_assignment(2, self.indices, chosen=[(0, 0, 0), (9, 0, 0)])
        with pytest.raises(InvalidConfigError):
            wdm_assignment(2, self.indices, chosen=[(0, 0, 0)])

    def test_zero_polarization(self):
        with pytest.raises(InvalidConfigError):
            wdm_assignment(2, self.indices, polarization=(0.0, 0.0, 0.0))


class TestEvaluation:
    """Test suite for evaluating fixed patterns"""

    def setup_method(self):
        self.config = small_config()
        self.channel = build_channel(self.config)
        self.w = wdm_patterns(2, self.channel.indices, self.config.power_a2)
        self.noise = self.config.noise_v2m2

    def test_evaluate_with_mmse(self):
        result = evaluate_with_mmse(self.w, self.channel.omega, self.noise)
        assert result.sum_rate == pytest.approx(sum_rate(self.channel.omega, self.w, self.noise))
        assert len(result.per_user_mse) == 2
        assert all(0 < e <= 1 for e in result.per_user_mse)

    def test_interference_free_is_upper_bound(self):
        rates = interference_free_rates(self.w, self.channel.omega, self.noise)
        assert len(rates) == 2
        assert interference_free_rate(self.w, self.channel.omega, self.noise) >= sum_rate(
            self.channel.omega, self.w, self.noise
        )

    def test_interference_free_rejects_bad_noise(self):
        with pytest.raises(InvalidConfigError):
            interference_free_rates(self.w, self.channel.omega, -1.0)
