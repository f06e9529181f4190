"""Tests for the truncated Fourier basis"""

import numpy as np
import pytest

from capmimo.core.em import Medium, aperture_grid, green_on_grid
from capmimo.core.errors import ContractError, InvalidConfigError
from capmimo.core.fourier import (
    approx_field,
    axis_range,
    basis_eval,
    basis_matrix,
    channel_spectrum,
    coefficient_power,
    index_set,
    project_channel,
    project_green,
    project_pattern,
    quadrature_power,
    synthesize_pattern,
    synthesize_patterns,
)
from capmimo.core.models import FourierIndex


class TestIndexSet:
    """Test suite for truncation and ordering"""

    def test_axis_range_floor_convention(self):
        assert list(axis_range(5)) == [-3, -2, -1, 0, 1, 2]
        assert list(axis_range(4)) == [-2, -1, 0, 1, 2]
        assert list(axis_range(0)) == [0]

    def test_reference_truncation(self):
        indices = index_set(5, 5, 0)
        assert indices.count == 36
        assert indices.indices[0] == FourierIndex(-3, -3, 0)
        assert indices.indices[1] == FourierIndex(-3, -2, 0)
        assert indices.indices[-1] == FourierIndex(2, 2, 0)
        assert indices.position((0, 0, 0)) == 21

    def test_negative_cap(self):
        with pytest.raises(InvalidConfigError):
            index_set(-1, 2, 0)

    def test_missing_index(self):
        with pytest.raises(InvalidConfigError):
            index_set(1, 1, 0).position((3, 0, 0))


class TestBasis:
    """Test suite for basis evaluation, projection and synthesis"""

    def setup_method(self):
        self.grid = aperture_grid(0.25, 0.25, 64)
        self.indices = index_set(3, 3, 0)
        rng = np.random.default_rng(7)
        self.w = rng.standard_normal((2, self.indices.count, 3)) + 1j * rng.standard_normal((2, self.indices.count, 3))

    def test_basis_at_origin(self):
        assert basis_eval((2, -1, 0), (0.0, 0.0, 0.0), (0.25, 0.25, 0.0), 0.0625) == pytest.approx(4.0)

    def test_basis_phase(self):
        value = basis_eval((1, 0, 0), (0.0625, 0.0, 0.0), (0.25, 0.25, 0.0), 0.0625)
        assert value == pytest.approx(4.0j)

    def test_zero_extent_axis_rejects_nonzero_index(self):
        with pytest.raises(ContractError):
            basis_eval((0, 0, 1), (0.0, 0.0, 0.0), (0.25, 0.25, 0.0), 0.0625)

    def test_discrete_orthonormality(self):
        basis = basis_matrix(self.indices, self.grid)
        gram = basis.conj().T @ (self.grid.weights[:, np.newaxis] * basis)
        np.testing.assert_allclose(gram, np.eye(self.indices.count), atol=1e-12)

    def test_project_pattern_recovers_coefficients(self):
        theta = synthesize_pattern(self.w[0], self.grid, self.indices)
        np.testing.assert_allclose(project_pattern(theta, self.grid, self.indices), self.w[0], atol=1e-12)

    def test_parseval(self):
        patterns = synthesize_patterns(self.w, self.grid, self.indices)
        assert patterns.shape == (2, 64, 3)
        assert quadrature_power(patterns, self.grid) == pytest.approx(coefficient_power(self.w), rel=1e-12)

    def test_synthesis_shape_contract(self):
        with pytest.raises(ContractError):
            synthesize_pattern(self.w[0, :5], self.grid, self.indices)
        with pytest.raises(ContractError):
            synthesize_patterns(self.w[:, :5], self.grid, self.indices)


class TestProjection:
    """Test suite for channel projection"""

    def setup_method(self):
        self.medium = Medium(frequency_hz=2.4e9)
        self.grid = aperture_grid(0.5, 0.5, 256)
        self.indices = index_set(5, 5, 0)
        receivers = [(0.0, 0.0, 30.0), (5.0, -5.0, 30.0)]
        self.green = np.stack([green_on_grid(r, self.grid, self.medium) for r in receivers])
        self.omega = project_channel(self.green, self.indices, self.grid)

    def test_full_projection_matches_single_index(self):
        assert self.omega.shape == (2, 36, 3, 3)
        for n in ((0, 0, 0), (-3, 2, 0)):
            position = self.indices.position(n)
            np.testing.assert_allclose(
                self.omega[1, position], project_green(self.green[1], n, self.grid), rtol=1e-10, atol=0
            )

    def test_broadside_energy_in_dc_term(self):
        spectrum = dict(channel_spectrum(self.omega[:1], self.indices))
        dc = spectrum[FourierIndex(0, 0, 0)]
        assert dc == max(spectrum.values())
        assert dc > 0.99 * sum(spectrum.values())

    def test_approx_field_matches_manual_sum(self):
        w = np.zeros((36, 3), dtype=complex)
        w[self.indices.position((0, 0, 0))] = (1.0, 0.0, 0.0)
        field = approx_field(self.omega[0], w)
        np.testing.assert_allclose(field, self.omega[0, self.indices.position((0, 0, 0)), :, 0])

    def test_approx_field_index_mismatch(self):
        with pytest.raises(ContractError):
            approx_field(self.omega[0], np.zeros((10, 3)))

    def test_projection_shape_contract(self):
        with pytest.raises(ContractError):
            project_channel(self.green[:, :10], self.indices, self.grid)
        with pytest.raises(ContractError):
            channel_spectrum(self.omega, index_set(3, 3, 0))
