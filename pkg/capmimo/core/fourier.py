"""Truncated Fourier basis on the aperture: projection, synthesis and power accounting"""

import itertools
import logging
import math
from typing import Sequence, Tuple

import numpy as np

from .em import integrate_surface
from .errors import ContractError, InvalidConfigError
from .models import ApertureGrid, ComplexArray, FourierIndex, IndexSet, RealArray

logger = logging.getLogger(__name__)


def axis_range(cap: int) -> range:
    """Indices floor(-N/2) .. floor(N/2) inclusive"""
    return range(math.floor(-cap / 2), math.floor(cap / 2) + 1)


def index_set(nx: int, ny: int, nz: int) -> IndexSet:
    """Build the truncated index set, lexicographic in (n_x, n_y, n_z)"""
    caps = (int(nx), int(ny), int(nz))
    if any(cap < 0 for cap in caps):
        raise InvalidConfigError(f"Truncation caps must be non-negative, got {caps}")
    indices = tuple(
        FourierIndex(*n) for n in itertools.product(*(axis_range(cap) for cap in caps))
    )
    return IndexSet(caps=caps, indices=indices)


def _phase_terms(indices: np.ndarray, points: np.ndarray, extents: Sequence[float]) -> np.ndarray:
    """Sum of n_a * s_a / L_a over axes; zero-extent axes contribute nothing"""
    phase = np.zeros((points.shape[0], indices.shape[0]))
    for axis, extent in enumerate(extents):
        column = indices[:, axis]
        if extent == 0:
            if np.any(column != 0):
                raise ContractError(f"Non-zero index on axis {axis} of zero extent")
            continue
        phase += np.outer(points[:, axis], column) / extent
    return phase


def basis_eval(n: Sequence[int], s: Sequence[float], extents: Sequence[float], area: float) -> complex:
    """Evaluate Psi_n(s) = exp(j 2π Σ n_a s_a / L_a) / sqrt(A_T)"""
    phase = _phase_terms(np.asarray([n], dtype=float), np.asarray([s], dtype=float), extents)[0, 0]
    return complex(np.exp(2j * math.pi * phase) / math.sqrt(area))


def basis_matrix(indices: IndexSet, grid: ApertureGrid) -> ComplexArray:
    """Psi_n at every grid node, shape (I_s, N_F)"""
    phase = _phase_terms(indices.as_array().astype(float), grid.nodes, grid.extents)
    return np.exp(2j * math.pi * phase) / math.sqrt(grid.area)


def project_green(green_samples: ComplexArray, n: Sequence[int], grid: ApertureGrid) -> ComplexArray:
    """Omega_{k,n} = Σ_i weight_i G_k(s_i) Psi_n(s_i) for a single index"""
    phase = _phase_terms(np.asarray([n], dtype=float), grid.nodes, grid.extents)[:, 0]
    psi = np.exp(2j * math.pi * phase) / math.sqrt(grid.area)
    green_samples = np.asarray(green_samples)
    if green_samples.shape[0] != grid.num_nodes:
        raise ContractError(f"Got {green_samples.shape[0]} Green samples for a grid of {grid.num_nodes} nodes")
    return integrate_surface(green_samples * psi[:, np.newaxis, np.newaxis], grid)


def project_channel(green_samples: ComplexArray, indices: IndexSet, grid: ApertureGrid) -> ComplexArray:
    """
    Full channel projection for all users and indices

    Args:
        green_samples: (K, I_s, 3, 3) Green function samples per receiver
    Returns:
        (K, N_F, 3, 3) array of Omega_{k,n}
    """
    green_samples = np.asarray(green_samples)
    if green_samples.ndim != 4 or green_samples.shape[1] != grid.num_nodes:
        raise ContractError(f"Expected Green samples of shape (K, {grid.num_nodes}, 3, 3), got {green_samples.shape}")
    weighted_basis = grid.weights[:, np.newaxis] * basis_matrix(indices, grid)
    return np.einsum("in,kiab->knab", weighted_basis, green_samples)


def synthesize_pattern(w_k: ComplexArray, grid: ApertureGrid, indices: IndexSet) -> ComplexArray:
    """theta_k(s_i) = Σ_n w_{k,n} Psi_n(s_i), shape (N_F, 3) -> (I_s, 3)"""
    w_k = np.asarray(w_k)
    if w_k.shape != (indices.count, 3):
        raise ContractError(f"Expected coefficients of shape ({indices.count}, 3), got {w_k.shape}")
    return basis_matrix(indices, grid) @ w_k


def synthesize_patterns(w: ComplexArray, grid: ApertureGrid, indices: IndexSet) -> ComplexArray:
    """All users at once, shape (K, N_F, 3) -> (K, I_s, 3)"""
    w = np.asarray(w)
    if w.ndim != 3 or w.shape[1:] != (indices.count, 3):
        raise ContractError(f"Expected coefficients of shape (K, {indices.count}, 3), got {w.shape}")
    return np.einsum("in,kna->kia", basis_matrix(indices, grid), w)


def project_pattern(theta: ComplexArray, grid: ApertureGrid, indices: IndexSet) -> ComplexArray:
    """Recover coefficients <theta, Psi_n> by quadrature, shape (I_s, 3) -> (N_F, 3)"""
    theta = np.asarray(theta)
    if theta.shape != (grid.num_nodes, 3):
        raise ContractError(f"Expected a pattern of shape ({grid.num_nodes}, 3), got {theta.shape}")
    conj_basis = np.conj(basis_matrix(indices, grid))
    return integrate_surface(conj_basis[:, :, np.newaxis] * theta[:, np.newaxis, :], grid)


def coefficient_power(w: ComplexArray) -> float:
    """Parseval power Σ_k Σ_n |w_{k,n}|^2 in A^2"""
    w = np.asarray(w)
    return float(np.sum(w.real ** 2 + w.imag ** 2))


def quadrature_power(patterns: ComplexArray, grid: ApertureGrid) -> float:
    """Σ_k ∫ |theta_k|^2 ds of sampled patterns, shape (K, I_s, 3)"""
    patterns = np.asarray(patterns)
    density = np.sum(np.abs(patterns) ** 2, axis=-1)
    return float(np.sum(integrate_surface(density.T, grid)))


def approx_field(omega_k: ComplexArray, w_j: ComplexArray) -> ComplexArray:
    """Truncated field Σ_n Omega_{k,n} w_{j,n}"""
    omega_k = np.asarray(omega_k)
    w_j = np.asarray(w_j)
    if omega_k.ndim != 3 or w_j.ndim != 2 or omega_k.shape[0] != w_j.shape[0]:
        raise ContractError(f"Index sets differ: projection {omega_k.shape} vs coefficients {w_j.shape}")
    return np.einsum("nab,nb->a", omega_k, w_j)


def channel_spectrum(omega: ComplexArray, indices: IndexSet) -> Tuple[Tuple[FourierIndex, float], ...]:
    """Energy Σ_k |Omega_{k,n}|_F^2 carried by each spatial frequency"""
    omega = np.asarray(omega)
    if omega.shape[1] != indices.count:
        raise ContractError(f"Projection has {omega.shape[1]} indices, index set has {indices.count}")
    energy: RealArray = np.sum(np.abs(omega) ** 2, axis=(0, 2, 3))
    return tuple((n, float(e)) for n, e in zip(indices.indices, energy))
