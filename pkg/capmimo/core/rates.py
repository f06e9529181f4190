"""Analytic rate and MSE quantities for the multi-user downlink"""

import logging
import math
from typing import Tuple

import numpy as np
from scipy import linalg

from .errors import ContractError, InvalidConfigError, NumericError
from .fourier import approx_field
from .models import ComplexArray, RealArray

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)


def _check_noise(noise_var: float) -> None:
    if not noise_var > 0:
        raise InvalidConfigError(f"noise variance must be positive, got {noise_var}")


def _check_shapes(omega: ComplexArray, w: ComplexArray) -> None:
    if omega.ndim != 4 or w.ndim != 3 or omega.shape[1] != w.shape[1]:
        raise ContractError(f"Index sets differ: projection {omega.shape} vs coefficients {w.shape}")


def alpha(omega_k: ComplexArray, w_k: ComplexArray) -> ComplexArray:
    """Desired-signal field at receiver k: Σ_n Omega_{k,n} w_{k,n}"""
    return approx_field(omega_k, w_k)


def cross_fields(omega: ComplexArray, w: ComplexArray) -> ComplexArray:
    """All fields alpha_{kj} = Σ_n Omega_{k,n} w_{j,n}, shape (K, K, 3) indexed [k, j]"""
    omega = np.asarray(omega)
    w = np.asarray(w)
    _check_shapes(omega, w)
    return np.einsum("knab,jnb->kja", omega, w)


def _fields_at(omega_k: ComplexArray, w: ComplexArray) -> ComplexArray:
    """Fields of every user's pattern at one receiver, shape (K, 3)"""
    omega_k = np.asarray(omega_k)
    w = np.asarray(w)
    if omega_k.ndim != 3 or w.ndim != 3 or omega_k.shape[0] != w.shape[1]:
        raise ContractError(f"Index sets differ: projection {omega_k.shape} vs coefficients {w.shape}")
    return np.einsum("nab,jnb->ja", omega_k, w)


def _interference_from_fields(fields: ComplexArray, k: int, noise_var: float) -> ComplexArray:
    others = np.delete(fields, k, axis=0)
    return others.T @ others.conj() + noise_var * np.eye(3)


def interference_matrix(omega_k: ComplexArray, w: ComplexArray, k: int, noise_var: float) -> ComplexArray:
    """J_k = Σ_{j≠k} alpha_{kj} alpha_{kj}^H + sigma^2 I_3"""
    _check_noise(noise_var)
    return _interference_from_fields(_fields_at(omega_k, w), k, noise_var)


def per_user_rates(omega: ComplexArray, w: ComplexArray, noise_var: float) -> Tuple[float, ...]:
    """log2(1 + alpha_k^H J_k^{-1} alpha_k) for every user"""
    _check_noise(noise_var)
    fields = cross_fields(omega, w)
    rates = []
    for k in range(fields.shape[0]):
        desired = fields[k, k]
        j_k = _interference_from_fields(fields[k], k, noise_var)
        try:
            x = linalg.solve(j_k, desired, assume_a="her")
        except linalg.LinAlgError as e:
            raise NumericError(f"Interference matrix of user {k} is singular: {e}")
        rates.append(math.log2(1.0 + max(float(np.real(np.vdot(desired, x))), 0.0)))
    return tuple(rates)


def sum_rate(omega: ComplexArray, w: ComplexArray, noise_var: float) -> float:
    """Downlink sum-rate in bits/s/Hz"""
    return math.fsum(per_user_rates(omega, w, noise_var))


def sum_rate_det(omega: ComplexArray, w: ComplexArray, noise_var: float) -> float:
    """Sum-rate through the 3x3 form Σ_k log2 det(I + alpha_k alpha_k^H J_k^{-1})"""
    _check_noise(noise_var)
    fields = cross_fields(omega, w)
    total = []
    for k in range(fields.shape[0]):
        desired = fields[k, k]
        j_k = _interference_from_fields(fields[k], k, noise_var)
        gram = np.eye(3) + np.outer(desired, desired.conj()) @ np.linalg.inv(j_k)
        total.append(math.log2(abs(np.linalg.det(gram))))
    return math.fsum(total)


def mse(psi_k: ComplexArray, omega_k: ComplexArray, w: ComplexArray, k: int, noise_var: float) -> float:
    """Mean-square error of the decoded symbol at receiver k under combiner psi_k"""
    fields = _fields_at(omega_k, w)
    projections = fields @ np.conj(psi_k)
    desired = abs(1.0 - projections[k]) ** 2
    interference = float(np.sum(np.abs(np.delete(projections, k)) ** 2))
    return float(desired + interference + noise_var * np.real(np.vdot(psi_k, psi_k)))


def mse_all(psi: ComplexArray, omega: ComplexArray, w: ComplexArray, noise_var: float) -> RealArray:
    """MSE of every user, shape (K,)"""
    return np.array([mse(psi[k], omega[k], w, k, noise_var) for k in range(omega.shape[0])])


def surrogate(rho: RealArray, psi: ComplexArray, w: ComplexArray, omega: ComplexArray, noise_var: float) -> float:
    """Weighted-MMSE objective Σ log2 rho_k - Σ rho_k E_k / ln2 + K / ln2"""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0):
        raise ContractError(f"Weights must be positive, got {rho}")
    errors = mse_all(psi, omega, w, noise_var)
    num_users = rho.shape[0]
    return float(np.sum(np.log2(rho)) - np.dot(rho, errors) / LN2 + num_users / LN2)


def mmse_combiners(omega: ComplexArray, w: ComplexArray, noise_var: float) -> ComplexArray:
    """Classical MMSE receivers psi_k = (Σ_j alpha_kj alpha_kj^H + sigma^2 I)^{-1} alpha_kk"""
    _check_noise(noise_var)
    fields = cross_fields(omega, w)
    psi = np.zeros((fields.shape[0], 3), dtype=complex)
    for k in range(fields.shape[0]):
        covariance = fields[k].T @ fields[k].conj() + noise_var * np.eye(3)
        psi[k] = linalg.solve(covariance, fields[k, k], assume_a="her")
    return psi


def effective_channel(omega_k: ComplexArray, psi_k: ComplexArray) -> ComplexArray:
    """Stack of Omega_{k,n}^H psi_k over n, dimension 3 N_F"""
    return np.einsum("nba,b->na", np.conj(omega_k), psi_k).reshape(-1)


def effective_channels(omega: ComplexArray, psi: ComplexArray) -> ComplexArray:
    """Effective channels of all users, shape (K, 3 N_F)"""
    return np.einsum("knba,kb->kna", np.conj(omega), psi).reshape(omega.shape[0], -1)
