"""Wavenumber-division baseline and the interference-free upper bound"""

import logging
import math
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidConfigError
from .models import BaselineEvaluation, ComplexArray, FourierIndex, IndexSet, WdmAssignment
from .rates import LN2, cross_fields, mmse_combiners, mse_all, sum_rate

logger = logging.getLogger(__name__)


def lowest_frequency_order(indices: IndexSet) -> Sequence[FourierIndex]:
    """Indices sorted by (|n_x|+|n_y|+|n_z|, n_x, n_y, n_z), lowest spatial frequencies first"""
    return sorted(indices.indices, key=lambda n: (abs(n.nx) + abs(n.ny) + abs(n.nz), n.nx, n.ny, n.nz))


def wdm_assignment(num_users: int, indices: IndexSet,
                   chosen: Optional[Sequence[Sequence[int]]] = None,
                   polarization: Sequence[float] = (1.0, 0.0, 0.0)) -> WdmAssignment:
    """Give each user its own basis function and a common unit polarization"""
    if num_users > indices.count:
        raise InvalidConfigError(f"WDM needs K <= N_F, got K={num_users} and N_F={indices.count}")

    if chosen is None:
        assigned = tuple(lowest_frequency_order(indices)[:num_users])
    else:
        assigned = tuple(FourierIndex(*n) for n in chosen)
        if len(assigned) != num_users:
            raise InvalidConfigError(f"WDM needs {num_users} indices, got {len(assigned)}")
        if len(set(assigned)) != len(assigned):
            raise InvalidConfigError("WDM indices must be distinct")
        for n in assigned:
            indices.position(n)

    pol = np.asarray(polarization, dtype=float)
    norm = float(np.linalg.norm(pol))
    if pol.shape != (3,) or not norm > 0:
        raise InvalidConfigError(f"Polarization must be a non-zero 3-vector, got {polarization}")
    polarizations = np.tile(pol / norm, (num_users, 1))
    return WdmAssignment(indices=assigned, polarizations=polarizations)


def wdm_patterns(num_users: int, indices: IndexSet, power: float,
                 assignment: Optional[WdmAssignment] = None) -> ComplexArray:
    """Equal-power single-basis patterns, total coefficient power exactly P_T"""
    assignment = assignment or wdm_assignment(num_users, indices)
    w = np.zeros((num_users, indices.count, 3), dtype=complex)
    amplitude = math.sqrt(power / num_users)
    for k, (n, pol) in enumerate(zip(assignment.indices, assignment.polarizations)):
        w[k, indices.position(n)] = amplitude * pol
    logger.debug(f"WDM assignment: {[tuple(n) for n in assignment.indices]}")
    return w


def evaluate_with_mmse(w: ComplexArray, omega: ComplexArray, noise_var: float) -> BaselineEvaluation:
    """Sum-rate of fixed patterns plus per-user MSE under MMSE combining"""
    psi = mmse_combiners(omega, w, noise_var)
    errors = mse_all(psi, omega, w, noise_var)
    return BaselineEvaluation(sum_rate=sum_rate(omega, w, noise_var), per_user_mse=tuple(float(e) for e in errors))


def interference_free_rates(w: ComplexArray, omega: ComplexArray, noise_var: float):
    """Per-user log2(1 + |alpha_k|^2 / sigma^2) with all interference removed"""
    if not noise_var > 0:
        raise InvalidConfigError(f"noise variance must be positive, got {noise_var}")
    fields = cross_fields(omega, w)
    desired = np.einsum("kka->ka", fields)
    snr = np.sum(np.abs(desired) ** 2, axis=1) / noise_var
    return tuple(float(v) for v in np.log1p(snr) / LN2)


def interference_free_rate(w: ComplexArray, omega: ComplexArray, noise_var: float) -> float:
    return math.fsum(interference_free_rates(w, omega, noise_var))
