"""Alternating weighted-MMSE optimization of pattern coefficients"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import linalg

from .channel import Channel, build_channel
from .config import ScenarioConfig
from .errors import NumericError, OptimizerError
from .fourier import coefficient_power, synthesize_patterns
from .models import ComplexArray, IndexSet, OptSettings, OptState, RealArray, TraceEntry
from .rates import effective_channels, mmse_combiners, mse_all, sum_rate, surrogate

logger = logging.getLogger(__name__)

ZETA_CEILING = 2.0 ** 200


@dataclass(frozen=True, eq=False)
class NormalSystem:
    """
    Eigendecomposition of M = Σ_j rho_j h_j h_j^H with right-hand sides rho_k h_k

    One factorization serves every multiplier candidate and every user:
    w_k(zeta) = U (Λ + zeta I)^{-1} U^H rho_k h_k restricted to the range of M.
    """
    eigenvalues: RealArray      # (r,) range-space eigenvalues
    basis: ComplexArray         # (D, r)
    projected_rhs: ComplexArray  # (r, K)
    matrix: ComplexArray        # (D, D)
    rhs: ComplexArray           # (D, K)

    @classmethod
    def build(cls, h: ComplexArray, rho: RealArray) -> 'NormalSystem':
        h = np.asarray(h)
        rhs = (h * np.asarray(rho)[:, np.newaxis]).T
        matrix = rhs @ h.conj()
        eigenvalues, vectors = linalg.eigh(matrix)

        top = max(float(eigenvalues[-1]), 0.0)
        keep = eigenvalues > top * matrix.shape[0] * np.finfo(float).eps * 16
        basis = vectors[:, keep]
        return cls(
            eigenvalues=eigenvalues[keep],
            basis=basis,
            projected_rhs=basis.conj().T @ rhs,
            matrix=matrix,
            rhs=rhs,
        )

    def power(self, zeta: float) -> float:
        scaled = self.projected_rhs / (self.eigenvalues + zeta)[:, np.newaxis]
        return float(np.sum(scaled.real ** 2 + scaled.imag ** 2))

    def solve(self, zeta: float) -> ComplexArray:
        """Stacked coefficients of all users, shape (K, D)"""
        scaled = self.projected_rhs / (self.eigenvalues + zeta)[:, np.newaxis]
        return (self.basis @ scaled).T


def init_state(config: ScenarioConfig, indices: IndexSet, seed: int) -> OptState:
    """Random start: Gaussian w scaled to full power, unit-norm Gaussian combiners, rho = 1"""
    rng = np.random.default_rng(seed)
    shape = (config.users, indices.count, 3)
    w = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)
    w *= math.sqrt(config.power_a2 / coefficient_power(w))

    psi = (rng.standard_normal((config.users, 3)) + 1j * rng.standard_normal((config.users, 3))) / math.sqrt(2.0)
    psi /= np.linalg.norm(psi, axis=1, keepdims=True)

    return OptState(w=w, psi=psi, rho=np.ones(config.users))


def update_rho(state: OptState, omega: ComplexArray, noise_var: float) -> RealArray:
    """rho_k = 1 / E_k"""
    errors = mse_all(state.psi, omega, state.w, noise_var)
    if np.any(errors <= 0):
        raise NumericError(f"Zero mean-square error for users {np.flatnonzero(errors <= 0).tolist()}")
    return 1.0 / errors


def update_psi(state: OptState, omega: ComplexArray, noise_var: float) -> ComplexArray:
    """MMSE combiners; rho_k cancels between A_k and the scaled desired field"""
    return mmse_combiners(omega, state.w, noise_var)


def solve_zeta(system: NormalSystem, power: float, tol: float, max_iters: int = 200) -> float:
    """
    Smallest zeta >= 0 whose coefficients meet the power budget

    Returns 0 when the unconstrained solution is feasible, otherwise bisects on
    [0, zeta_hi] with zeta_hi found by doubling from 1. The returned multiplier
    is always on the feasible side of the bracket.
    """
    if not power > 0:
        raise NumericError(f"Power budget must be positive, got {power}")
    if system.power(0.0) <= power:
        return 0.0

    low, high = 0.0, 1.0
    while system.power(high) > power:
        low, high = high, 2.0 * high
        if high > ZETA_CEILING:
            raise NumericError("Multiplier doubling exceeded 2^200; check the scenario scaling")

    for step in range(max_iters):
        gap = (power - system.power(high)) / power
        if gap <= tol:
            logger.debug(f"Bisection converged after {step} steps: zeta={high:.6e}, gap={gap:.2e}")
            return high
        middle = 0.5 * (low + high)
        if not low < middle < high:
            break
        if system.power(middle) > power:
            low = middle
        else:
            high = middle

    if system.power(high) > power * (1.0 + 1e-9):
        raise OptimizerError(f"No feasible multiplier found within {max_iters} bisection steps")
    logger.warning(f"Bisection stopped at its cap with a feasible bracket: zeta={high:.6e}")
    return high


def update_w(state: OptState, omega: ComplexArray, noise_var: float, power: float,
             bisect_tol: float, bisect_max_iters: int = 200) -> Tuple[ComplexArray, float]:
    """
    Closed-form QCQP step w_k = rho_k (Σ_j rho_j h_j h_j^H + zeta I)^{-1} h_k

    Returns:
        (coefficients of shape (K, N_F, 3), multiplier zeta)
    """
    h = effective_channels(omega, state.psi)
    system = NormalSystem.build(h, state.rho)
    zeta = solve_zeta(system, power, bisect_tol, bisect_max_iters)
    w = system.solve(zeta).reshape(state.w.shape)
    return w, zeta


def run(config: ScenarioConfig, settings: Optional[OptSettings] = None,
        channel: Optional[Channel] = None) -> OptState:
    """
    Alternate rho, psi and w updates until the surrogate stops improving

    The returned state carries rho and psi refreshed for the final w, so its
    surrogate equals the sum-rate of its coefficients.
    """
    settings = settings or config.optimizer_settings()
    channel = channel or build_channel(config)
    omega = channel.omega
    noise_var = config.noise_v2m2

    state = init_state(config, channel.indices, settings.seed)
    logger.info(f"Starting pattern design: K={config.users}, N_F={channel.indices.count}, seed={settings.seed}")

    previous: Optional[float] = None
    for iteration in range(1, settings.max_iters + 1):
        state.rho = update_rho(state, omega, noise_var)
        state.psi = update_psi(state, omega, noise_var)
        state.w, state.zeta = update_w(
            state, omega, noise_var, config.power_a2, settings.bisect_tol, settings.bisect_max_iters
        )
        state.iteration = iteration

        value = surrogate(state.rho, state.psi, state.w, omega, noise_var)
        rate = sum_rate(omega, state.w, noise_var)
        state.trace.append(TraceEntry(iteration, value, rate))
        logger.debug(f"iter {iteration}: surrogate={value:.10f} sum_rate={rate:.10f} zeta={state.zeta:.4e}")

        if previous is not None and abs(value - previous) <= settings.rel_tol * max(1.0, abs(value)):
            state.converged = True
            break
        previous = value

    state.psi = update_psi(state, omega, noise_var)
    state.rho = update_rho(state, omega, noise_var)
    state.patterns = synthesize_patterns(state.w, channel.grid, channel.indices)

    logger.info(
        f"Pattern design finished after {state.iteration} iterations "
        f"(converged={state.converged}): sum_rate={state.trace[-1].sum_rate:.4f} bps/Hz"
    )
    return state
