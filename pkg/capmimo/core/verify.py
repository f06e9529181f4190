"""Independent oracles that cross-check every analytic shortcut"""

import logging
import math
from typing import Callable, List, Optional

import numpy as np
from scipy import linalg

from .channel import Channel, build_channel
from .config import ScenarioConfig
from .em import Medium, PointLike, as_point_array, green_dyadic
from .errors import OracleInconclusiveError
from .fourier import coefficient_power, quadrature_power, synthesize_patterns
from .models import ApertureGrid, ComplexArray, IndexSet, OptSettings, OracleReport, RealArray
from .optimizer import init_state, run, update_psi, update_rho, update_w
from .rates import cross_fields, effective_channels, sum_rate, sum_rate_det

logger = logging.getLogger(__name__)

DyadicFn = Callable[[PointLike, PointLike, Medium], ComplexArray]


def _shifted_green(offset: RealArray, displacement: RealArray, distance: float, kappa: float) -> complex:
    """e^{jκ(R-R0)}/R at displacement + offset, with R - R0 formed without cancellation"""
    delta = (2.0 * np.dot(displacement, offset) + np.dot(offset, offset)) / (
        np.linalg.norm(displacement + offset) + distance
    )
    return complex(np.exp(1j * kappa * delta) / (distance + delta))


def fd_dyadic_oracle(r: PointLike, s: PointLike, medium: Medium, step: Optional[float] = None,
                     threshold: float = 1e-6, dyadic: DyadicFn = green_dyadic) -> OracleReport:
    """
    Apply (I + ∇∇^H/κ^2) to the scalar kernel by central differences and compare with the analytic dyadic

    The common phase e^{jκR0} is factored out before differencing so that the
    stencil resolves sub-nanometer path differences at κR in the thousands.
    """
    displacement = as_point_array(r) - as_point_array(s)
    distance = float(np.linalg.norm(displacement))
    kappa = medium.wavenumber
    if kappa * distance < 1.0:
        raise OracleInconclusiveError(f"κR = {kappa * distance:.3g} is below 1; the stencil would straddle the singularity")

    h = 1e-4 * medium.wavelength if step is None else float(step)
    if not (distance * 1e-10 < h <= 1e-2 / kappa):
        raise OracleInconclusiveError(f"Step {h:.3e} m is unusable at double precision for R={distance:.3e} m")

    def g(offset):
        return _shifted_green(np.asarray(offset, dtype=float), displacement, distance, kappa)

    center = g(np.zeros(3))
    hessian = np.zeros((3, 3), dtype=complex)
    unit = np.eye(3) * h
    for i in range(3):
        hessian[i, i] = (g(unit[i]) - 2.0 * center + g(-unit[i])) / h ** 2
        for j in range(i + 1, 3):
            value = (g(unit[i] + unit[j]) - g(unit[i] - unit[j])
                     - g(-unit[i] + unit[j]) + g(-unit[i] - unit[j])) / (4.0 * h ** 2)
            hessian[i, j] = hessian[j, i] = value

    prefactor = 1j * kappa * medium.impedance_ohm / (4.0 * math.pi) * np.exp(1j * kappa * distance)
    reference = prefactor * (center * np.eye(3) + hessian / kappa ** 2)
    analytic = dyadic(r, s, medium)

    error = float(np.max(np.abs(reference - analytic)) / np.max(np.abs(reference)))
    return OracleReport.evaluate(
        "fd_dyadic", error, threshold,
        details=f"kappa*R={kappa * distance:.4g}, step={h:.3e} m, entrywise error relative to max |G|",
    )


def direct_vs_projected(w: ComplexArray, omega: ComplexArray, grid: ApertureGrid, green: ComplexArray,
                        indices: IndexSet, threshold: float = 1e-9) -> OracleReport:
    """
    Compare direct quadrature ∫ G_k θ_j ds on `grid` with Σ_n Ω_{k,n} w_{j,n} for all (k, j)

    `omega` may come from a different grid than `green`; the comparison then
    exposes the discretization error of the projection grid.
    """
    patterns = synthesize_patterns(w, grid, indices)
    direct = np.einsum("i,kiab,jib->kja", grid.weights, green, patterns)
    projected = cross_fields(omega, w)

    scale = float(np.max(np.abs(direct)))
    difference = float(np.max(np.abs(direct - projected)))
    error = difference / scale if scale > 0 else difference
    return OracleReport.evaluate(
        "direct_vs_projected", error, threshold,
        details=f"{direct.shape[0]}x{direct.shape[1]} receiver/pattern pairs on {grid.num_nodes} nodes",
    )


def kkt_residual(w: ComplexArray, h: ComplexArray, rho: RealArray, zeta: float, power: float,
                 threshold: float = 1e-8, slackness_tol: float = 1e-6) -> OracleReport:
    """
    Check stationarity, primal feasibility, dual feasibility and complementary slackness of a w update

    The reported error is the worst per-user stationarity residual; it is
    infinite when any of the other three conditions fails.
    """
    h = np.asarray(h)
    rho = np.asarray(rho, dtype=float)
    stacked = np.asarray(w).reshape(h.shape)
    matrix = (h * rho[:, np.newaxis]).T @ h.conj()

    residuals = []
    for k in range(h.shape[0]):
        target = rho[k] * h[k]
        residual = np.linalg.norm(matrix @ stacked[k] + zeta * stacked[k] - target)
        scale = np.linalg.norm(target)
        residuals.append(residual / scale if scale > 0 else residual)
    stationarity = float(max(residuals))

    total = coefficient_power(stacked)
    feasible = total <= power * (1.0 + 1e-9)
    dual = zeta >= 0
    slack = zeta * (power - total) <= slackness_tol * zeta * power

    error = stationarity if (feasible and dual and slack) else math.inf
    return OracleReport.evaluate(
        "kkt_residual", error, threshold,
        details=(f"stationarity={stationarity:.3e}, power={total:.6e}/{power:.6e}, zeta={zeta:.6e}, "
                 f"primal={feasible}, dual={dual}, slackness={slack}"),
    )


def stacked_projection(omega_k: ComplexArray) -> ComplexArray:
    """[Omega_{k,n}]_n as a 3 x 3N_F matrix in the global stacking order"""
    omega_k = np.asarray(omega_k)
    return omega_k.transpose(1, 0, 2).reshape(3, -1)


def svd_capacity_oracle(omega_1: ComplexArray, noise_var: float, power: float) -> float:
    """Single-user capacity log2(1 + P_T σ_max^2 / σ^2) of the stacked projection"""
    top = float(linalg.svdvals(stacked_projection(omega_1))[0])
    return math.log2(1.0 + power * top ** 2 / noise_var)


def parseval_oracle(w: ComplexArray, grid: ApertureGrid, indices: IndexSet, threshold: float = 1e-10) -> OracleReport:
    """Coefficient power against quadrature power of the synthesized patterns"""
    coefficients = coefficient_power(w)
    quadrature = quadrature_power(synthesize_patterns(w, grid, indices), grid)
    error = abs(coefficients - quadrature) / coefficients if coefficients > 0 else abs(quadrature)
    return OracleReport.evaluate(
        "parseval", error, threshold,
        details=f"coefficient power {coefficients:.6e}, quadrature power {quadrature:.6e}",
    )


def determinant_identity_oracle(instances: int = 100, seed: int = 0, threshold: float = 1e-10) -> OracleReport:
    """3x3 determinant form against the rank-1 scalar form on random instances (absolute error)"""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(instances):
        users = int(rng.integers(1, 5))
        terms = int(rng.integers(1, 6))
        omega = rng.standard_normal((users, terms, 3, 3)) + 1j * rng.standard_normal((users, terms, 3, 3))
        w = rng.standard_normal((users, terms, 3)) + 1j * rng.standard_normal((users, terms, 3))
        noise_var = float(10.0 ** rng.uniform(-1.0, 1.0))
        worst = max(worst, abs(sum_rate(omega, w, noise_var) - sum_rate_det(omega, w, noise_var)))
    return OracleReport.evaluate(
        "determinant_identity", worst, threshold,
        details=f"max absolute bits/s/Hz difference over {instances} random instances",
    )


def single_user_capacity_report(config: ScenarioConfig, channel: Channel, user: int = 0,
                                threshold: float = 1e-4) -> OracleReport:
    """Run the optimizer for one receiver and compare with the SVD capacity"""
    single = config.restricted_to([user])
    sub_channel = channel.restricted_to([user])
    settings = OptSettings(
        max_iters=max(config.optimizer.max_iters, 1000),
        rel_tol=min(config.optimizer.rel_tol, 1e-12),
        bisect_tol=config.optimizer.bisect_tol,
        bisect_max_iters=config.optimizer.bisect_max_iters,
        seed=config.seed,
    )
    state = run(single, settings, sub_channel)
    achieved = sum_rate(sub_channel.omega, state.w, config.noise_v2m2)
    capacity = svd_capacity_oracle(sub_channel.omega[0], config.noise_v2m2, config.power_a2)
    return OracleReport.evaluate(
        "svd_capacity", abs(achieved - capacity) / capacity, threshold,
        details=f"optimizer {achieved:.8f} vs SVD {capacity:.8f} bps/Hz for receiver {user + 1}",
    )


def run_oracle_suite(config: ScenarioConfig, seed: Optional[int] = None) -> List[OracleReport]:
    """Run every oracle on one scenario"""
    seed = config.seed if seed is None else seed
    channel = build_channel(config)
    rng = np.random.default_rng(seed)
    reports: List[OracleReport] = []

    reports.append(fd_dyadic_oracle(channel.receivers[0], np.zeros(3), channel.medium))

    shape = (channel.num_users, channel.indices.count, 3)
    w = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    w *= math.sqrt(config.power_a2 / coefficient_power(w))
    reports.append(direct_vs_projected(w, channel.omega, channel.grid, channel.green, channel.indices))
    reports.append(parseval_oracle(w, channel.grid, channel.indices))

    state = init_state(config, channel.indices, seed)
    state.rho = update_rho(state, channel.omega, config.noise_v2m2)
    state.psi = update_psi(state, channel.omega, config.noise_v2m2)
    state.w, state.zeta = update_w(state, channel.omega, config.noise_v2m2, config.power_a2,
                                   config.optimizer.bisect_tol, config.optimizer.bisect_max_iters)
    h = effective_channels(channel.omega, state.psi)
    reports.append(kkt_residual(state.w, h, state.rho, state.zeta, config.power_a2))

    reports.append(determinant_identity_oracle(seed=seed))
    reports.append(single_user_capacity_report(config, channel))

    for report in reports:
        status = "pass" if report.passed else "FAIL"
        logger.info(f"oracle {report.name}: {status} ({report.max_relative_error:.3e} vs {report.threshold:.0e})")
    return reports
