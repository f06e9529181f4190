"""Free-space electromagnetics: constants, dyadic Green function and aperture quadrature"""

import logging
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ContractError, InvalidConfigError, SingularityError
from .models import ApertureGrid, ComplexArray, Point3, RealArray

logger = logging.getLogger(__name__)

SPEED_OF_LIGHT = 299792458.0
FREE_SPACE_IMPEDANCE = 376.73

PointLike = Union[Point3, RealArray]


def wavenumber(frequency_hz: float, speed_of_light: float = SPEED_OF_LIGHT) -> float:
    """Return the wavenumber 2*pi*f/c in rad/m"""
    if not frequency_hz > 0:
        raise InvalidConfigError(f"frequency must be positive, got {frequency_hz}")
    if not speed_of_light > 0:
        raise InvalidConfigError(f"speed of light must be positive, got {speed_of_light}")
    return 2.0 * math.pi * frequency_hz / speed_of_light


@dataclass(frozen=True)
class Medium:
    """Homogeneous propagation medium at a single carrier frequency"""
    frequency_hz: float
    impedance_ohm: float = FREE_SPACE_IMPEDANCE
    speed_of_light: float = SPEED_OF_LIGHT

    def __post_init__(self):
        # raises on non-positive frequency or speed
        wavenumber(self.frequency_hz, self.speed_of_light)
        if not self.impedance_ohm > 0:
            raise InvalidConfigError(f"impedance must be positive, got {self.impedance_ohm}")

    @property
    def wavenumber(self) -> float:
        return wavenumber(self.frequency_hz, self.speed_of_light)

    @property
    def wavelength(self) -> float:
        return self.speed_of_light / self.frequency_hz

    @property
    def min_distance(self) -> float:
        """Singularity guard for the free-space kernel"""
        return self.wavelength / 100.0


def as_point_array(point: PointLike) -> RealArray:
    if isinstance(point, Point3):
        return point.as_array()
    return np.asarray(point, dtype=float)


def scalar_green(r: PointLike, s: PointLike, kappa: float, min_distance: float = 0.0) -> complex:
    """
    Scalar free-space kernel e^{+j kappa R} / R with R = |r - s|

    Raises:
        SingularityError: if R is zero or below min_distance
    """
    distance = float(np.linalg.norm(as_point_array(r) - as_point_array(s)))
    if distance <= 0.0 or distance < min_distance:
        raise SingularityError(f"Distance {distance:.3e} m is inside the singularity guard {min_distance:.3e} m")
    return complex(np.exp(1j * kappa * distance) / distance)


def dyadic_factors(kr: Union[float, RealArray]):
    """
    Near/far factors (a, b) of G ∝ a*I - b*R̂R̂^T for the e^{+jκR} convention

    Obtained from the radial derivatives of e^{jκR}/R:
    a = 1 + j/(κR) - 1/(κR)^2, b = 1 + 3j/(κR) - 3/(κR)^2.
    """
    inv = 1.0 / np.asarray(kr, dtype=float)
    a = 1.0 + 1j * inv - inv ** 2
    b = 1.0 + 3j * inv - 3.0 * inv ** 2
    return a, b


def green_dyadic(r: PointLike, s: PointLike, medium: Medium) -> ComplexArray:
    """
    Free-space dyadic Green function G(r, s) as a 3x3 complex matrix

    G = (j κ Z0 / 4π) (e^{jκR}/R) [a(κR) I - b(κR) R̂R̂^T]

    Raises:
        SingularityError: if |r - s| is below the medium's min_distance
    """
    displacement = as_point_array(r) - as_point_array(s)
    return green_dyadic_samples(displacement[np.newaxis, :], medium)[0]


def green_dyadic_samples(displacements: RealArray, medium: Medium) -> ComplexArray:
    """Dyadic Green function for a stack of displacements r - s, shape (I, 3) -> (I, 3, 3)"""
    displacements = np.asarray(displacements, dtype=float)
    if displacements.ndim != 2 or displacements.shape[1] != 3:
        raise ContractError(f"Expected displacements of shape (I, 3), got {displacements.shape}")

    kappa = medium.wavenumber
    distance = np.linalg.norm(displacements, axis=1)
    if np.any(distance < medium.min_distance) or np.any(distance <= 0.0):
        closest = float(distance.min())
        raise SingularityError(
            f"Distance {closest:.3e} m is inside the singularity guard {medium.min_distance:.3e} m"
        )

    unit = displacements / distance[:, np.newaxis]
    a, b = dyadic_factors(kappa * distance)
    prefactor = (1j * kappa * medium.impedance_ohm / (4.0 * math.pi)) * np.exp(1j * kappa * distance) / distance

    outer = unit[:, :, np.newaxis] * unit[:, np.newaxis, :]
    identity = np.eye(3)[np.newaxis, :, :]
    return prefactor[:, np.newaxis, np.newaxis] * (a[:, np.newaxis, np.newaxis] * identity
                                                    - b[:, np.newaxis, np.newaxis] * outer)


def green_on_grid(receiver: PointLike, grid: ApertureGrid, medium: Medium) -> ComplexArray:
    """Sample G(r_k, s_i) at every aperture node, shape (I_s, 3, 3)"""
    return green_dyadic_samples(as_point_array(receiver)[np.newaxis, :] - grid.nodes, medium)


def aperture_grid(lx: float, ly: float, samples: int, adjust: bool = False) -> ApertureGrid:
    """
    Midpoint-rule grid of sqrt(I_s) x sqrt(I_s) cells on a centered planar aperture

    Args:
        lx, ly: aperture extents in meters
        samples: node count I_s, a perfect square
        adjust: snap a non-square sample count to the nearest square instead of failing
    """
    if not (lx > 0 and ly > 0):
        raise InvalidConfigError(f"Aperture extents must be positive, got ({lx}, {ly})")
    if samples < 1:
        raise InvalidConfigError(f"quadrature_samples must be at least 1, got {samples}")

    per_axis = math.isqrt(samples)
    if per_axis * per_axis != samples:
        if not adjust:
            raise InvalidConfigError(f"quadrature_samples must be a perfect square, got {samples}")
        per_axis = max(1, round(math.sqrt(samples)))
        logger.warning(f"Adjusted quadrature_samples from {samples} to nearest square {per_axis * per_axis}")

    xs = -lx / 2.0 + (np.arange(per_axis) + 0.5) * (lx / per_axis)
    ys = -ly / 2.0 + (np.arange(per_axis) + 0.5) * (ly / per_axis)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    nodes = np.stack([gx.ravel(), gy.ravel(), np.zeros(gx.size)], axis=1)
    weights = np.full(gx.size, (lx * ly) / gx.size)

    return ApertureGrid(nodes=nodes, weights=weights, lx=lx, ly=ly, lz=0.0, shape=(per_axis, per_axis))


def integrate_surface(samples: np.ndarray, grid: ApertureGrid) -> np.ndarray:
    """Weighted sum over nodes; the leading axis of samples runs over grid nodes"""
    samples = np.asarray(samples)
    if samples.shape[0] != grid.num_nodes:
        raise ContractError(f"Got {samples.shape[0]} samples for a grid of {grid.num_nodes} nodes")
    return np.tensordot(grid.weights, samples, axes=(0, 0))


def distance_to_aperture(point: PointLike, lx: float, ly: float) -> float:
    """Euclidean distance from a point to the centered planar aperture rectangle"""
    p = as_point_array(point)
    dx = max(abs(p[0]) - lx / 2.0, 0.0)
    dy = max(abs(p[1]) - ly / 2.0, 0.0)
    return math.sqrt(dx * dx + dy * dy + p[2] * p[2])
