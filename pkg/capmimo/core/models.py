"""Data models for CAP-MIMO pattern design"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from .errors import InvalidConfigError

ComplexArray = NDArray[np.complex128]
RealArray = NDArray[np.float64]


@dataclass(frozen=True)
class Point3:
    """A point in space, meters"""
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise InvalidConfigError(f"Point components must be finite, got {self}")

    @classmethod
    def from_sequence(cls, values: Sequence[float]) -> 'Point3':
        if len(values) != 3:
            raise InvalidConfigError(f"A point needs 3 coordinates, got {len(values)}")
        return cls(float(values[0]), float(values[1]), float(values[2]))

    def as_array(self) -> RealArray:
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True, eq=False)
class ApertureGrid:
    """Quadrature nodes and weights on the transmitter surface"""
    nodes: RealArray            # (I_s, 3)
    weights: RealArray          # (I_s,)
    lx: float
    ly: float
    lz: float = 0.0
    shape: Tuple[int, int] = (1, 1)

    @property
    def area(self) -> float:
        return self.lx * self.ly

    @property
    def num_nodes(self) -> int:
        return int(self.weights.shape[0])

    @property
    def extents(self) -> Tuple[float, float, float]:
        return (self.lx, self.ly, self.lz)


class FourierIndex(NamedTuple):
    """Spatial-frequency index n = (n_x, n_y, n_z)"""
    nx: int
    ny: int
    nz: int


@dataclass(frozen=True)
class IndexSet:
    """Truncated Fourier index set in lexicographic order"""
    caps: Tuple[int, int, int]
    indices: Tuple[FourierIndex, ...]

    @property
    def count(self) -> int:
        return len(self.indices)

    def as_array(self) -> NDArray[np.int64]:
        return np.array(self.indices, dtype=np.int64).reshape(-1, 3)

    def position(self, index: FourierIndex) -> int:
        """Position of an index in the global stacking order"""
        try:
            return self.indices.index(FourierIndex(*index))
        except ValueError:
            raise InvalidConfigError(f"Index {tuple(index)} is not in the truncated set {self.caps}")


class Scheme(str, Enum):
    """Transmission schemes compared by the experiments"""
    PDM = "pdm"
    WDM = "wdm"
    IFREE = "interference-free"

    @classmethod
    def parse(cls, value: str) -> 'Scheme':
        aliases = {"ifree": cls.IFREE}
        if value in aliases:
            return aliases[value]
        try:
            return cls(value)
        except ValueError:
            raise InvalidConfigError(f"Unknown scheme '{value}', expected pdm, wdm or ifree")


@dataclass(frozen=True)
class OptSettings:
    """Stopping rules and seeding for the alternating optimizer"""
    max_iters: int = 500
    rel_tol: float = 1e-4
    bisect_tol: float = 1e-12
    bisect_max_iters: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.max_iters < 1:
            raise InvalidConfigError("max_iters must be at least 1")
        if self.rel_tol <= 0 or self.bisect_tol <= 0:
            raise InvalidConfigError("Optimizer tolerances must be positive")
        if self.bisect_max_iters < 1:
            raise InvalidConfigError("bisect_max_iters must be at least 1")


class TraceEntry(NamedTuple):
    iteration: int
    surrogate: float
    sum_rate: float


@dataclass
class OptState:
    """Current (rho, psi, w) triple plus iteration diagnostics"""
    w: ComplexArray             # (K, N_F, 3)
    psi: ComplexArray           # (K, 3)
    rho: RealArray              # (K,)
    iteration: int = 0
    trace: List[TraceEntry] = field(default_factory=list)
    zeta: float = 0.0
    converged: bool = False
    patterns: Optional[ComplexArray] = None   # (K, I_s, 3), filled at the end of a run

    @property
    def num_users(self) -> int:
        return int(self.w.shape[0])


@dataclass(frozen=True, eq=False)
class WdmAssignment:
    """Basis index and polarization handed to each user by the WDM baseline"""
    indices: Tuple[FourierIndex, ...]
    polarizations: RealArray    # (K, 3), unit rows


@dataclass(frozen=True)
class BaselineEvaluation:
    sum_rate: float
    per_user_mse: Tuple[float, ...]


@dataclass
class RunResult:
    """Outcome of one scheme on one scenario and seed"""
    scheme: str
    sum_rate: float
    per_user_rates: Tuple[float, ...]
    iterations: int
    converged: bool
    trace: List[TraceEntry]
    wall_time: float
    area_m2: float
    seed: int

    @classmethod
    def from_rates(cls, scheme: str, per_user_rates: Sequence[float], area_m2: float, seed: int,
                   iterations: int = 0, converged: bool = True,
                   trace: Optional[List[TraceEntry]] = None, wall_time: float = 0.0) -> 'RunResult':
        """Create a result whose sum-rate is the exact sum of its per-user rates"""
        rates = tuple(float(r) for r in per_user_rates)
        return cls(
            scheme=scheme,
            sum_rate=math.fsum(rates),
            per_user_rates=rates,
            iterations=iterations,
            converged=converged,
            trace=list(trace or []),
            wall_time=wall_time,
            area_m2=area_m2,
            seed=seed,
        )


@dataclass(frozen=True)
class OracleReport:
    """Verdict of one verification oracle"""
    name: str
    max_relative_error: float
    threshold: float
    passed: bool
    details: str = ""

    @classmethod
    def evaluate(cls, name: str, max_relative_error: float, threshold: float, details: str = "") -> 'OracleReport':
        error = float(max_relative_error)
        return cls(
            name=name,
            max_relative_error=error,
            threshold=threshold,
            passed=bool(error <= threshold),
            details=details,
        )

    def to_dict(self) -> Dict[str, Any]:
        error = self.max_relative_error if math.isfinite(self.max_relative_error) else None
        return {
            "name": self.name,
            "max_relative_error": error,
            "threshold": self.threshold,
            "pass": self.passed,
            "details": self.details,
        }
