"""Configuration management: scenario files and process settings"""

import logging
import math
import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple, Union

import tomli_w
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .em import Medium, distance_to_aperture
from .errors import InvalidConfigError
from .models import OptSettings

# Load environment variables from .env file
load_dotenv()

logger = logging.getLogger(__name__)

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ApertureConfig(_Section):
    shape: Literal["rectangle"] = "rectangle"
    lx_m: float = Field(gt=0)
    ly_m: float = Field(gt=0)


class TruncationConfig(_Section):
    nx: int = Field(ge=0, le=64)
    ny: int = Field(ge=0, le=64)
    nz: int = Field(default=0, ge=0)


class OptimizerConfig(_Section):
    max_iters: int = Field(default=500, ge=1)
    rel_tol: float = Field(default=1e-4, gt=0)
    bisect_tol: float = Field(default=1e-12, gt=0, le=1e-6)
    bisect_max_iters: int = Field(default=200, ge=1)


class BaselineConfig(_Section):
    wdm_indices: Optional[List[Tuple[int, int, int]]] = None
    wdm_polarization: Tuple[float, float, float] = (1.0, 0.0, 0.0)

    @field_validator("wdm_polarization")
    @classmethod
    def _nonzero_polarization(cls, value: Tuple[float, float, float]) -> Tuple[float, float, float]:
        if not math.isfinite(sum(value)) or math.hypot(*value) == 0:
            raise ValueError("polarization must be a finite non-zero vector")
        return value


class ScenarioConfig(_Section):
    """All physical and numerical parameters of one scenario, SI units"""

    frequency_hz: float = Field(gt=0)
    impedance_ohm: float = Field(default=376.73, gt=0)
    power_a2: float = Field(gt=0)
    noise_v2m2: float = Field(gt=0)
    quadrature_samples: int = Field(default=1024, ge=1)
    adjust_quadrature: bool = False
    seed: int = Field(default=0, ge=0)
    num_users: Optional[int] = Field(default=None, ge=1)
    receivers_m: List[Tuple[float, float, float]] = Field(min_length=1)
    aperture: ApertureConfig
    truncation: TruncationConfig
    optimizer: OptimizerConfig = OptimizerConfig()
    baseline: BaselineConfig = BaselineConfig()

    @model_validator(mode="after")
    def _check_scenario(self) -> 'ScenarioConfig':
        if self.num_users is not None and self.num_users != len(self.receivers_m):
            raise ValueError(f"num_users={self.num_users} but {len(self.receivers_m)} receivers are listed")
        if self.truncation.nz != 0:
            raise ValueError("truncation.nz must be 0 for a planar aperture")

        guard = self.medium().min_distance
        for i, receiver in enumerate(self.receivers_m):
            if not all(math.isfinite(v) for v in receiver):
                raise ValueError(f"receivers_m[{i}] must be finite")
            distance = distance_to_aperture(receiver, self.aperture.lx_m, self.aperture.ly_m)
            if distance < guard:
                raise ValueError(
                    f"receivers_m[{i}] is {distance:.3e} m from the aperture, inside the singularity guard {guard:.3e} m"
                )

        index_count = (self.truncation.nx + 1) * (self.truncation.ny + 1) * (self.truncation.nz + 1)
        if len(self.receivers_m) > index_count:
            raise ValueError(f"{len(self.receivers_m)} receivers exceed the {index_count} retained Fourier indices")
        if self.baseline.wdm_indices is not None and len(self.baseline.wdm_indices) != len(self.receivers_m):
            raise ValueError("baseline.wdm_indices needs one index per receiver")
        return self

    @property
    def users(self) -> int:
        return len(self.receivers_m)

    @property
    def area_m2(self) -> float:
        return self.aperture.lx_m * self.aperture.ly_m

    def medium(self) -> Medium:
        return Medium(frequency_hz=self.frequency_hz, impedance_ohm=self.impedance_ohm)

    def optimizer_settings(self, seed: Optional[int] = None) -> OptSettings:
        return OptSettings(
            max_iters=self.optimizer.max_iters,
            rel_tol=self.optimizer.rel_tol,
            bisect_tol=self.optimizer.bisect_tol,
            bisect_max_iters=self.optimizer.bisect_max_iters,
            seed=self.seed if seed is None else seed,
        )

    def _replace(self, **changes: Any) -> 'ScenarioConfig':
        data = self.model_dump()
        data.update(changes)
        return parse_config(data)

    def with_seed(self, seed: int) -> 'ScenarioConfig':
        return self._replace(seed=seed)

    def with_aperture_area(self, area_m2: float) -> 'ScenarioConfig':
        """Square aperture of the given area, L_x = L_y = sqrt(A_T)"""
        if not area_m2 > 0:
            raise InvalidConfigError(f"Aperture area must be positive, got {area_m2}")
        side = math.sqrt(area_m2)
        return self._replace(aperture={"shape": self.aperture.shape, "lx_m": side, "ly_m": side})

    def restricted_to(self, users: Sequence[int]) -> 'ScenarioConfig':
        """Same scenario serving only the listed receivers"""
        receivers = [self.receivers_m[k] for k in users]
        baseline = self.baseline.model_dump()
        if baseline["wdm_indices"] is not None:
            baseline["wdm_indices"] = [baseline["wdm_indices"][k] for k in users]
        return self._replace(receivers_m=receivers, num_users=None, baseline=baseline)


def _format_validation_error(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = ".".join(str(p) for p in item["loc"]) or "config"
        parts.append(f"{location}: {item['msg']}")
    return "; ".join(parts)


def parse_config(data: Dict[str, Any]) -> ScenarioConfig:
    """Validate a raw mapping into a ScenarioConfig"""
    try:
        return ScenarioConfig.model_validate(data)
    except ValidationError as e:
        raise InvalidConfigError(_format_validation_error(e))


def load_config(path: Union[str, Path]) -> ScenarioConfig:
    """
    Load and validate a TOML scenario file

    Raises:
        InvalidConfigError: unreadable file, TOML syntax error, unknown key or invariant violation
    """
    path = Path(path)
    try:
        raw = tomllib.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise InvalidConfigError(f"Cannot read config {path}: {e}")
    except tomllib.TOMLDecodeError as e:
        raise InvalidConfigError(f"Cannot parse config {path}: {e}")

    config = parse_config(raw)
    logger.debug(f"Loaded scenario {path} with {config.users} receivers")
    return config


def config_to_toml(config: ScenarioConfig) -> str:
    return tomli_w.dumps(config.model_dump(exclude_none=True))


def dump_config(config: ScenarioConfig, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(config_to_toml(config), encoding="utf-8")
    return path


def bundled_config_path(name: str = "paper_iv") -> Path:
    """Path of a scenario shipped with the package"""
    return SCENARIO_DIR / f"{name}.toml"


@dataclass
class RuntimeSettings:
    """Process-level settings, read from the environment"""

    log_level: str = "INFO"
    output_dir: str = "results"
    record_timings: bool = False
    default_config: Optional[str] = None

    @classmethod
    def from_env(cls) -> 'RuntimeSettings':
        """Create settings from CAPMIMO_* environment variables"""
        return cls(
            log_level=os.getenv('CAPMIMO_LOG_LEVEL', cls.log_level).upper(),
            output_dir=os.getenv('CAPMIMO_OUTPUT_DIR', cls.output_dir),
            record_timings=os.getenv('CAPMIMO_RECORD_TIMINGS', 'false').lower() == 'true',
            default_config=os.getenv('CAPMIMO_DEFAULT_CONFIG') or None,
        )

    def validate(self) -> None:
        if self.log_level not in ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]:
            raise InvalidConfigError(f"Unknown log level '{self.log_level}'")

    def config_path(self) -> Path:
        return Path(self.default_config) if self.default_config else bundled_config_path()


# Global settings instance
settings: Optional[RuntimeSettings] = None


def get_settings() -> RuntimeSettings:
    """Get the global settings instance"""
    global settings
    if settings is None:
        settings = RuntimeSettings.from_env()
        settings.validate()
    return settings


def set_settings(new_settings: RuntimeSettings) -> None:
    """Set the global settings instance (useful for testing)"""
    global settings
    settings = new_settings
