"""
CAP-MIMO - pattern-division multiplexing for continuous-aperture transmitters

A modular library for designing transmit current patterns that maximize the
downlink sum-rate of a continuous aperture serving several point receivers.
"""

__version__ = "0.1.0"
__author__ = "CAP-MIMO Team"

from .core.channel import Channel, build_channel
from .core.config import ScenarioConfig, load_config, dump_config, bundled_config_path
from .core.errors import CapMimoError, InvalidConfigError, NumericError, OptimizerError
from .core.experiment import ScenarioRunner, run_experiment, sweep_aperture
from .core.models import OptState, OracleReport, RunResult, Scheme
from .core.optimizer import run

__all__ = [
    "Channel",
    "build_channel",
    "ScenarioConfig",
    "load_config",
    "dump_config",
    "bundled_config_path",
    "CapMimoError",
    "InvalidConfigError",
    "NumericError",
    "OptimizerError",
    "ScenarioRunner",
    "run_experiment",
    "sweep_aperture",
    "OptState",
    "OracleReport",
    "RunResult",
    "Scheme",
    "run",
]
