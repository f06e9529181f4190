"""Result stores and CSV exports for experiment outputs"""

import csv
import logging
import math
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import CapMimoError, ContractError
from .models import ApertureGrid, ComplexArray, FourierIndex, OptState, RunResult

logger = logging.getLogger(__name__)

RESULTS_HEADER = ["area_m2", "scheme", "seed", "sum_rate_bpshz", "iterations", "converged", "wall_time_s"]
TRACE_HEADER = ["iter", "surrogate", "sum_rate"]
PATTERN_HEADER = ["s_x", "s_y", "component", "re", "im", "amp_norm", "phase"]
ORTHOGONALITY_HEADER = ["user_k", "user_j", "abs_normalized_inner_product"]
SPECTRUM_HEADER = ["n_x", "n_y", "n_z", "energy"]
COMPONENTS = ("x", "y", "z")

PathLike = Union[str, Path]


class ExportError(CapMimoError, OSError):
    """A result file could not be written"""


def format_number(value: float) -> str:
    """Shortest decimal that round-trips to the same double"""
    return repr(float(value))


def format_bool(value: bool) -> str:
    return "true" if value else "false"


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[str]]) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as e:
        raise ExportError(f"Failed to write {path}: {e}")
    logger.debug(f"Wrote {path}")
    return path


class AbstractResultStore(ABC):
    """Abstract base class for run-result stores"""

    @abstractmethod
    def add(self, result: RunResult) -> None:
        """Store a RunResult"""
        pass

    @abstractmethod
    def all(self) -> List[RunResult]:
        """All stored results in insertion order"""
        pass

    @abstractmethod
    def flush(self) -> List[Path]:
        """Persist pending results. Returns the files written"""
        pass

    def get(self, scheme: str, seed: int, area_m2: Optional[float] = None) -> Optional[RunResult]:
        for result in self.all():
            if result.scheme == scheme and result.seed == seed and (area_m2 is None or result.area_m2 == area_m2):
                return result
        return None

    def get_stats(self) -> Dict[str, Dict[str, float]]:
        """Mean, min and max sum-rate per (area, scheme)"""
        groups: Dict[Tuple[float, str], List[float]] = {}
        for result in self.all():
            groups.setdefault((result.area_m2, result.scheme), []).append(result.sum_rate)
        return {
            f"{area:g}/{scheme}": {
                "mean": math.fsum(rates) / len(rates),
                "min": min(rates),
                "max": max(rates),
                "runs": len(rates),
            }
            for (area, scheme), rates in groups.items()
        }


class MemoryResultStore(AbstractResultStore):
    """In-memory store - good for notebooks and testing"""

    def __init__(self):
        self._results: List[RunResult] = []

    def add(self, result: RunResult) -> None:
        self._results.append(result)
        logger.debug(f"Stored {result.scheme} result for seed {result.seed}: {result.sum_rate:.4f} bps/Hz")

    def all(self) -> List[RunResult]:
        return list(self._results)

    def flush(self) -> List[Path]:
        return []


class CsvResultStore(MemoryResultStore):
    """Keeps results in memory and writes them as CSV files on flush"""

    def __init__(self, out_dir: PathLike, record_timings: bool = False):
        super().__init__()
        self.out_dir = Path(out_dir)
        self.record_timings = record_timings
        logger.info(f"Initialized CsvResultStore in {self.out_dir}")

    def flush(self) -> List[Path]:
        return export_results(self.all(), self.out_dir, record_timings=self.record_timings)


def create_store(kind: str = "memory", out_dir: Optional[PathLike] = None,
                 record_timings: bool = False) -> AbstractResultStore:
    """Factory function to create a result store"""
    if kind == "csv":
        if out_dir is None:
            raise ContractError("A csv store needs an output directory")
        return CsvResultStore(out_dir, record_timings=record_timings)
    elif kind == "memory":
        return MemoryResultStore()
    else:
        raise ValueError(f"Unknown result store: {kind}")


def _result_row(result: RunResult, record_timings: bool) -> List[str]:
    return [
        format_number(result.area_m2),
        result.scheme,
        str(result.seed),
        format_number(result.sum_rate),
        str(result.iterations),
        format_bool(result.converged),
        format_number(result.wall_time) if record_timings else "",
    ]


def export_results(results: Sequence[RunResult], out_dir: PathLike, record_timings: bool = False) -> List[Path]:
    """
    Write results.csv plus one trace_<scheme>_<seed>.csv per result

    Traces of multi-area result sets go to one area_<A_T> subdirectory per area.
    wall_time_s stays empty unless record_timings is set, so the files are
    byte-deterministic for fixed inputs.
    """
    out_dir = Path(out_dir)
    written = [_write_csv(out_dir / "results.csv", RESULTS_HEADER,
                          (_result_row(r, record_timings) for r in results))]

    multi_area = len({r.area_m2 for r in results}) > 1
    for result in results:
        trace_dir = out_dir / f"area_{format_number(result.area_m2)}" if multi_area else out_dir
        rows = ([str(e.iteration), format_number(e.surrogate), format_number(e.sum_rate)] for e in result.trace)
        written.append(_write_csv(trace_dir / f"trace_{result.scheme}_{result.seed}.csv", TRACE_HEADER, rows))

    logger.info(f"Exported {len(results)} results to {out_dir}")
    return written


def principal_phase(values: ComplexArray) -> np.ndarray:
    """Phase in (-pi, pi]; zero entries get phase 0"""
    phase = np.angle(values)
    phase = np.where(phase <= -np.pi, np.pi, phase)
    return np.where(values == 0, 0.0, phase)


def pattern_grid_rows(pattern: ComplexArray, grid: ApertureGrid) -> List[List[str]]:
    """Rows of one user's pattern, amplitude normalized per component"""
    pattern = np.asarray(pattern)
    if pattern.shape != (grid.num_nodes, 3):
        raise ContractError(f"Expected a pattern of shape ({grid.num_nodes}, 3), got {pattern.shape}")

    amplitude = np.abs(pattern)
    peak = amplitude.max(axis=0)
    normalized = np.divide(amplitude, peak, out=np.zeros_like(amplitude), where=peak > 0)
    phase = principal_phase(pattern)

    rows = []
    for i, node in enumerate(grid.nodes):
        for c, name in enumerate(COMPONENTS):
            value = pattern[i, c]
            rows.append([
                format_number(node[0]), format_number(node[1]), name,
                format_number(value.real), format_number(value.imag),
                format_number(normalized[i, c]), format_number(phase[i, c]),
            ])
    return rows


def pattern_orthogonality(patterns: ComplexArray, grid: ApertureGrid) -> Tuple[np.ndarray, float]:
    """
    Normalized aperture inner products |<θ_k, θ_j>| / (|θ_k| |θ_j|)

    Returns:
        (K x K matrix, mean over pairs k < j; 0 for a single user)
    """
    patterns = np.asarray(patterns)
    gram = np.einsum("i,kia,jia->kj", grid.weights, patterns, np.conj(patterns))
    norms = np.sqrt(np.real(np.diag(gram)))
    scale = np.outer(norms, norms)
    normalized = np.divide(np.abs(gram), scale, out=np.zeros(scale.shape), where=scale > 0)

    upper = normalized[np.triu_indices(patterns.shape[0], k=1)]
    mean = float(upper.mean()) if upper.size else 0.0
    return normalized, mean


def export_patterns(state: OptState, grid: ApertureGrid, out_dir: PathLike) -> List[Path]:
    """Write pattern_k<k>.csv per user and the companion orthogonality.csv"""
    if state.patterns is None:
        raise ContractError("State carries no synthesized patterns; run the optimizer first")
    out_dir = Path(out_dir)
    patterns = np.asarray(state.patterns)

    written = []
    for k in range(patterns.shape[0]):
        written.append(_write_csv(out_dir / f"pattern_k{k + 1}.csv", PATTERN_HEADER,
                                  pattern_grid_rows(patterns[k], grid)))

    normalized, mean = pattern_orthogonality(patterns, grid)
    rows = [[str(k + 1), str(j + 1), format_number(normalized[k, j])]
            for k in range(patterns.shape[0]) for j in range(k + 1, patterns.shape[0])]
    rows.append(["mean", "", format_number(mean)])
    written.append(_write_csv(out_dir / "orthogonality.csv", ORTHOGONALITY_HEADER, rows))

    logger.info(f"Exported {patterns.shape[0]} patterns to {out_dir} (mean pairwise overlap {mean:.4f})")
    return written


def export_spectrum(spectrum: Sequence[Tuple[FourierIndex, float]], out_dir: PathLike) -> Path:
    """Write the per-index channel energy as spectrum.csv"""
    rows = ([str(n.nx), str(n.ny), str(n.nz), format_number(energy)] for n, energy in spectrum)
    return _write_csv(Path(out_dir) / "spectrum.csv", SPECTRUM_HEADER, rows)
