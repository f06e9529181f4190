"""Experiment orchestration: single runs, aperture sweeps and baselines"""

import logging
import time
from typing import List, Optional, Sequence, Tuple

from .baselines import interference_free_rates, wdm_assignment, wdm_patterns
from .channel import Channel, build_channel
from .config import ScenarioConfig
from .errors import InvalidConfigError
from .models import OptState, RunResult, Scheme
from .optimizer import run
from .rates import per_user_rates
from .storage import AbstractResultStore, create_store

logger = logging.getLogger(__name__)

SCHEMES = (Scheme.PDM, Scheme.WDM, Scheme.IFREE)


def design_patterns(config: ScenarioConfig, seed: Optional[int] = None,
                    channel: Optional[Channel] = None) -> Tuple[OptState, Channel]:
    """Run the PDM optimizer and return its final state with the channel it was designed for"""
    channel = channel or build_channel(config)
    state = run(config, config.optimizer_settings(seed), channel)
    return state, channel


def _pdm_result(scheme: Scheme, config: ScenarioConfig, state: OptState, channel: Channel,
                seed: int, started: float) -> RunResult:
    if scheme is Scheme.IFREE:
        rates = interference_free_rates(state.w, channel.omega, config.noise_v2m2)
    else:
        rates = per_user_rates(channel.omega, state.w, config.noise_v2m2)
    return RunResult.from_rates(
        scheme.value, rates, area_m2=config.area_m2, seed=seed,
        iterations=state.iteration, converged=state.converged,
        trace=state.trace, wall_time=time.perf_counter() - started,
    )


def _wdm_result(config: ScenarioConfig, channel: Channel, seed: int) -> RunResult:
    started = time.perf_counter()
    assignment = wdm_assignment(
        config.users, channel.indices,
        chosen=config.baseline.wdm_indices,
        polarization=config.baseline.wdm_polarization,
    )
    w = wdm_patterns(config.users, channel.indices, config.power_a2, assignment)
    rates = per_user_rates(channel.omega, w, config.noise_v2m2)
    return RunResult.from_rates(
        Scheme.WDM.value, rates, area_m2=config.area_m2, seed=seed,
        wall_time=time.perf_counter() - started,
    )


def run_experiment(config: ScenarioConfig, scheme, seed: Optional[int] = None,
                   channel: Optional[Channel] = None) -> RunResult:
    """
    Execute one scheme end to end

    Args:
        config: validated scenario
        scheme: Scheme or its name (pdm, wdm, interference-free / ifree)
        seed: overrides config.seed for the optimizer initialization
        channel: precomputed channel for this config, built when omitted

    The interference-free bound is evaluated on the PDM-optimized patterns.
    """
    scheme = scheme if isinstance(scheme, Scheme) else Scheme.parse(scheme)
    seed = config.seed if seed is None else seed
    channel = channel or build_channel(config)

    if scheme is Scheme.WDM:
        result = _wdm_result(config, channel, seed)
    else:
        started = time.perf_counter()
        state, _ = design_patterns(config, seed, channel)
        result = _pdm_result(scheme, config, state, channel, seed, started)

    logger.info(f"{result.scheme} at A_T={result.area_m2:g} m^2, seed {seed}: {result.sum_rate:.4f} bps/Hz")
    return result


def sweep_aperture(config: ScenarioConfig, areas: Sequence[float],
                   seeds: Optional[Sequence[int]] = None) -> List[RunResult]:
    """
    Rerun all three schemes on square apertures of each area

    Returns one result per (area, scheme, seed) in area, seed, scheme order.
    The interference-free bound reuses each seed's PDM patterns.
    """
    seeds = [config.seed] if seeds is None else list(seeds)
    for area in areas:
        if not area > 0:
            raise InvalidConfigError(f"Aperture areas must be positive, got {area}")

    results: List[RunResult] = []
    for area in areas:
        scenario = config.with_aperture_area(area)
        channel = build_channel(scenario)
        wdm = _wdm_result(scenario, channel, scenario.seed)
        for seed in seeds:
            seeded = scenario.with_seed(seed)
            started = time.perf_counter()
            state, _ = design_patterns(seeded, channel=channel)
            results.append(_pdm_result(Scheme.PDM, seeded, state, channel, seed, started))
            # WDM patterns do not depend on the seed
            results.append(RunResult.from_rates(
                Scheme.WDM.value, wdm.per_user_rates, area_m2=scenario.area_m2, seed=seed,
                wall_time=wdm.wall_time,
            ))
            results.append(_pdm_result(Scheme.IFREE, seeded, state, channel, seed, started))
        logger.info(f"Finished A_T={scenario.area_m2:g} m^2 over {len(seeds)} seeds")
    return results


class ScenarioRunner:
    """Runs experiments on one scenario and keeps the results in a store"""

    def __init__(self, config: ScenarioConfig, store: Optional[AbstractResultStore] = None):
        """
        Args:
            config: validated scenario
            store: result store (in-memory when None)
        """
        self.config = config
        self.store = store or create_store("memory")
        self._channel: Optional[Channel] = None
        logger.info(f"ScenarioRunner initialized with {type(self.store).__name__}")

    @property
    def channel(self) -> Channel:
        if self._channel is None:
            self._channel = build_channel(self.config)
        return self._channel

    def run(self, scheme, seed: Optional[int] = None) -> RunResult:
        result = run_experiment(self.config, scheme, seed, self.channel)
        self.store.add(result)
        return result

    def sweep(self, areas: Sequence[float], seeds: Optional[Sequence[int]] = None) -> List[RunResult]:
        results = sweep_aperture(self.config, areas, seeds)
        for result in results:
            self.store.add(result)
        return results

    def design(self, seed: Optional[int] = None) -> OptState:
        state, _ = design_patterns(self.config, seed, self.channel)
        return state

    def get_stats(self):
        return self.store.get_stats()
