#!/usr/bin/env python3
"""Command-line entry point: run, sweep, export-patterns and verify"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from .core.config import RuntimeSettings, ScenarioConfig, get_settings, load_config
from .core.errors import CapMimoError, InvalidConfigError, NumericError
from .core.experiment import design_patterns, run_experiment, sweep_aperture
from .core.fourier import channel_spectrum
from .core.storage import create_store, export_patterns, export_spectrum, pattern_orthogonality
from .core.verify import run_oracle_suite

logger = logging.getLogger("capmimo")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERIC = 2


def _parse_areas(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"areas must be a comma-separated list of numbers, got '{text}'")


def _non_negative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="capmimo", description="CAP-MIMO pattern-division multiplexing simulator")
    parser.add_argument("-v", "--verbose", action="store_true", help="Log optimizer iterations (DEBUG)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", type=Path, default=None, help="Scenario TOML (default: bundled paper_iv)")

    run_p = sub.add_parser("run", help="Run one scheme on a scenario")
    add_config(run_p)
    run_p.add_argument("--scheme", choices=["pdm", "wdm", "ifree", "interference-free"], default="pdm")
    run_p.add_argument("--seed", type=_non_negative_int, default=None, help="Optimizer seed (default: config seed)")
    run_p.add_argument("--out", type=Path, default=None, help="Output directory")
    run_p.add_argument("--timings", action="store_true", help="Record wall_time_s in results.csv")

    sweep_p = sub.add_parser("sweep", help="Sweep the aperture area for all schemes")
    add_config(sweep_p)
    sweep_p.add_argument("--areas", type=_parse_areas, required=True, help="Comma-separated areas in m^2")
    sweep_p.add_argument("--seeds", type=_non_negative_int, default=5, help="Seeds per area, counted from the config seed")
    sweep_p.add_argument("--out", type=Path, default=None, help="Output directory")
    sweep_p.add_argument("--timings", action="store_true", help="Record wall_time_s in results.csv")

    export_p = sub.add_parser("export-patterns", help="Design patterns and export aperture grids")
    add_config(export_p)
    export_p.add_argument("--seed", type=_non_negative_int, default=None)
    export_p.add_argument("--out", type=Path, default=None, help="Output directory")

    verify_p = sub.add_parser("verify", help="Run the oracle suite and print JSON reports")
    add_config(verify_p)
    verify_p.add_argument("--seed", type=_non_negative_int, default=None)

    return parser


def _load(args: argparse.Namespace, settings: RuntimeSettings) -> ScenarioConfig:
    return load_config(args.config if args.config is not None else settings.config_path())


def _out_dir(args: argparse.Namespace, settings: RuntimeSettings) -> Path:
    return args.out if args.out is not None else Path(settings.output_dir)


def cmd_run(args: argparse.Namespace, settings: RuntimeSettings) -> int:
    config = _load(args, settings)
    store = create_store("csv", _out_dir(args, settings), record_timings=args.timings or settings.record_timings)
    result = run_experiment(config, args.scheme, args.seed)
    store.add(result)
    store.flush()
    print(f"✅ {result.scheme}: {result.sum_rate:.4f} bps/Hz "
          f"({result.iterations} iterations, converged={result.converged})")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, settings: RuntimeSettings) -> int:
    config = _load(args, settings)
    store = create_store("csv", _out_dir(args, settings), record_timings=args.timings or settings.record_timings)
    seeds = [config.seed + i for i in range(args.seeds)]
    for result in sweep_aperture(config, args.areas, seeds):
        store.add(result)
    store.flush()

    for key, stats in store.get_stats().items():
        print(f"  {key}: mean {stats['mean']:.4f} (min {stats['min']:.4f}, max {stats['max']:.4f}) bps/Hz")
    print(f"✅ Wrote {len(store.all())} results to {store.out_dir}")
    return EXIT_OK


def cmd_export_patterns(args: argparse.Namespace, settings: RuntimeSettings) -> int:
    config = _load(args, settings)
    out_dir = _out_dir(args, settings)
    state, channel = design_patterns(config, args.seed)
    export_patterns(state, channel.grid, out_dir)
    export_spectrum(channel_spectrum(channel.omega, channel.indices), out_dir)

    _, mean = pattern_orthogonality(state.patterns, channel.grid)
    print(f"✅ Exported {state.num_users} patterns to {out_dir} (mean pairwise overlap {mean:.4f})")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, settings: RuntimeSettings) -> int:
    config = _load(args, settings)
    reports = run_oracle_suite(config, args.seed)
    print(json.dumps([r.to_dict() for r in reports], indent=2))
    failed = [r.name for r in reports if not r.passed]
    if failed:
        logger.error(f"Oracles failed: {', '.join(failed)}")
        return EXIT_NUMERIC
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "sweep": cmd_sweep,
    "export-patterns": cmd_export_patterns,
    "verify": cmd_verify,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    try:
        settings = get_settings()
    except InvalidConfigError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_CONFIG

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else getattr(logging, settings.log_level),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        return COMMANDS[args.command](args, settings)
    except InvalidConfigError as e:
        print(f"❌ Invalid configuration: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as e:
        print(f"❌ Numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except CapMimoError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except Exception as e:
        logger.error(f"Unexpected error: {e}", exc_info=True)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
