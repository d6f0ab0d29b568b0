"""Command-line experiment runner

Usage:
    simulate --scenario scenario1 --seed 7 --out results/
    simulate --scenario scalability --relayers 1,2,4,8 --check
    simulate --config configs/example.toml --seeds 1..10 --workers 4 --trace
"""

import argparse
import logging
import os
import sys
from collections import defaultdict
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from dotenv import load_dotenv

from xcrelay.cli.checks import conservation_checks, run_checks
from xcrelay.cli.experiments import RunJob, RunResult, run_jobs
from xcrelay.cli.presets import PRESETS, get_preset
from xcrelay.cli.summary import render_summary
from xcrelay.core.errors import ConfigError, InvariantViolation
from xcrelay.metrics.export import RunSummary, ScenarioOutcome, write_reports
from xcrelay.sim.config import deep_merge, load_config

logger = logging.getLogger("xcrelay")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_CHECK = 2


def parse_seeds(text: str) -> List[int]:
    """'3' or an inclusive range '1..10'"""
    if ".." in text:
        start, _, end = text.partition("..")
        first, last = int(start), int(end)
        if last < first:
            raise argparse.ArgumentTypeError(f"empty seed range {text}")
        return list(range(first, last + 1))
    return [int(text)]


def parse_relayers(text: str) -> List[int]:
    try:
        counts = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"relayer counts must be integers: {text}") from exc
    if not counts or any(count < 1 for count in counts):
        raise argparse.ArgumentTypeError(f"relayer counts must be positive: {text}")
    return counts


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simulate", description="Cross-chain relaying simulator and experiment runner"
    )
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--scenario", choices=sorted(PRESETS), help="named scenario preset")
    source.add_argument("--config", type=Path, help="TOML config file")
    parser.add_argument("--seed", type=int, default=None, help="seed of a single run")
    parser.add_argument("--seeds", type=parse_seeds, default=None, help="seed range, e.g. 1..10")
    parser.add_argument(
        "--relayers", type=parse_relayers, default=None, help="relayer counts, e.g. 1,2,4,8"
    )
    parser.add_argument("--allocation", choices=["approach1", "approach2", "open"], default=None)
    parser.add_argument(
        "--out",
        type=Path,
        default=None,
        help="output directory (default $XCRELAY_OUT_DIR or ./results)",
    )
    parser.add_argument("--format", choices=["json", "csv", "both"], default="both")
    parser.add_argument(
        "--trace", action="store_true", help="also write trace.ndjson (per run: trace-<run>.ndjson)"
    )
    parser.add_argument("--check", action="store_true", help="exit 2 if an acceptance check fails")
    parser.add_argument("--log-level", default=None, help="default $XCRELAY_LOG_LEVEL or WARNING")
    parser.add_argument("--quiet", action="store_true", help="do not print the summary")
    parser.add_argument(
        "--workers", type=int, default=None, help="worker processes (default $XCRELAY_WORKERS or 1)"
    )
    return parser


def configure_logging(level: Optional[str]) -> None:
    name = (level or os.environ.get("XCRELAY_LOG_LEVEL") or "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, name, logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def _jobs_for_seed(args: argparse.Namespace, seed: int) -> List[RunJob]:
    if args.scenario:
        preset = get_preset(args.scenario)
        runs = preset.expand(seed, relayer_counts=args.relayers, allocation=args.allocation)
        return [RunJob(label=label, config=config) for label, config in runs]
    overrides: Dict[str, object] = {"seed": seed}
    if args.allocation:
        overrides["coordinator"] = {"allocation_mode": args.allocation}
    config = load_config(args.config)
    data = deep_merge(config.model_dump(mode="json"), overrides)
    return [RunJob(label=args.config.stem, config=data)]


def _default_seed(args: argparse.Namespace) -> int:
    if args.seed is not None:
        return args.seed
    if args.config:
        return load_config(args.config).seed
    return 0


def _write_outcome(
    args: argparse.Namespace,
    out_dir: Path,
    outcome: ScenarioOutcome,
    results: Sequence[RunResult],
) -> None:
    write_reports(outcome, out_dir, args.format)
    if args.trace:
        for result in results:
            name = "trace.ndjson" if len(results) == 1 else f"trace-{result.label}.ndjson"
            result.trace.write(out_dir / name)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point of the `simulate` console script; returns the exit code"""
    load_dotenv()
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)

    out_root = args.out or Path(os.environ.get("XCRELAY_OUT_DIR", "results"))
    workers = args.workers or int(os.environ.get("XCRELAY_WORKERS", "1"))
    scenario = args.scenario or (args.config.stem if args.config else "run")

    try:
        seeds = args.seeds or [_default_seed(args)]
        jobs: List[Tuple[int, RunJob]] = [
            (seed, job) for seed in seeds for job in _jobs_for_seed(args, seed)
        ]
        results = run_jobs([job for _, job in jobs], workers)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantViolation as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_CHECK

    by_seed: Dict[int, List[RunResult]] = defaultdict(list)
    for (seed, _), result in zip(jobs, results):
        by_seed[seed].append(result)

    failed = False
    for seed in seeds:
        seed_results = by_seed[seed]
        checks = (
            run_checks(scenario, seed_results)
            if args.check
            else conservation_checks(seed_results)
        )
        outcome = ScenarioOutcome(
            scenario=scenario,
            runs=[RunSummary(label=result.label, report=result.report) for result in seed_results],
            checks=checks,
        )
        out_dir = out_root / f"seed-{seed}" if len(seeds) > 1 else out_root
        _write_outcome(args, out_dir, outcome, seed_results)
        if not args.quiet:
            print(render_summary(outcome, seed))
        if not outcome.passed:
            failed = True
            for failure in outcome.failures():
                logger.error("check %s failed: %s", failure.name, failure.detail)

    if args.check and failed:
        return EXIT_CHECK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
