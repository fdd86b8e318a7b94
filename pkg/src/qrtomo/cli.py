"""Command-line entry point.

Subcommands: tomography | memory | spectral | switch | entangler | bell.
Each takes --config PATH (JSON), --out PATH for the CSV (a .json sidecar is
written next to it), --seed N to override the config's seed list, and
--baseline where a memoryless readout baseline makes sense.  Exit codes:
0 success, 1 config/validation error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import sys

from .experiments import (
    ConfigError,
    emit_results,
    load_config,
    run_memory_sweep,
    run_spectral_sweep,
    run_tomography,
)

_TASK_COMMANDS = {"switch": "quantum_switch", "entangler": "entangler", "bell": "bell_creator"}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qrtomo",
        description="Quantum reservoir tomography of temporal quantum maps",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text, baseline in [
        ("tomography", "train and score a readout on the configured temporal map", True),
        ("memory", "sweep delay-reconstruction memory profiles (QMC)", False),
        ("spectral", "sweep superoperator eigenvalue statistics", False),
        ("switch", "tomography of the temporal quantum switch", True),
        ("entangler", "tomography of the delayed entangling unitary", True),
        ("bell", "tomography of the bit-driven Bell-state creator", True),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument("--out", default=None, help="CSV output path")
        p.add_argument("--seed", type=int, default=None,
                       help="replace the config seed list with this single seed")
        if baseline:
            p.add_argument("--baseline", action="store_true",
                           help="use memoryless input features instead of the reservoir")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    # anything wrong with the config itself is a validation failure (exit 1)
    try:
        config = load_config(args.config)
        if args.seed is not None:
            config.stream.seeds = (args.seed,)
        out = args.out or config.output_path
        if out is None:
            raise ConfigError("output_path", "set output_path in the config or pass --out")
        if args.command in _TASK_COMMANDS:
            expected = _TASK_COMMANDS[args.command]
            if config.task is None or config.task.kind != expected:
                raise ConfigError(
                    "task.kind",
                    f"subcommand {args.command!r} needs a config with kind {expected!r}",
                )
    except (ConfigError, OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        if args.command == "memory":
            results = run_memory_sweep(config)
            note = f"{len(results)} grid points"
        elif args.command == "spectral":
            results = run_spectral_sweep(config)
            note = f"{len(results)} grid points"
        else:
            results = run_tomography(config, baseline=getattr(args, "baseline", False))
            note = (f"error = {results.error_mean:.4f} +- {results.error_sd:.4f} "
                    f"over {len(results.runs)} seeds")
        csv_path = emit_results(results, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - map any runtime failure to exit 2
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"{args.command}: {note}; wrote {csv_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
