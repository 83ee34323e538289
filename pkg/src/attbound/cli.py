"""Command-line driver: simulate scenarios, validate configs, print version.

Exit codes: 0 success, 2 invalid configuration, 3 estimator failure
(inconsistent bounds or integrator non-convergence), 1 other I/O errors.
"""

import argparse
import json
import sys
from pathlib import Path

from .errors import AttboundError, ScenarioError
from .sim import MODES, Scenario, format_summary, report, run, with_overrides, write_csv

try:
    from importlib.metadata import version as _dist_version
    __version__ = _dist_version("attbound")
except Exception:  # pragma: no cover - not installed
    __version__ = "0.1.0"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="attbound",
                                     description="Deterministic attitude estimation simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a scenario and write per-trial CSV records")
    sim.add_argument("--config", required=True, help="scenario JSON file")
    sim.add_argument("--out", required=True, help="output directory")
    sim.add_argument("--seed", type=int, default=None, help="override scenario seed")
    sim.add_argument("--trials", type=int, default=None, help="override trial count")
    sim.add_argument("--mode", choices=MODES, default=None, help="override measurement mode")

    val = sub.add_parser("validate", help="check a scenario file (exit 0 if valid)")
    val.add_argument("--config", required=True, help="scenario JSON file")

    sub.add_parser("version", help="print the package version")
    return parser


def _load(path: str) -> Scenario:
    if not Path(path).exists():
        raise ScenarioError(f"{path}: no such file")
    return Scenario.load(path)


def _simulate(args) -> int:
    scenario = with_overrides(_load(args.config), args.seed, args.trials, args.mode)
    out_dir = Path(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create {out_dir}: {exc}", file=sys.stderr)
        return 1
    trial_records = []
    for trial in range(scenario.trials):
        trial_records.append(run(scenario, trial))
        write_csv(trial_records[-1], out_dir / f"trial_{trial}.csv")
    summary = report(trial_records)
    with open(out_dir / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    print(format_summary(summary))
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return _simulate(args)
        if args.command == "validate":
            _load(args.config)
            print("ok")
            return 0
        print(__version__)
        return 0
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AttboundError as exc:
        print(f"estimator failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
