"""Command line entry point: ``fhspec run|validate <config.json>``.

Exit codes: 0 all checks passed, 1 invalid config, 2 a check failed,
3 numerical non-convergence.
"""

import argparse
import sys

from .errors import ConfigError, ConvergenceError
from .experiments import ExperimentConfig, run

EXIT_OK, EXIT_CONFIG, EXIT_ASSERT, EXIT_NONCONV = 0, 1, 2, 3


def main(argv=None):
    parser = argparse.ArgumentParser(prog="fhspec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run a campaign and write CSV + JSON sidecar")
    p_run.add_argument("config")
    p_val = sub.add_parser("validate", help="check a config file without running it")
    p_val.add_argument("config")
    args = parser.parse_args(argv)

    try:
        cfg = ExperimentConfig.load(args.config)
    except (ConfigError, OSError) as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "validate":
        print(f"{args.config}: ok ({cfg.campaign})")
        return EXIT_OK

    try:
        result = run(cfg)
    except ConvergenceError as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONV
    for check in result.checks:
        print(f"{'PASS' if check.passed else 'FAIL'}  {check.name}  {check.detail}")
    print(f"wrote {cfg.output_path}")
    return EXIT_OK if result.passed else EXIT_ASSERT


if __name__ == "__main__":
    sys.exit(main())
