"""Command line: ``qmb <experiment> [flags]``, ``qmb run <experiment> [flags]``, ``qmb verify``."""

import argparse
import sys

from .errors import ConfigError, InvariantError, NumericalError
from .runner import EXPERIMENTS, read_config_file, resolve_config, run

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3, 4

EPILOG = """exit codes:
  0  success
  1  verify found failing criteria
  2  usage error (unknown experiment or flag)
  3  configuration error (invalid parameter value or config key)
  4  numerical failure (truncation, degenerate operating point, route mismatch)

The seed defaults to $QMB_SEED, else 0. A --config file holds key=value
lines; flags override it."""


def _add_experiment_parsers(sub):
    for name, spec in EXPERIMENTS.items():
        p = sub.add_parser(name, help=spec.help, description=spec.help, epilog=EPILOG,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.set_defaults(experiment=name)
        p.add_argument("--config", metavar="FILE", help="key=value config file")
        p.add_argument("--seed", help="64-bit unsigned seed")
        p.add_argument("--output-dir", "--output_dir", "--out", dest="output_dir", help="directory for CSV/SVG/manifest")
        for prm in spec.params:
            flags = [f"--{prm.name}"]
            if "_" in prm.name:
                flags.insert(0, f"--{prm.name.replace('_', '-')}")
            default = "" if prm.default is None else f" (default {prm.default})"
            p.add_argument(*flags, dest=prm.name, metavar="VALUE", help=(prm.help or prm.name) + default)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qmb",
        description="Quantum-enhanced measurement experiments with deterministic CSV/SVG output.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True
    _add_experiment_parsers(sub)
    run_p = sub.add_parser("run", help="run a named experiment", epilog=EPILOG,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
    run_sub = run_p.add_subparsers(dest="run_command", metavar="EXPERIMENT")
    run_sub.required = True
    _add_experiment_parsers(run_sub)
    sub.add_parser("verify", help="run the acceptance suite and print a per-criterion report")
    return parser


def _flag_values(ns):
    spec = EXPERIMENTS[ns.experiment]
    vals = {p.name: getattr(ns, p.name) for p in spec.params}
    vals["seed"] = ns.seed
    vals["output_dir"] = ns.output_dir
    return vals


def cmd_verify(out=None):
    from .acceptance import run_all

    out = out or sys.stdout
    results = run_all()
    for r in results:
        for line in r.report_lines():
            print(line, file=out)
    failed = [r.number for r in results if not r.passed]
    print(f"summary: {len(results) - len(failed)}/{len(results)} criteria pass", file=out)
    return EXIT_FAIL if failed else EXIT_OK


def main(argv=None):
    parser = build_parser()
    ns = parser.parse_args(argv)  # exits with 2 on usage errors
    if ns.command == "verify":
        return cmd_verify()
    try:
        file_vals = read_config_file(ns.config) if ns.config else {}
        config = resolve_config(ns.experiment, file_vals, _flag_values(ns))
        paths = run(config)
    except ConfigError as exc:
        print(f"qmb: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, InvariantError) as exc:
        print(f"qmb: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for p in paths:
        print(p)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
