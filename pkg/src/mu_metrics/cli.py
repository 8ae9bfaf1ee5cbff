"""``mu-metrics`` command line.

Exit status: 0 when every verdict passes, 2 on a failed verdict, 1 on a
usage or configuration error.
"""
import argparse
import json
import logging
import sys

from .report import FORMATS, emit_report
from .scenarios import ScenarioConfig, ScenarioError, list_scenarios, run_scenario

log = logging.getLogger("mu_metrics")

EXIT_OK, EXIT_USAGE, EXIT_VERDICT = 0, 1, 2
_RESERVED = {"scenario", "dimension", "seed", "out", "format", "params"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _number(text):
    try:
        return int(text)
    except ValueError:
        return float(text)


def _parse_param(item):
    key, sep, value = item.partition("=")
    if not sep or not key:
        raise ScenarioError(f"--param expects key=value, got {item!r}")
    try:
        return key.strip(), _number(value.strip())
    except ValueError:
        raise ScenarioError(f"parameter {key!r} must be numeric, got {value!r}")


def build_parser():
    p = _Parser(prog="mu-metrics", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("list", help="print registered scenarios")
    run = sub.add_parser("run", help="run one scenario and write its report")
    run.add_argument("--config", help="flat JSON object with default values")
    run.add_argument("--scenario")
    run.add_argument("--dimension", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    run.add_argument("--out", help="output path ('-' for stdout)")
    run.add_argument("--format", choices=FORMATS)
    return p


def _load_config(path):
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ScenarioError("config file must hold a JSON object")
    return data


def _resolve(args):
    file_cfg = _load_config(args.config) if args.config else {}
    params = {k: v for k, v in file_cfg.items() if k not in _RESERVED}
    params.update(file_cfg.get("params", {}))
    for item in args.param:
        k, v = _parse_param(item)
        params[k] = v
    name = args.scenario or file_cfg.get("scenario")
    if not name:
        raise ScenarioError("no scenario given (use --scenario or the config file)")
    out = args.out or file_cfg.get("out")
    if not out:
        raise ScenarioError("no output path given (use --out, or '-' for stdout)")
    fmt = args.format or file_cfg.get("format", "json")
    if fmt not in FORMATS:
        raise ScenarioError(f"unknown format {fmt!r}")
    dim = args.dimension if args.dimension is not None else file_cfg.get("dimension")
    seed = args.seed if args.seed is not None else int(file_cfg.get("seed", 0))
    if seed < 0:
        raise ScenarioError("seed must be nonnegative")
    return ScenarioConfig(name, dim, params, seed, out), fmt


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    if args.command == "list":
        for name, desc in list_scenarios():
            print(f"{name:18s} {desc}")
        return EXIT_OK
    try:
        cfg, fmt = _resolve(args)
        report = run_scenario(cfg)
        emit_report(report, cfg.output_path, fmt)
    except (ScenarioError, OSError, json.JSONDecodeError) as exc:
        print(f"mu-metrics: {exc}", file=sys.stderr)
        return EXIT_USAGE
    failed = [k for k, ok in report.verdicts.items() if not ok]
    for k in failed:
        log.warning("verdict failed: %s", k)
    return EXIT_VERDICT if failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
