"""Command line entry point: ``pumrbf {convergence,surface,indicators} [options]``.

Options may also come from a ``key = value`` config file given with
``--config``; flags on the command line override the file.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import configparser
import logging
import sys

from .errors import ConditioningError, CoveringError, InputDomainError, PumError, UncoveredPointError
from .experiments import ExperimentConfig, run
from .kernels import Family
from .nlpum import NlConfig

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

logger = logging.getLogger("pumrbf")


class ConfigError(ValueError):
    pass


def parse_levels(text: str):
    text = str(text).strip()
    if ".." in text:
        a, b = text.split("..", 1)
    else:
        a = b = text
    try:
        return int(a), int(b)
    except ValueError:
        raise ConfigError(f"levels must look like 'A..B' or 'A', got {text!r}") from None


def parse_bool(text) -> bool:
    if isinstance(text, bool):
        return text
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


# option name -> converter; names double as config-file keys
OPTIONS = {
    "function": str,
    "nodes": str,
    "levels": parse_levels,
    "level": int,
    "rbf_kernel": str,
    "pu_kernel": str,
    "rbf_shape": float,
    "relative_shape": parse_bool,
    "nl": parse_bool,
    "t": float,
    "epsilon": float,
    "weight_threshold": float,
    "contamination_threshold": float,
    "probe": int,
    "out": str,
    "data": str,
}


def read_config_file(path) -> dict:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path) as fh:
            parser.read_string("[config]\n" + fh.read(), source=str(path))
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    values = {}
    for key, raw in parser.items("config"):
        name = key.strip().replace("-", "_")
        if name not in OPTIONS:
            raise ConfigError(f"{path}: unknown key {key!r}")
        try:
            values[name] = OPTIONS[name](raw)
        except ValueError as exc:
            raise ConfigError(f"{path}: bad value for {key!r}: {exc}") from None
    return values


def build_parser() -> argparse.ArgumentParser:
    kernels = ", ".join(f.value for f in Family)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file; command-line flags take precedence")
    common.add_argument("--function", help="franke, f1, f2, f3 or z (default franke)")
    common.add_argument("--nodes", choices=("grid", "halton"), help="data sites (default grid)")
    common.add_argument("--levels", type=parse_levels, help="level range A..B for convergence (default 4..7)")
    common.add_argument("--level", type=int, help="level l for surface/indicators, N = (2^l+1)^2 (default 6)")
    common.add_argument("--rbf-kernel", dest="rbf_kernel", help=f"local RBF kernel: {kernels} (default matern2)")
    common.add_argument("--pu-kernel", dest="pu_kernel", help="compactly supported weight kernel (default wendland2)")
    common.add_argument("--rbf-shape", dest="rbf_shape", type=float, help="shape parameter of the RBF kernel (default 1)")
    common.add_argument("--relative-shape", dest="relative_shape", action="store_const", const=True, default=None,
                        help="divide the RBF shape by the patch radius")
    common.add_argument("--nl", action="store_const", const=True, default=None, help="use the non-linear method")
    common.add_argument("--t", type=float, help="exponent of the non-linear weights (default 6)")
    common.add_argument("--epsilon", type=float, help="regularisation in (epsilon + I)^-t (default 1e-14)")
    common.add_argument("--weight-threshold", dest="weight_threshold", type=float,
                        help="weight-kernel value above which a patch counts for classification (default 1e-3)")
    common.add_argument("--contamination-threshold", dest="contamination_threshold", type=float,
                        help="indicator threshold (default: fill distance of the data)")
    common.add_argument("--probe", type=int, help="probe grid side (default 60 convergence, 120 otherwise)")
    common.add_argument("--data", help="x,y,value CSV to use instead of generated nodes (surface, indicators)")
    common.add_argument("--out", help="output path prefix (default 'pumrbf')")
    common.add_argument("-q", "--quiet", action="store_true", help="suppress per-phase timing logs on stderr")

    parser = argparse.ArgumentParser(prog="pumrbf", description="RBF partition of unity experiments")
    sub = parser.add_subparsers(dest="experiment", required=True)
    sub.add_parser("convergence", parents=[common], help="error/rate table over grid levels")
    sub.add_parser("surface", parents=[common], help="evaluate on a probe grid and measure overshoot")
    sub.add_parser("indicators", parents=[common], help="per-patch smoothness indicators")
    return parser


def make_config(args: argparse.Namespace) -> ExperimentConfig:
    values = read_config_file(args.config) if args.config else {}
    for name in OPTIONS:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    nl_keys = ("t", "epsilon", "weight_threshold", "contamination_threshold")
    nl_params = NlConfig(**{k: values.pop(k) for k in nl_keys if k in values})
    return ExperimentConfig(experiment=args.experiment, nl_params=nl_params, **values)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        config = make_config(args)
    except (ConfigError, InputDomainError, TypeError) as exc:
        print(f"pumrbf: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        result = run(config)
    except InputDomainError as exc:
        print(f"pumrbf: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConditioningError, CoveringError, UncoveredPointError, PumError, ArithmeticError) as exc:
        print(f"pumrbf: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"pumrbf: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for path in result[1:]:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
