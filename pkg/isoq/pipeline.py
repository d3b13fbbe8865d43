#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
The entry point to running isoq experiments from the command line.
"""

import argparse
import sys

import yaml

from isoq import _LOGGER, setup_config, setup_logger
from isoq.exceptions import CheckFailed, ConfigError, IsoqError
from isoq.experiments import build_config, run

COMMANDS = {
    "net": ["build"],
    "hiding": ["sample", "pgm", "game", "search", "collision"],
    "otm": ["sample", "encode", "honest", "leak", "info", "collision", "phases"],
    "codes": ["params", "bound", "montecarlo"],
    "check": ["all"],
}

# flag name -> (ExperimentConfig field, type, help)
FLAGS = {
    "--n": ("n", int, "Number of qubits (code length)."),
    "--nb": ("nb", int, "Number of hidden bits of a data-hiding ensemble."),
    "--k": ("k", int, "Message length of each OTM code."),
    "--q": ("q", int, "Number of outcomes of every measurement."),
    "--eps": ("eps", float, "Resolution of the measurement net."),
    "--theta": ("theta", float, "Rate slack (also the smoothing exponent of leak reports)."),
    "--tau": ("tau", float, "Decoding radius slack."),
    "--lambda": ("lam", float, "Confidence parameter of the decoding bound (>= 1)."),
    "--seed": ("seed", lambda x: int(x, 0), "Master seed; trial seeds are derived from it."),
    "--trials": ("trials", int, "Monte Carlo repetitions per instance."),
    "--seeds": ("seeds", int, "Number of independent instances."),
    "--depth": ("depth", int, "Depth of generated strategies; enables exhaustive search in 'otm info'."),
    "--h": ("h", float, "Bit budget splitting the phase decomposition (defaults to 2k)."),
    "--c": ("c", float, "Confidence constant of ensemble bounds."),
    "--side": ("side", str, "Side read by honest recovery, 'S' or 'T'."),
    "--samples": ("samples", int, "Outcome records checked when there are too many to enumerate."),
    "--cap": ("cap", int, "Largest enumeration allowed before refusing."),
    "--workers": ("workers", int, "Parallel workers (-1 uses every core)."),
    "--out": ("out", str, "Output file. Defaults to 'isoq_output/<experiment>.<format>'."),
    "--format": ("format", str, "Output format, 'csv' or 'json'."),
}


def build_cli() -> argparse.ArgumentParser:
    _LOGGER.debug("Setting up CLI parser.")
    parser = argparse.ArgumentParser(
        prog="isoq", description="Exact simulations of measurements on isolated qubits."
    )
    groups = parser.add_subparsers(dest="group", required=True)
    for group, actions in COMMANDS.items():
        group_parser = groups.add_parser(group)
        sub = group_parser.add_subparsers(dest="action", required=True)
        for action in actions:
            cmd = sub.add_parser(action)
            _help = (
                "YAML configuration file."
                " If not provided will use the one distributed"
                " with the package, or one in a file in"
                " ~/.isoq.config.yaml"
            )
            cmd.add_argument(
                "-c", "--config-file", dest="config_file", help=_help, default=None
            )
            _help = "Level of logging shown on the console."
            cmd.add_argument(
                "--log-level",
                dest="log_level",
                default="INFO",
                choices=["DEBUG", "INFO", "WARNING", "ERROR"],
                help=_help,
            )
            for flag, (dest, kind, _help) in FLAGS.items():
                cmd.add_argument(flag, dest=dest, type=kind, default=None, help=_help)
    return parser


def main(cli=None) -> int:
    args = build_cli().parse_args(cli)
    setup_logger(args.log_level)
    _LOGGER.info("isoq simulation laboratory")
    _LOGGER.debug(args)

    experiment = f"{args.group}-{args.action}"
    overrides = {dest: getattr(args, dest) for dest, _, _ in FLAGS.values()}
    try:
        try:
            config = setup_config(args.config_file)
        except (OSError, ValueError, yaml.YAMLError) as e:
            raise ConfigError("config_file", str(e))
        _LOGGER.debug(config)
        summary = run(build_config(experiment, config, overrides))
    except ConfigError as e:
        _LOGGER.error(f"Configuration error: {e}")
        return 2
    except CheckFailed as e:
        _LOGGER.error(str(e))
        return 3
    except IsoqError as e:
        _LOGGER.error(f"{type(e).__name__}: {e}")
        return 1
    _LOGGER.info(f"Experiment '{experiment}' wrote {summary['rows']} rows to '{summary['path']}'.")
    return 0


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        _LOGGER.error("Interrupted by user!")
        sys.exit(1)
