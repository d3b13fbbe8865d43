#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Logging and layered configuration of the isoq simulation laboratory.
"""

import os
from typing import Dict, Any, Optional
from pathlib import Path
import logging

import yaml

try:
    # written by setuptools_scm when the package is built
    from isoq._version import __version__
except ImportError:
    from setuptools_scm import get_version as _get_version

    __version__ = _get_version(root="..", relative_to=__file__)


DEFAULT_CONFIG = os.path.join(os.path.dirname(os.path.abspath(__file__)), "config", "default.yaml")
USER_CONFIG = os.path.join(os.path.expanduser("~"), ".isoq.config.yaml")


def _writable_logfile(logfile: Optional[str]) -> Path:
    candidates = [Path(logfile)] if logfile is not None else [
        Path("~/.isoq.log.txt").expanduser().absolute(),
        Path("./isoq.log.txt").absolute(),
    ]
    for candidate in candidates:
        try:
            candidate.touch()
            return candidate
        except (PermissionError, OSError):
            continue
    raise OSError(f"Cannot write a log file at any of {[str(c) for c in candidates]}.")


def setup_logger(level="INFO", logfile=None) -> logging.Logger:
    """
    Set up the "isoq" logger.

    The console shows messages at ``level``; everything down to DEBUG goes
    to ``logfile`` (``~/.isoq.log.txt``, or ``./isoq.log.txt`` when the home
    directory is not writable). Calling it again only changes the console
    level.

    Parameters
    ----------
    level : :obj:`str`, optional
        Console logging level. Defaults to "INFO".
    logfile : :obj:`str`, optional
        File to write the log to.

    Returns
    -------
    :class:`logging.Logger`
    """
    logger = logging.getLogger("isoq")
    logger.setLevel(logging.DEBUG)
    if logger.handlers:
        for handler in logger.handlers:
            if not isinstance(handler, logging.FileHandler):
                handler.setLevel(logging.getLevelName(level))
        return logger

    fh = logging.FileHandler(_writable_logfile(logfile))
    fh.setLevel(logging.DEBUG)
    fmt = "isoq.v{}:%(module)s:L%(lineno)d ".format(__version__)
    fmt += "(%(funcName)s) [%(levelname)s] %(asctime)s > %(message)s"
    fh.setFormatter(logging.Formatter(fmt, datefmt="%Y-%m-%d %H:%M:%S"))

    ch = logging.StreamHandler()
    ch.setLevel(logging.getLevelName(level))
    ch.setFormatter(
        logging.Formatter("isoq:%(module)s:L%(lineno)d (%(funcName)s) [%(levelname)s] > %(message)s")
    )
    logger.addHandler(fh)
    logger.addHandler(ch)

    logger.debug("This is isoq, version: {}".format(__version__))
    return logger


def _merge(base: Dict[str, Any], update: Dict[str, Any]) -> Dict[str, Any]:
    # nested sections are updated key by key
    for key, value in (update or {}).items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _merge(base[key], value)
        else:
            base[key] = value
    return base


def _read_yaml(path: str) -> Dict[str, Any]:
    with open(path, "r") as handle:
        return yaml.safe_load(handle) or dict()


def setup_config(custom_yaml_config=None) -> Dict[str, Any]:
    """
    Set up the library configuration.

    Reads ``isoq/config/default.yaml``, updates it with
    ``~/.isoq.config.yaml`` if present and lastly with
    ``custom_yaml_config``. Only the sections to change need to be given.

    Parameters
    ----------
    custom_yaml_config : :obj:`str`, optional
        Path to a YAML file shaped like ``isoq/config/default.yaml``.

    Returns
    -------
    :obj:`dict`
        Dictionary with configurations.

    Raises
    ------
    OSError
        If ``custom_yaml_config`` cannot be read.
    """
    _LOGGER.debug(f"Reading default configuration from '{DEFAULT_CONFIG}'.")
    try:
        config = _read_yaml(DEFAULT_CONFIG)
    except IOError:
        _LOGGER.error(f"Couldn't read configuration file from '{DEFAULT_CONFIG}'.")
        config = dict()

    if os.path.exists(USER_CONFIG):
        try:
            _merge(config, _read_yaml(USER_CONFIG))
            _LOGGER.debug(f"Updated configuration with '{USER_CONFIG}'.")
        except IOError:
            _LOGGER.error(f"Configuration file '{USER_CONFIG}' exists but is not readable. Ignoring.")
    else:
        _LOGGER.debug(f"To change default settings, create a '{USER_CONFIG}' file.")

    if custom_yaml_config is not None:
        try:
            _merge(config, _read_yaml(custom_yaml_config))
        except IOError:
            _LOGGER.error(f"Passed configuration '{custom_yaml_config}' is not readable.")
            raise
        _LOGGER.debug(f"Updated configuration with '{custom_yaml_config}'.")

    return config


_LOGGER = setup_logger()
