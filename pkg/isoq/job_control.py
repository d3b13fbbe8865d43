#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Utilities for seeding and running independent trials of an experiment.
"""

from typing import Any, Callable, Iterable, List

import numpy as np
from joblib import Parallel, delayed

from isoq import _LOGGER

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, index: int) -> int:
    """
    Seed of trial ``index``: the splitmix64 output for state
    ``master + (index + 1) * 0x9E3779B97F4A7C15`` (mod 2^64).
    """
    return _mix64((int(master) + (int(index) + 1) * GOLDEN_GAMMA) & MASK64)


def trial_rng(master: int, index: int) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master, index))


def map_trials(
    fn: Callable[[Any], Any], items: Iterable[Any], n_jobs: int = 1
) -> List[Any]:
    """
    Apply ``fn`` to every item, in parallel when ``n_jobs != 1``.
    Results come back in input order.
    """
    items = list(items)
    if n_jobs == 1 or len(items) < 2:
        return [fn(item) for item in items]
    _LOGGER.debug(f"Running {len(items)} trials on {n_jobs} workers.")
    return Parallel(n_jobs=n_jobs)(delayed(fn)(item) for item in items)
