#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Deterministic experiments over the simulation library.

Every experiment turns an :class:`ExperimentConfig` into a table. Trials
are independent; trial ``i`` draws everything from
``derive_seed(config.seed, i)``, so results do not depend on the number
of workers or on the order in which trials run.
"""

from dataclasses import dataclass, field, fields
from functools import partial
from typing import Any, Callable, Dict, List, Optional
import os

import numpy as np
import pandas as pd

from isoq import _LOGGER
from isoq.codes import (
    MAX_CODE_BITS,
    P_E,
    _check_slacks,
    channel_success_rate,
    decode_success_bound,
    derive_params,
    explicit_params,
    sample_code,
)
from isoq.entropy import (
    binary_entropy,
    conditional_entropy,
    discretization_penalty,
    mutual_information,
    success_to_info_bound,
    uncertainty_check,
)
from isoq.exceptions import (
    CheckFailed,
    ConfigError,
    IdentityViolation,
    InvalidSlacks,
    PreconditionViolated,
    ZeroProbabilityOutcome,
)
from isoq.hiding import (
    all_outcome_collisions,
    collision_minimum,
    collision_split,
    computational_conditional_entropy,
    discrimination_game,
    expected_gram_offdiag,
    hiding_collision_bound,
    gram_frobenius,
    gram_sqrt_bound,
    hiding_gram,
    pgm_information,
    pgm_success,
    sample_ensemble,
)
from isoq.job_control import derive_seed, map_trials, trial_rng
from isoq.nets import MeasurementNet, build_net_2outcome, build_net_qoutcome, save_net
from isoq.otm import (
    MAX_EXACT_K,
    MAX_EXACT_N,
    conditional_collision_otm,
    otm_collision_bound,
    honest_error_rate,
    honest_recover,
    honest_strategy,
    leak_eval,
    leak_strategy,
    otm_encode,
    otm_information,
    phase_decomposition,
    sample_device,
    save_device,
    split_points,
)
from isoq.povm import computational_povm
from isoq.qubit import (
    ALPHA_AMPLITUDES,
    MAX_DENSE_QUBITS,
    ProductState,
    expectation_table,
    fourth_moment_avg,
    fourth_moment_closed_form,
    holevo_chi,
    random_product_state,
    random_state,
)
from isoq.report import FLOAT_FORMAT, FORMATS, write_table
from isoq.strategies import (
    basis_strategy,
    count_strategies,
    discretize_strategy,
    enumerate_outcomes,
    enumerate_strategies,
    greedy_strategy,
    joint_distribution,
    random_strategy,
)

MAX_SEED = 2 ** 64


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Everything an experiment reads. ``seeds`` is the number of independent
    instances (ensembles, devices, codes); ``trials`` the Monte Carlo
    repetitions within one instance.
    """

    experiment: str
    n: int = 10
    nb: int = 3
    k: int = 3
    q: int = 2
    eps: float = 0.2
    theta: float = 0.05
    tau: float = 0.01
    lam: float = 2.0
    seed: int = 0
    trials: int = 1000
    seeds: int = 20
    depth: Optional[int] = None
    h: Optional[float] = None
    c: float = 10.0
    side: str = "S"
    samples: int = 2000
    cap: int = 1_000_000
    out: Optional[str] = None
    format: str = "csv"
    workers: int = 1
    float_format: str = FLOAT_FORMAT
    checks: Dict[str, Any] = field(default_factory=dict, compare=False, repr=False)
    tolerances: Dict[str, Any] = field(default_factory=dict, compare=False, repr=False)

    @classmethod
    def from_dict(cls, experiment: str, values: Dict[str, Any], **extra) -> "ExperimentConfig":
        known = {f.name: f for f in fields(cls)}
        kwargs: Dict[str, Any] = dict(extra)
        for key, value in values.items():
            key = key.replace("-", "_")
            if key not in known or key in ("experiment", "checks", "tolerances"):
                raise ConfigError(key, "unknown setting.")
            kwargs[key] = _coerce(key, value, known[key].type)
        return cls(experiment, **kwargs)

    @property
    def output_path(self) -> str:
        if self.out is not None:
            return self.out
        return os.path.join("isoq_output", f"{self.experiment}.{self.format}")

    @property
    def params(self):
        return explicit_params(self.n, self.k)

    def validate(self) -> None:
        """Refuse configurations the requested experiment cannot run as given."""
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(
                "experiment",
                f"unknown experiment '{self.experiment}'; choose from {', '.join(EXPERIMENTS)}.",
            )
        _require(self.n >= 1, "n", f"must be >= 1, got {self.n}.")
        _require(self.trials >= 1, "trials", f"must be >= 1, got {self.trials}.")
        _require(self.seeds >= 1, "seeds", f"must be >= 1, got {self.seeds}.")
        _require(self.cap >= 1, "cap", f"must be >= 1, got {self.cap}.")
        _require(self.samples >= 1, "samples", f"must be >= 1, got {self.samples}.")
        _require(0 <= self.seed < MAX_SEED, "seed", "must be an unsigned 64-bit integer.")
        _require(self.format in FORMATS, "format", f"must be one of {FORMATS}.")
        _require(self.workers != 0, "workers", "must be non-zero (-1 uses every core).")
        _require(
            _formats_floats(self.float_format),
            "float_format",
            f"cannot format floats with '{self.float_format}'.",
        )
        _require(self.side in ("S", "T"), "side", f"must be 'S' or 'T', got '{self.side}'.")
        for check in VALIDATORS.get(self.experiment.split("-")[0], []) + VALIDATORS.get(self.experiment, []):
            check(self)


def _coerce(key: str, value: Any, kind: Any) -> Any:
    if value is None:
        return None
    text = str(kind)
    target = int if "int" in text else float if "float" in text else str
    try:
        if target is int and isinstance(value, float) and not value.is_integer():
            raise ValueError
        return target(value)
    except (TypeError, ValueError):
        raise ConfigError(key, f"cannot use {value!r} as {target.__name__}.")


def _formats_floats(pattern: str) -> bool:
    try:
        float(pattern % 0.5)
    except (TypeError, ValueError):
        return False
    return True


def _require(condition: bool, name: str, message: str) -> None:
    if not condition:
        _LOGGER.error(f"Invalid configuration '{name}': {message}")
        raise ConfigError(name, message)


def _validate_net(config: ExperimentConfig) -> None:
    _require(0 < config.eps <= 1, "eps", f"must satisfy 0 < eps <= 1, got {config.eps}.")
    _require(config.q >= 2, "q", f"must be >= 2, got {config.q}.")


def _validate_hiding(config: ExperimentConfig) -> None:
    _require(0 <= config.nb <= config.n, "nb", f"must lie in [0, n={config.n}], got {config.nb}.")
    _require(config.n <= MAX_DENSE_QUBITS, "n", f"must be <= {MAX_DENSE_QUBITS}, got {config.n}.")


def _validate_depth(config: ExperimentConfig) -> None:
    if config.depth is not None:
        _require(0 <= config.depth <= config.n, "depth", f"must lie in [0, n={config.n}].")


def _validate_otm(config: ExperimentConfig) -> None:
    _require(1 <= config.k <= MAX_CODE_BITS, "k", f"must lie in [1, {MAX_CODE_BITS}], got {config.k}.")


def _validate_exact_otm(config: ExperimentConfig) -> None:
    _require(config.k <= MAX_EXACT_K, "k", f"exact joint laws need k <= {MAX_EXACT_K}.")


def _validate_leak(config: ExperimentConfig) -> None:
    _require(config.n <= MAX_EXACT_N, "n", f"exact leakage needs n <= {MAX_EXACT_N}.")


def _validate_split(config: ExperimentConfig) -> None:
    if config.h is not None:
        _require(config.h >= config.k, "h", f"must be >= k={config.k}, got {config.h}.")


def _validate_slacks(config: ExperimentConfig) -> None:
    try:
        _check_slacks(config.theta, config.tau)
    except InvalidSlacks as e:
        raise ConfigError("theta" if "theta" in str(e) else "tau", str(e))


def _validate_lambda(config: ExperimentConfig) -> None:
    _require(config.lam >= 1, "lam", f"must be >= 1, got {config.lam}.")


def _validate_search(config: ExperimentConfig) -> None:
    net = _net(config)
    depth = config.n if config.depth is None else config.depth
    total = count_strategies(config.n, len(net), net.q, depth)
    _require(total <= config.cap, "cap", f"{total} strategies of depth {depth} exceed the cap {config.cap}.")


def _validate_codes_mc(config: ExperimentConfig) -> None:
    _require(0 <= config.k <= MAX_CODE_BITS, "k", f"must lie in [0, {MAX_CODE_BITS}].")


VALIDATORS: Dict[str, List[Callable[[ExperimentConfig], None]]] = {
    "net-build": [_validate_net],
    "hiding": [_validate_hiding],
    "hiding-game": [_validate_net, _validate_depth],
    "hiding-search": [_validate_net, _validate_depth, _validate_search],
    "hiding-collision": [_validate_net],
    "otm": [_validate_otm],
    "otm-leak": [_validate_exact_otm, _validate_leak],
    "otm-info": [_validate_exact_otm, _validate_net, _validate_depth],
    "otm-collision": [_validate_exact_otm, _validate_net, _validate_split],
    "otm-phases": [_validate_exact_otm, _validate_depth, _validate_split],
    "codes-params": [_validate_slacks],
    "codes-bound": [_validate_slacks, _validate_lambda],
    "codes-montecarlo": [_validate_codes_mc],
}


def build_config(
    experiment: str, config: Dict[str, Any], overrides: Optional[Dict[str, Any]] = None
) -> ExperimentConfig:
    """
    Experiment settings from the layered configuration: the ``defaults``
    section, then the experiment's own section, then ``overrides``
    (command-line flags; ``None`` values are ignored).
    """
    section = config.get("experiments", dict()) or dict()
    values: Dict[str, Any] = dict(section.get("defaults", dict()) or dict())
    values.update(section.get(experiment, dict()) or dict())
    for key in ("workers", "float_format"):
        if key in config:
            values.setdefault(key, config[key])
    caps = config.get("caps", dict()) or dict()
    if "max_enumeration" in caps:
        values.setdefault("cap", caps["max_enumeration"])
    values.update({k: v for k, v in (overrides or dict()).items() if v is not None})
    return ExperimentConfig.from_dict(
        experiment,
        values,
        checks=config.get("checks", dict()) or dict(),
        tolerances=config.get("tolerances", dict()) or dict(),
    )


def _net(config: ExperimentConfig) -> MeasurementNet:
    if config.q == 2:
        return build_net_2outcome(config.eps)
    return build_net_qoutcome(config.q, config.eps)


def _device(config: ExperimentConfig, index: int):
    seed = derive_seed(config.seed, index)
    return seed, sample_device(config.params, seed)


def _trials(config: ExperimentConfig, fn: Callable[[int], Any], count: Optional[int] = None) -> List[Any]:
    count = config.seeds if count is None else count
    return map_trials(fn, range(count), n_jobs=config.workers)


def _frame(rows: List[Any]) -> pd.DataFrame:
    flat: List[Dict[str, Any]] = list()
    for row in rows:
        flat.extend(row if isinstance(row, list) else [row])
    return pd.DataFrame(flat)


# Net


def net_build(config: ExperimentConfig) -> pd.DataFrame:
    net = _net(config)
    if config.out is not None:
        save_net(net, os.path.splitext(config.out)[0] + ".net.yaml")
    covering = np.nan if net.covering is None else net.covering
    return pd.DataFrame(
        [
            {
                "q": net.q,
                "epsilon": net.epsilon,
                "size": len(net),
                "size_bound": net.size_bound(),
                "covering": covering,
                "outcome_operators": len(net.outcome_operators()),
            }
        ]
    )


# Data hiding


def _hiding_sample_trial(config: ExperimentConfig, index: int) -> List[Dict[str, Any]]:
    seed = derive_seed(config.seed, index)
    ensemble = sample_ensemble(config.nb, config.n, seed)
    frame = ensemble.to_frame()
    return [
        {"trial": index, "seed": seed, "message": u, "codes": " ".join(row)}
        for u, row in enumerate(frame.itertuples(index=False, name=None))
    ]


def hiding_sample(config: ExperimentConfig) -> pd.DataFrame:
    return _frame(_trials(config, partial(_hiding_sample_trial, config)))


def _hiding_pgm_trial(config: ExperimentConfig, index: int) -> Dict[str, Any]:
    seed = derive_seed(config.seed, index)
    ensemble = sample_ensemble(config.nb, config.n, seed)
    fro = gram_frobenius(hiding_gram(ensemble))
    success, bound = pgm_success(ensemble)
    try:
        info_bound = success_to_info_bound(1 - success, config.nb)
    except PreconditionViolated:
        info_bound = np.nan
    return {
        "trial": index,
        "seed": seed,
        "success_prob": success,
        "gram_bound": bound,
        "gramfro": fro,
        "gramfro_sq": fro ** 2,
        "sqrt_bound": gram_sqrt_bound(ensemble),
        "mutual_info": pgm_information(ensemble),
        "info_bound": info_bound,
    }


def hiding_pgm(config: ExperimentConfig) -> pd.DataFrame:
    return _frame(_trials(config, partial(_hiding_pgm_trial, config)))


def _hiding_game_trial(config: ExperimentConfig, net: MeasurementNet, index: int) -> List[Dict[str, Any]]:
    seed = derive_seed(config.seed, index)
    ensemble = sample_ensemble(config.nb, config.n, seed)
    states = ensemble.states()
    depth = config.n if config.depth is None else config.depth
    rng = trial_rng(seed, 0)
    strategies = {
        "computational": basis_strategy(config.n),
        "greedy": greedy_strategy(states, None, net, depth),
        "random": random_strategy(config.n, depth, config.q, rng, rank1=True),
    }
    holevo = holevo_chi(states, np.full(ensemble.size, 1 / ensemble.size), range(config.n))
    rows = list()
    for name, tree in strategies.items():
        joint = joint_distribution(tree, states)
        rows.append(
            {
                "trial": index,
                "seed": seed,
                "strategy": name,
                "mutual_info": mutual_information(joint),
                "conditional_entropy": conditional_entropy(joint.probs.T),
                "holevo": holevo,
            }
        )
    return rows


def hiding_game(config: ExperimentConfig) -> pd.DataFrame:
    net = _net(config)
    return _frame(_trials(config, partial(_hiding_game_trial, config, net)))


def _hiding_search_trial(config: ExperimentConfig, net: MeasurementNet, index: int) -> Dict[str, Any]:
    seed = derive_seed(config.seed, index)
    ensemble = sample_ensemble(config.nb, config.n, seed)
    depth = config.n if config.depth is None else config.depth
    best, count = 0.0, 0
    for tree in enumerate_strategies(config.n, net, depth, config.cap):
        best = max(best, discrimination_game(ensemble, tree))
        count += 1
    states = ensemble.states()
    greedy = discrimination_game(ensemble, greedy_strategy(states, None, net, depth))
    holevo = holevo_chi(states, np.full(ensemble.size, 1 / ensemble.size), range(config.n))
    return {
        "trial": index,
        "seed": seed,
        "strategies": count,
        "exhaustive_max": best,
        "greedy": greedy,
        "holevo": holevo,
    }


def hiding_search(config: ExperimentConfig) -> pd.DataFrame:
    net = _net(config)
    return _frame(_trials(config, partial(_hiding_search_trial, config, net)))


def _hiding_collision_trial(config: ExperimentConfig, net: MeasurementNet, index: int) -> Dict[str, Any]:
    seed = derive_seed(config.seed, index)
    ensemble = sample_ensemble(config.nb, config.n, seed)
    m = min(collision_split(config.nb), config.n)
    minimum, live = collision_minimum(ensemble.amplitudes(), net.outcome_operators(), m)
    outcomes = enumerate_outcomes(
        config.n, net, m, config.samples, rng=trial_rng(seed, 0), samples=config.samples
    )
    checked = len(all_outcome_collisions(ensemble, outcomes))
    bound = hiding_collision_bound(config.nb, m)
    return {
        "trial": index,
        "seed": seed,
        "m": m,
        "outcomes": live,
        "checked": checked,
        "min_collision": minimum,
        "bound": bound,
        "slack": bound - minimum,
    }


def hiding_collision(config: ExperimentConfig) -> pd.DataFrame:
    net = _net(config)
    return _frame(_trials(config, partial(_hiding_collision_trial, config, net)))


# One-time memories


def otm_sample(config: ExperimentConfig) -> pd.DataFrame:
    rows = list()
    capacity = 1 - binary_entropy(P_E)
    for index in range(config.seeds):
        seed, device = _device(config, index)
        if config.out is not None:
            save_device(device, os.path.splitext(config.out)[0] + f".device{index}")
        rows.append(
            {
                "trial": index,
                "seed": seed,
                "n": device.n,
                "k": device.k,
                "rate": device.k / device.n,
                "capacity": capacity,
                "distinct_c": device.code_c.all_distinct(),
                "distinct_d": device.code_d.all_distinct(),
            }
        )
    return pd.DataFrame(rows)


def _otm_encode_trial(config: ExperimentConfig, index: int) -> Dict[str, Any]:
    seed, device = _device(config, index)
    rng = trial_rng(seed, 0)
    s, t = (int(x) for x in rng.integers(0, 2 ** device.k, size=2))
    state = otm_encode(device, s, t)
    codes = " ".join(format(int(c), "02b") for c in device.codes(s, t))
    norm = float(np.prod((np.abs(state.amplitudes) ** 2).sum(axis=1)))
    return {"trial": index, "seed": seed, "s": s, "t": t, "codes": codes, "norm": norm}


def otm_encode_table(config: ExperimentConfig) -> pd.DataFrame:
    return _frame(_trials(config, partial(_otm_encode_trial, config)))


def _otm_honest_trial(config: ExperimentConfig, index: int) -> Dict[str, Any]:
    seed, device = _device(config, index)
    rng = trial_rng(seed, 0)
    wins = 0
    for _ in range(config.trials):
        s, t = (int(x) for x in rng.integers(0, 2 ** device.k, size=2))
        _, ok = honest_recover(device, s, t, config.side, rng)
        wins += int(ok)
    error, sigma = honest_error_rate(config.trials * device.n, rng, config.side)
    return {
        "trial": index,
        "seed": seed,
        "side": config.side,
        "trials": config.trials,
        "success_rate": wins / config.trials,
        "error_rate": error,
        "error_sigma": sigma,
        "p_e": P_E,
    }


def otm_honest(config: ExperimentConfig) -> pd.DataFrame:
    return _frame(_trials(config, partial(_otm_honest_trial, config)))


def _otm_leak_trial(config: ExperimentConfig, index: int) -> Dict[str, Any]:
    seed, device = _device(config, index)
    report = leak_eval(device, config.theta)
    return {
        "trial": index,
        "seed": seed,
        "mutual_info": report.mutual_info,
        "shannon": report.entropy.shannon,
        "collision": report.entropy.collision,
        "min_entropy": report.entropy.min_entropy,
        "worst_collision": report.worst_collision,
        "leakage": report.leakage,
        "smoothing": report.smoothing,
        "smoothed_bound": report.smoothed_bound,
    }


def otm_leak(config: ExperimentConfig) -> pd.DataFrame:
    return _frame(_trials(config, partial(_otm_leak_trial, config)))


def _otm_info_trial(config: ExperimentConfig, net: MeasurementNet, index: int) -> List[Dict[str, Any]]:
    seed, device = _device(config, index)
    rng = trial_rng(seed, 0)
    depth = config.n if config.depth is None else config.depth
    states = [ProductState(a) for a in device.pair_amplitudes()]
    strategies = {
        "leak": leak_strategy(config.n),
        "honest_S": honest_strategy("S", config.n),
        "honest_T": honest_strategy("T", config.n),
        "random": random_strategy(config.n, depth, 2, rng, rank1=True),
        "greedy": greedy_strategy(states, None, net, depth),
    }
    values = {name: otm_information(device, tree) for name, tree in strategies.items()}
    if config.depth is not None:
        values["exhaustive"] = max(
            otm_information(device, tree)
            for tree in enumerate_strategies(config.n, net, config.depth, config.cap)
        )
    return [
        {"trial": index, "seed": seed, "strategy": name, "mutual_info": value, "limit": 2 * device.k}
        for name, value in values.items()
    ]


def otm_info(config: ExperimentConfig) -> pd.DataFrame:
    net = build_net_2outcome(config.eps)
    return _frame(_trials(config, partial(_otm_info_trial, config, net)))


def _otm_collision_trial(config: ExperimentConfig, net: MeasurementNet, index: int) -> Dict[str, Any]:
    seed, device = _device(config, index)
    h = 2 * config.k if config.h is None else config.h
    m = split_points(device.params, h).m
    minimum, live = collision_minimum(device.pair_amplitudes(), net.outcome_operators(), m)
    checked = 0
    outcomes = enumerate_outcomes(
        config.n, net, m, config.samples, rng=trial_rng(seed, 0), samples=config.samples
    )
    for outcome in outcomes:
        try:
            conditional_collision_otm(device, outcome)
        except ZeroProbabilityOutcome:
            continue
        checked += 1
    bound = otm_collision_bound(device.k, m)
    return {
        "trial": index,
        "seed": seed,
        "m": m,
        "outcomes": live,
        "checked": checked,
        "min_collision": minimum,
        "bound": bound,
        "slack": bound - minimum,
    }


def otm_collision(config: ExperimentConfig) -> pd.DataFrame:
    net = build_net_2outcome(config.eps)
    return _frame(_trials(config, partial(_otm_collision_trial, config, net)))


def _otm_phases_trial(config: ExperimentConfig, index: int) -> Dict[str, Any]:
    seed, device = _device(config, index)
    rng = trial_rng(seed, 0)
    depth = config.n if config.depth is None else config.depth
    strategy = random_strategy(config.n, depth, 2, rng, rank1=True)
    split = split_points(device.params, 2 * config.k if config.h is None else config.h)
    phases = phase_decomposition(device, strategy, split, with_holevo=True)
    return {
        "trial": index,
        "seed": seed,
        "m": split.m,
        "m_tilde": split.m_tilde,
        "first": phases.first,
        "second": phases.second,
        "remainder": phases.remainder,
        "remainder_holevo": phases.remainder_holevo,
        "holevo_cap": phases.holevo_cap,
        "total": phases.total,
        "chain_error": abs(phases.chain_sum - phases.total),
    }


def otm_phases(config: ExperimentConfig) -> pd.DataFrame:
    return _frame(_trials(config, partial(_otm_phases_trial, config)))


# Codes


def codes_params(config: ExperimentConfig) -> pd.DataFrame:
    params = derive_params(config.n, config.theta, config.tau)
    return pd.DataFrame(
        [
            {
                "n": params.n,
                "k": params.k,
                "theta": params.theta,
                "tau": params.tau,
                "r": params.r,
                "p_e": params.p_e,
                "capacity": 1 - binary_entropy(P_E),
            }
        ]
    )


def codes_bound(config: ExperimentConfig) -> pd.DataFrame:
    rows = list()
    for n in config.n * 2 ** np.arange(5):
        good, success = decode_success_bound(int(n), config.theta, config.tau, config.lam)
        rows.append(
            {
                "n": int(n),
                "theta": config.theta,
                "tau": config.tau,
                "lam": config.lam,
                "good_code_prob": good,
                "success_bound": success,
            }
        )
    return pd.DataFrame(rows)


def _codes_mc_trial(config: ExperimentConfig, index: int) -> Dict[str, Any]:
    seed = derive_seed(config.seed, index)
    code = sample_code(config.k, config.n, seed)
    rate = channel_success_rate(code, P_E, config.trials, trial_rng(seed, 0))
    return {
        "trial": index,
        "seed": seed,
        "k": config.k,
        "n": config.n,
        "trials": config.trials,
        "success_rate": rate,
        "all_distinct": code.all_distinct(),
    }


def codes_montecarlo(config: ExperimentConfig) -> pd.DataFrame:
    return _frame(_trials(config, partial(_codes_mc_trial, config)))


# Acceptance checks


def _row(criterion: int, name: str, value: float, target: float, passed: bool, detail: str = "") -> Dict[str, Any]:
    return {
        "criterion": criterion,
        "check": name,
        "value": float(value),
        "target": float(target),
        "passed": bool(passed),
        "detail": detail,
    }


def _sizes(config: ExperimentConfig, name: str, **defaults) -> Dict[str, Any]:
    sizes = dict(defaults)
    sizes.update(config.checks.get(name, dict()) or dict())
    return sizes


def _tol(config: ExperimentConfig, name: str, default: float) -> float:
    return float(config.tolerances.get(name, default))


def check_constants(config: ExperimentConfig) -> List[Dict[str, Any]]:
    capacity = 1 - binary_entropy(P_E)
    return [
        _row(1, "channel_error_probability", P_E, 0.146446609, abs(P_E - 0.146446609) <= 1e-8),
        _row(1, "capacity_rate", capacity, 0.399118, abs(capacity - 0.399118) <= 1e-5),
    ]


def check_uncertainty(config: ExperimentConfig) -> List[Dict[str, Any]]:
    sizes = _sizes(config, "uncertainty", states=10000)
    rng = trial_rng(config.seed, 2)
    values = np.array([uncertainty_check(random_state(rng).projector) for _ in range(sizes["states"])])
    return [_row(2, "uncertainty_min", values.min(), 1.0, values.min() >= 1 - 1e-9)]


def check_fourth_moment(config: ExperimentConfig) -> List[Dict[str, Any]]:
    sizes = _sizes(config, "fourth_moment", states=10000)
    rng = trial_rng(config.seed, 3)
    states = [random_state(rng) for _ in range(sizes["states"])]
    closed = np.array([fourth_moment_closed_form(s) for s in states])
    brute = np.array([fourth_moment_avg(s) for s in states])
    gap = float(np.abs(closed - brute).max())
    return [
        _row(3, "fourth_moment_gap", gap, 0.0, gap <= 1e-12),
        _row(3, "fourth_moment_max", closed.max(), 3 / 8, closed.max() <= 3 / 8 + 1e-12),
    ]


def _gram_sq(n: int, nb: int, master: int, index: int) -> float:
    ensemble = sample_ensemble(nb, n, derive_seed(master, index))
    return gram_frobenius(hiding_gram(ensemble)) ** 2


def check_gram_statistics(config: ExperimentConfig) -> List[Dict[str, Any]]:
    sizes = _sizes(config, "gram", n=10, nb=4, seeds=200)
    values = np.array(
        map_trials(partial(_gram_sq, sizes["n"], sizes["nb"], config.seed), range(sizes["seeds"]), config.workers)
    )
    target = expected_gram_offdiag(sizes["n"], sizes["nb"])
    se = values.std(ddof=1) / np.sqrt(len(values))
    return [_row(4, "gram_offdiag_mean", values.mean(), target, abs(values.mean() - target) <= 3 * se, f"se={se:.6g}")]


def check_pgm(config: ExperimentConfig) -> List[Dict[str, Any]]:
    sizes = _sizes(config, "pgm", n=10, nb=3, seeds=100)
    sub = _replace(config, n=sizes["n"], nb=sizes["nb"], seeds=sizes["seeds"])
    df = hiding_pgm(sub)
    margin = df["success_prob"] - df["gram_bound"]
    held = df.dropna(subset=["info_bound"])
    info_margin = (held["mutual_info"] - held["info_bound"]).min() if len(held) else np.inf
    return [
        _row(5, "pgm_success_margin", margin.min(), 0.0, bool((margin >= -1e-12).all())),
        _row(
            5,
            "pgm_information_margin",
            info_margin,
            0.0,
            bool(info_margin >= -1e-9),
            f"{len(held)} of {len(df)} seeds meet the precondition",
        ),
    ]


def _computational_entropy(n: int, nb: int, master: int, index: int):
    ensemble = sample_ensemble(nb, n, derive_seed(master, index))
    joint = joint_distribution(basis_strategy(n), ensemble.states())
    return conditional_entropy(joint.probs.T), computational_conditional_entropy(ensemble)


def check_computational_leakage(config: ExperimentConfig) -> List[Dict[str, Any]]:
    sizes = _sizes(config, "computational", n=10, nb=6, seeds=50)
    pairs = np.array(
        map_trials(
            partial(_computational_entropy, sizes["n"], sizes["nb"], config.seed),
            range(sizes["seeds"]),
            config.workers,
        )
    )
    exact, oracle = pairs[:, 0], pairs[:, 1]
    se = exact.std(ddof=1) / np.sqrt(len(exact))
    target = sizes["n"] / 2
    gap = float(np.abs(exact - oracle).max())
    return [
        _row(6, "computational_entropy_mean", exact.mean(), target, abs(exact.mean() - target) <= 3 * se, f"se={se:.6g}"),
        _row(6, "computational_entropy_oracle", gap, 0.0, gap <= 1e-9),
    ]


def _discretization_gap(net: MeasurementNet, master: int, index: int) -> float:
    rng = trial_rng(master, index)
    states = [random_product_state(2, rng) for _ in range(4)]
    tree = random_strategy(2, 2, 2, rng, rank1=True)
    before = mutual_information(joint_distribution(tree, states))
    after = mutual_information(joint_distribution(discretize_strategy(tree, net), states))
    return abs(after - before)


def check_discretization(config: ExperimentConfig) -> List[Dict[str, Any]]:
    sizes = _sizes(config, "discretization", games=100, epsilons=[0.05, 0.01])
    rows = list()
    for j, eps in enumerate(sizes["epsilons"]):
        net = build_net_2outcome(eps)
        gaps = np.array(
            map_trials(
                partial(_discretization_gap, net, derive_seed(config.seed, 7 + j)),
                range(sizes["games"]),
                config.workers,
            )
        )
        penalty = discretization_penalty(2, 2, eps)
        rows.append(_row(7, f"discretization_gap_eps_{eps}", gaps.max(), penalty, gaps.max() <= penalty))
    return rows


def check_exhaustive(config: ExperimentConfig) -> List[Dict[str, Any]]:
    sizes = _sizes(config, "exhaustive", n=2, nb=2, q=2, eps=0.2)
    sub = _replace(config, n=sizes["n"], nb=sizes["nb"], q=sizes["q"], eps=sizes["eps"], seeds=1, depth=None)
    row = _hiding_search_trial(sub, _net(sub), 0)
    return [
        _row(8, "exhaustive_vs_holevo", row["exhaustive_max"], row["holevo"], row["exhaustive_max"] <= row["holevo"] + 1e-9,
             f"{row['strategies']} strategies"),
        _row(8, "greedy_vs_exhaustive", row["greedy"], row["exhaustive_max"], row["greedy"] <= row["exhaustive_max"] + 1e-9),
    ]


def check_collisions(config: ExperimentConfig) -> List[Dict[str, Any]]:
    sizes = _sizes(config, "collision", n=10, nb=6, k=3, eps=1.0, outcomes=1500, minimum=1000)
    rows = list()
    hiding = _replace(config, n=sizes["n"], nb=sizes["nb"], eps=sizes["eps"], q=2, samples=sizes["outcomes"], seeds=1)
    otm = _replace(config, n=sizes["n"], k=sizes["k"], eps=sizes["eps"], samples=sizes["outcomes"], seeds=1, h=None)
    for label, sub, trial in (
        ("hiding", hiding, _hiding_collision_trial),
        ("otm", otm, _otm_collision_trial),
    ):
        try:
            result = trial(sub, build_net_2outcome(sub.eps), 0)
        except IdentityViolation as e:
            rows.append(_row(9, f"{label}_collision_identity", np.nan, 0.0, False, str(e)))
            continue
        rows.append(
            _row(9, f"{label}_collision_identity", result["checked"], sizes["minimum"], result["checked"] >= sizes["minimum"])
        )
        rows.append(
            _row(9, f"{label}_collision_minimum", result["min_collision"], result["bound"], True,
                 f"m={result['m']} slack={result['slack']:.6g} (reported)")
        )
    return rows


def check_honest(config: ExperimentConfig) -> List[Dict[str, Any]]:
    sizes = _sizes(config, "honest", n=64, k=8, codes=20, trials=1000, measurements=100000)
    sub = _replace(config, n=sizes["n"], k=sizes["k"], seeds=sizes["codes"], trials=sizes["trials"], side="S")
    df = otm_honest(sub)
    error, sigma = honest_error_rate(sizes["measurements"], trial_rng(config.seed, 10))
    return [
        _row(10, "honest_success_rate", df["success_rate"].mean(), 0.95, df["success_rate"].mean() >= 0.95),
        _row(10, "honest_error_rate", error, P_E, abs(error - P_E) <= 3 * sigma, f"sigma={sigma:.6g}"),
    ]


def check_leak(config: ExperimentConfig) -> List[Dict[str, Any]]:
    sizes = _sizes(config, "leak", n=8, k=3, seeds=50, threshold=2.5, fraction=0.9)
    single = expectation_table(ALPHA_AMPLITUDES, computational_povm().elements) / 4
    per_qubit = mutual_information(single)
    sub = _replace(config, n=sizes["n"], k=sizes["k"], seeds=sizes["seeds"], theta=0.0)
    df = otm_leak(sub)
    fraction = float((df["mutual_info"] >= sizes["threshold"]).mean())
    return [
        _row(11, "leak_per_qubit", per_qubit, 0.5, abs(per_qubit - 0.5) <= 1e-12),
        _row(11, "leak_fraction_above_threshold", fraction, sizes["fraction"], fraction >= sizes["fraction"]),
    ]


def check_chain(config: ExperimentConfig) -> List[Dict[str, Any]]:
    sizes = _sizes(config, "chain", n=8, k=3, seeds=50)
    sub = _replace(config, n=sizes["n"], k=sizes["k"], seeds=sizes["seeds"], depth=None, h=None)
    df = otm_phases(sub)
    over = (df["remainder"] - df["holevo_cap"]).max()
    tol = _tol(config, "identity", 1e-9)
    return [
        _row(12, "chain_rule_error", df["chain_error"].max(), 0.0, df["chain_error"].max() <= tol),
        _row(12, "remainder_minus_cap", over, 0.0, over <= tol),
    ]


CHECKS: Dict[int, Callable[[ExperimentConfig], List[Dict[str, Any]]]] = {
    1: check_constants,
    2: check_uncertainty,
    3: check_fourth_moment,
    4: check_gram_statistics,
    5: check_pgm,
    6: check_computational_leakage,
    7: check_discretization,
    8: check_exhaustive,
    9: check_collisions,
    10: check_honest,
    11: check_leak,
    12: check_chain,
}


def _replace(config: ExperimentConfig, **changes) -> ExperimentConfig:
    values = {f.name: getattr(config, f.name) for f in fields(config)}
    values.update(changes)
    return ExperimentConfig(**values)


def check_all(config: ExperimentConfig) -> pd.DataFrame:
    """Run every acceptance check; sizes come from the ``checks`` configuration section."""
    selected = config.checks.get("criteria") or list(CHECKS)
    rows: List[Dict[str, Any]] = list()
    for criterion in selected:
        _LOGGER.info(f"Running check {criterion}: {CHECKS[criterion].__name__}.")
        result = CHECKS[criterion](config)
        for row in result:
            level = "info" if row["passed"] else "error"
            getattr(_LOGGER, level)(
                f"[{criterion}] {row['check']}: value={row['value']:.6g} target={row['target']:.6g}"
                f" {'ok' if row['passed'] else 'FAILED'}"
            )
        rows.extend(result)
    return pd.DataFrame(rows)


EXPERIMENTS: Dict[str, Callable[[ExperimentConfig], pd.DataFrame]] = {
    "net-build": net_build,
    "hiding-sample": hiding_sample,
    "hiding-pgm": hiding_pgm,
    "hiding-game": hiding_game,
    "hiding-search": hiding_search,
    "hiding-collision": hiding_collision,
    "otm-sample": otm_sample,
    "otm-encode": otm_encode_table,
    "otm-honest": otm_honest,
    "otm-leak": otm_leak,
    "otm-info": otm_info,
    "otm-collision": otm_collision,
    "otm-phases": otm_phases,
    "codes-params": codes_params,
    "codes-bound": codes_bound,
    "codes-montecarlo": codes_montecarlo,
    "check-all": check_all,
}


def run(config: ExperimentConfig) -> Dict[str, Any]:
    """
    Validate ``config``, run its experiment and write the table.

    Returns a summary record; raises :class:`CheckFailed` after writing the
    table when an acceptance check fails.
    """
    config.validate()
    _LOGGER.info(f"Running experiment '{config.experiment}' with master seed {config.seed}.")
    df = EXPERIMENTS[config.experiment](config)
    if "seed" not in df.columns:
        # rows with no per-trial seed carry the master seed
        df.insert(0, "seed", np.uint64(config.seed))
    path = write_table(
        df, config.output_path, config.experiment, config.seed, config.format, config.float_format
    )
    summary = {"experiment": config.experiment, "seed": config.seed, "rows": len(df), "path": path}
    if config.experiment == "check-all":
        failed = df.loc[~df["passed"], "check"].tolist()
        summary["failed"] = failed
        if failed:
            raise CheckFailed(f"{len(failed)} check(s) failed: {', '.join(failed)}.")
    return summary
