#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
One-time memories from isolated qubits.

Two messages ``s, t`` are written as ``n`` conjugate-coding qubits, qubit
``a`` carrying the code ``C(s)_a D(t)_a``. An honest reader measures every
qubit in a rotated basis and decodes one of the two codewords.
"""

from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple, Union
import os

import numpy as np
import yaml

from isoq import _LOGGER
from isoq.codes import (
    P_E,
    CodeParams,
    RandomCode,
    load_code,
    nearest_codeword_decode,
    sample_code,
    save_code,
)
from isoq.entropy import (
    EntropyReport,
    collision_entropy,
    conditional_mutual_information,
    min_entropy,
    mutual_information,
    shannon_entropy,
    smoothed_minentropy_lower_bound,
)
from isoq.exceptions import DimensionMismatch, DomainError, IndexOutOfRange, InvalidH, TooLarge
from isoq.hiding import LG_3_2, LG_8_3, collision_with_identity, outcome_likelihoods
from isoq.job_control import derive_seed
from isoq.povm import Rank1Povm
from isoq.qubit import ALPHA_AMPLITUDES, OutcomeRecord, ProductState, mixture_entropy
from isoq.strategies import StrategyTree, basis_strategy, outcome_matrix

MAX_EXACT_K = 6
MAX_EXACT_N = 12

# basis angles of (outcome 0, outcome 1); outcome j reads bit j
HONEST_ANGLES = {
    "S": (np.pi / 8, 5 * np.pi / 8),
    "T": (-np.pi / 8, 3 * np.pi / 8),
}


@dataclass(frozen=True, eq=False)
class OtmDevice:
    params: CodeParams
    code_c: RandomCode
    code_d: RandomCode

    def __post_init__(self):
        for code in (self.code_c, self.code_d):
            if (code.k, code.n) != (self.params.k, self.params.n):
                raise DimensionMismatch(
                    f"Code ({code.k}, {code.n}) does not match parameters"
                    f" ({self.params.k}, {self.params.n})."
                )

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def k(self) -> int:
        return self.params.k

    def codes(self, s: int, t: int) -> np.ndarray:
        """Two-bit code of every qubit, ``2 C(s)_a + D(t)_a``."""
        return 2 * self.code_c[s].astype(np.uint8) + self.code_d[t]

    def pair_amplitudes(self) -> np.ndarray:
        """Amplitude stack of all ``4**k`` states, row ``s * 2**k + t``."""
        c = self.code_c.words.astype(np.uint8)
        d = self.code_d.words.astype(np.uint8)
        codes = (2 * c[:, None, :] + d[None, :, :]).reshape(-1, self.n)
        return ALPHA_AMPLITUDES[codes]


def sample_device(params: CodeParams, seed: int) -> OtmDevice:
    """Draw both codes with seeds derived from ``seed``."""
    seed_c, seed_d = derive_seed(seed, 0), derive_seed(seed, 1)
    device = OtmDevice(
        params,
        sample_code(params.k, params.n, seed_c),
        sample_code(params.k, params.n, seed_d),
    )
    _LOGGER.debug(f"Sampled OTM device n={params.n} k={params.k} from seed {seed}.")
    return device


def otm_encode(device: OtmDevice, s: int, t: int) -> ProductState:
    for name, value in (("s", s), ("t", t)):
        if not 0 <= value < 2 ** device.k:
            raise IndexOutOfRange(f"{name}={value} outside 0..{2 ** device.k - 1}.")
    return ProductState(ALPHA_AMPLITUDES[device.codes(s, t)])


def _side(which: str) -> str:
    side = str(which).upper()[:1]
    if side not in HONEST_ANGLES:
        raise DomainError(f"Unknown side {which!r}; use 'S' or 'T'.")
    return side


def honest_povm(which: str) -> Rank1Povm:
    vectors = np.array([[np.cos(a), np.sin(a)] for a in HONEST_ANGLES[_side(which)]])
    return Rank1Povm(np.einsum("ka,kb->kab", vectors, vectors).astype(complex))


def honest_strategy(which: str, n: int) -> StrategyTree:
    """Non-adaptive strategy measuring qubit ``a`` at step ``a`` in the honest basis."""
    return basis_strategy(n, honest_povm(which))


def honest_outcome_probabilities(codes: np.ndarray, which: str) -> np.ndarray:
    """``Pr[outcome 1]`` of the honest measurement on qubits with the given codes."""
    angle = HONEST_ANGLES[_side(which)][1]
    beta = np.array([np.cos(angle), np.sin(angle)])
    return np.abs(ALPHA_AMPLITUDES[codes] @ beta) ** 2


def _honest_bits(codes: np.ndarray, which: str) -> np.ndarray:
    return (codes >> 1) & 1 if _side(which) == "S" else codes & 1


def honest_recover(
    device: OtmDevice,
    s: int,
    t: int,
    which: str,
    rng: np.random.Generator,
    noiseless: bool = False,
) -> Tuple[int, bool]:
    """
    Measure every qubit in the honest basis (Born probabilities per
    qubit) and decode the chosen side with the nearest codeword.
    """
    codes = device.codes(s, t)
    if noiseless:
        readout = _honest_bits(codes, which).astype(np.uint8)
    else:
        readout = (rng.random(device.n) < honest_outcome_probabilities(codes, which)).astype(np.uint8)
    side = _side(which)
    code, target = (device.code_c, s) if side == "S" else (device.code_d, t)
    message = nearest_codeword_decode(code, readout)
    return message, message == target


def honest_error_rate(measurements: int, rng: np.random.Generator, which: str = "S") -> Tuple[float, float]:
    """
    Empirical per-qubit error of honest readouts on uniformly random codes,
    with its binomial standard error around ``p_e``.
    """
    codes = rng.integers(0, 4, size=measurements).astype(np.uint8)
    readout = rng.random(measurements) < honest_outcome_probabilities(codes, which)
    errors = readout != _honest_bits(codes, which).astype(bool)
    return float(errors.mean()), float(np.sqrt(P_E * (1 - P_E) / measurements))


def post_measurement_bias(first: str) -> np.ndarray:
    """
    ``Pr[other side reads 1 | first side read j]`` for ``j = 0, 1`` after the
    qubit collapsed onto the first side's basis state.
    """
    first = _side(first)
    other = "T" if first == "S" else "S"
    out = np.empty(2)
    target = HONEST_ANGLES[other][1]
    for j, angle in enumerate(HONEST_ANGLES[first]):
        out[j] = np.cos(angle - target) ** 2
    return out


def sequential_readout(
    device: OtmDevice, s: int, t: int, first: str, rng: np.random.Generator
) -> Tuple[int, int, float]:
    """
    Read one side, then measure the collapsed qubits on the other side.

    Returns both decoded messages and the fraction of second-side bits
    that agree with the true codeword.
    """
    first = _side(first)
    other = "T" if first == "S" else "S"
    codes = device.codes(s, t)
    outcomes = (rng.random(device.n) < honest_outcome_probabilities(codes, first)).astype(int)
    bias = post_measurement_bias(first)
    second = (rng.random(device.n) < bias[outcomes]).astype(np.uint8)
    code_first, code_second = (
        (device.code_c, device.code_d) if first == "S" else (device.code_d, device.code_c)
    )
    truth = _honest_bits(codes, other)
    return (
        nearest_codeword_decode(code_first, outcomes.astype(np.uint8)),
        nearest_codeword_decode(code_second, second),
        float((second == truth).mean()),
    )


def leak_strategy(n: int) -> StrategyTree:
    """Measure every qubit in ``{|alpha_00>, |alpha_11>}``."""
    return basis_strategy(n)


def _check_exact(device: OtmDevice, check_n: bool = False) -> None:
    if device.k > MAX_EXACT_K or (check_n and device.n > MAX_EXACT_N):
        _LOGGER.error(f"Exact joint law for k={device.k}, n={device.n} is too large.")
        raise TooLarge(
            f"Exact computations need k <= {MAX_EXACT_K}"
            + (f" and n <= {MAX_EXACT_N}" if check_n else "")
            + f"; got k={device.k}, n={device.n}."
        )


def _joint(device: OtmDevice, strategy: StrategyTree) -> Tuple[List[Tuple[int, ...]], np.ndarray]:
    if strategy.max_qubit >= device.n:
        raise IndexOutOfRange(f"Strategy measures qubit {strategy.max_qubit} of {device.n}.")
    amps = device.pair_amplitudes()
    paths, matrix = outcome_matrix(amps, strategy)
    return paths, matrix / amps.shape[0]


def otm_information(device: OtmDevice, strategy: StrategyTree) -> float:
    """``I(Z; S, T)`` for uniform independent ``s, t``."""
    _check_exact(device)
    _, joint = _joint(device, strategy)
    return mutual_information(joint)


@dataclass(frozen=True)
class LeakReport:
    """
    What a strategy learns about ``(S, T)``: the mutual information, the
    entropy of ``(S, T)`` given the outcome averaged over outcomes, the
    implied leakage fraction and a smoothed min-entropy lower bound.
    """

    k: int
    mutual_info: float
    entropy: EntropyReport
    leakage: float
    smoothing: float
    worst_collision: float
    smoothed_bound: float

    def __post_init__(self):
        if not -1e-9 <= self.mutual_info <= 2 * self.k + 1e-9:
            raise DomainError(f"Mutual information {self.mutual_info} outside [0, 2k].")


def leak_report(joint: np.ndarray, k: int, theta: float = 0.0) -> LeakReport:
    """Summarize a joint law ``p[(s, t), z]`` of the messages and an outcome."""
    pz = joint.sum(axis=0)
    live = pz > 1e-15
    posteriors = joint[:, live] / pz[live]
    weights = pz[live]
    shannon = float(sum(w * shannon_entropy(p) for w, p in zip(weights, posteriors.T)))
    collisions = np.array([collision_entropy(p) for p in posteriors.T])
    minimum = float(sum(w * min_entropy(p) for w, p in zip(weights, posteriors.T)))
    collision = float((weights * collisions).sum())
    worst = float(collisions.min())
    eps, bound = smoothed_minentropy_lower_bound(worst, theta)
    report = EntropyReport(shannon, collision, minimum, eps, bound)
    return LeakReport(
        k=k,
        mutual_info=mutual_information(joint),
        entropy=report,
        leakage=float(1 - shannon / k) if k else 0.0,
        smoothing=eps,
        worst_collision=worst,
        smoothed_bound=bound,
    )


def leak_eval(device: OtmDevice, theta: float = 0.0, strategy: Optional[StrategyTree] = None) -> LeakReport:
    """Exact leakage of the leak strategy (or ``strategy``) on ``device``."""
    _check_exact(device, check_n=True)
    strategy = leak_strategy(device.n) if strategy is None else strategy
    _, joint = _joint(device, strategy)
    return leak_report(joint, device.k, theta)


def conditional_collision_otm(device: OtmDevice, outcome: OutcomeRecord) -> float:
    """``H2(S, T | M_A)`` with the product-form identity verified."""
    _check_exact(device)
    amps = device.pair_amplitudes()
    return collision_with_identity(outcome_likelihoods(amps, outcome), amps, outcome)


def otm_collision_bound(k: int, m: int) -> float:
    """``2k - m lg(3/2)``"""
    return float(2 * k - m * LG_3_2)


@dataclass(frozen=True)
class SplitPoints:
    m: int
    m_tilde: int
    h: float


def split_points(params: CodeParams, h: float) -> SplitPoints:
    """``m = floor(k / lg(8/3))`` and ``m~ = floor(h - k)``, kept within ``n - m``."""
    if h < params.k:
        raise InvalidH(f"h={h} must be at least k={params.k}.")
    m = min(int(np.floor(params.k / LG_8_3)), params.n)
    m_tilde = max(min(int(np.floor(h - params.k)), params.n - m), 0)
    return SplitPoints(m, m_tilde, float(h))


@dataclass(frozen=True)
class PhaseDecomposition:
    """
    ``I(Z; S, T)`` split at steps ``m`` and ``m + m~`` by the chain rule,
    with the dimension cap on the last part.
    """

    first: float
    second: float
    remainder: float
    holevo_cap: float
    total: float
    remainder_holevo: Optional[float] = None

    @property
    def chain_sum(self) -> float:
        return self.first + self.second + self.remainder


def _group(paths, joint: np.ndarray, start: int, stop: Optional[int]) -> np.ndarray:
    """Three-way table ``p[x, prefix, middle]`` with ``prefix = path[:start]``."""
    prefixes: Dict[Tuple[int, ...], int] = dict()
    middles: Dict[Tuple[int, ...], int] = dict()
    cells = [
        (prefixes.setdefault(p[:start], len(prefixes)), middles.setdefault(p[start:stop], len(middles)))
        for p in paths
    ]
    table = np.zeros((joint.shape[0], len(prefixes), len(middles)))
    for column, (i, j) in enumerate(cells):
        table[:, i, j] += joint[:, column]
    return table


def phase_decomposition(
    device: OtmDevice, strategy: StrategyTree, split: SplitPoints, with_holevo: bool = False
) -> PhaseDecomposition:
    """
    Exact ``I(S,T; Z_1..m)``, ``I(S,T; Z_m+1..m+m~ | Z_1..m)`` and the
    remaining ``I(S,T; Z_rest | Z_1..m+m~)``, the cap ``n - m - m~`` and
    the total information computed on its own.

    With ``with_holevo`` the Holevo quantity of the unmeasured qubits,
    averaged over the first ``m + m~`` outcomes, is reported as well.
    """
    _check_exact(device)
    paths, joint = _joint(device, strategy)
    m, mid = split.m, split.m + split.m_tilde
    first = mutual_information(_group(paths, joint, 0, m).sum(axis=1))
    second = conditional_mutual_information(_group(paths, joint, m, mid))
    remainder = conditional_mutual_information(_group(paths, joint, mid, None))
    total = mutual_information(joint)
    cap = float(max(device.n - mid, 0))

    holevo = None
    if with_holevo:
        amps = device.pair_amplitudes()
        weights: Dict[Tuple[int, ...], np.ndarray] = defaultdict(lambda: np.zeros(joint.shape[0]))
        for path, column in zip(paths, joint.T):
            if len(path) > mid:
                weights[path[:mid]] += column
        holevo = 0.0
        for prefix, column in weights.items():
            mass = column.sum()
            if mass <= 1e-15:
                continue
            measured = set(strategy.qubits_on_path(prefix))
            rest = [a for a in range(device.n) if a not in measured]
            holevo += mass * mixture_entropy(amps, column / mass, rest)
        holevo = float(holevo)

    return PhaseDecomposition(first, second, remainder, cap, total, holevo)


def save_device(device: OtmDevice, prefix: Union[str, os.PathLike]) -> None:
    """Parameter header ``<prefix>.params.yaml`` plus ``<prefix>.C.txt`` and ``<prefix>.D.txt``."""
    prefix = str(prefix)
    p = device.params
    header = {
        "n": p.n,
        "k": p.k,
        "theta": float(p.theta),
        "tau": float(p.tau),
        "r": float(p.r),
        "asymptotic": bool(p.asymptotic),
        "seed_c": device.code_c.seed,
        "seed_d": device.code_d.seed,
    }
    with open(prefix + ".params.yaml", "w") as handle:
        yaml.safe_dump(header, handle, sort_keys=False)
    save_code(device.code_c, prefix + ".C.txt")
    save_code(device.code_d, prefix + ".D.txt")


def load_device(prefix: Union[str, os.PathLike]) -> OtmDevice:
    prefix = str(prefix)
    with open(prefix + ".params.yaml", "r") as handle:
        header = yaml.safe_load(handle)
    params = CodeParams(
        header["n"], header["k"], header["theta"], header["tau"], header["r"],
        asymptotic=header.get("asymptotic", True),
    )
    return OtmDevice(params, load_code(prefix + ".C.txt"), load_code(prefix + ".D.txt"))
