#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Random codes, the binary symmetric channel induced by honest conjugate
basis measurements, decoders and the decoding success bound.
"""

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union
import os

import numpy as np

from isoq import _LOGGER
from isoq.entropy import binary_entropy, binary_entropy_derivative
from isoq.exceptions import DimensionMismatch, IndexOutOfRange, InvalidSlacks, RateTooLow, TooLarge

MAX_CODE_BITS = 20


def channel_error_probability() -> float:
    """``sin^2(pi/8)``, the per-bit error of an honest readout."""
    return float(np.sin(np.pi / 8) ** 2)


P_E = channel_error_probability()


@dataclass(frozen=True)
class CodeParams:
    """
    Code dimensions with the rate slack ``theta`` and radius slack ``tau``.

    ``asymptotic`` is False for parameters fixed by hand at desk scale,
    where ``k`` may exceed the channel capacity and the slack constraints
    are not enforced.
    """

    n: int
    k: int
    theta: float
    tau: float
    r: float
    p_e: float = P_E
    asymptotic: bool = True


def _check_slacks(theta: float, tau: float) -> None:
    slope = binary_entropy_derivative(P_E)
    if tau < 0 or tau > 0.5 - P_E:
        raise InvalidSlacks(f"tau={tau} must lie in [0, {0.5 - P_E:.6f}].")
    if not theta > tau * slope:
        raise InvalidSlacks(
            f"theta={theta} must exceed tau * h'(p_e) = {tau * slope:.6g}."
        )


def derive_params(n: int, theta: float, tau: float) -> CodeParams:
    """``k = floor(n (1 - h(p_e) - theta))`` and ``r = n (p_e + tau)``."""
    _check_slacks(theta, tau)
    k = int(np.floor(n * (1 - binary_entropy(P_E) - theta)))
    if k < 1:
        raise RateTooLow(f"n={n}, theta={theta} give k={k} < 1.")
    return CodeParams(n, k, theta, tau, n * (P_E + tau))


def explicit_params(n: int, k: int) -> CodeParams:
    """
    Parameters with ``k`` chosen directly; ``theta`` is the implied rate
    slack (negative above capacity), ``tau = 0`` and ``r = n p_e``.
    """
    if k < 0 or n < 1:
        raise RateTooLow(f"Invalid code dimensions n={n}, k={k}.")
    theta = 1 - binary_entropy(P_E) - k / n
    return CodeParams(n, k, theta, 0.0, n * P_E, asymptotic=False)


@dataclass(frozen=True, eq=False)
class RandomCode:
    """
    A table of ``2**k`` codewords of ``n`` bits.

    Attributes
    ----------
    words : np.ndarray
        ``uint8`` array ``(2**k, n)``; row ``s`` is the codeword of message ``s``.
    seed : int
        Seed the table was drawn with, ``-1`` when unknown.
    """

    k: int
    n: int
    words: np.ndarray = field(repr=False)
    seed: int = -1

    def __post_init__(self):
        words = np.asarray(self.words, dtype=np.uint8)
        if words.shape != (2 ** self.k, self.n):
            raise DimensionMismatch(
                f"Code table of shape {words.shape}, expected {(2 ** self.k, self.n)}."
            )
        words.setflags(write=False)
        object.__setattr__(self, "words", words)

    def __getitem__(self, message: int) -> np.ndarray:
        if not 0 <= message < 2 ** self.k:
            raise IndexOutOfRange(f"Message {message} outside 0..{2 ** self.k - 1}.")
        return self.words[message]

    def distances(self, z: np.ndarray) -> np.ndarray:
        """Hamming distance of ``z`` to every codeword."""
        z = np.asarray(z, dtype=np.uint8)
        if z.shape != (self.n,):
            raise DimensionMismatch(f"Word of length {z.size}, expected {self.n}.")
        return (self.words != z[None, :]).sum(axis=1)

    def all_distinct(self) -> bool:
        return len(np.unique(self.words, axis=0)) == len(self.words)


def sample_code(k: int, n: int, seed: Union[int, np.random.Generator]) -> RandomCode:
    """Uniform independent codewords; identical tables for identical seeds."""
    if k > MAX_CODE_BITS or k < 0:
        raise TooLarge(f"k={k} outside 0..{MAX_CODE_BITS}.")
    if isinstance(seed, np.random.Generator):
        rng, recorded = seed, -1
    else:
        rng, recorded = np.random.default_rng(int(seed)), int(seed)
    words = rng.integers(0, 2, size=(2 ** k, n), dtype=np.uint8)
    return RandomCode(k, n, words, recorded)


def bsc_channel(word: np.ndarray, p: float, rng: np.random.Generator) -> np.ndarray:
    """Flip every bit independently with probability ``p``."""
    word = np.asarray(word, dtype=np.uint8)
    flips = (rng.random(word.shape) < p).astype(np.uint8)
    return word ^ flips


def bounded_distance_decode(code: RandomCode, z: np.ndarray, r: float) -> Optional[int]:
    """Smallest message whose codeword is within ``floor(r)`` of ``z``."""
    if r < 0:
        return None
    hits = np.flatnonzero(code.distances(z) <= np.floor(r))
    return int(hits[0]) if hits.size else None


def nearest_codeword_decode(code: RandomCode, z: np.ndarray) -> int:
    """Closest codeword, smallest message on ties."""
    return int(np.argmin(code.distances(z)))


def decode_success_bound(n: int, theta: float, tau: float, lam: float) -> Tuple[float, float]:
    """
    ``(1 - 1/lam, 1 - lam (e^(-2 tau^2 n) + 2^(-n (theta - tau h'(p_e)))))``,
    the second value clamped at zero.
    """
    if lam < 1:
        raise InvalidSlacks(f"lambda={lam} must be >= 1.")
    _check_slacks(theta, tau)
    slope = binary_entropy_derivative(P_E)
    failure = np.exp(-2 * tau ** 2 * n) + 2.0 ** (-n * (theta - tau * slope))
    return float(1 - 1 / lam), float(max(1 - lam * failure, 0.0))


def channel_success_rate(
    code: RandomCode, p: float, trials: int, rng: np.random.Generator
) -> float:
    """Fraction of random messages recovered by nearest-codeword decoding after BSC(p)."""
    messages = rng.integers(0, 2 ** code.k, size=trials)
    wins = 0
    for s in messages:
        received = bsc_channel(code.words[s], p, rng)
        wins += int(nearest_codeword_decode(code, received) == s)
    return wins / trials


def save_code(code: RandomCode, path: Union[str, os.PathLike]) -> None:
    """Header ``k n seed`` then one hexadecimal codeword per row, first bit most significant."""
    width = (code.n + 3) // 4
    with open(path, "w") as handle:
        handle.write(f"{code.k} {code.n} {code.seed}\n")
        for row in code.words:
            value = int("".join(str(int(b)) for b in row), 2) if code.n else 0
            handle.write(f"{value:0{width}x}\n")
    _LOGGER.debug(f"Wrote code k={code.k} n={code.n} to '{path}'.")


def load_code(path: Union[str, os.PathLike]) -> RandomCode:
    with open(path, "r") as handle:
        k, n, seed = (int(x) for x in handle.readline().split())
        rows = [line.strip() for line in handle if line.strip()]
    words = np.array(
        [[int(b) for b in format(int(row, 16), f"0{n}b")] for row in rows], dtype=np.uint8
    ).reshape(len(rows), n)
    return RandomCode(k, n, words, seed)
