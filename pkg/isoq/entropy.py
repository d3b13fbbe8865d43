#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Information measures in bits and the closed-form bounds applied to them.
"""

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from isoq.exceptions import DomainError, EpsilonTooLarge, NotRank1, PreconditionViolated
from isoq.qubit import EIGEN_CUTOFF, DistributionTable, JointTable

# probabilities below this contribute nothing to entropy sums
ZERO_PROB = 1e-15

Distribution = Union[DistributionTable, np.ndarray]
Joint = Union[JointTable, np.ndarray]


def _probs(dist: Distribution) -> np.ndarray:
    if isinstance(dist, (DistributionTable, JointTable)):
        return np.asarray(dist.probs, dtype=float).ravel()
    return np.asarray(dist, dtype=float).ravel()


def _table(joint: Joint) -> np.ndarray:
    return np.asarray(joint.probs if isinstance(joint, JointTable) else joint, dtype=float)


def shannon_entropy(dist: Distribution) -> float:
    p = _probs(dist)
    p = p[p > ZERO_PROB]
    return float(max(-(p * np.log2(p)).sum(), 0.0))


def collision_entropy(dist: Distribution) -> float:
    p = _probs(dist)
    return float(max(-np.log2((p ** 2).sum()), 0.0))


def min_entropy(dist: Distribution) -> float:
    return float(max(-np.log2(_probs(dist).max()), 0.0))


def mutual_information(joint: Joint) -> float:
    """``H(X) + H(Y) - H(X, Y)`` of a two-way table, clipped at zero."""
    p = _table(joint)
    value = shannon_entropy(p.sum(axis=1)) + shannon_entropy(p.sum(axis=0)) - shannon_entropy(p)
    return float(max(value, 0.0))


def conditional_entropy(joint: Joint) -> float:
    """``H(X | Y)`` where rows are ``X`` and columns ``Y``."""
    p = _table(joint)
    return float(max(shannon_entropy(p) - shannon_entropy(p.sum(axis=0)), 0.0))


def conditional_mutual_information(joint: np.ndarray) -> float:
    """
    ``I(X; Z | Y)`` of a three-way table ``p[x, y, z]``.
    """
    p = np.asarray(joint, dtype=float)
    value = (
        shannon_entropy(p.sum(axis=2))
        + shannon_entropy(p.sum(axis=0))
        - shannon_entropy(p.sum(axis=(0, 2)))
        - shannon_entropy(p)
    )
    return float(max(value, 0.0))


@dataclass(frozen=True)
class EntropyReport:
    """
    Shannon, collision and min-entropy of one distribution (bits) with a
    smoothing parameter and the smoothed min-entropy lower bound it gives.
    """

    shannon: float
    collision: float
    min_entropy: float
    smoothing: float = 1.0
    smoothed_bound: float = 0.0

    def __post_init__(self):
        slack = 1e-9
        if not (self.min_entropy <= self.collision + slack <= self.shannon + 2 * slack):
            raise DomainError(
                f"Entropy ordering violated: {self.min_entropy} <= {self.collision} <= {self.shannon}."
            )


def entropy_report(dist: Distribution, theta: float = 0.0) -> EntropyReport:
    h2 = collision_entropy(dist)
    eps, bound = smoothed_minentropy_lower_bound(h2, theta)
    return EntropyReport(shannon_entropy(dist), h2, min_entropy(dist), eps, bound)


def smoothed_minentropy_lower_bound(h2: float, theta: float) -> Tuple[float, float]:
    """``(2^-theta, h2 - theta)``: the smoothing and the bound it buys."""
    if theta < 0:
        raise DomainError(f"theta must be >= 0, got {theta}.")
    return float(2.0 ** -theta), float(h2 - theta)


def binary_entropy(p: float) -> float:
    if not 0 <= p <= 1:
        raise DomainError(f"Binary entropy needs 0 <= p <= 1, got {p}.")
    return eta(p) + eta(1 - p)


def binary_entropy_derivative(p: float) -> float:
    """``lg((1 - p) / p)``"""
    if not 0 < p < 1:
        raise DomainError(f"Derivative of h is undefined at p={p}.")
    return float(np.log2((1 - p) / p))


def eta(x: float) -> float:
    """``-x lg x`` with ``eta(0) = 0``."""
    if not 0 <= x <= 1:
        raise DomainError(f"eta needs 0 <= x <= 1, got {x}.")
    if x <= ZERO_PROB:
        return 0.0
    return float(-x * np.log2(x))


def discretization_penalty(q: int, n: int, epsilon: float) -> float:
    """
    Largest change of mutual information when every measurement of a
    strategy moves by at most ``epsilon``: ``2 q n^2 eps + 2 eta(q n eps)``.
    """
    if not 0 < epsilon <= 1 / (q * n * np.e):
        raise EpsilonTooLarge(
            f"epsilon={epsilon} must lie in (0, 1/(q n e)] = (0, {1 / (q * n * np.e):.6g}]."
        )
    return float(2 * q * n ** 2 * epsilon + 2 * eta(q * n * epsilon))


def success_to_info_bound(eps: float, nb: int) -> float:
    """
    Mutual information guaranteed by a guessing procedure that fails with
    probability ``eps`` on ``nb`` uniform bits: ``(1 - 5 sqrt(eps)) nb - eta(2 sqrt(eps))``.
    """
    if eps < 0 or 2 * np.sqrt(eps) + 2.0 ** -nb > 1 / np.e:
        raise PreconditionViolated(
            f"Need 2 sqrt(eps) + 2^-nb <= 1/e; got eps={eps}, nb={nb}."
        )
    root = np.sqrt(eps)
    return float((1 - 5 * root) * nb - eta(2 * root))


def uncertainty_check(projector: np.ndarray) -> float:
    """
    ``H(R0) + H(R1)`` for a rank-1 state measured in the computational and
    the Hadamard basis.
    """
    op = np.asarray(projector, dtype=complex)
    vals = np.linalg.eigvalsh((op + op.conj().T) / 2)
    if vals[0] > EIGEN_CUTOFF or vals[1] <= EIGEN_CUTOFF:
        raise NotRank1("Uncertainty check needs a rank-1 operator.")
    rho = op / np.trace(op).real
    p0 = float(np.clip(rho[0, 0].real, 0, 1))
    plus = float(np.clip((0.5 * (rho[0, 0] + rho[0, 1] + rho[1, 0] + rho[1, 1])).real, 0, 1))
    return binary_entropy(p0) + binary_entropy(plus)
