#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Data-hiding states: random conjugate-coding ensembles, the pretty good
measurement, the discrimination game and collision-entropy quantities.
"""

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, List, Sequence, Tuple, Union
import os

import numpy as np
import pandas as pd

from isoq import _LOGGER
from isoq.entropy import mutual_information
from isoq.exceptions import (
    DimensionMismatch,
    DimensionTooLarge,
    IdentityViolation,
    IndexOutOfRange,
    TooLarge,
    ZeroProbabilityOutcome,
)
from isoq.qubit import (
    ALPHA_AMPLITUDES,
    EIGEN_CUTOFF,
    MAX_DENSE_QUBITS,
    JointTable,
    OutcomeRecord,
    ProductState,
    kron_vectors,
    overlap_matrix,
)
from isoq.strategies import StrategyTree, joint_distribution

IDENTITY_TOL = 1e-9
LG_3_2 = np.log2(1.5)
LG_8_3 = np.log2(8 / 3)
LG_4_3 = np.log2(4 / 3)

# <alpha_c|alpha_c'> for the four conjugate-coding states
ALPHA_OVERLAPS = (ALPHA_AMPLITUDES.conj() @ ALPHA_AMPLITUDES.T).real


@dataclass(frozen=True, eq=False)
class HidingEnsemble:
    """
    The map ``u -> E(u)`` from ``nb``-bit messages to strings of ``n``
    two-bit codes.

    Attributes
    ----------
    table : np.ndarray
        ``uint8`` array ``(2**nb, n)`` of codes 0..3 (``00``..``11``).
    """

    nb: int
    n: int
    table: np.ndarray = field(repr=False)
    seed: int = -1

    def __post_init__(self):
        table = np.asarray(self.table, dtype=np.uint8)
        if table.shape != (2 ** self.nb, self.n):
            raise DimensionMismatch(
                f"Ensemble table of shape {table.shape}, expected {(2 ** self.nb, self.n)}."
            )
        if table.size and table.max() > 3:
            raise IndexOutOfRange("Ensemble codes must lie in 0..3.")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    @property
    def size(self) -> int:
        return 2 ** self.nb

    def amplitudes(self) -> np.ndarray:
        """Amplitude stack ``(2**nb, n, 2)`` of all encoded states."""
        return ALPHA_AMPLITUDES[self.table]

    def states(self) -> List[ProductState]:
        return [ProductState(a) for a in self.amplitudes()]

    def to_frame(self) -> pd.DataFrame:
        codes = np.vectorize(lambda c: format(int(c), "02b"))(self.table)
        return pd.DataFrame(codes, columns=[f"qubit_{a}" for a in range(self.n)])


def sample_ensemble(nb: int, n: int, seed: Union[int, np.random.Generator]) -> HidingEnsemble:
    """Every entry uniform over the four codes, independently."""
    if nb > MAX_DENSE_QUBITS or n > MAX_DENSE_QUBITS or nb < 0 or n < 1:
        raise TooLarge(f"Ensemble with nb={nb}, n={n} outside the supported sizes.")
    if isinstance(seed, np.random.Generator):
        rng, recorded = seed, -1
    else:
        rng, recorded = np.random.default_rng(int(seed)), int(seed)
    table = rng.integers(0, 4, size=(2 ** nb, n), dtype=np.uint8)
    return HidingEnsemble(nb, n, table, recorded)


def encode_hiding(ensemble: HidingEnsemble, u: int) -> ProductState:
    if not 0 <= u < ensemble.size:
        raise IndexOutOfRange(f"Message {u} outside 0..{ensemble.size - 1}.")
    return ProductState(ALPHA_AMPLITUDES[ensemble.table[u]])


def hiding_gram(ensemble: HidingEnsemble) -> np.ndarray:
    """Gram matrix from the 4x4 table of code overlaps."""
    t = ensemble.table
    return ALPHA_OVERLAPS[t[:, None, :], t[None, :, :]].prod(axis=-1)


def gram_frobenius(gram: np.ndarray) -> float:
    """``||G - I||_F``"""
    return float(np.linalg.norm(gram - np.eye(len(gram))))


def expected_gram_offdiag(n: int, nb: int) -> float:
    """Mean of ``||G - I||_F^2`` over random ensembles: ``2^nb (2^nb - 1) 2^-n``."""
    return float(2.0 ** nb * (2.0 ** nb - 1) * 2.0 ** -n)


def _gram_of(family: Union[HidingEnsemble, Sequence[ProductState]]) -> np.ndarray:
    if isinstance(family, HidingEnsemble):
        return hiding_gram(family)
    amps = np.stack([s.amplitudes for s in family])
    return overlap_matrix(amps)


def _sqrt_psd(gram: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh((gram + gram.conj().T) / 2)
    return (vecs * np.sqrt(np.clip(vals, 0, None))) @ vecs.conj().T


def pgm_success(family: Union[HidingEnsemble, Sequence[ProductState]]) -> Tuple[float, float]:
    """
    Success probability of the pretty good measurement under a uniform
    prior, ``N^-1 sum_u ((sqrt G)_uu)^2``, and the Gram lower bound
    ``1 - 2 N^-1/2 ||G - I||_F``.
    """
    gram = _gram_of(family)
    size = len(gram)
    root = _sqrt_psd(gram)
    success = float(np.clip((np.abs(np.diag(root)) ** 2).sum() / size, 0, 1))
    bound = 1 - 2 * size ** -0.5 * gram_frobenius(gram)
    return success, float(bound)


def gram_sqrt_bound(family: Union[HidingEnsemble, Sequence[ProductState]]) -> float:
    """``(Tr sqrt(G) / N)^2``, never above the PGM success probability."""
    gram = _gram_of(family)
    return float((np.trace(_sqrt_psd(gram)).real / len(gram)) ** 2)


def pgm_joint(family: Union[HidingEnsemble, Sequence[ProductState]]) -> JointTable:
    """Joint law of (message, PGM guess): ``N^-1 |(sqrt G)_zu|^2``."""
    gram = _gram_of(family)
    size = len(gram)
    root = _sqrt_psd(gram)
    probs = (np.abs(root) ** 2).T / size
    labels = tuple(range(size))
    return JointTable(labels, labels, probs / probs.sum())


def pgm_information(family: Union[HidingEnsemble, Sequence[ProductState]]) -> float:
    return mutual_information(pgm_joint(family))


@dataclass(frozen=True, eq=False)
class PrettyGoodMeasurement:
    """
    Dense PGM vectors ``|M(z)> = (sum_u |E(u)><E(u)|)^-1/2 |E(z)>`` as the
    columns of ``vectors``, with the projector onto the ensemble support.
    """

    vectors: np.ndarray
    support: np.ndarray

    def operator(self, z: int) -> np.ndarray:
        v = self.vectors[:, z]
        return np.outer(v, v.conj())

    def operators(self) -> np.ndarray:
        return np.einsum("iz,jz->zij", self.vectors, self.vectors.conj())

    def completeness_residual(self) -> float:
        total = self.vectors @ self.vectors.conj().T
        return float(np.abs(np.linalg.eigvalsh(total - self.support)).max())

    def conditional(self, states: np.ndarray) -> np.ndarray:
        """``Pr[z | u]`` for dense state vectors given as columns."""
        return np.abs(self.vectors.conj().T @ states).T ** 2


def pgm_build(family: Union[HidingEnsemble, Sequence[ProductState]]) -> PrettyGoodMeasurement:
    """
    Dense pretty good measurement, ``rho^-1/2`` taken on the support of
    ``rho`` (eigenvalues of ``rho`` below the cutoff discarded).
    """
    if isinstance(family, HidingEnsemble):
        amps = family.amplitudes()
    else:
        amps = np.stack([s.amplitudes for s in family])
    n = amps.shape[1]
    if n > MAX_DENSE_QUBITS:
        raise DimensionTooLarge(f"PGM on {n} qubits; the limit is {MAX_DENSE_QUBITS}.")
    size = amps.shape[0]
    psi = np.stack([kron_vectors(a) for a in amps], axis=1)
    left, sigma, right_h = np.linalg.svd(psi, full_matrices=False)
    keep = sigma ** 2 / size > EIGEN_CUTOFF
    left, right_h = left[:, keep], right_h[keep]
    vectors = left @ right_h
    _LOGGER.debug(f"PGM on {n} qubits with support of rank {int(keep.sum())}.")
    return PrettyGoodMeasurement(vectors, left @ left.conj().T)


def discrimination_game(ensemble: HidingEnsemble, strategy: StrategyTree) -> float:
    """``I(Z; U)`` for a uniform message and the outcomes ``Z`` of ``strategy``."""
    if strategy.max_qubit >= ensemble.n:
        raise IndexOutOfRange(
            f"Strategy measures qubit {strategy.max_qubit} of {ensemble.n}."
        )
    return mutual_information(joint_distribution(strategy, ensemble.states()))


def computational_conditional_entropy(ensemble: HidingEnsemble) -> float:
    """
    ``H(Z | U)`` of the all-computational strategy: every ``01`` or ``10``
    entry gives one uniformly random bit, the others none.
    """
    mixed = np.isin(ensemble.table, (1, 2)).sum()
    return float(mixed / ensemble.size)


def outcome_likelihoods(amplitudes: np.ndarray, outcome: OutcomeRecord) -> np.ndarray:
    """``Pr[M_A | u]`` for every state of an amplitude stack."""
    if outcome.size == 0:
        return np.ones(amplitudes.shape[0])
    if max(outcome.subset) >= amplitudes.shape[1]:
        raise IndexOutOfRange(f"Outcome on qubits {outcome.subset} of {amplitudes.shape[1]}.")
    vecs = amplitudes[:, list(outcome.subset), :]
    values = np.einsum("uai,aij,uaj->ua", vecs.conj(), outcome.operators, vecs).real
    return np.clip(values, 0, None).prod(axis=1)


def _kron_rows(stack: np.ndarray) -> np.ndarray:
    """Row-wise tensor products of a ``(rows, m, 2)`` stack, first qubit leftmost."""
    out = np.ones((stack.shape[0], 1), dtype=complex)
    for a in range(stack.shape[1]):
        out = (out[:, :, None] * stack[:, a, None, :]).reshape(stack.shape[0], -1)
    return out


def outcome_probability(amplitudes: np.ndarray, outcome: OutcomeRecord) -> float:
    """
    ``Pr[M_A]`` under a uniform prior, as ``Tr(M_A rho)`` with ``M_A``
    written as one vector on the measured qubits and ``rho`` the average
    of the restricted product states.
    """
    if outcome.size == 0:
        return 1.0
    if outcome.size > MAX_DENSE_QUBITS:
        raise DimensionTooLarge(
            f"Outcome on {outcome.size} qubits; the limit is {MAX_DENSE_QUBITS}."
        )
    vals, vecs = np.linalg.eigh(outcome.operators)
    factors = np.sqrt(np.clip(vals[:, 1], 0, None))[:, None] * vecs[:, :, 1]
    measure = _kron_rows(factors[None])[0]
    restricted = _kron_rows(amplitudes[:, list(outcome.subset), :])
    return float(np.mean(np.abs(restricted @ measure.conj()) ** 2))


def collision_with_identity(
    likelihood: np.ndarray,
    amplitudes: np.ndarray,
    outcome: OutcomeRecord,
    tol: float = IDENTITY_TOL,
) -> float:
    """
    ``H2`` of the posterior under a uniform prior, checked against
    ``Pr[M_A]^-2 N^-2 (Tr M_A)^2 F`` with ``F = sum_u Pr[M_A|u]^2 / (Tr M_A)^2``.

    ``likelihood`` holds ``Pr[M_A|u]`` from per-qubit factors;
    ``Pr[M_A]`` comes from :func:`outcome_probability` and ``Tr M_A`` from
    the operators of ``outcome``.
    """
    size = likelihood.size
    if size != amplitudes.shape[0]:
        raise DimensionMismatch(f"{size} likelihoods for {amplitudes.shape[0]} states.")
    total = likelihood.sum()
    if total <= 0:
        raise ZeroProbabilityOutcome("Outcome has zero probability on every message.")
    posterior = likelihood / total
    direct = float((posterior ** 2).sum())
    pr = outcome_probability(amplitudes, outcome)
    if pr <= 0:
        raise IdentityViolation("Outcome has zero probability under the averaged state.")
    trace = outcome.trace()
    flat = float((likelihood ** 2).sum() / trace ** 2)
    via_identity = pr ** -2 * size ** -2.0 * trace ** 2 * flat
    if abs(direct - via_identity) > tol:
        raise IdentityViolation(
            f"Collision identity off by {abs(direct - via_identity):.3g}."
        )
    return float(max(-np.log2(direct), 0.0))


def conditional_collision(ensemble: HidingEnsemble, outcome: OutcomeRecord) -> float:
    """``H2(U | M_A)`` from the exact posterior, with the product-form identity verified."""
    amps = ensemble.amplitudes()
    return collision_with_identity(outcome_likelihoods(amps, outcome), amps, outcome)


def collision_minimum(
    amplitudes: np.ndarray, operators: np.ndarray, m: int
) -> Tuple[float, int]:
    """
    Smallest ``H2`` of the uniform-prior posterior over all outcomes with
    ``m`` qubits and one of ``operators`` per qubit, and how many
    outcomes have nonzero probability.
    """
    n = amplitudes.shape[1]
    # (n, K, U) likelihood of every operator on every qubit
    table = np.clip(
        np.einsum("uai,kij,uaj->aku", amplitudes.conj(), operators, amplitudes).real, 0, None
    )
    best, counted = np.inf, 0
    for subset in combinations(range(n), m):
        joint = np.ones((1, amplitudes.shape[0]))
        for a in subset:
            joint = (joint[:, None, :] * table[a][None, :, :]).reshape(-1, amplitudes.shape[0])
        total = joint.sum(axis=1)
        live = total > 1e-15
        counted += int(live.sum())
        if live.any():
            collision = ((joint[live] / total[live, None]) ** 2).sum(axis=1)
            best = min(best, float(-np.log2(collision.max())))
    return max(best, 0.0), counted


def hiding_collision_bound(nb: int, m: int) -> float:
    """``nb - m lg(3/2)``"""
    return float(nb - m * LG_3_2)


def collision_split(nb: int) -> int:
    return int(np.floor(nb / LG_8_3))


def q_outcome_information_cap(n: int, nb: int) -> float:
    """``n - nb lg(4/3) / lg(8/3)``, the cap for q-outcome 1-pass strategies up to lower-order terms."""
    return float(n - nb * LG_4_3 / LG_8_3)


def pgm_confidence_bound(n: int, nb: int, c: float) -> float:
    """
    PGM success guaranteed with probability ``>= 1 - 1/c`` over the ensemble:
    ``1 - 2 sqrt(c) 2^((nb - n)/2)``.
    """
    return float(1 - 2 * np.sqrt(c) * 2.0 ** ((nb - n) / 2))


def max_hidden_bits(n: int, c: float, eps: float) -> int:
    """Largest ``nb`` with ``pgm_confidence_bound >= 1 - eps``."""
    return int(np.floor(n - np.log2(c / eps ** 2) - 2))


def save_ensemble(ensemble: HidingEnsemble, path: Union[str, os.PathLike]) -> None:
    """Header ``nb n seed`` then one row of two-bit codes per message."""
    with open(path, "w") as handle:
        handle.write(f"{ensemble.nb} {ensemble.n} {ensemble.seed}\n")
        for row in ensemble.table:
            handle.write(" ".join(format(int(c), "02b") for c in row) + "\n")


def load_ensemble(path: Union[str, os.PathLike]) -> HidingEnsemble:
    with open(path, "r") as handle:
        nb, n, seed = (int(x) for x in handle.readline().split())
        rows = [line.split() for line in handle if line.strip()]
    table = np.array([[int(c, 2) for c in row] for row in rows], dtype=np.uint8)
    return HidingEnsemble(nb, n, table.reshape(2 ** nb, n), seed)


def all_outcome_collisions(
    ensemble: HidingEnsemble, outcomes: Iterable[OutcomeRecord]
) -> pd.DataFrame:
    """Per-outcome ``H2(U | M_A)`` with the identity check; zero-probability outcomes are skipped."""
    rows = list()
    amps = ensemble.amplitudes()
    for record in outcomes:
        likelihood = outcome_likelihoods(amps, record)
        if likelihood.sum() <= 1e-15:
            continue
        rows.append(
            {
                "subset": ",".join(map(str, record.subset)),
                "probability": likelihood.mean(),
                "collision": collision_with_identity(likelihood, amps, record),
            }
        )
    return pd.DataFrame(rows, columns=["subset", "probability", "collision"])
