#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Exact linear algebra for single qubits, product states, Gram matrices
and reduced density operators.

Product states are kept as an ``(n, 2)`` array of amplitude pairs; dense
``2**n`` dimensional objects are only built on request and never above
:data:`MAX_DENSE_QUBITS` qubits.
"""

from dataclasses import dataclass, field
from typing import Sequence, Tuple, Optional, Union, Iterable

import numpy as np
import pandas as pd

from isoq.exceptions import (
    IndexOutOfRange,
    DimensionMismatch,
    DimensionTooLarge,
    DomainError,
    ProbabilityError,
    NotNormalized,
    NotHermitian,
    NotRank1,
)


NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-10
EIGEN_CUTOFF = 1e-10
CLAMP_TOL = 1e-12
SUM_TOL = 1e-9
MAX_DENSE_QUBITS = 14

SQRT_HALF = np.sqrt(0.5)

# |0>, |+>, |->, |1> indexed by the two-bit code 2 * b1 + b2
ALPHA_AMPLITUDES = np.array(
    [[1.0, 0.0], [SQRT_HALF, SQRT_HALF], [SQRT_HALF, -SQRT_HALF], [0.0, 1.0]],
    dtype=complex,
)

PAULI = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


def clamp_probability(value: float, tol: float = CLAMP_TOL) -> float:
    """
    Clamp a computed probability into [0, 1].

    Values within ``tol`` outside the interval are float noise and get
    clamped; anything further out raises :class:`ProbabilityError`.
    """
    if value < -tol or value > 1 + tol or not np.isfinite(value):
        raise ProbabilityError(f"Probability {value!r} is outside [0, 1].")
    return float(min(max(value, 0.0), 1.0))


def clamp_probabilities(values: np.ndarray, tol: float = CLAMP_TOL) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.size and (
        (values < -tol).any() or (values > 1 + tol).any() or not np.isfinite(values).all()
    ):
        bad = values[(values < -tol) | (values > 1 + tol)]
        raise ProbabilityError(f"Probabilities outside [0, 1]: {bad[:5]}")
    return np.clip(values, 0.0, 1.0)


@dataclass(frozen=True)
class SingleQubitState:
    """
    A normalized single-qubit pure state ``amp0 |0> + amp1 |1>``.
    """

    amp0: complex
    amp1: complex

    def __post_init__(self):
        norm = abs(self.amp0) ** 2 + abs(self.amp1) ** 2
        if abs(norm - 1) > NORM_TOL:
            raise NotNormalized(f"Squared norm is {norm!r}, expected 1.")

    @classmethod
    def from_vector(cls, vector: Sequence[complex]) -> "SingleQubitState":
        return cls(complex(vector[0]), complex(vector[1]))

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.amp0, self.amp1], dtype=complex)

    @property
    def projector(self) -> np.ndarray:
        v = self.vector
        return np.outer(v, v.conj())

    def inner(self, other: "SingleQubitState") -> complex:
        """<self|other>"""
        return complex(np.vdot(self.vector, other.vector))

    def bloch(self) -> np.ndarray:
        return pauli_coordinates(self.projector)[1:] * 2


def alpha_state(bits: Union[int, str]) -> SingleQubitState:
    """
    Conjugate-coding state for a two-bit code.

    ``00``, ``01``, ``10`` and ``11`` (or the integers 0 to 3) map to
    ``|0>``, ``|+>``, ``|->`` and ``|1>``.
    """
    code = int(bits, 2) if isinstance(bits, str) else int(bits)
    if not 0 <= code <= 3:
        raise IndexOutOfRange(f"Two-bit code {bits!r} is not in 00..11.")
    return SingleQubitState.from_vector(ALPHA_AMPLITUDES[code])


def beta_state(phi: float) -> SingleQubitState:
    """``cos(phi)|0> + sin(phi)|1>``"""
    if not np.isfinite(phi):
        raise ValueError("Angle must be finite.")
    return SingleQubitState(complex(np.cos(phi)), complex(np.sin(phi)))


@dataclass(frozen=True, eq=False)
class ProductState:
    """
    An n-qubit product of pure single-qubit states.

    Attributes
    ----------
    amplitudes : np.ndarray
        Complex array of shape ``(n, 2)``; row ``a`` holds qubit ``a``.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim != 2 or amps.shape[1] != 2 or amps.shape[0] < 1:
            raise DimensionMismatch(
                f"Expected an (n, 2) amplitude array, got shape {amps.shape}."
            )
        norms = (np.abs(amps) ** 2).sum(axis=1)
        if np.abs(norms - 1).max() > NORM_TOL:
            raise NotNormalized("Every qubit of a product state must be normalized.")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_qubits(cls, qubits: Sequence[SingleQubitState]) -> "ProductState":
        return cls(np.array([q.vector for q in qubits]))

    @property
    def n(self) -> int:
        return self.amplitudes.shape[0]

    def qubit(self, index: int) -> SingleQubitState:
        if not 0 <= index < self.n:
            raise IndexOutOfRange(f"Qubit {index} outside a {self.n}-qubit state.")
        return SingleQubitState.from_vector(self.amplitudes[index])

    def __len__(self):
        return self.n


@dataclass(frozen=True, eq=False)
class HermitianOp:
    """
    A Hermitian operator on ``dim`` dimensions, dim a power of two.
    """

    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"Expected a square matrix, got {m.shape}.")
        dim = m.shape[0]
        if dim < 1 or dim & (dim - 1):
            raise DimensionMismatch(f"Dimension {dim} is not a power of two.")
        if dim and np.abs(m - m.conj().T).max() > HERMITIAN_TOL:
            raise NotHermitian("Operator differs from its conjugate transpose.")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def is_psd(self, tol: float = EIGEN_CUTOFF) -> bool:
        return bool(self.eigenvalues().min() >= -tol)

    def __array__(self, dtype=None):
        return self.entries if dtype is None else self.entries.astype(dtype)


@dataclass(frozen=True, eq=False)
class DistributionTable:
    """
    A finite probability distribution with labelled support.

    Probabilities must sum to one within :data:`SUM_TOL`; entries within
    :data:`CLAMP_TOL` below zero are clamped to zero.
    """

    labels: Tuple
    probs: np.ndarray

    def __post_init__(self):
        probs = clamp_probabilities(np.asarray(self.probs, dtype=float).ravel())
        labels = tuple(self.labels)
        if len(labels) != probs.size:
            raise DimensionMismatch(
                f"{len(labels)} labels for {probs.size} probabilities."
            )
        if abs(probs.sum() - 1) > SUM_TOL:
            raise ProbabilityError(f"Probabilities sum to {probs.sum()!r}.")
        probs.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform(cls, size: int) -> "DistributionTable":
        return cls(tuple(range(size)), np.full(size, 1.0 / size))

    @classmethod
    def from_counts(cls, labels: Sequence, weights: Sequence[float]) -> "DistributionTable":
        weights = np.asarray(weights, dtype=float)
        return cls(tuple(labels), weights / weights.sum())

    def __len__(self):
        return len(self.labels)

    def __getitem__(self, label) -> float:
        return float(self.probs[self.labels.index(label)])

    def to_series(self) -> pd.Series:
        return pd.Series(self.probs, index=list(self.labels), name="probability")


@dataclass(frozen=True, eq=False)
class JointTable:
    """
    Joint law of a pair of discrete variables.

    ``probs[i, j]`` is the probability of ``(row_labels[i], col_labels[j])``.
    """

    row_labels: Tuple
    col_labels: Tuple
    probs: np.ndarray

    def __post_init__(self):
        probs = clamp_probabilities(np.asarray(self.probs, dtype=float))
        if probs.shape != (len(self.row_labels), len(self.col_labels)):
            raise DimensionMismatch(
                f"Table of shape {probs.shape} does not match its labels."
            )
        if abs(probs.sum() - 1) > SUM_TOL:
            raise ProbabilityError(f"Joint probabilities sum to {probs.sum()!r}.")
        probs.setflags(write=False)
        object.__setattr__(self, "row_labels", tuple(self.row_labels))
        object.__setattr__(self, "col_labels", tuple(self.col_labels))
        object.__setattr__(self, "probs", probs)

    def row_marginal(self) -> DistributionTable:
        return DistributionTable(self.row_labels, self.probs.sum(axis=1))

    def col_marginal(self) -> DistributionTable:
        return DistributionTable(self.col_labels, self.probs.sum(axis=0))

    def flatten(self) -> DistributionTable:
        labels = [(r, c) for r in self.row_labels for c in self.col_labels]
        return DistributionTable(labels, self.probs.ravel())

    def transpose(self) -> "JointTable":
        return JointTable(self.col_labels, self.row_labels, self.probs.T)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            self.probs, index=list(self.row_labels), columns=list(self.col_labels)
        )


@dataclass(frozen=True, eq=False)
class OutcomeRecord:
    """
    A product outcome ``M_A``: one rank-1 operator per measured qubit.

    Attributes
    ----------
    subset : tuple of int
        The measured qubits ``A`` in increasing order.
    operators : np.ndarray
        Array of shape ``(|A|, 2, 2)``; entry ``i`` acts on ``subset[i]``.
    """

    subset: Tuple[int, ...]
    operators: np.ndarray = field(default_factory=lambda: np.zeros((0, 2, 2), complex))

    def __post_init__(self):
        ops = np.array(self.operators, dtype=complex).reshape(-1, 2, 2)
        subset = tuple(int(a) for a in self.subset)
        if len(subset) != ops.shape[0]:
            raise DimensionMismatch(
                f"{len(subset)} qubits but {ops.shape[0]} operators."
            )
        if len(set(subset)) != len(subset):
            raise DimensionMismatch("An outcome names the same qubit twice.")
        for op in ops:
            if np.abs(op - op.conj().T).max() > HERMITIAN_TOL:
                raise NotHermitian("Outcome operator is not Hermitian.")
            ev = np.linalg.eigvalsh(op)
            if ev[0] < -EIGEN_CUTOFF or ev[1] > 1 + EIGEN_CUTOFF:
                raise ProbabilityError(f"Outcome operator eigenvalues {ev}.")
            if ev[0] > EIGEN_CUTOFF:
                raise NotRank1("Outcome operators must have rank at most one.")
        ops.setflags(write=False)
        object.__setattr__(self, "subset", subset)
        object.__setattr__(self, "operators", ops)

    @property
    def size(self) -> int:
        return len(self.subset)

    def trace(self) -> float:
        return float(np.prod([np.trace(op).real for op in self.operators]))


def pauli_coordinates(op: np.ndarray) -> np.ndarray:
    """
    Real coordinates ``(c0, cx, cy, cz)`` with ``op = c0 I + c.sigma``.

    Works on stacks: the last two axes are the 2x2 matrix.
    """
    op = np.asarray(op, dtype=complex)
    return np.einsum("kji,...ij->...k", PAULI, op).real / 2


def from_pauli(coords: np.ndarray) -> np.ndarray:
    coords = np.asarray(coords, dtype=float)
    return np.einsum("...k,kij->...ij", coords.astype(complex), PAULI)


def operator_norm_2x2(op: np.ndarray) -> np.ndarray:
    """Operator norm of Hermitian 2x2 matrices: ``|c0| + |c|``."""
    c = pauli_coordinates(op)
    return np.abs(c[..., 0]) + np.linalg.norm(c[..., 1:], axis=-1)


def expectation_table(vectors: np.ndarray, operators: np.ndarray) -> np.ndarray:
    """
    ``<v_u|M_i|v_u>`` for a stack of vectors ``(U, 2)`` and operators
    ``(..., 2, 2)``; result has shape ``(U, ...)``.
    """
    return np.einsum(
        "ui,...ij,uj->u...", np.conj(vectors), operators, vectors, optimize=True
    ).real


def product_expectation(state: ProductState, outcome: OutcomeRecord) -> float:
    """
    Probability weight ``Tr(M_A rho_A)`` of a product outcome on a product state.
    """
    if outcome.size == 0:
        return 1.0
    if max(outcome.subset) >= state.n or min(outcome.subset) < 0:
        raise IndexOutOfRange(
            f"Outcome on qubits {outcome.subset} but the state has {state.n} qubits."
        )
    vecs = state.amplitudes[list(outcome.subset)]
    values = np.einsum("ai,aij,aj->a", vecs.conj(), outcome.operators, vecs).real
    return clamp_probability(float(np.prod(values)))


def _check_dense(n: int) -> None:
    if n > MAX_DENSE_QUBITS:
        raise DimensionTooLarge(
            f"{n} qubits needs a 2^{n} dimensional operator;"
            f" the limit is {MAX_DENSE_QUBITS}."
        )


def kron_vectors(vectors: Iterable[np.ndarray]) -> np.ndarray:
    out = np.ones(1, dtype=complex)
    for v in vectors:
        out = np.kron(out, v)
    return out


def dense_state(state: ProductState, subset: Optional[Sequence[int]] = None) -> np.ndarray:
    """State vector of the qubits in ``subset`` (all by default), qubit 0 leftmost."""
    subset = range(state.n) if subset is None else subset
    subset = list(subset)
    _check_dense(len(subset))
    return kron_vectors(state.amplitudes[a] for a in subset)


def dense_outcome(outcome: OutcomeRecord, n: int) -> np.ndarray:
    """The ``2**n`` dimensional operator ``M_A (x) I``."""
    _check_dense(n)
    ops = [np.eye(2, dtype=complex)] * n
    for a, op in zip(outcome.subset, outcome.operators):
        if a >= n:
            raise IndexOutOfRange(f"Qubit {a} outside {n} qubits.")
        ops[a] = op
    out = np.ones((1, 1), dtype=complex)
    for op in ops:
        out = np.kron(out, op)
    return out


def _stack(states: Sequence[ProductState]) -> np.ndarray:
    if len(states) == 0:
        raise DimensionMismatch("Empty state family.")
    sizes = {s.n for s in states}
    if len(sizes) != 1:
        raise DimensionMismatch(f"States have different lengths: {sorted(sizes)}.")
    return np.stack([s.amplitudes for s in states])


def overlap_matrix(amplitudes: np.ndarray, subset: Optional[Sequence[int]] = None) -> np.ndarray:
    """
    Pairwise inner products ``<u|v>`` of product states given as a
    ``(U, n, 2)`` amplitude stack, restricted to ``subset`` qubits.
    """
    if subset is not None:
        amplitudes = amplitudes[:, list(subset), :]
    if amplitudes.shape[1] == 0:
        return np.ones((amplitudes.shape[0],) * 2, dtype=complex)
    per_qubit = np.einsum("uai,vai->uva", amplitudes.conj(), amplitudes)
    return per_qubit.prod(axis=-1)


def gram_matrix(states: Sequence[ProductState]) -> HermitianOp:
    """``G[u, v] = <E(u)|E(v)>`` from per-qubit inner products."""
    return HermitianOp(overlap_matrix(_stack(states)))


def _weights(weights: Union[DistributionTable, np.ndarray], size: int) -> np.ndarray:
    w = weights.probs if isinstance(weights, DistributionTable) else np.asarray(weights, float)
    if w.size != size:
        raise DimensionMismatch(f"{w.size} weights for {size} states.")
    return w


def reduced_density(
    states: Sequence[ProductState],
    weights: Union[DistributionTable, np.ndarray],
    subset: Sequence[int],
) -> HermitianOp:
    """
    ``rho_A`` of the mixture ``sum_u w_u |E(u)><E(u)|`` on the qubits ``subset``.
    """
    amps = _stack(states)
    w = _weights(weights, amps.shape[0])
    subset = sorted(set(subset))
    if subset and (subset[-1] >= amps.shape[1] or subset[0] < 0):
        raise IndexOutOfRange(f"Subset {subset} outside {amps.shape[1]} qubits.")
    _check_dense(len(subset))
    vecs = np.stack([kron_vectors(a[subset]) for a in amps])
    rho = (vecs * w[:, None]).T @ vecs.conj()
    return HermitianOp((rho + rho.conj().T) / 2)


def von_neumann_entropy(rho: Union[HermitianOp, np.ndarray]) -> float:
    """Entropy in bits; eigenvalues under :data:`EIGEN_CUTOFF` count as zero."""
    ev = np.linalg.eigvalsh(np.asarray(rho))
    ev = ev[ev > EIGEN_CUTOFF]
    return float(max(-(ev * np.log2(ev)).sum(), 0.0))


def mixture_entropy(amplitudes: np.ndarray, weights: np.ndarray, subset: Sequence[int]) -> float:
    """
    Entropy of ``sum_u w_u |u_A><u_A|`` for pure product states.

    The nonzero spectrum equals that of the weighted Gram matrix
    ``sqrt(w_u w_v) <u_A|v_A>``, which is used whenever it is smaller
    than ``2**|A|``.
    """
    subset = list(subset)
    keep = weights > 0
    amplitudes, weights = amplitudes[keep], weights[keep]
    if len(weights) <= 2 ** len(subset):
        root = np.sqrt(weights)
        gram = overlap_matrix(amplitudes, subset) * np.outer(root, root)
        return von_neumann_entropy((gram + gram.conj().T) / 2)
    _check_dense(len(subset))
    vecs = np.stack([kron_vectors(a[subset]) for a in amplitudes])
    rho = (vecs * weights[:, None]).T @ vecs.conj()
    return von_neumann_entropy((rho + rho.conj().T) / 2)


def holevo_chi(
    states: Sequence[ProductState],
    prior: Union[DistributionTable, np.ndarray],
    subset: Sequence[int],
) -> float:
    """
    Holevo quantity ``S(sum p_u rho_u) - sum p_u S(rho_u)`` of the reduced
    ensemble on ``subset``, in bits.

    Reduced states of pure product states stay pure, so the second term
    vanishes.
    """
    amps = _stack(states)
    p = _weights(prior, amps.shape[0])
    subset = sorted(set(subset))
    if len(subset) > MAX_DENSE_QUBITS:
        raise DimensionTooLarge(f"Holevo quantity on {len(subset)} qubits.")
    if subset and subset[-1] >= amps.shape[1]:
        raise IndexOutOfRange(f"Subset {subset} outside {amps.shape[1]} qubits.")
    chi = mixture_entropy(amps, p, subset)
    # rounding grows with the number of eigenvalues summed
    tol = CLAMP_TOL * 2 ** len(subset)
    if chi > len(subset) + tol:
        raise DomainError(f"Holevo quantity {chi} exceeds {len(subset)} qubits.")
    return float(min(chi, len(subset)))


def fourth_moment_avg(psi: SingleQubitState) -> float:
    """Average of ``|<psi|alpha>|^4`` over the four conjugate-coding states."""
    overlaps = np.abs(ALPHA_AMPLITUDES.conj() @ psi.vector) ** 4
    return float(overlaps.mean())


def fourth_moment_closed_form(psi: SingleQubitState) -> float:
    return float((2 + abs(psi.amp0 ** 2 + psi.amp1 ** 2) ** 2) / 8)


def mixedness_deviation(
    states: Sequence[ProductState],
    weights: Union[DistributionTable, np.ndarray],
    subset: Sequence[int],
) -> float:
    """Operator-norm distance of ``rho_A`` from ``I / 2**|A|``."""
    rho = reduced_density(states, weights, subset).entries
    dim = rho.shape[0]
    return float(np.abs(np.linalg.eigvalsh(rho - np.eye(dim) / dim)).max())


def random_state(rng: np.random.Generator) -> SingleQubitState:
    """Haar-random single-qubit state."""
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return SingleQubitState.from_vector(v / np.linalg.norm(v))


def random_product_state(n: int, rng: np.random.Generator) -> ProductState:
    v = rng.normal(size=(n, 2)) + 1j * rng.normal(size=(n, 2))
    return ProductState(v / np.linalg.norm(v, axis=1, keepdims=True))
