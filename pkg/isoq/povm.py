#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Single-qubit POVMs, the rank-1 refinement of general POVMs and the
distance used to compare measurements.
"""

from dataclasses import dataclass
from typing import Sequence, Tuple, List

import numpy as np

from isoq.exceptions import NotAPovm, NotRank1, DimensionMismatch, InvalidQ
from isoq.qubit import (
    EIGEN_CUTOFF,
    HERMITIAN_TOL,
    pauli_coordinates,
    operator_norm_2x2,
)


@dataclass(frozen=True, eq=False)
class Povm:
    """
    A single-qubit POVM with ``q >= 2`` outcomes.

    Attributes
    ----------
    elements : np.ndarray
        Complex array ``(q, 2, 2)`` of PSD operators summing to the identity.
    """

    elements: np.ndarray

    def __post_init__(self):
        els = np.array(self.elements, dtype=complex)
        if els.ndim != 3 or els.shape[1:] != (2, 2):
            raise DimensionMismatch(f"Expected (q, 2, 2) elements, got {els.shape}.")
        if els.shape[0] < 2:
            raise InvalidQ(f"A POVM needs at least two outcomes, got {els.shape[0]}.")
        if np.abs(els - els.conj().transpose(0, 2, 1)).max() > HERMITIAN_TOL:
            raise NotAPovm("POVM elements must be Hermitian.")
        if np.linalg.eigvalsh(els).min() < -EIGEN_CUTOFF:
            raise NotAPovm("POVM elements must be positive semidefinite.")
        if np.abs(els.sum(axis=0) - np.eye(2)).max() > HERMITIAN_TOL:
            raise NotAPovm("POVM elements do not sum to the identity.")
        els.setflags(write=False)
        object.__setattr__(self, "elements", els)

    @property
    def q(self) -> int:
        return self.elements.shape[0]

    def probabilities(self, vector: np.ndarray) -> np.ndarray:
        return np.einsum("i,kij,j->k", np.conj(vector), self.elements, vector).real

    def same_as(self, other: "Povm", tol: float = 1e-12) -> bool:
        """Entrywise equality within ``tol``."""
        return (
            self.elements.shape == other.elements.shape
            and bool(np.abs(self.elements - other.elements).max() <= tol)
        )


class Rank1Povm(Povm):
    """A POVM whose elements all have numerical rank at most one."""

    def __post_init__(self):
        super().__post_init__()
        if np.linalg.eigvalsh(self.elements)[:, 0].max() > EIGEN_CUTOFF:
            raise NotRank1("Every element of a rank-1 POVM must have rank <= 1.")


def projector_from_bloch(r: np.ndarray) -> np.ndarray:
    """``(I + r.sigma) / 2`` for unit vectors ``r`` (stacks allowed)."""
    r = np.asarray(r, dtype=float)
    x, y, z = r[..., 0], r[..., 1], r[..., 2]
    out = np.empty(r.shape[:-1] + (2, 2), dtype=complex)
    out[..., 0, 0] = (1 + z) / 2
    out[..., 1, 1] = (1 - z) / 2
    out[..., 0, 1] = (x - 1j * y) / 2
    out[..., 1, 0] = (x + 1j * y) / 2
    return out


def projective_povm(vector: Sequence[complex]) -> Rank1Povm:
    """The basis measurement ``{|phi><phi|, I - |phi><phi|}``."""
    v = np.asarray(vector, dtype=complex)
    v = v / np.linalg.norm(v)
    p = np.outer(v, v.conj())
    return Rank1Povm(np.stack([p, np.eye(2) - p]))


def computational_povm() -> Rank1Povm:
    return projective_povm([1, 0])


def povm_distance(a: Povm, b: Povm) -> float:
    """Largest operator-norm distance between corresponding elements."""
    if a.q != b.q:
        raise DimensionMismatch(f"Cannot compare {a.q}- and {b.q}-outcome POVMs.")
    return float(operator_norm_2x2(a.elements - b.elements).max())


def random_rank1_povm(q: int, rng: np.random.Generator) -> Rank1Povm:
    """
    Random rank-1 POVM from the rows of a Haar-random ``q x 2`` isometry.
    """
    if q < 2:
        raise InvalidQ(f"q must be >= 2, got {q}.")
    g = rng.normal(size=(q, 2)) + 1j * rng.normal(size=(q, 2))
    iso, _ = np.linalg.qr(g)
    elements = np.einsum("ia,ib->iab", iso.conj(), iso)
    return Rank1Povm(_symmetrize(elements))


def random_povm(q: int, rng: np.random.Generator) -> Povm:
    """Random full-rank POVM ``S^-1/2 A_i S^-1/2`` from random PSD ``A_i``."""
    if q < 2:
        raise InvalidQ(f"q must be >= 2, got {q}.")
    g = rng.normal(size=(q, 2, 2)) + 1j * rng.normal(size=(q, 2, 2))
    a = g @ g.conj().transpose(0, 2, 1)
    vals, vecs = np.linalg.eigh(a.sum(axis=0))
    inv_root = (vecs / np.sqrt(vals)) @ vecs.conj().T
    return Povm(_symmetrize(inv_root @ a @ inv_root))


def _symmetrize(ops: np.ndarray) -> np.ndarray:
    return (ops + ops.conj().transpose(0, 2, 1)) / 2


@dataclass(frozen=True)
class RefinementPiece:
    """
    One piece of a refined POVM element: ``weight * I`` when ``kind`` is
    ``"identity"``, otherwise ``weight * |phi><phi|``.
    """

    origin: int
    kind: str
    weight: float
    vector: Tuple[complex, complex] = (1 + 0j, 0j)

    @property
    def operator(self) -> np.ndarray:
        if self.kind == "identity":
            return self.weight * np.eye(2, dtype=complex)
        v = np.asarray(self.vector, dtype=complex)
        return self.weight * np.outer(v, v.conj())


@dataclass(frozen=True)
class Refinement:
    """
    Randomized refinement of a POVM into identity and rank-1 pieces.

    Merging the pieces of each original outcome (``coarse_grain``)
    reproduces the original outcome distribution.
    """

    q: int
    pieces: Tuple[RefinementPiece, ...]

    def operators(self) -> np.ndarray:
        return np.stack([p.operator for p in self.pieces])

    def coarse_grain(self, probs: np.ndarray) -> np.ndarray:
        """Sum piece probabilities (last axis) back onto the original outcomes."""
        probs = np.asarray(probs)
        out = np.zeros(probs.shape[:-1] + (self.q,))
        for j, piece in enumerate(self.pieces):
            out[..., piece.origin] += probs[..., j]
        return out

    def to_rank1(self) -> Tuple[Rank1Povm, Tuple[int, ...]]:
        """
        Rank-1 POVM realizing the refinement, with the original outcome of
        each of its elements. Identity pieces are split along the
        computational basis.
        """
        ops: List[np.ndarray] = list()
        origins: List[int] = list()
        for piece in self.pieces:
            if piece.kind == "identity":
                for basis in np.eye(2, dtype=complex):
                    ops.append(piece.weight * np.outer(basis, basis))
                    origins.append(piece.origin)
            else:
                ops.append(piece.operator)
                origins.append(piece.origin)
        if len(ops) == 1:
            # a single identity-like piece cannot happen for a valid POVM
            raise NotAPovm("Refinement produced a single outcome.")
        return Rank1Povm(_symmetrize(np.stack(ops))), tuple(origins)


def rank1_reduce(povm: Povm, tol: float = EIGEN_CUTOFF) -> Refinement:
    """
    Split every element ``M`` as ``alpha I + beta |phi><phi|``, with
    ``alpha`` the smaller eigenvalue of ``M``; zero pieces are dropped.
    """
    if not isinstance(povm, Povm):
        povm = Povm(np.asarray(povm))
    pieces: List[RefinementPiece] = list()
    for index, element in enumerate(povm.elements):
        vals, vecs = np.linalg.eigh(element)
        alpha = max(float(vals[0]), 0.0)
        beta = float(vals[1]) - alpha
        if alpha > tol:
            pieces.append(RefinementPiece(index, "identity", alpha))
        if beta > tol:
            phi = vecs[:, 1]
            # fix the global phase so the first nonzero amplitude is real
            pivot = phi[0] if abs(phi[0]) > 1e-12 else phi[1]
            phi = phi * np.conj(pivot) / abs(pivot)
            pieces.append(
                RefinementPiece(index, "rank1", beta, (complex(phi[0]), complex(phi[1])))
            )
    return Refinement(povm.q, tuple(pieces))


def element_weights(povm: Povm) -> np.ndarray:
    """Traces of the elements; for rank-1 elements the nonzero eigenvalue."""
    return 2 * pauli_coordinates(povm.elements)[:, 0]
