import numpy as np
import pytest

from isoq.exceptions import InvalidQ, NotAPovm, NotRank1
from isoq.povm import (
    Povm,
    Rank1Povm,
    computational_povm,
    element_weights,
    povm_distance,
    projective_povm,
    random_povm,
    random_rank1_povm,
    rank1_reduce,
)
from isoq.qubit import random_state


def test_povm_validation():
    with pytest.raises(NotAPovm):
        Povm(np.stack([np.eye(2), np.eye(2)]))
    with pytest.raises(InvalidQ):
        Povm(np.eye(2)[None])
    with pytest.raises(NotRank1):
        Rank1Povm(np.stack([np.eye(2) / 2, np.eye(2) / 2]))


def test_computational_povm_on_plus():
    plus = np.array([1, 1]) / np.sqrt(2)
    assert np.allclose(computational_povm().probabilities(plus), [0.5, 0.5])
    assert np.allclose(element_weights(projective_povm([1, 1j])), [1, 1])


@pytest.mark.parametrize("q", [2, 3, 5])
def test_random_povms_are_valid(rng, q):
    rank1 = random_rank1_povm(q, rng)
    general = random_povm(q, rng)
    assert rank1.q == q and general.q == q
    assert np.allclose(general.elements.sum(axis=0), np.eye(2))
    assert element_weights(rank1).sum() == pytest.approx(2.0)


def test_distance_is_a_metric(rng):
    a, b, c = (random_rank1_povm(3, rng) for _ in range(3))
    assert povm_distance(a, a) == pytest.approx(0, abs=1e-12)
    assert povm_distance(a, b) == pytest.approx(povm_distance(b, a))
    assert povm_distance(a, c) <= povm_distance(a, b) + povm_distance(b, c) + 1e-12


def test_rank1_refinement_reproduces_statistics(rng):
    povm = random_povm(3, rng)
    refinement = rank1_reduce(povm)
    assert np.allclose(refinement.operators().sum(axis=0), np.eye(2))
    psi = random_state(rng).vector
    fine = np.einsum("i,kij,j->k", psi.conj(), refinement.operators(), psi).real
    assert np.allclose(refinement.coarse_grain(fine), povm.probabilities(psi))

    rank1, origins = refinement.to_rank1()
    assert isinstance(rank1, Rank1Povm)
    assert len(origins) == rank1.q
    merged = np.zeros(3)
    np.add.at(merged, list(origins), rank1.probabilities(psi))
    assert np.allclose(merged, povm.probabilities(psi))


def test_projective_povm_refines_to_itself():
    povm = computational_povm()
    refinement = rank1_reduce(povm)
    assert [p.kind for p in refinement.pieces] == ["rank1", "rank1"]


def test_trivial_povm_refines_to_identity_pieces():
    refinement = rank1_reduce(Povm(np.stack([np.eye(2) / 2] * 2)))
    assert [p.kind for p in refinement.pieces] == ["identity", "identity"]
    assert [p.weight for p in refinement.pieces] == pytest.approx([0.5, 0.5])
    rank1, origins = refinement.to_rank1()
    assert rank1.q == 4
    assert origins == (0, 0, 1, 1)


def test_diagonal_povm_refinement():
    povm = Povm(np.array([np.diag([1.0, 0.3]), np.diag([0.0, 0.7])]))
    refinement = rank1_reduce(povm)
    assert [p.kind for p in refinement.pieces] == ["identity", "rank1", "rank1"]
    assert [p.origin for p in refinement.pieces] == [0, 0, 1]
    assert [p.weight for p in refinement.pieces] == pytest.approx([0.3, 0.7, 0.7])
    assert np.allclose(refinement.pieces[1].vector, [1, 0])
    assert np.allclose(refinement.pieces[2].vector, [0, 1])
    assert np.allclose(refinement.operators().sum(axis=0), np.eye(2))
