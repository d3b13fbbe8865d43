import numpy as np
import pytest

from isoq.entropy import conditional_entropy, mutual_information
from isoq.exceptions import IdentityViolation, IndexOutOfRange, TooLarge
from isoq.hiding import (
    LG_3_2,
    HidingEnsemble,
    all_outcome_collisions,
    collision_minimum,
    collision_split,
    collision_with_identity,
    computational_conditional_entropy,
    conditional_collision,
    discrimination_game,
    encode_hiding,
    expected_gram_offdiag,
    gram_frobenius,
    gram_sqrt_bound,
    hiding_collision_bound,
    hiding_gram,
    load_ensemble,
    max_hidden_bits,
    outcome_likelihoods,
    outcome_probability,
    pgm_build,
    pgm_confidence_bound,
    pgm_information,
    pgm_joint,
    pgm_success,
    q_outcome_information_cap,
    sample_ensemble,
    save_ensemble,
)
from isoq.qubit import ALPHA_AMPLITUDES, OutcomeRecord, ProductState, beta_state, dense_state, gram_matrix
from isoq.strategies import basis_strategy, enumerate_outcomes, joint_distribution


def test_closed_forms():
    assert max_hidden_bits(20, 10, 0.1) == 8
    assert pgm_confidence_bound(20, 8, 10) >= 0.9
    assert pgm_confidence_bound(20, 9, 10) < 0.9
    assert collision_split(6) == 4
    assert expected_gram_offdiag(10, 4) == pytest.approx(0.234375)
    assert hiding_collision_bound(6, 4) == pytest.approx(6 - 4 * LG_3_2)
    assert q_outcome_information_cap(10, 0) == 10


def test_sample_ensemble(small_ensemble):
    assert small_ensemble.size == 4
    again = sample_ensemble(2, 4, seed=7)
    assert np.array_equal(again.table, small_ensemble.table)
    assert list(small_ensemble.to_frame().columns) == [f"qubit_{a}" for a in range(4)]
    with pytest.raises(TooLarge):
        sample_ensemble(15, 4, seed=0)
    with pytest.raises(IndexOutOfRange):
        encode_hiding(small_ensemble, 4)


def test_gram_from_code_overlaps(small_ensemble):
    gram = hiding_gram(small_ensemble)
    assert np.allclose(gram, gram_matrix(small_ensemble.states()).entries)
    assert np.allclose(np.diag(gram), 1)
    assert gram_frobenius(np.eye(3)) == 0


def test_pgm_on_orthogonal_states():
    family = [ProductState(ALPHA_AMPLITUDES[[0]]), ProductState(ALPHA_AMPLITUDES[[3]])]
    success, bound = pgm_success(family)
    assert success == pytest.approx(1)
    assert bound == pytest.approx(1)
    assert pgm_information(family) == pytest.approx(1)


def test_pgm_bounds(small_ensemble):
    success, bound = pgm_success(small_ensemble)
    assert bound <= success + 1e-12
    assert gram_sqrt_bound(small_ensemble) <= success + 1e-12


def test_dense_pgm_matches_gram_route(small_ensemble):
    pgm = pgm_build(small_ensemble)
    assert pgm.completeness_residual() < 1e-9
    psi = np.stack([dense_state(s) for s in small_ensemble.states()], axis=1)
    conditional = pgm.conditional(psi)
    assert np.allclose(conditional.sum(axis=1), 1)
    assert np.allclose(conditional / small_ensemble.size, pgm_joint(small_ensemble).probs)
    success, _ = pgm_success(small_ensemble)
    assert np.trace(conditional) / small_ensemble.size == pytest.approx(success)


def test_computational_conditional_entropy():
    ensemble = HidingEnsemble(1, 2, np.array([[0, 1], [2, 3]]))
    assert computational_conditional_entropy(ensemble) == pytest.approx(1.0)
    joint = joint_distribution(basis_strategy(2), ensemble.states())
    assert conditional_entropy(joint.transpose()) == pytest.approx(1.0)
    assert discrimination_game(ensemble, basis_strategy(2)) == pytest.approx(
        mutual_information(joint)
    )


def test_game_rejects_wide_strategy(small_ensemble):
    with pytest.raises(IndexOutOfRange):
        discrimination_game(small_ensemble, basis_strategy(5))


def test_collision_minimum_matches_enumeration(small_ensemble, coarse_net):
    ops = coarse_net.outcome_operators()
    minimum, live = collision_minimum(small_ensemble.amplitudes(), ops, 2)
    records = list(enumerate_outcomes(small_ensemble.n, coarse_net, 2, cap=10 ** 6))
    table = all_outcome_collisions(small_ensemble, records)
    assert len(table) == live
    assert table["collision"].min() == pytest.approx(minimum, abs=1e-9)


def test_conditional_collision_of_empty_outcome(small_ensemble, coarse_net):
    record = next(enumerate_outcomes(small_ensemble.n, coarse_net, 0, cap=10))
    assert conditional_collision(small_ensemble, record) == pytest.approx(small_ensemble.nb)


def test_ensemble_file_round_trip(tmp_path, small_ensemble):
    save_ensemble(small_ensemble, tmp_path / "ensemble.txt")
    loaded = load_ensemble(tmp_path / "ensemble.txt")
    assert np.array_equal(loaded.table, small_ensemble.table)
    assert loaded.seed == 7


def _tilted_outcome():
    tilted = beta_state(np.pi / 8).projector
    return OutcomeRecord((0, 2), np.stack([tilted, 0.5 * tilted]))


def test_outcome_probability_from_tensor_products(small_ensemble):
    amps = small_ensemble.amplitudes()
    record = _tilted_outcome()
    expected = outcome_likelihoods(amps, record).mean()
    assert outcome_probability(amps, record) == pytest.approx(expected, abs=1e-12)


def test_collision_identity_rejects_inconsistent_likelihoods(small_ensemble):
    amps = small_ensemble.amplitudes()
    record = _tilted_outcome()
    likelihood = outcome_likelihoods(amps, record)
    value = collision_with_identity(likelihood, amps, record)
    assert value == pytest.approx(conditional_collision(small_ensemble, record))
    assert 0 <= value <= small_ensemble.nb
    # rescaling leaves the posterior unchanged but not Pr[M_A]
    with pytest.raises(IdentityViolation):
        collision_with_identity(2 * likelihood, amps, record)


def test_pgm_on_zero_and_plus():
    family = [ProductState(ALPHA_AMPLITUDES[[0]]), ProductState(ALPHA_AMPLITUDES[[1]])]
    success, _ = pgm_success(family)
    assert success == pytest.approx(0.85355, abs=1e-5)


def test_ensemble_codes_are_uniform():
    table = sample_ensemble(8, 12, seed=3).table
    frequencies = np.bincount(table.ravel(), minlength=4) / table.size
    assert np.abs(frequencies - 0.25).max() < 5 * np.sqrt(0.1875 / table.size)
