import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isoq.exceptions import (
    DimensionMismatch,
    DimensionTooLarge,
    DomainError,
    IndexOutOfRange,
    NotNormalized,
    ProbabilityError,
)
from isoq.qubit import (
    ALPHA_AMPLITUDES,
    DistributionTable,
    JointTable,
    OutcomeRecord,
    ProductState,
    SingleQubitState,
    alpha_state,
    beta_state,
    clamp_probability,
    dense_outcome,
    dense_state,
    fourth_moment_avg,
    fourth_moment_closed_form,
    from_pauli,
    gram_matrix,
    holevo_chi,
    mixedness_deviation,
    operator_norm_2x2,
    overlap_matrix,
    pauli_coordinates,
    product_expectation,
    random_product_state,
    random_state,
    reduced_density,
    von_neumann_entropy,
)

angles = st.floats(min_value=0, max_value=2 * np.pi, allow_nan=False)


def _state(theta, phi):
    return SingleQubitState(complex(np.cos(theta / 2)), np.exp(1j * phi) * np.sin(theta / 2))


def test_alpha_states_are_the_conjugate_coding_states():
    assert np.allclose(alpha_state("00").vector, [1, 0])
    assert np.allclose(alpha_state("01").vector, np.array([1, 1]) / np.sqrt(2))
    assert np.allclose(alpha_state("10").vector, np.array([1, -1]) / np.sqrt(2))
    assert np.allclose(alpha_state(3).vector, [0, 1])
    assert abs(alpha_state("00").inner(alpha_state("11"))) == 0
    assert abs(alpha_state("01").inner(alpha_state("10"))) < 1e-15


def test_alpha_state_rejects_bad_code():
    with pytest.raises(IndexOutOfRange):
        alpha_state(4)


def test_unnormalized_state_is_rejected():
    with pytest.raises(NotNormalized):
        SingleQubitState(1, 1)


def test_beta_state_overlap():
    overlap = abs(beta_state(np.pi / 8).inner(alpha_state("00"))) ** 2
    assert overlap == pytest.approx(np.cos(np.pi / 8) ** 2, abs=1e-15)


def test_clamp_probability():
    assert clamp_probability(-1e-13) == 0.0
    assert clamp_probability(1 + 1e-13) == 1.0
    with pytest.raises(ProbabilityError):
        clamp_probability(-1e-3)


def test_pauli_coordinates_invert(rng):
    g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    op = g + g.conj().T
    assert np.allclose(from_pauli(pauli_coordinates(op)), op)


def test_operator_norm_matches_eigenvalues(rng):
    for _ in range(20):
        g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        op = g + g.conj().T
        assert operator_norm_2x2(op) == pytest.approx(np.abs(np.linalg.eigvalsh(op)).max())


def test_product_expectation_matches_dense(rng):
    state = random_product_state(3, rng)
    ops = np.stack([random_state(rng).projector for _ in range(2)])
    outcome = OutcomeRecord((0, 2), ops)
    psi = dense_state(state)
    dense = np.vdot(psi, dense_outcome(outcome, 3) @ psi).real
    assert product_expectation(state, outcome) == pytest.approx(dense, abs=1e-12)


def test_outcome_record_checks_dimensions():
    with pytest.raises(DimensionMismatch):
        OutcomeRecord((0, 1), np.eye(2)[None])


def test_overlap_matrix_matches_dense(rng):
    states = [random_product_state(3, rng) for _ in range(4)]
    vecs = np.stack([dense_state(s) for s in states])
    dense = vecs.conj() @ vecs.T
    assert np.allclose(gram_matrix(states).entries, dense)
    amps = np.stack([s.amplitudes for s in states])
    assert np.allclose(overlap_matrix(amps, [1]), amps[:, 1].conj() @ amps[:, 1].T)


def test_dense_state_refuses_large_registers():
    state = ProductState(np.tile([1.0, 0.0], (15, 1)))
    with pytest.raises(DimensionTooLarge):
        dense_state(state)


def test_holevo_matches_dense_entropy(rng):
    states = [random_product_state(3, rng) for _ in range(5)]
    weights = np.full(5, 0.2)
    rho = reduced_density(states, weights, [0, 2])
    assert holevo_chi(states, weights, [0, 2]) == pytest.approx(von_neumann_entropy(rho), abs=1e-9)
    # more states than dimensions takes the dense route
    many = [random_product_state(1, rng) for _ in range(6)]
    rho = reduced_density(many, np.full(6, 1 / 6), [0])
    assert holevo_chi(many, np.full(6, 1 / 6), [0]) == pytest.approx(von_neumann_entropy(rho), abs=1e-9)


def test_uniform_mixture_of_conjugate_states_is_maximally_mixed():
    states = [ProductState(ALPHA_AMPLITUDES[[c]]) for c in range(4)]
    assert mixedness_deviation(states, np.full(4, 0.25), [0]) == pytest.approx(0, abs=1e-12)
    assert holevo_chi(states, np.full(4, 0.25), [0]) == pytest.approx(1.0)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 3), st.integers(2, 12))
def test_holevo_quantity_is_at_most_the_qubit_count(seed, width, size):
    rng = np.random.default_rng(seed)
    states = [random_product_state(3, rng) for _ in range(size)]
    chi = holevo_chi(states, np.full(size, 1 / size), range(width))
    assert 0 <= chi <= width


def test_holevo_quantity_beyond_the_qubit_count_is_refused(rng, monkeypatch):
    states = [random_product_state(2, rng) for _ in range(3)]
    weights = np.full(3, 1 / 3)
    monkeypatch.setattr("isoq.qubit.mixture_entropy", lambda *args: 1.0 + 1e-13)
    assert holevo_chi(states, weights, [0]) == 1.0
    monkeypatch.setattr("isoq.qubit.mixture_entropy", lambda *args: 1.5)
    with pytest.raises(DomainError):
        holevo_chi(states, weights, [0])


def test_distribution_tables():
    with pytest.raises(ProbabilityError):
        DistributionTable(("a", "b"), [0.5, 0.6])
    uniform = DistributionTable.uniform(4)
    assert uniform[2] == pytest.approx(0.25)
    joint = JointTable((0, 1), ("x", "y"), [[0.1, 0.2], [0.3, 0.4]])
    assert np.allclose(joint.row_marginal().probs, [0.3, 0.7])
    assert np.allclose(joint.transpose().probs, joint.probs.T)
    assert joint.to_frame().loc[1, "y"] == pytest.approx(0.4)


@settings(max_examples=200, deadline=None)
@given(angles, angles)
def test_fourth_moment_closed_form(theta, phi):
    psi = _state(theta, phi)
    closed = fourth_moment_closed_form(psi)
    assert closed == pytest.approx(fourth_moment_avg(psi), abs=1e-12)
    assert closed <= 3 / 8 + 1e-12
