import numpy as np
import pytest

from isoq.codes import P_E, RandomCode, explicit_params
from isoq.entropy import EntropyReport
from isoq.exceptions import DomainError, IdentityViolation, IndexOutOfRange, InvalidH, TooLarge
from isoq.hiding import LG_3_2, collision_with_identity, outcome_likelihoods
from isoq.otm import (
    LeakReport,
    OtmDevice,
    conditional_collision_otm,
    honest_error_rate,
    honest_outcome_probabilities,
    honest_povm,
    honest_recover,
    leak_eval,
    leak_strategy,
    load_device,
    otm_collision_bound,
    otm_encode,
    otm_information,
    phase_decomposition,
    post_measurement_bias,
    sample_device,
    save_device,
    sequential_readout,
    split_points,
)
from isoq.qubit import ALPHA_AMPLITUDES, OutcomeRecord, beta_state
from isoq.strategies import random_strategy


def _device(c_words, d_words):
    c_words, d_words = np.array(c_words), np.array(d_words)
    k, n = int(np.log2(len(c_words))), c_words.shape[1]
    params = explicit_params(n, k)
    return OtmDevice(params, RandomCode(k, n, c_words), RandomCode(k, n, d_words))


def test_encoding_follows_both_codes():
    device = _device([[0, 1], [1, 0]], [[0, 0], [1, 1]])
    state = otm_encode(device, 0, 0)
    assert np.allclose(state.amplitudes, ALPHA_AMPLITUDES[[0, 2]])
    assert list(device.codes(1, 1)) == [3, 1]
    with pytest.raises(IndexOutOfRange):
        otm_encode(device, 2, 0)


def test_device_is_seeded():
    params = explicit_params(16, 3)
    a, b = sample_device(params, 4), sample_device(params, 4)
    assert np.array_equal(a.code_c.words, b.code_c.words)
    assert np.array_equal(a.code_d.words, b.code_d.words)
    assert not np.array_equal(a.code_c.words, a.code_d.words)


def test_honest_error_probability_is_code_independent():
    for side in ("S", "T"):
        probs = honest_outcome_probabilities(np.arange(4, dtype=np.uint8), side)
        bits = (np.arange(4) >> 1) & 1 if side == "S" else np.arange(4) & 1
        errors = np.where(bits == 1, 1 - probs, probs)
        assert np.allclose(errors, P_E)


def test_t_side_on_plus_state():
    probs = honest_povm("T").probabilities(ALPHA_AMPLITUDES[1])
    assert probs[1] == pytest.approx(np.cos(np.pi / 8) ** 2)
    with pytest.raises(DomainError):
        honest_povm("X")


def test_noiseless_recovery(rng):
    device = _device(
        [[0, 0, 0, 1], [0, 1, 1, 0], [1, 0, 1, 1], [1, 1, 0, 0]],
        [[1, 1, 1, 1], [0, 0, 1, 1], [1, 0, 0, 0], [0, 1, 0, 1]],
    )
    for s in range(4):
        for t in range(4):
            assert honest_recover(device, s, t, "S", rng, noiseless=True) == (s, True)
            assert honest_recover(device, s, t, "T", rng, noiseless=True) == (t, True)


def test_honest_error_rate(rng):
    err, sigma = honest_error_rate(100000, rng, "T")
    assert abs(err - P_E) < 5 * sigma


def test_post_measurement_bias_is_uniform():
    assert np.allclose(post_measurement_bias("S"), [0.5, 0.5])
    assert np.allclose(post_measurement_bias("T"), [0.5, 0.5])


def test_sequential_readout_loses_the_second_side(rng):
    device = sample_device(explicit_params(400, 2), 3)
    agreements = [sequential_readout(device, 1, 2, "S", rng)[2] for _ in range(5)]
    assert np.mean(agreements) == pytest.approx(0.5, abs=0.05)


def test_leak_of_one_qubit_is_half_a_bit():
    device = _device([[0], [1]], [[0], [1]])
    report = leak_eval(device)
    assert report.mutual_info == pytest.approx(0.5)
    assert report.entropy.shannon == pytest.approx(1.5)
    assert report.leakage == pytest.approx(-0.5)


def test_leak_report_bounds(small_device):
    report = leak_eval(small_device, theta=1.0)
    assert 0 <= report.mutual_info <= 2 * small_device.k
    assert report.smoothing == pytest.approx(0.5)
    assert report.smoothed_bound == pytest.approx(report.worst_collision - 1.0)
    with pytest.raises(DomainError):
        LeakReport(1, 3.0, EntropyReport(0, 0, 0), 0, 1, 0, 0)


def test_exact_size_limits():
    with pytest.raises(TooLarge):
        leak_eval(sample_device(explicit_params(8, 7), 0))
    with pytest.raises(TooLarge):
        leak_eval(sample_device(explicit_params(13, 2), 0))


def test_information_of_computational_strategy(small_device):
    report = leak_eval(small_device)
    assert otm_information(small_device, leak_strategy(small_device.n)) == pytest.approx(
        report.mutual_info
    )


def test_conditional_collision(small_device):
    record = OutcomeRecord((0,), beta_state(np.pi / 8).projector[None])
    value = conditional_collision_otm(small_device, record)
    assert 0 <= value <= 2 * small_device.k
    assert otm_collision_bound(3, 2) == pytest.approx(6 - 2 * LG_3_2)


def test_collision_identity_on_pairs(small_device):
    record = OutcomeRecord((1, 4), np.stack([beta_state(np.pi / 8).projector] * 2))
    amps = small_device.pair_amplitudes()
    likelihood = outcome_likelihoods(amps, record)
    posterior = likelihood / likelihood.sum()
    assert conditional_collision_otm(small_device, record) == pytest.approx(
        -np.log2((posterior ** 2).sum())
    )
    with pytest.raises(IdentityViolation):
        collision_with_identity(0.5 * likelihood, amps, record)


def test_split_points():
    split = split_points(explicit_params(64, 20), 40)
    assert split.m == 14
    assert split.m_tilde == 20
    with pytest.raises(InvalidH):
        split_points(explicit_params(64, 20), 19)
    small = split_points(explicit_params(6, 2), 10)
    assert small.m + small.m_tilde <= 6


def test_phase_decomposition_chain_rule(small_device, rng):
    split = split_points(small_device.params, 2 * small_device.k)
    for _ in range(3):
        strategy = random_strategy(small_device.n, small_device.n, 2, rng, rank1=True)
        phases = phase_decomposition(small_device, strategy, split, with_holevo=True)
        assert phases.chain_sum == pytest.approx(phases.total, abs=1e-9)
        assert phases.remainder <= phases.remainder_holevo + 1e-9
        assert phases.remainder_holevo <= phases.holevo_cap + 1e-9


def test_device_files_round_trip(tmp_path, small_device):
    save_device(small_device, tmp_path / "device")
    loaded = load_device(tmp_path / "device")
    assert np.array_equal(loaded.code_c.words, small_device.code_c.words)
    assert np.array_equal(loaded.code_d.words, small_device.code_d.words)
    assert loaded.params == small_device.params
