import numpy as np
import pytest

from isoq.codes import (
    P_E,
    RandomCode,
    bounded_distance_decode,
    bsc_channel,
    channel_success_rate,
    decode_success_bound,
    derive_params,
    explicit_params,
    load_code,
    nearest_codeword_decode,
    sample_code,
    save_code,
)
from isoq.entropy import binary_entropy
from isoq.exceptions import DimensionMismatch, IndexOutOfRange, InvalidSlacks, RateTooLow, TooLarge


@pytest.fixture
def repetition():
    return RandomCode(1, 4, np.array([[0, 0, 0, 0], [1, 1, 1, 1]]))


def test_channel_constants():
    assert P_E == pytest.approx(0.146446609, abs=1e-9)
    assert 1 - binary_entropy(P_E) == pytest.approx(0.399118, abs=1e-5)


def test_derive_params():
    params = derive_params(1000, 0.05, 0.01)
    assert params.k == 349
    assert params.r == pytest.approx(1000 * (P_E + 0.01))
    assert params.asymptotic


def test_invalid_slacks():
    with pytest.raises(InvalidSlacks):
        derive_params(1000, 0.01, 0.01)
    with pytest.raises(InvalidSlacks):
        derive_params(1000, 0.5, 0.4)
    with pytest.raises(RateTooLow):
        derive_params(3, 0.3, 0.01)


def test_explicit_params_above_capacity():
    params = explicit_params(10, 8)
    assert not params.asymptotic
    assert params.theta < 0
    assert params.tau == 0
    assert params.r == pytest.approx(10 * P_E)


def test_code_table_checks(repetition):
    with pytest.raises(DimensionMismatch):
        RandomCode(2, 4, np.zeros((2, 4)))
    with pytest.raises(IndexOutOfRange):
        repetition[2]
    assert repetition.all_distinct()
    assert list(repetition.distances([0, 0, 1, 1])) == [2, 2]


def test_decoders(repetition):
    assert bounded_distance_decode(repetition, np.array([0, 0, 0, 1]), 1.0) == 0
    assert bounded_distance_decode(repetition, np.array([0, 0, 0, 1]), 0.5) is None
    assert bounded_distance_decode(repetition, np.array([1, 1, 0, 1]), 1.7) == 1
    # ties go to the smallest message
    assert nearest_codeword_decode(repetition, np.array([0, 0, 1, 1])) == 0
    assert nearest_codeword_decode(repetition, np.array([1, 0, 1, 1])) == 1


def test_sample_code_is_seeded():
    a, b = sample_code(3, 32, 5), sample_code(3, 32, 5)
    assert np.array_equal(a.words, b.words)
    assert a.seed == 5
    with pytest.raises(TooLarge):
        sample_code(21, 4, 0)


def test_bsc_flip_rate(rng):
    word = np.zeros(100000, dtype=np.uint8)
    assert bsc_channel(word, 0.0, rng).sum() == 0
    rate = bsc_channel(word, P_E, rng).mean()
    assert abs(rate - P_E) < 5 * np.sqrt(P_E * (1 - P_E) / word.size)


def test_noiseless_channel_always_decodes(rng):
    code = sample_code(4, 40, 3)
    assert code.all_distinct()
    assert channel_success_rate(code, 0.0, 50, rng) == 1.0


def test_decode_success_bound():
    fraction, success = decode_success_bound(100000, 0.05, 0.01, 2.0)
    assert fraction == pytest.approx(0.5)
    assert success == pytest.approx(1.0, abs=1e-6)
    _, small = decode_success_bound(100, 0.05, 0.01, 2.0)
    assert small == 0.0
    with pytest.raises(InvalidSlacks):
        decode_success_bound(1000, 0.05, 0.01, 0.5)


def test_code_file_round_trip(tmp_path):
    code = sample_code(3, 10, 9)
    save_code(code, tmp_path / "code.txt")
    loaded = load_code(tmp_path / "code.txt")
    assert np.array_equal(loaded.words, code.words)
    assert (loaded.k, loaded.n, loaded.seed) == (3, 10, 9)


@pytest.mark.parametrize("r", [0.0, 1.5, 2.0, 3.0])
def test_bounded_distance_decode_against_exhaustive_search(r):
    code = sample_code(3, 8, 12)
    for value in range(2 ** 8):
        z = np.array([(value >> (7 - i)) & 1 for i in range(8)], dtype=np.uint8)
        expected = None
        for s in range(2 ** code.k):
            if sum(int(a != b) for a, b in zip(code[s], z)) <= r:
                expected = s
                break
        assert bounded_distance_decode(code, z, r) == expected


def test_sampled_bits_are_balanced():
    words = sample_code(10, 200, 1).words
    assert abs(words.mean() - 0.5) < 5 * 0.5 / np.sqrt(words.size)
    column_se = 0.5 / np.sqrt(len(words))
    assert np.abs(words.mean(axis=0) - 0.5).max() < 5 * column_se


def test_success_grows_with_length():
    rates = [
        channel_success_rate(sample_code(4, n, n), P_E, 2000, np.random.default_rng(n))
        for n in (32, 64, 128)
    ]
    assert rates[1] >= rates[0] - 0.02
    assert rates[2] >= rates[1] - 0.02
    assert rates[2] > 0.95


def test_decode_success_bound_is_monotone():
    by_n = [decode_success_bound(n, 0.05, 0.01, 2.0)[1] for n in (500, 1000, 5000, 20000)]
    assert by_n == sorted(by_n)
    by_lam = [decode_success_bound(20000, 0.05, 0.01, lam) for lam in (1.0, 2.0, 4.0, 8.0)]
    fractions = [f for f, _ in by_lam]
    successes = [s for _, s in by_lam]
    assert fractions == sorted(fractions)
    assert successes == sorted(successes, reverse=True)
