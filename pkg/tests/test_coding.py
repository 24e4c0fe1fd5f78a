from fractions import Fraction

import numpy as np
import pytest

from invivolink.phy import conv_encode, depuncture_llrs, viterbi_decode

RATES = [Fraction(1, 2), Fraction(2, 3), Fraction(3, 4), Fraction(5, 6)]


def hard_llrs(coded, flip=()):
    c = coded.astype(np.float64).copy()
    for idx in flip:
        c[idx] = 1.0 - c[idx]
    return 8.0 * (2.0 * c - 1.0)


def terminated(bits):
    return np.concatenate([np.asarray(bits, dtype=np.uint8), np.zeros(6, np.uint8)])


def test_all_zero_input_gives_all_zero_output():
    for rate in RATES:
        out = conv_encode(np.zeros(120, np.uint8), rate)
        assert not out.any()


def test_impulse_response():
    # One 1 followed by six 0s: the two generator streams interleaved.
    out = conv_encode([1, 0, 0, 0, 0, 0, 0])
    assert out[0::2].tolist() == [1, 0, 1, 1, 0, 1, 1]  # 133 octal
    assert out[1::2].tolist() == [1, 1, 1, 1, 0, 0, 1]  # 171 octal


def test_rate_arithmetic():
    assert conv_encode(np.zeros(300, np.uint8), Fraction(3, 4)).size == 400
    assert conv_encode(np.zeros(300, np.uint8), Fraction(1, 2)).size == 600
    assert conv_encode(np.zeros(300, np.uint8), Fraction(2, 3)).size == 450
    assert conv_encode(np.zeros(300, np.uint8), Fraction(5, 6)).size == 360


def test_unsupported_rate():
    with pytest.raises(ValueError):
        conv_encode(np.zeros(8, np.uint8), Fraction(7, 8))


def test_encoder_linearity_gf2():
    rng = np.random.default_rng(20)
    for _ in range(50):
        a = rng.integers(0, 2, 240).astype(np.uint8)
        b = rng.integers(0, 2, 240).astype(np.uint8)
        for rate in RATES:
            lhs = conv_encode(a ^ b, rate)
            rhs = conv_encode(a, rate) ^ conv_encode(b, rate)
            assert np.array_equal(lhs, rhs)


@pytest.mark.parametrize("rate", RATES)
def test_noiseless_round_trip(rate):
    rng = np.random.default_rng(21)
    for _ in range(250):
        # total length (tail included) a multiple of 30 = lcm of the
        # puncture-period input sizes
        n = int(rng.integers(1, 40)) * 30 - 6
        bits = terminated(rng.integers(0, 2, n).astype(np.uint8))
        coded = conv_encode(bits, rate)
        decoded = viterbi_decode(hard_llrs(coded), rate)
        assert np.array_equal(decoded, bits)


def test_single_flipped_bit_corrected():
    # Free distance 10 at rate 1/2: any single coded-bit error is correctable.
    rng = np.random.default_rng(22)
    bits = terminated(rng.integers(0, 2, 100).astype(np.uint8))
    coded = conv_encode(bits)
    for pos in range(coded.size):
        decoded = viterbi_decode(hard_llrs(coded, flip=[pos]))
        assert np.array_equal(decoded, bits), f"flip at {pos} not corrected"


def test_all_zero_llrs_decode_without_crash():
    out = viterbi_decode(np.zeros(200))
    assert out.shape == (100,)
    assert set(np.unique(out)) <= {0, 1}


def test_depuncture_inserts_zeros():
    llrs = np.arange(1.0, 10.0)  # 9 values at rate 2/3 -> 12 mother positions
    out = depuncture_llrs(llrs, Fraction(2, 3))
    assert out.size == 12
    assert np.count_nonzero(out == 0.0) == 3
    assert np.array_equal(out[out != 0.0], llrs)


def test_depuncture_length_mismatch():
    with pytest.raises(ValueError):
        depuncture_llrs(np.zeros(7), Fraction(2, 3))
    with pytest.raises(ValueError):
        viterbi_decode(np.zeros(10), Fraction(3, 4))


def test_high_rate_round_trip_is_consistent_with_encode():
    # depuncture(conv_encode(x)) must reoccupy exactly the kept positions
    rng = np.random.default_rng(23)
    bits = terminated(rng.integers(0, 2, 114).astype(np.uint8))
    for rate in RATES:
        punctured = conv_encode(bits, rate)
        mother = conv_encode(bits, Fraction(1, 2))
        restored = depuncture_llrs(2.0 * punctured.astype(float) - 1.0, rate)
        kept = restored != 0.0
        assert np.array_equal((restored[kept] > 0).astype(np.uint8), mother[kept])
