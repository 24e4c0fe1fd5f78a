import itertools
import math

import numpy as np
import pytest

from invivolink.phy import bits_per_symbol, constellation, qam_demap, qam_map

MODS = ["BPSK", "QPSK", "16QAM", "64QAM"]


def test_bpsk_convention():
    assert qam_map([0], "BPSK")[0] == pytest.approx(-1.0)
    assert qam_map([1], "BPSK")[0] == pytest.approx(+1.0)


def test_qpsk_points():
    s = 1 / math.sqrt(2)
    assert qam_map([0, 0], "QPSK")[0] == pytest.approx(complex(-s, -s))
    assert qam_map([1, 1], "QPSK")[0] == pytest.approx(complex(s, s))
    assert qam_map([1, 0], "QPSK")[0] == pytest.approx(complex(s, -s))


def test_16qam_reference_points():
    s = 1 / math.sqrt(10)
    # axis Gray ladder: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3
    assert qam_map([0, 0, 0, 0], "16QAM")[0] == pytest.approx(complex(-3 * s, -3 * s))
    assert qam_map([1, 0, 1, 1], "16QAM")[0] == pytest.approx(complex(3 * s, 1 * s))
    assert qam_map([0, 1, 1, 0], "16QAM")[0] == pytest.approx(complex(-1 * s, 3 * s))


@pytest.mark.parametrize("mod,expected", [("BPSK", 1), ("QPSK", 2), ("16QAM", 4), ("64QAM", 6)])
def test_bits_per_symbol(mod, expected):
    assert bits_per_symbol(mod) == expected
    assert constellation(mod).size == 2 ** expected


@pytest.mark.parametrize("mod", MODS)
def test_unit_average_energy(mod):
    points = constellation(mod)
    assert np.mean(np.abs(points) ** 2) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("mod", MODS)
def test_gray_property_nearest_neighbours(mod):
    # Every pair of points at the minimum distance differs in exactly one bit.
    points = constellation(mod)
    k = bits_per_symbol(mod)
    dmin = min(abs(a - b) for a, b in itertools.combinations(points, 2))
    for i, j in itertools.combinations(range(points.size), 2):
        if abs(points[i] - points[j]) <= dmin * 1.001:
            assert bin(i ^ j).count("1") == 1


@pytest.mark.parametrize("mod", MODS)
def test_noiseless_demap_recovers_every_label(mod):
    k = bits_per_symbol(mod)
    labels = np.arange(2 ** k)
    bits = ((labels[:, None] >> np.arange(k - 1, -1, -1)) & 1).reshape(-1)
    symbols = qam_map(bits, mod)
    llrs = qam_demap(symbols, 1e-12, mod)
    assert np.array_equal((llrs > 0).astype(int), bits)


@pytest.mark.parametrize("mod", MODS)
def test_map_demap_random_round_trip(mod):
    rng = np.random.default_rng(31)
    k = bits_per_symbol(mod)
    bits = rng.integers(0, 2, 300 * k)
    llrs = qam_demap(qam_map(bits, mod), 0.0, mod)  # zero noise variance tolerated
    assert np.array_equal((llrs > 0).astype(int), bits)


def test_llr_scales_with_noise_variance():
    y = qam_map([1], "BPSK") + 0.1
    l1 = qam_demap(y, 0.5, "BPSK")
    l2 = qam_demap(y, 1.0, "BPSK")
    assert l1[0] == pytest.approx(2 * l2[0], rel=1e-12)
    # BPSK max-log LLR is 4 * Re(y) / noise_var
    assert l2[0] == pytest.approx(4 * y[0].real, rel=1e-12)


def test_per_symbol_noise_variance_array():
    bits = np.array([1, 0, 1, 1])
    y = qam_map(bits, "BPSK")
    llrs = qam_demap(y, np.array([1.0, 1.0, 2.0, 4.0]), "BPSK")
    assert llrs[2] == pytest.approx(llrs[0] / 2)
    assert llrs[3] == pytest.approx(llrs[0] / 4)


def test_infinite_noise_gives_zero_llr():
    y = qam_map([1, 0], "BPSK")
    llrs = qam_demap(y, np.inf, "BPSK")
    assert np.array_equal(llrs, np.zeros(2))


def test_invalid_inputs():
    with pytest.raises(ValueError):
        qam_map([1, 0, 1], "QPSK")
    with pytest.raises(ValueError):
        qam_map([1], "8PSK")
    with pytest.raises(ValueError):
        qam_demap(np.zeros(2, complex), 1.0, "QAM4096")
