from fractions import Fraction

import pytest

from invivolink.phy import ALL_MCS, mcs_table

# (index, modulation, rate, streams, data bits/OFDM symbol, Mbps)
EXPECTED = [
    (0, "BPSK", Fraction(1, 2), 1, 26, 6.5),
    (1, "QPSK", Fraction(1, 2), 1, 52, 13.0),
    (2, "QPSK", Fraction(3, 4), 1, 78, 19.5),
    (3, "16QAM", Fraction(1, 2), 1, 104, 26.0),
    (4, "16QAM", Fraction(3, 4), 1, 156, 39.0),
    (5, "64QAM", Fraction(2, 3), 1, 208, 52.0),
    (6, "64QAM", Fraction(3, 4), 1, 234, 58.5),
    (7, "64QAM", Fraction(5, 6), 1, 260, 65.0),
    (8, "BPSK", Fraction(1, 2), 2, 52, 13.0),
    (9, "QPSK", Fraction(1, 2), 2, 104, 26.0),
    (10, "QPSK", Fraction(3, 4), 2, 156, 39.0),
    (11, "16QAM", Fraction(1, 2), 2, 208, 52.0),
    (12, "16QAM", Fraction(3, 4), 2, 312, 78.0),
    (13, "64QAM", Fraction(2, 3), 2, 416, 104.0),
    (14, "64QAM", Fraction(3, 4), 2, 468, 117.0),
    (15, "64QAM", Fraction(5, 6), 2, 520, 130.0),
]


@pytest.mark.parametrize("index,modulation,rate,streams,ndbps,mbps", EXPECTED)
def test_table(index, modulation, rate, streams, ndbps, mbps):
    mcs = mcs_table(index)
    assert mcs.index == index
    assert mcs.modulation == modulation
    assert mcs.code_rate == rate
    assert mcs.n_streams == streams
    assert mcs.data_bits_per_ofdm_symbol == ndbps
    assert mcs.nominal_rate_mbps == pytest.approx(mbps)


def test_derived_fields_consistent():
    for mcs in ALL_MCS:
        assert mcs.coded_bits_per_symbol == mcs.n_streams * 52 * mcs.bits_per_subcarrier
        assert mcs.data_bits_per_ofdm_symbol == mcs.coded_bits_per_symbol * mcs.code_rate
        assert mcs.nominal_rate_mbps == mcs.data_bits_per_ofdm_symbol / 4.0


@pytest.mark.parametrize("bad", [-1, 16, 100, 1.5, "0"])
def test_out_of_range(bad):
    with pytest.raises(ValueError):
        mcs_table(bad)
