"""Modulation and coding scheme table for the 20 MHz, 52-data-tone profile.

Indices 0-7 run BPSK 1/2 through 64-QAM 5/6 on one spatial stream; 8-15
repeat the sequence on two streams.  Rates assume the 4 us OFDM symbol
(800 ns guard interval).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

N_DATA_TONES = 52
T_SYM_US = 4.0

_MOD_BITS = {"BPSK": 1, "QPSK": 2, "16QAM": 4, "64QAM": 6}

# (modulation, code rate) sequence repeated per stream count.
_BASE = [
    ("BPSK", Fraction(1, 2)),
    ("QPSK", Fraction(1, 2)),
    ("QPSK", Fraction(3, 4)),
    ("16QAM", Fraction(1, 2)),
    ("16QAM", Fraction(3, 4)),
    ("64QAM", Fraction(2, 3)),
    ("64QAM", Fraction(3, 4)),
    ("64QAM", Fraction(5, 6)),
]


@dataclass(frozen=True)
class McsConfig:
    index: int
    modulation: str
    code_rate: Fraction
    n_streams: int
    bits_per_subcarrier: int

    @property
    def coded_bits_per_symbol(self) -> int:
        """Coded bits carried by one OFDM symbol across all streams."""
        return self.n_streams * N_DATA_TONES * self.bits_per_subcarrier

    @property
    def data_bits_per_ofdm_symbol(self) -> int:
        bits = self.coded_bits_per_symbol * self.code_rate
        assert bits.denominator == 1
        return int(bits)

    @property
    def nominal_rate_mbps(self) -> float:
        return self.data_bits_per_ofdm_symbol / T_SYM_US

    @property
    def rate_str(self) -> str:
        return f"{self.code_rate.numerator}/{self.code_rate.denominator}"


def mcs_table(index: int) -> McsConfig:
    """Canonical MCS mapping for indices 0..15."""
    if not isinstance(index, int) or not 0 <= index <= 15:
        raise ValueError(f"MCS index must be in 0..15, got {index!r}")
    modulation, rate = _BASE[index % 8]
    return McsConfig(
        index=index,
        modulation=modulation,
        code_rate=rate,
        n_streams=1 + index // 8,
        bits_per_subcarrier=_MOD_BITS[modulation],
    )


ALL_MCS = tuple(mcs_table(i) for i in range(16))
