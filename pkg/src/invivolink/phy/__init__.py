"""Simplified 802.11n-style baseband: MCS table, convolutional coding,
interleaving, QAM mapping and the frame transmit/receive pipeline."""

from .coding import conv_encode, depuncture_llrs, viterbi_decode
from .interleaving import deinterleave, interleave
from .link import (Frame, SingularChannelError, SymbolGrid, apply_channel_awgn,
                   data_bits_per_symbol, detect, n_ofdm_symbols, receive_frame,
                   transmit_frame)
from .mcs import ALL_MCS, McsConfig, mcs_table
from .modulation import bits_per_symbol, constellation, qam_demap, qam_map

__all__ = [
    "ALL_MCS", "Frame", "McsConfig", "SingularChannelError", "SymbolGrid",
    "apply_channel_awgn", "bits_per_symbol", "constellation", "conv_encode",
    "data_bits_per_symbol", "deinterleave", "depuncture_llrs", "detect",
    "interleave", "mcs_table", "n_ofdm_symbols", "qam_demap", "qam_map",
    "receive_frame", "transmit_frame", "viterbi_decode",
]
