"""Row-column block interleaver (13 columns, one block per stream-symbol).

Bits are written row-wise into a 13-column matrix and read column-wise,
spreading adjacent coded bits across subcarriers.  The block length is the
per-stream coded bits per OFDM symbol (n_data * bits_per_subcarrier).
"""

from __future__ import annotations

import numpy as np

N_COLUMNS = 13


def _check(block_len: int, n_cols: int):
    if block_len == 0 or block_len % n_cols:
        raise ValueError(f"block length {block_len} is not a positive multiple of {n_cols}")


def interleave(bits, n_cols: int = N_COLUMNS) -> np.ndarray:
    bits = np.asarray(bits).reshape(-1)
    _check(bits.size, n_cols)
    return bits.reshape(-1, n_cols).T.reshape(-1)


def deinterleave(bits, n_cols: int = N_COLUMNS) -> np.ndarray:
    bits = np.asarray(bits).reshape(-1)
    _check(bits.size, n_cols)
    return bits.reshape(n_cols, -1).T.reshape(-1)
