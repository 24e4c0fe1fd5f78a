"""Gray-mapped square QAM with a max-log soft demapper.

Bit convention per symbol: the first half of the bits selects the in-phase
level, the second half the quadrature level (BPSK uses the real axis only).
Each axis is a Gray-coded PAM ladder; constellations are scaled to unit
average energy (1, 1/sqrt(2), 1/sqrt(10), 1/sqrt(42)).

LLRs follow the positive-means-one convention and are computed per axis,
which for Gray-labelled square QAM is exactly the max-log metric.
"""

from __future__ import annotations

import math

import numpy as np

_AXIS_BITS = {"BPSK": (1, 0), "QPSK": (1, 1), "16QAM": (2, 2), "64QAM": (3, 3)}
_SCALE = {"BPSK": 1.0, "QPSK": 1 / math.sqrt(2), "16QAM": 1 / math.sqrt(10),
          "64QAM": 1 / math.sqrt(42)}

# Cap on LLR magnitude so downstream path metrics cannot overflow even for
# (near-)noiseless demapping.
LLR_CLIP = 1e15


def bits_per_symbol(modulation: str) -> int:
    i_bits, q_bits = _axis_bits(modulation)
    return i_bits + q_bits


def _axis_bits(modulation: str) -> tuple[int, int]:
    try:
        return _AXIS_BITS[modulation]
    except KeyError:
        raise ValueError(f"unknown modulation {modulation!r}") from None


def _pam_levels(m_bits: int) -> np.ndarray:
    """Unscaled PAM levels ordered by position: -(M-1), ..., +(M-1)."""
    m = 1 << m_bits
    return np.arange(-(m - 1), m, 2, dtype=np.float64)


def _gray_positions(m_bits: int) -> np.ndarray:
    """position_of_label[g] for the binary-reflected Gray ladder."""
    m = 1 << m_bits
    pos = np.empty(m, dtype=np.int64)
    idx = np.arange(m)
    pos[idx ^ (idx >> 1)] = idx
    return pos


def constellation(modulation: str) -> np.ndarray:
    """Complex points indexed by the MSB-first bit label."""
    i_bits, q_bits = _axis_bits(modulation)
    scale = _SCALE[modulation]
    i_levels = _pam_levels(i_bits)[_gray_positions(i_bits)]
    if q_bits == 0:
        return i_levels * scale + 0j
    q_levels = _pam_levels(q_bits)[_gray_positions(q_bits)]
    labels = np.arange(1 << (i_bits + q_bits))
    return (i_levels[labels >> q_bits] + 1j * q_levels[labels & ((1 << q_bits) - 1)]) * scale


def qam_map(bits, modulation: str) -> np.ndarray:
    """Map a bit array (multiple of bits-per-symbol) to complex symbols."""
    bits = np.asarray(bits, dtype=np.int64).reshape(-1)
    k = bits_per_symbol(modulation)
    if bits.size % k:
        raise ValueError(f"bit count {bits.size} not divisible by {k}")
    weights = 1 << np.arange(k - 1, -1, -1, dtype=np.int64)
    labels = bits.reshape(-1, k) @ weights
    return constellation(modulation)[labels]


def _axis_llrs(y: np.ndarray, noise_var: np.ndarray, m_bits: int, scale: float) -> np.ndarray:
    """Max-log LLRs for one PAM axis; shape (n_symbols, m_bits)."""
    levels = _pam_levels(m_bits)[_gray_positions(m_bits)] * scale  # by label
    d2 = (y[:, None] - levels[None, :]) ** 2
    out = np.empty((y.size, m_bits))
    for bit in range(m_bits):
        one = (np.arange(levels.size) >> (m_bits - 1 - bit)) & 1 == 1
        out[:, bit] = d2[:, ~one].min(axis=1) - d2[:, one].min(axis=1)
    return out / noise_var[:, None]


def qam_demap(symbols, noise_var, modulation: str) -> np.ndarray:
    """Max-log LLRs (positive = bit 1) for received symbols.

    noise_var is the total complex noise variance per symbol (scalar or
    per-symbol array); zero and infinite variances are tolerated and yield
    clipped and zero LLRs respectively.
    """
    symbols = np.asarray(symbols, dtype=complex).reshape(-1)
    noise_var = np.broadcast_to(np.asarray(noise_var, dtype=np.float64), symbols.shape).copy()
    noise_var = np.maximum(noise_var, 1e-300)
    i_bits, q_bits = _axis_bits(modulation)
    scale = _SCALE[modulation]
    parts = [_axis_llrs(symbols.real, noise_var, i_bits, scale)]
    if q_bits:
        parts.append(_axis_llrs(symbols.imag, noise_var, q_bits, scale))
    llrs = np.concatenate(parts, axis=1).reshape(-1)
    return np.clip(llrs, -LLR_CLIP, LLR_CLIP)
