"""Rate-1/2 convolutional code (K=7, generators 133/171 octal) with the
standard puncturing to 2/3, 3/4 and 5/6, plus a soft-input Viterbi decoder.

The coded stream is serialized [a0, b0, a1, b1, ...] (generator 133 first).
LLR convention throughout: positive means the bit is more likely 1.  The
Viterbi inner loop is JIT-compiled; decoding is maximum-likelihood over the
64-state trellis with full-block traceback.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from numba import njit

CONSTRAINT_LEN = 7
G0_OCTAL = 0o133
G1_OCTAL = 0o171

# Serialized puncture masks over [a_i, b_i] pairs, one period each.
_PUNCTURE_MASKS = {
    Fraction(1, 2): np.array([1, 1], dtype=bool),
    Fraction(2, 3): np.array([1, 1, 1, 0], dtype=bool),
    Fraction(3, 4): np.array([1, 1, 1, 0, 0, 1], dtype=bool),
    Fraction(5, 6): np.array([1, 1, 1, 0, 0, 1, 1, 0, 0, 1], dtype=bool),
}

_G0_TAPS = np.array([(G0_OCTAL >> i) & 1 for i in range(CONSTRAINT_LEN - 1, -1, -1)], dtype=np.uint8)
_G1_TAPS = np.array([(G1_OCTAL >> i) & 1 for i in range(CONSTRAINT_LEN - 1, -1, -1)], dtype=np.uint8)


def supported_rates() -> tuple[Fraction, ...]:
    return tuple(_PUNCTURE_MASKS)


def _mask_for(n_mother: int, rate: Fraction) -> np.ndarray:
    try:
        pattern = _PUNCTURE_MASKS[Fraction(rate)]
    except KeyError:
        raise ValueError(f"unsupported code rate {rate!r}") from None
    reps = -(-n_mother // pattern.size)
    return np.tile(pattern, reps)[:n_mother]


def conv_encode(bits, rate=Fraction(1, 2)) -> np.ndarray:
    """Encode with the rate-1/2 mother code, then puncture to `rate`.

    The caller is responsible for appending tail bits if termination in the
    zero state is wanted; this function is a pure rate transform.
    """
    bits = np.asarray(bits, dtype=np.uint8).reshape(-1)
    a = np.convolve(bits, _G0_TAPS)[: bits.size] % 2
    b = np.convolve(bits, _G1_TAPS)[: bits.size] % 2
    mother = np.empty(2 * bits.size, dtype=np.uint8)
    mother[0::2] = a
    mother[1::2] = b
    return mother[_mask_for(mother.size, rate)]


def depuncture_llrs(llrs, rate) -> np.ndarray:
    """Re-expand punctured LLRs to the mother-code length, zeros at stolen
    positions."""
    llrs = np.asarray(llrs, dtype=np.float64).reshape(-1)
    rate = Fraction(rate)
    n_in = llrs.size * rate.numerator
    if n_in % rate.denominator:
        raise ValueError(f"LLR length {llrs.size} is not a whole number of "
                         f"rate-{rate} puncture periods")
    n_mother = 2 * (n_in // rate.denominator)
    mask = _mask_for(n_mother, rate)
    if int(mask.sum()) != llrs.size:
        raise ValueError(f"LLR length {llrs.size} does not fit rate {rate}")
    out = np.zeros(n_mother, dtype=np.float64)
    out[mask] = llrs
    return out


def _transition_tables():
    """Trellis outputs and branch wiring for the 64-state register.

    State packs the previous six input bits, most recent in bit 5.  The
    7-bit word (input << 6) | state selects the generator taps.
    """
    n_states = 1 << (CONSTRAINT_LEN - 1)
    out_a = np.empty((2, n_states), dtype=np.float64)
    out_b = np.empty((2, n_states), dtype=np.float64)
    for u in (0, 1):
        for s in range(n_states):
            w = (u << 6) | s
            out_a[u, s] = bin(w & G0_OCTAL).count("1") % 2
            out_b[u, s] = bin(w & G1_OCTAL).count("1") % 2
    return out_a, out_b


_OUT_A, _OUT_B = _transition_tables()


@njit(cache=True)
def _viterbi_forward(la, lb, out_a, out_b):  # pragma: no cover - jitted
    n = la.size
    n_states = 64
    neg = -1e30
    pm = np.full(n_states, neg)
    pm[0] = 0.0  # encoder starts in the zero state
    decisions = np.empty((n, n_states), dtype=np.uint8)
    new_pm = np.empty(n_states)
    for t in range(n):
        va = la[t]
        vb = lb[t]
        for ns in range(n_states):
            u = ns >> 5
            s0 = (ns & 31) << 1
            s1 = s0 | 1
            bm0 = out_a[u, s0] * va + out_b[u, s0] * vb
            bm1 = out_a[u, s1] * va + out_b[u, s1] * vb
            m0 = pm[s0] + bm0
            m1 = pm[s1] + bm1
            if m0 >= m1:
                new_pm[ns] = m0
                decisions[t, ns] = 0
            else:
                new_pm[ns] = m1
                decisions[t, ns] = 1
        pm[:] = new_pm
    # Traceback from the best final state.
    best = 0
    for s in range(1, n_states):
        if pm[s] > pm[best]:
            best = s
    bits = np.empty(n, dtype=np.uint8)
    state = best
    for t in range(n - 1, -1, -1):
        bits[t] = state >> 5
        state = ((state & 31) << 1) | decisions[t, state]
    return bits


def viterbi_decode(llrs, rate=Fraction(1, 2)) -> np.ndarray:
    """Maximum-likelihood decode of punctured soft values.

    `llrs` is the punctured coded-bit LLR stream (positive = bit 1); stolen
    positions are re-inserted as zero LLRs internally.  Returns the decoded
    input bits, tail included.
    """
    mother = depuncture_llrs(llrs, rate)
    la = np.ascontiguousarray(mother[0::2])
    lb = np.ascontiguousarray(mother[1::2])
    return _viterbi_forward(la, lb, _OUT_A, _OUT_B)
