"""Frame pipeline: coding, interleaving, mapping and spatial parsing on the
transmit side; linear detection, soft demapping and Viterbi decoding on the
receive side.

The model is frequency-domain: each data subcarrier k applies its own
channel matrix, so OFDM modulation itself (IFFT/cyclic prefix) is not
simulated.  The receiver has perfect channel knowledge.  Total transmit
power is split evenly over streams and subcarriers and the per-subcarrier
noise is N0*BW/n_data, which makes the per-stream SNR at subcarrier k equal
to |h|^2 * P / (n_streams * N0 * BW) -- the same quantity the capacity
formulas use, so FER and capacity results are directly comparable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..capacity import LinkBudget
from ..channel import ChannelRealization
from . import coding, interleaving, modulation
from .mcs import McsConfig

SERVICE_BITS = 16
TAIL_BITS = 6

ZF_CONDITION_LIMIT = 1e12


class SingularChannelError(ValueError):
    """Channel too ill-conditioned for zero-forcing detection."""


@dataclass(frozen=True)
class Frame:
    """Payload (PSDU) for one transmission."""

    payload: bytes

    def __post_init__(self):
        if not 1 <= len(self.payload) <= 65535:
            raise ValueError(f"payload length {len(self.payload)} outside 1..65535 bytes")

    @property
    def length_bytes(self) -> int:
        return len(self.payload)


@dataclass(frozen=True)
class SymbolGrid:
    """Complex symbols indexed [ofdm_symbol, subcarrier, stream/antenna]."""

    symbols: np.ndarray

    @property
    def n_symbols(self) -> int:
        return self.symbols.shape[0]


def payload_bits(payload: bytes) -> np.ndarray:
    """Serialize bytes LSB-first into a uint8 bit array."""
    return np.unpackbits(np.frombuffer(payload, dtype=np.uint8), bitorder="little")


def bits_to_payload(bits: np.ndarray) -> bytes:
    return np.packbits(bits.astype(np.uint8), bitorder="little").tobytes()


def _check_streams(mcs: McsConfig, budget: LinkBudget):
    if mcs.n_streams != budget.n_streams:
        raise ValueError(
            f"MCS {mcs.index} uses {mcs.n_streams} streams but budget has {budget.n_streams}"
        )


def data_bits_per_symbol(mcs: McsConfig, budget: LinkBudget) -> int:
    """Information bits per OFDM symbol for this budget's subcarrier count."""
    bits = budget.n_data * mcs.n_streams * mcs.bits_per_subcarrier * mcs.code_rate
    if bits.denominator != 1:
        raise ValueError(
            f"n_data={budget.n_data} does not give whole data bits at rate {mcs.code_rate}"
        )
    return int(bits)


def n_ofdm_symbols(length_bytes: int, mcs: McsConfig, budget: LinkBudget) -> int:
    """OFDM symbol count for a payload, service and tail bits included."""
    n_bits = SERVICE_BITS + 8 * length_bytes + TAIL_BITS
    return -(-n_bits // data_bits_per_symbol(mcs, budget))


def transmit_frame(frame: Frame, mcs: McsConfig, budget: LinkBudget) -> SymbolGrid:
    """Encode and map a frame onto the subcarrier/stream grid.

    Pipeline: service bits + payload + zero tail, zero-padded to a whole
    number of OFDM symbols; convolutional encoding with puncturing; bit
    round-robin parsing onto spatial streams; per-stream block interleaving
    and Gray QAM mapping.  Grid symbols have unit average energy (power
    scaling is applied by the channel).
    """
    _check_streams(mcs, budget)
    ndbps = data_bits_per_symbol(mcs, budget)
    n_sym = n_ofdm_symbols(frame.length_bytes, mcs, budget)
    body = payload_bits(frame.payload)
    n_used = SERVICE_BITS + body.size + TAIL_BITS
    data = np.zeros(n_sym * ndbps, dtype=np.uint8)
    data[SERVICE_BITS:SERVICE_BITS + body.size] = body
    # Tail and pad bits stay zero, terminating the encoder in state 0.
    assert n_used <= data.size

    coded = coding.conv_encode(data, mcs.code_rate)
    n_streams = mcs.n_streams
    per_stream_block = budget.n_data * mcs.bits_per_subcarrier
    coded = coded.reshape(n_sym, n_streams * per_stream_block)

    grid = np.empty((n_sym, budget.n_data, n_streams), dtype=complex)
    for t in range(n_sym):
        for s in range(n_streams):
            block = coded[t, s::n_streams]
            block = interleaving.interleave(block)
            grid[t, :, s] = modulation.qam_map(block, mcs.modulation)
    return SymbolGrid(symbols=grid)


def _channel_scaling(ch: ChannelRealization, budget: LinkBudget) -> tuple[float, float]:
    """(per-stream-subcarrier amplitude, per-subcarrier noise variance)."""
    amp = math.sqrt(budget.power_w / (budget.n_streams * budget.n_data))
    noise_var = budget.noise_density_w_per_hz * budget.bandwidth_hz / budget.n_data
    return amp, noise_var


def apply_channel_awgn(grid: SymbolGrid, ch: ChannelRealization, budget: LinkBudget,
                       seed) -> SymbolGrid:
    """Propagate the grid through the channel and add white Gaussian noise.

    Deterministic for a fixed seed.  Noise is complex Gaussian with total
    per-sample variance N0*BW/n_data on every receive antenna.
    """
    x = grid.symbols
    if x.shape[1] != ch.n_data or x.shape[2] != ch.n_streams:
        raise ValueError(f"grid shape {x.shape} does not match channel "
                         f"({ch.n_data} subcarriers, {ch.n_streams} streams)")
    if ch.n_streams != budget.n_streams:
        raise ValueError("channel stream count does not match budget")
    amp, noise_var = _channel_scaling(ch, budget)
    y = np.einsum("krs,tks->tkr", ch.matrices, x) * amp
    if noise_var > 0.0:
        rng = np.random.default_rng(seed)
        w = rng.standard_normal(y.shape) + 1j * rng.standard_normal(y.shape)
        y = y + w * math.sqrt(noise_var / 2.0)
    return SymbolGrid(symbols=y)


def detect(received: SymbolGrid, ch: ChannelRealization, budget: LinkBudget,
           kind: str = "mmse") -> tuple[np.ndarray, np.ndarray]:
    """Linear per-subcarrier detection with perfect channel knowledge.

    Returns (estimates, noise_vars): unbiased per-stream symbol estimates of
    shape (n_symbols, n_data, n_streams) and the effective post-detection
    noise variance per (subcarrier, stream) for soft demapping.

    ZF inverts the channel outright and fails on matrices with condition
    number above 1e12; MMSE regularizes by the noise level and is unbiased
    by the standard SINR correction, converging to ZF as the noise vanishes.
    """
    y = received.symbols
    if y.shape[1] != ch.n_data or y.shape[2] != ch.n_streams:
        raise ValueError("received grid does not match channel dimensions")
    amp, noise_var = _channel_scaling(ch, budget)
    h_eff = ch.matrices * amp  # (n_data, n, n)
    n = ch.n_streams
    if kind == "zf":
        cond = np.linalg.cond(h_eff)
        if not np.all(np.isfinite(cond)) or np.any(cond > ZF_CONDITION_LIMIT):
            worst = int(np.argmax(np.where(np.isfinite(cond), cond, np.inf)))
            raise SingularChannelError(
                f"subcarrier {worst}: condition number exceeds {ZF_CONDITION_LIMIT:g}"
            )
        g = np.linalg.inv(h_eff)
        xhat = np.einsum("ksr,tkr->tks", g, y)
        nv = noise_var * np.einsum("ksr,ksr->ks", g, g.conj()).real
        return xhat, nv
    if kind == "mmse":
        gram = np.einsum("krs,krt->kst", h_eff.conj(), h_eff)
        reg = gram + noise_var * np.eye(n)[None, :, :]
        try:
            reg_inv = np.linalg.inv(reg)
        except np.linalg.LinAlgError as exc:
            # only reachable with a rank-deficient channel at exactly zero noise
            raise SingularChannelError(f"MMSE filter is singular: {exc}") from exc
        w = np.einsum("kst,ktu->ksu", reg_inv, h_eff.conj().transpose(0, 2, 1))
        mu = np.einsum("ksr,krs->ks", w, h_eff).real
        mu = np.clip(mu, 1e-300, None)
        xhat = np.einsum("ksr,tkr->tks", w, y) / mu[None, :, :]
        nv = (1.0 - mu) / mu
        return xhat, np.maximum(nv, 0.0)
    raise ValueError(f"unknown detector kind {kind!r} (expected 'zf' or 'mmse')")


def receive_frame(received: SymbolGrid, ch: ChannelRealization, budget: LinkBudget,
                  mcs: McsConfig, kind: str = "mmse",
                  payload_len: int | None = None) -> bytes:
    """Invert transmit_frame: detect, demap, deinterleave, decode.

    payload_len (bytes) is the PSDU length the transmitter used; when
    omitted, the longest payload that fits the grid is assumed.  (Length
    signalling lives in a header field outside this simplified baseband.)
    """
    _check_streams(mcs, budget)
    xhat, nv = detect(received, ch, budget, kind)
    n_sym = xhat.shape[0]
    n_streams = mcs.n_streams
    per_stream_block = budget.n_data * mcs.bits_per_subcarrier

    llrs = np.empty((n_sym, n_streams * per_stream_block))
    for t in range(n_sym):
        for s in range(n_streams):
            stream_llrs = modulation.qam_demap(xhat[t, :, s], nv[:, s], mcs.modulation)
            llrs[t, s::n_streams] = interleaving.deinterleave(stream_llrs)
    decoded = coding.viterbi_decode(llrs.reshape(-1), mcs.code_rate)

    ndbps = data_bits_per_symbol(mcs, budget)
    if payload_len is None:
        payload_len = (n_sym * ndbps - SERVICE_BITS - TAIL_BITS) // 8
    n_payload_bits = 8 * payload_len
    bits = decoded[SERVICE_BITS:SERVICE_BITS + n_payload_bits]
    return bits_to_payload(bits)
