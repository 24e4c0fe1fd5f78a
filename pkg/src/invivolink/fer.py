"""Seeded Monte Carlo frame/bit error rate estimation with early stopping.

Every frame is a self-contained experiment: its payload, fading draw and
noise are derived from (base_seed, frame index) through independent seed
streams, so results are bit-identical no matter how frames are scheduled
across workers.  Early stopping halts at the first frame index where the
cumulative error count reaches the configured threshold, which is likewise
order-independent.

Also provides the capacity/FER sweep drivers used by the CLI and an uncoded
BPSK diagnostic whose BER can be checked against the Gaussian Q function.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.stats import norm

from .capacity import LinkBudget, siso_capacity, total_capacity
from .channel import (AntennaLayout, ChannelRealization, InVivoPathModel,
                      front_layout, load_channel_file, synthesize_channel)
from .phy import (Frame, apply_channel_awgn, mcs_table, receive_frame,
                  transmit_frame)
from .phy.link import payload_bits

# Lanes of the per-frame seed tree.
_LANE_PAYLOAD = 0
_LANE_CHANNEL = 1
_LANE_NOISE = 2
_LANE_SISO_CHANNEL = 3


def frame_seed(base_seed: int, frame_index: int, lane: int) -> np.random.SeedSequence:
    """Collision-resistant per-frame seed stream."""
    return np.random.SeedSequence(entropy=(int(base_seed), int(frame_index), int(lane)))


@dataclass(frozen=True)
class SyntheticSource:
    """Fresh fading draw per frame for a placement scenario."""

    layout: AntennaLayout
    model: InVivoPathModel


@dataclass(frozen=True)
class FixedSource:
    """One fixed realization reused for every frame (file-style channels)."""

    realization: ChannelRealization

    @classmethod
    def from_file(cls, path, budget: LinkBudget) -> "FixedSource":
        return cls(load_channel_file(path, budget.n_data, budget.n_streams))


@dataclass(frozen=True)
class SimulationPlan:
    mcs_index: int
    budget: LinkBudget
    channel_source: SyntheticSource | FixedSource
    detector: str = "mmse"
    frame_length_bytes: int = 1000
    max_frames: int = 100_000
    min_error_frames: int = 100
    base_seed: int = 0

    def __post_init__(self):
        if self.max_frames < 1:
            raise ValueError("max_frames must be >= 1")
        if self.min_error_frames < 1:
            raise ValueError("min_error_frames must be >= 1")


@dataclass(frozen=True)
class FrameStats:
    frames_sent: int
    frame_errors: int
    bit_errors: int
    bits_sent: int
    fer: float
    ber: float
    ci95: tuple[float, float]
    elapsed_s: float = 0.0


def wilson_interval(errors: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 0 <= errors <= trials:
        raise ValueError(f"errors={errors} outside 0..{trials}")
    z = norm.ppf(0.5 + confidence / 2.0)
    p = errors / trials
    denom = 1.0 + z * z / trials
    center = p + z * z / (2.0 * trials)
    rad = z * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials))
    # the interval endpoints are exactly 0/1 at the boundary counts
    low = 0.0 if errors == 0 else max(0.0, (center - rad) / denom)
    high = 1.0 if errors == trials else min(1.0, (center + rad) / denom)
    return (low, high)


def _frame_channel(plan: SimulationPlan, index: int) -> ChannelRealization:
    src = plan.channel_source
    if isinstance(src, FixedSource):
        return src.realization
    return synthesize_channel(src.layout, src.model, plan.budget,
                              seed=frame_seed(plan.base_seed, index, _LANE_CHANNEL))


def run_one_frame(plan: SimulationPlan, index: int) -> tuple[bool, int]:
    """Simulate frame `index`; returns (frame_error, bit_errors)."""
    mcs = mcs_table(plan.mcs_index)
    payload_rng = np.random.default_rng(frame_seed(plan.base_seed, index, _LANE_PAYLOAD))
    payload = payload_rng.bytes(plan.frame_length_bytes)
    ch = _frame_channel(plan, index)
    grid = transmit_frame(Frame(payload), mcs, plan.budget)
    rx = apply_channel_awgn(grid, ch, plan.budget,
                            seed=frame_seed(plan.base_seed, index, _LANE_NOISE))
    decoded = receive_frame(rx, ch, plan.budget, mcs, plan.detector,
                            payload_len=plan.frame_length_bytes)
    if decoded == payload:
        return False, 0
    bit_errs = int(np.count_nonzero(payload_bits(decoded) != payload_bits(payload)))
    return True, bit_errs


def _chunk_results(plan: SimulationPlan, indices) -> list[tuple[bool, int]]:
    return [run_one_frame(plan, i) for i in indices]


def run_fer(plan: SimulationPlan, workers: int = 1, progress=None) -> FrameStats:
    """Monte Carlo FER/BER estimate under the plan's stopping rule.

    Stops at max_frames or once min_error_frames frame errors have
    accumulated (sequential estimate).  `workers` > 1 distributes frames
    over processes; the outcome is bit-identical to the sequential run.
    `progress`, if given, is called as progress(frames_done, frame_errors).
    """
    t0 = time.perf_counter()
    frame_bits = 8 * plan.frame_length_bytes
    frames = errors = bit_errors = 0

    def consume(result):
        nonlocal frames, errors, bit_errors
        err, berr = result
        frames += 1
        errors += int(err)
        bit_errors += berr
        return errors >= plan.min_error_frames

    if workers <= 1:
        for i in range(plan.max_frames):
            if consume(run_one_frame(plan, i)):
                break
            if progress is not None and (i + 1) % 100 == 0:
                progress(frames, errors)
    else:
        import multiprocessing as mp

        chunk = max(16, min(256, plan.max_frames // (4 * workers) or 16))
        spans = [range(lo, min(lo + chunk, plan.max_frames))
                 for lo in range(0, plan.max_frames, chunk)]
        with mp.get_context("fork").Pool(workers) as pool:
            stop = False
            for results in pool.imap(_ChunkRunner(plan), spans):
                for result in results:
                    if consume(result):
                        stop = True
                        break
                if progress is not None:
                    progress(frames, errors)
                if stop:
                    break

    fer = errors / frames
    bits = frames * frame_bits
    return FrameStats(
        frames_sent=frames,
        frame_errors=errors,
        bit_errors=bit_errors,
        bits_sent=bits,
        fer=fer,
        ber=bit_errors / bits,
        ci95=wilson_interval(errors, frames),
        elapsed_s=time.perf_counter() - t0,
    )


class _ChunkRunner:
    """Picklable chunk worker for the process pool."""

    def __init__(self, plan: SimulationPlan):
        self.plan = plan

    def __call__(self, indices):
        return _chunk_results(self.plan, indices)


@dataclass(frozen=True)
class BerStats:
    bits_sent: int
    bit_errors: int
    ber: float
    ci95: tuple[float, float]


def uncoded_bpsk_ber(snr_db: float, n_bits: int, seed=0) -> BerStats:
    """Uncoded BPSK over AWGN; measured BER should track Q(sqrt(2*snr))."""
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, n_bits)
    symbols = 2.0 * bits - 1.0
    noise_var = 10.0 ** (-snr_db / 10.0)
    y = symbols + rng.standard_normal(n_bits) * math.sqrt(noise_var / 2.0)
    errors = int(np.count_nonzero((y > 0).astype(np.int64) != bits))
    return BerStats(bits_sent=n_bits, bit_errors=errors, ber=errors / n_bits,
                    ci95=wilson_interval(errors, n_bits))


# ---------------------------------------------------------------------------
# Sweep drivers


@dataclass(frozen=True)
class CapacityPoint:
    """Mean capacity over fading realizations for one placement."""

    case_id: int
    label: str
    distance_mm: float
    realizations: int
    mimo_bps_hz: float
    mimo_ci95: tuple[float, float]
    siso_bps_hz: float
    siso_ci95: tuple[float, float]


def _mean_ci(values: np.ndarray) -> tuple[float, tuple[float, float]]:
    mean = float(values.mean())
    if values.size < 2:
        return mean, (mean, mean)
    half = 1.959963984540054 * float(values.std(ddof=1)) / math.sqrt(values.size)
    return mean, (mean - half, mean + half)


def capacity_point(layout: AntennaLayout, model: InVivoPathModel, budget: LinkBudget,
                   n_realizations: int = 100, base_seed: int = 0,
                   point_key: int = 0) -> CapacityPoint:
    """Average MIMO and matched-geometry SISO capacity over fading draws.

    Realization r uses the same channel seed stream as FER frame r of the
    same (base_seed, point), so capacity and FER statistics describe the
    same fading population.
    """
    mimo_budget = replace(budget, n_streams=2)
    siso_budget = replace(budget, n_streams=1)
    mimo = np.empty(n_realizations)
    siso = np.empty(n_realizations)
    seed_base = _point_seed(base_seed, point_key)
    for r in range(n_realizations):
        ch2 = synthesize_channel(layout, model, mimo_budget,
                                 seed=frame_seed(seed_base, r, _LANE_CHANNEL))
        ch1 = synthesize_channel(layout, model, siso_budget,
                                 seed=frame_seed(seed_base, r, _LANE_SISO_CHANNEL))
        mimo[r] = total_capacity(ch2, mimo_budget).total_bps_hz
        siso[r] = total_capacity(ch1, siso_budget).total_bps_hz
    mimo_mean, mimo_ci = _mean_ci(mimo)
    siso_mean, siso_ci = _mean_ci(siso)
    return CapacityPoint(
        case_id=layout.case_id,
        label=layout.label,
        distance_mm=layout.siso_distance_mm,
        realizations=n_realizations,
        mimo_bps_hz=mimo_mean,
        mimo_ci95=mimo_ci,
        siso_bps_hz=siso_mean,
        siso_ci95=siso_ci,
    )


def _point_seed(base_seed: int, point_key: int) -> int:
    # Distinct deterministic sub-seed per sweep point.
    return int(np.random.SeedSequence(entropy=(int(base_seed), int(point_key))).generate_state(1)[0])


def sweep_capacity(layouts, model: InVivoPathModel, budget: LinkBudget,
                   n_realizations: int = 100, base_seed: int = 0) -> list[CapacityPoint]:
    """Capacity statistics for a sequence of placements."""
    layouts = list(layouts)
    if not layouts:
        raise ValueError("empty sweep grid")
    return [capacity_point(layout, model, budget, n_realizations, base_seed, point_key=i)
            for i, layout in enumerate(layouts)]


def sweep_distance(distances_mm, model: InVivoPathModel, budget: LinkBudget,
                   n_realizations: int = 100, base_seed: int = 0) -> list[CapacityPoint]:
    """Front-of-body capacity sweep over Tx-Rx distances."""
    distances = sorted(float(d) for d in distances_mm)
    if not distances:
        raise ValueError("empty distance grid")
    return sweep_capacity([front_layout(d) for d in distances], model, budget,
                          n_realizations, base_seed)


def crossing_distance(points: list[CapacityPoint], threshold_bps_hz: float = 5.0,
                      which: str = "mimo") -> float | None:
    """Interpolated distance where mean capacity crosses the threshold.

    Points must be sorted by distance; returns None when the capacity curve
    never spans the threshold.
    """
    cap = [p.mimo_bps_hz if which == "mimo" else p.siso_bps_hz for p in points]
    for (p0, c0), (p1, c1) in zip(zip(points, cap), zip(points[1:], cap[1:])):
        if (c0 - threshold_bps_hz) * (c1 - threshold_bps_hz) <= 0.0 and c0 != c1:
            frac = (c0 - threshold_bps_hz) / (c0 - c1)
            return p0.distance_mm + frac * (p1.distance_mm - p0.distance_mm)
    return None


@dataclass(frozen=True)
class FerPoint:
    mcs_index: int
    stats: FrameStats | None
    error: str = ""


def sweep_fer(mcs_indices, make_plan, workers: int = 1) -> list[FerPoint]:
    """Run FER for each MCS index; per-point failures do not stop the sweep.

    `make_plan` maps an MCS index to a SimulationPlan.
    """
    mcs_indices = list(mcs_indices)
    if not mcs_indices:
        raise ValueError("empty MCS grid")
    out = []
    for idx in mcs_indices:
        try:
            out.append(FerPoint(idx, run_fer(make_plan(idx), workers=workers)))
        except Exception as exc:  # noqa: BLE001 - sweep aggregates failures
            out.append(FerPoint(idx, None, error=f"{type(exc).__name__}: {exc}"))
    return out
