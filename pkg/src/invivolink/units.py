"""dB/dBm unit conversions shared by the link budget and channel model."""

from __future__ import annotations

import math


def db_to_linear(value_db: float) -> float:
    """Convert a dB power ratio to linear scale."""
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    """Convert a linear power ratio to dB. Requires value > 0."""
    if value <= 0.0:
        raise ValueError(f"dB undefined for non-positive value {value!r}")
    return 10.0 * math.log10(value)


def dbm_to_watts(value_dbm: float) -> float:
    """Convert dBm to watts."""
    return 10.0 ** (value_dbm / 10.0) * 1e-3


def watts_to_dbm(value_w: float) -> float:
    """Convert watts to dBm. Requires value_w > 0."""
    if value_w <= 0.0:
        raise ValueError(f"dBm undefined for non-positive power {value_w!r}")
    return 10.0 * math.log10(value_w / 1e-3)


def throughput_bps(capacity_bps_hz: float, bandwidth_hz: float) -> float:
    """Spectral efficiency (bits/s/Hz) times bandwidth -> bits/s."""
    return capacity_bps_hz * bandwidth_hz


def throughput_mbps(capacity_bps_hz: float, bandwidth_hz: float) -> float:
    """Spectral efficiency (bits/s/Hz) -> Mbps over the given bandwidth."""
    return capacity_bps_hz * bandwidth_hz / 1e6
