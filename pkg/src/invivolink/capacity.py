"""Shannon capacity of 2x2 MIMO and SISO links under equal power allocation.

The MIMO capacity per subcarrier is the sum over the two eigenchannels of
log2(1 + lambda_i * P / (2 * N0 * BW)), where lambda_i are the squared
singular values of the per-subcarrier channel matrix and the transmit power
is split evenly across the two streams (no water-filling).  The aggregate
over N_data subcarriers is normalized by BW * T_sym to bits/s/Hz.

The 2x2 singular value decomposition is closed-form (eigen-decomposition of
H^H H with a deterministic phase convention), so results are exact and
reproducible without an external solver.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

# SAR-derived transmit power cap: 0.412 mW keeps the local specific
# absorption rate under the 1.6 W/kg regulatory limit for this antenna setup.
SAR_POWER_CAP_W = 0.412e-3

DEFAULT_POWER_W = 0.412e-3
DEFAULT_NOISE_DENSITY_W_PER_HZ = 10.0 ** (-174.0 / 10.0) * 1e-3  # -174 dBm/Hz
DEFAULT_BANDWIDTH_HZ = 20e6
DEFAULT_T_SYM_S = 4e-6
DEFAULT_N_DATA = 52


@dataclass(frozen=True)
class LinkBudget:
    """Transmit power, noise density and OFDM framing constants.

    noise_density_w_per_hz may be zero only for noiseless PHY diagnostics;
    capacity computations require it to be strictly positive.
    """

    power_w: float = DEFAULT_POWER_W
    noise_density_w_per_hz: float = DEFAULT_NOISE_DENSITY_W_PER_HZ
    bandwidth_hz: float = DEFAULT_BANDWIDTH_HZ
    t_sym_s: float = DEFAULT_T_SYM_S
    n_data: int = DEFAULT_N_DATA
    n_streams: int = 2
    enforce_sar_cap: bool = True

    def __post_init__(self):
        if not (self.power_w > 0.0 and math.isfinite(self.power_w)):
            raise ValueError(f"power_w must be positive, got {self.power_w!r}")
        if not (self.noise_density_w_per_hz >= 0.0 and math.isfinite(self.noise_density_w_per_hz)):
            raise ValueError(
                f"noise_density_w_per_hz must be non-negative, got {self.noise_density_w_per_hz!r}"
            )
        if not (self.bandwidth_hz > 0.0 and math.isfinite(self.bandwidth_hz)):
            raise ValueError(f"bandwidth_hz must be positive, got {self.bandwidth_hz!r}")
        if not (self.t_sym_s > 0.0 and math.isfinite(self.t_sym_s)):
            raise ValueError(f"t_sym_s must be positive, got {self.t_sym_s!r}")
        if self.n_data < 1:
            raise ValueError(f"n_data must be >= 1, got {self.n_data!r}")
        if self.n_streams not in (1, 2):
            raise ValueError(f"n_streams must be 1 or 2, got {self.n_streams!r}")
        if self.enforce_sar_cap and self.power_w > SAR_POWER_CAP_W * (1 + 1e-12):
            raise ValueError(
                f"power_w={self.power_w!r} W exceeds the SAR-derived cap of "
                f"{SAR_POWER_CAP_W} W; pass enforce_sar_cap=False to override"
            )

    @property
    def noise_power_w(self) -> float:
        """Total thermal noise power over the system bandwidth."""
        return self.noise_density_w_per_hz * self.bandwidth_hz

    def _require_noise(self):
        if self.noise_density_w_per_hz <= 0.0:
            raise ValueError("capacity is unbounded at zero noise density")


@dataclass(frozen=True)
class SvdResult:
    """H = u @ diag(sigma) @ v with u, v unitary and sigma descending."""

    u: np.ndarray
    v: np.ndarray
    sigma: tuple[float, float]


@dataclass(frozen=True)
class CapacityResult:
    """Per-subcarrier capacities (bits/OFDM symbol) and their aggregate."""

    per_subcarrier: np.ndarray
    total_bps_hz: float
    total_bps: float = field(default=0.0)


def _as_matrix2c(h) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if h.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {h.shape}")
    if not np.all(np.isfinite(h.view(float))):
        raise ValueError("channel matrix contains non-finite entries")
    return h


def _phase_normalize(x: complex, y: complex) -> tuple[complex, complex]:
    # Rotate so the first nonzero component is real-positive; keeps ties
    # between equal singular values reproducible.
    pivot = x if abs(x) > 0.0 else y
    m = abs(pivot)
    if m == 0.0:
        return x, y
    ph = pivot.conjugate() / m
    return x * ph, y * ph


def svd2x2(h) -> SvdResult:
    """Closed-form singular value decomposition of a 2x2 complex matrix.

    Returns factors such that u @ diag(sigma) @ v reconstructs the input,
    with sigma sorted descending.  Output is deterministic: the right
    singular vectors carry a real-positive leading-component phase
    convention, and degenerate (equal-sigma) inputs fall back to the
    canonical basis.
    """
    h = _as_matrix2c(h)
    h00 = complex(h[0, 0]); h01 = complex(h[0, 1])
    h10 = complex(h[1, 0]); h11 = complex(h[1, 1])

    # Gram matrix G = H^H H = [[a, b], [conj(b), c]] is Hermitian PSD.
    a = abs(h00) ** 2 + abs(h10) ** 2
    c = abs(h01) ** 2 + abs(h11) ** 2
    b = h00.conjugate() * h01 + h10.conjugate() * h11

    disc = math.hypot(a - c, 2.0 * abs(b))
    lam1 = 0.5 * (a + c + disc)

    # Leading eigenvector of G, using the branch without cancellation.
    if a >= c:
        w1x, w1y = complex(lam1 - c), b.conjugate()
    else:
        w1x, w1y = b, complex(lam1 - a)
    n1 = math.hypot(abs(w1x), abs(w1y))
    if n1 == 0.0:
        w1x, w1y = (1.0 + 0.0j, 0.0 + 0.0j) if a >= c else (0.0 + 0.0j, 1.0 + 0.0j)
    else:
        w1x, w1y = w1x / n1, w1y / n1
    w1x, w1y = _phase_normalize(w1x, w1y)
    # Orthonormal complement, then the same phase convention.
    w2x, w2y = _phase_normalize(-w1y.conjugate(), w1x.conjugate())

    # Left vectors: u1 from H w1; u2 as the exact complement of u1 with its
    # phase aligned to H w2 so the rank-2 part reconstructs.  sigma are read
    # off directly (|H w1|, |u2^H H w2|), which avoids the cancellation of
    # sqrt(lambda2) near rank-1 inputs.
    t1x = h00 * w1x + h01 * w1y
    t1y = h10 * w1x + h11 * w1y
    sigma1 = math.hypot(abs(t1x), abs(t1y))
    if sigma1 > 0.0:
        u1x, u1y = t1x / sigma1, t1y / sigma1
    else:
        u1x, u1y = 1.0 + 0.0j, 0.0 + 0.0j
    u2x, u2y = -u1y.conjugate(), u1x.conjugate()
    t2x = h00 * w2x + h01 * w2y
    t2y = h10 * w2x + h11 * w2y
    s2 = u2x.conjugate() * t2x + u2y.conjugate() * t2y
    sigma2 = abs(s2)
    if sigma2 > 0.0:
        ph = s2 / sigma2
        u2x, u2y = u2x * ph, u2y * ph
    sigma2 = min(sigma2, sigma1)

    u = np.array([[u1x, u2x], [u1y, u2y]], dtype=complex)
    v = np.array([[w1x, w1y], [w2x, w2y]], dtype=complex).conjugate()
    return SvdResult(u=u, v=v, sigma=(sigma1, sigma2))


def subcarrier_capacity(h, budget: LinkBudget) -> float:
    """Capacity of one subcarrier in bits/OFDM symbol (2 streams, P/2 each)."""
    if budget.n_streams != 2:
        raise ValueError("subcarrier_capacity requires a 2-stream budget")
    budget._require_noise()
    svd = svd2x2(h)
    snr_scale = budget.power_w / (2.0 * budget.noise_density_w_per_hz * budget.bandwidth_hz)
    return math.log2(1.0 + svd.sigma[0] ** 2 * snr_scale) + math.log2(
        1.0 + svd.sigma[1] ** 2 * snr_scale
    )


def logdet_capacity(h, budget: LinkBudget) -> float:
    """Verification oracle: log2 det(I + (P/(2 N0 BW)) H H^H).

    Mathematically identical to subcarrier_capacity but shares no code with
    the SVD path.
    """
    budget._require_noise()
    h = _as_matrix2c(h)
    snr_scale = budget.power_w / (2.0 * budget.noise_density_w_per_hz * budget.bandwidth_hz)
    h00 = complex(h[0, 0]); h01 = complex(h[0, 1])
    h10 = complex(h[1, 0]); h11 = complex(h[1, 1])
    # M = I + snr_scale * H H^H, det(M) is real for Hermitian M.
    m00 = 1.0 + snr_scale * (abs(h00) ** 2 + abs(h01) ** 2)
    m11 = 1.0 + snr_scale * (abs(h10) ** 2 + abs(h11) ** 2)
    m01 = snr_scale * (h00 * h10.conjugate() + h01 * h11.conjugate())
    det = m00 * m11 - abs(m01) ** 2
    return math.log2(det)


def siso_subcarrier_capacity(h: complex, budget: LinkBudget) -> float:
    """Capacity of one SISO subcarrier: log2(1 + |h|^2 P / (N0 BW))."""
    budget._require_noise()
    h = complex(h)
    if not (math.isfinite(h.real) and math.isfinite(h.imag)):
        raise ValueError("channel coefficient is not finite")
    snr = (abs(h) ** 2) * budget.power_w / (budget.noise_density_w_per_hz * budget.bandwidth_hz)
    return math.log2(1.0 + snr)


def _aggregate(per_subcarrier: np.ndarray, budget: LinkBudget) -> CapacityResult:
    total_bps_hz = float(per_subcarrier.sum() / (budget.bandwidth_hz * budget.t_sym_s))
    return CapacityResult(
        per_subcarrier=per_subcarrier,
        total_bps_hz=total_bps_hz,
        total_bps=total_bps_hz * budget.bandwidth_hz,
    )


def total_capacity(ch, budget: LinkBudget) -> CapacityResult:
    """Aggregate capacity of a channel realization in bits/s/Hz.

    `ch` is a ChannelRealization (or any object with a `matrices` array of
    shape (n_data, n, n)); the per-subcarrier path is chosen by
    budget.n_streams.
    """
    matrices = np.asarray(ch.matrices, dtype=complex)
    if matrices.shape[0] != budget.n_data:
        raise ValueError(
            f"realization has {matrices.shape[0]} subcarriers, budget expects {budget.n_data}"
        )
    if budget.n_streams == 1:
        return siso_capacity(matrices.reshape(budget.n_data, -1)[:, 0], budget)
    per = np.array([subcarrier_capacity(m, budget) for m in matrices])
    return _aggregate(per, budget)


def siso_capacity(h_scalars, budget: LinkBudget) -> CapacityResult:
    """Aggregate SISO capacity over the data subcarriers in bits/s/Hz."""
    if budget.n_streams != 1:
        raise ValueError("siso_capacity requires a 1-stream budget")
    h_scalars = np.asarray(h_scalars, dtype=complex).reshape(-1)
    if h_scalars.shape[0] != budget.n_data:
        raise ValueError(
            f"got {h_scalars.shape[0]} coefficients, budget expects {budget.n_data}"
        )
    per = np.array([siso_subcarrier_capacity(h, budget) for h in h_scalars])
    return _aggregate(per, budget)
