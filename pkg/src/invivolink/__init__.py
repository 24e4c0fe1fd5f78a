"""Link-level simulator for SAR-limited in-body 2x2 MIMO and SISO links.

Computes Shannon capacity per subcarrier (closed-form 2x2 SVD, equal power
allocation) and frame error rate through a simplified 802.11n-style
baseband, over synthetic or file-based in-body channel realizations.
"""

from .capacity import (CapacityResult, LinkBudget, SvdResult, logdet_capacity,
                       siso_capacity, subcarrier_capacity, svd2x2,
                       total_capacity)
from .channel import (AntennaLayout, ChannelFileError, ChannelRealization,
                      InVivoPathModel, MalformedRowError, NonFiniteValueError,
                      RowCountError, UnknownCaseError, front_layout,
                      geometry_for_case, load_channel_file, pairwise_distances,
                      save_channel_file, synthesize_channel)
from .fer import (BerStats, CapacityPoint, FixedSource, FrameStats,
                  SimulationPlan, SyntheticSource, capacity_point,
                  crossing_distance, run_fer, sweep_capacity, sweep_distance,
                  sweep_fer, uncoded_bpsk_ber, wilson_interval)
from .units import (db_to_linear, dbm_to_watts, linear_to_db, throughput_bps,
                    throughput_mbps, watts_to_dbm)

__version__ = "0.1.0"
