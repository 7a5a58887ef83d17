"""Capacities, achievable rates and buffer simulations for an
energy-harvesting transmitter on a fading AWGN channel."""

from .models import (DiscreteDist, PowerPolicy, RateResult, Scenario,
                     TrajectoryStats, load_scenario, save_scenario, validate)
from .allocator import WaterfillSolution, hus_threshold, waterfill, waterfill_lossy
from .infocalc import (QuadratureSpec, binary_mi, gaussian_rate, kkt_residual,
                       mixture_mi, peak_capacity_closed)
from .rates import (ArchRateReport, applicable_reports, rate_hsu_lossy, rate_hu,
                    rate_hus, rate_ideal_csit, rate_ideal_ncsit,
                    rate_processing, sleep_optimize)
from .simulator import (Policy, ReplicationSummary, analytic_reference,
                        replicate, simulate, simulate_signaling)
from .presets import get_preset

__version__ = "0.1.0"

__all__ = [
    "DiscreteDist", "Scenario", "PowerPolicy", "RateResult", "TrajectoryStats",
    "load_scenario", "save_scenario", "validate",
    "WaterfillSolution", "waterfill", "waterfill_lossy", "hus_threshold",
    "QuadratureSpec", "gaussian_rate", "peak_capacity_closed", "binary_mi",
    "mixture_mi", "kkt_residual",
    "ArchRateReport", "rate_ideal_csit", "rate_ideal_ncsit", "rate_hsu_lossy",
    "rate_hu", "rate_hus", "rate_processing", "sleep_optimize",
    "applicable_reports",
    "Policy", "simulate", "simulate_signaling", "replicate",
    "ReplicationSummary", "analytic_reference",
    "get_preset",
]
