"""Federated learning simulator with bandwidth-aware Top-K compression.

Implements FedAvg with magnitude Top-K (optionally with error feedback),
per-client compression ratio scheduling from bandwidth and latency, and
overlap-weighted averaging of sparse updates.
"""

from .bcrs import RoundPlan, benchmark_time, client_coefficients, normalize_ratios, schedule_ratios
from .compression import CompressorState, ef_topk_sparsify, topk_sparsify
from .config import ExperimentConfig, load_config
from .netsim import ClientProfile, TimeLedger, comm_time, record_round, sample_profiles
from .opwa import OverlapMask, compute_overlap, generate_mask, overlap_histogram
from .orchestrator import RoundReport, run_experiment, run_round, select_clients
from .params import SparseUpdate, compute_update, densify, payload_bits

__version__ = "0.1.0"
