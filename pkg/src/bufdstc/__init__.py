"""Buffer-aided distributed space-time coding for cooperative DS-CDMA uplinks.

The package simulates a multiuser uplink where ``K`` users reach a
destination through ``L`` decode-and-forward relays with finite buffers.
Each epoch a relay pair is chosen by its SINR and either receives from the
source or forwards a stored packet as a distributed Alamouti block.
"""

from .buffers import BufferBank, DynamicBufferPolicy, RelayBuffer, adapt_size_power, adapt_size_snr
from .config import SimConfig
from .delay import DelayStats, DelayTrace, analytic_delay, measure_delay
from .dstc import alamouti_encode, build_stacked_channel, transmit_dstc_phase
from .errors import (
    BufferEmpty,
    BufferFull,
    ConfigurationError,
    IllConditionedModelError,
    InsufficientDataError,
    InvalidPairError,
    ModelError,
    UndefinedDelayError,
)
from .estimation import estimate_channels
from .experiments import ExperimentResult, run_ber_sweep, run_buffer_size_sweep, run_delay_experiment
from .link_quality import LinkQualityTable, Phase, build_table
from .output import emit_results
from .receivers import linear_detect, ml_alamouti_detect, mmse_filter, rake_filter, slicer
from .selection import PairDecision, no_selection_schedule, select_exhaustive, select_greedy, select_random
from .signal_model import draw_channels, effective_signature, generate_codes, transmit_source_phase
from .simulation import Trial

__version__ = "0.1.0"

__all__ = [
    "BufferBank",
    "DynamicBufferPolicy",
    "RelayBuffer",
    "adapt_size_power",
    "adapt_size_snr",
    "SimConfig",
    "DelayStats",
    "DelayTrace",
    "analytic_delay",
    "measure_delay",
    "alamouti_encode",
    "build_stacked_channel",
    "transmit_dstc_phase",
    "BufferEmpty",
    "BufferFull",
    "ConfigurationError",
    "IllConditionedModelError",
    "InsufficientDataError",
    "InvalidPairError",
    "ModelError",
    "UndefinedDelayError",
    "estimate_channels",
    "ExperimentResult",
    "run_ber_sweep",
    "run_buffer_size_sweep",
    "run_delay_experiment",
    "LinkQualityTable",
    "Phase",
    "build_table",
    "emit_results",
    "linear_detect",
    "ml_alamouti_detect",
    "mmse_filter",
    "rake_filter",
    "slicer",
    "PairDecision",
    "no_selection_schedule",
    "select_exhaustive",
    "select_greedy",
    "select_random",
    "draw_channels",
    "effective_signature",
    "generate_codes",
    "transmit_source_phase",
    "Trial",
]
