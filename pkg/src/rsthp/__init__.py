"""Rate-splitting multiuser MISO downlink with multi-branch THP.

Link-level simulation library: channel and CSIT error models, THP filter
construction for the centralized and decentralized deployments, closed-form
SINRs with a signal-model oracle, branch/power-split selection, and a
seeded, reproducible experiment runner.
"""

from .channel import ChannelRealization, ErrorModel, compose_true, draw_error, draw_estimate, error_variance
from .config import ScenarioConfig, default_config, parse_config, serialize_config
from .ergodic import EsrRun, OperatingPoint, TrialOutcome, derive_rng, ergodic_sum_rate
from .errors import (
    ConfigInvalid,
    IndexOutOfRange,
    InvalidPermutation,
    IoFailure,
    NoConvergence,
    NoPrivatePower,
    RankDeficient,
    RsthpError,
    ShapeMismatch,
)
from .kernels import backend_name
from .matops import LqFactors, dominant_right_singular_direction, lq_decompose, permute_rows
from .multibranch import (
    BranchPattern,
    CalibrationResult,
    SelectionOutcome,
    calibrate_delta_f,
    pattern,
    select_branch_es,
    select_branch_fb,
    select_branch_fpa,
)
from .oracle import (
    DeviationReport,
    EffectiveGains,
    compare_closed_form,
    effective_gain_matrix,
    model_sinr,
    receiver_noise_scaling,
)
from .rates import (
    AsrReport,
    EsrResult,
    RsPowerSplit,
    SinrReport,
    asr_table,
    average_rates,
    common_precoder,
    instantaneous_rates,
    optimize_delta,
    sinr_common,
    sinr_private,
)
from .runner import SweepRow, run_baselines, run_error_sweep, run_snr_sweep, snr_db_to_etr, write_csv
from .thp import (
    ModuloParams,
    ThpFilterSet,
    build_thp_filters,
    build_transmit_vector,
    compute_beta,
    modulo_reduce,
    thp_encode,
)

__version__ = "0.1.0"
