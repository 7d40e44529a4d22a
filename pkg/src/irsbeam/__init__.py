"""Fast beam alignment for IRS-assisted mmWave/THz links."""

from .arrays import (
    ArrayConfig,
    cascade_dictionary,
    dft_dictionary,
    steering_vector,
    ula_response,
    upa_response,
)
from .channel import (
    CascadeChannel,
    PathSet,
    assemble_channels,
    channel_from_h,
    channel_from_lambda,
    exhaustive_search,
    measure,
    sample_paths,
)
from .codebook import (
    CONSTANT_MODULUS,
    IDEAL_SPARSE,
    RoundEncoding,
    ScanPlan,
    build_round,
    build_scan_plan,
    effective_support,
    optimize_constant_modulus,
    plan_from_json,
    plan_to_json,
)
from .decoder import (
    AlignmentEstimate,
    MeasurementSet,
    bin_of,
    classify_nulltons,
    decode_los,
    decode_nlos,
    intersect_los,
    probability_matrix,
    rayleigh_threshold,
    select_nm_rounds,
    synthesize_measurements,
)
from .errors import (
    AmbiguousDecodeError,
    InvalidDimensionError,
    InvalidParameterError,
    ThresholdTooHighError,
)
from .harness import (
    ExperimentConfig,
    TrialRecord,
    bgr,
    optimal_beams,
    pathloss,
    run_trial,
    run_trials,
    snr_to_sigma,
    sweep,
)
from .theory import (
    PlanProbe,
    g_exact,
    min_rounds,
    p_lower_los,
    p_lower_nlos,
    p_nm_round,
    sample_complexity,
)

__version__ = "0.1.0"
