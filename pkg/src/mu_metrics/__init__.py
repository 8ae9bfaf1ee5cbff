"""Side-by-side noise-operator and distribution-based measurement uncertainty metrics."""
from .operators import (
    DiscretePOVM,
    MeasurementModel,
    Observable,
    QuantumChannel,
    State,
    heisenberg_apply,
    model_to_channel,
    model_to_povm,
    moment_operator,
    outcome_distribution,
    partial_trace,
    tensor,
)
from .noise import (
    NoiseReport,
    ozawa_disturbance,
    ozawa_error,
    ozawa_error_dilated,
    product_check,
    three_state_error,
)
from .transport import (
    CalibrationResult,
    Distribution,
    calibration_error,
    distribution_disturbance,
    distribution_error,
    w2,
    w2_lp,
    worst_case_error,
)

__version__ = "0.1.0"
