"""Gaussian simulation of a frequency up-conversion entanglement link."""

__version__ = "0.1.0"

from .criteria import (
    DuanResult,
    JointCombination,
    NoiseLevel,
    QuadratureObservable,
    duan_i,
    from_db,
    joint_variance,
    quadrature_variance,
    to_db,
)
from .gaussian import (
    GaussianState,
    LossChannel,
    SymplecticMap,
    apply_beamsplitter,
    apply_loss,
    apply_phase,
    apply_squeezer,
    make_vacuum,
    partial_state,
)
from .scenario import (
    FixedSource,
    OperatingPoint,
    ScenarioConfig,
    analytic_variances,
    build_state,
    evaluate,
    optimize_vbs,
    reference_scenario,
    phase_scan,
    solve_balance,
)
from .spectral import (
    CalibrationInfeasible,
    FrequencyGrid,
    SourceSpectrumModel,
    calibrate_to_landmarks,
    source_variances,
    spectrum_sweep,
)
from .traces import TraceSeries
