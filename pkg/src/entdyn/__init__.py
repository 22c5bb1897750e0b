"""Asymptotic entanglement dynamics of two qubits under Markovian reservoirs."""

from .entanglement import (
    InvalidStateError,
    det_pt,
    det_rho,
    localize,
    min_pt_eigenvalue,
    negativity,
    werner_det_pt,
)
from .events import (
    Event,
    EventRecord,
    Indeterminate,
    ProbabilityReport,
    TrajectoryOptions,
    classify_trajectory,
    estimate_probabilities,
    predict_sign_case2a,
    predict_sign_case2bd,
    trajectory_table,
    wilson_interval,
)
from .lindblad import (
    Channel,
    CouplingSchedule,
    GeneratorSpec,
    PropagationError,
    build_superoperator,
    evolve,
    propagate,
    propagate_nonautonomous,
    reparam_g,
)
from .qmat import DensityError, LocalizationReport, Region, Verdict, partial_transpose, validate_density
from .sampling import MeasureKind, MeasureSpec, rng_stream, sample, sample_conditioned
from .scenarios import ScenarioId, make_named_state, make_scenario
from .stationary import ClassLabel, asymptotic_state, classify_dynamics, kernel

__version__ = "0.1.0"
