"""Opinion dynamics on social influence networks with prejudiced agents.

Implements the Friedkin-Johnsen model and its time-varying extension:
trajectory simulation, steady states, consensus criteria, Schur-stability
tests, explicit spectral-radius bounds, and sufficient stability
certificates for switching schedules.
"""

from . import fileio, fixtures
from .core import (
    ROW_SUM_TOL,
    FJModel,
    InfluenceMatrix,
    SubstochasticMatrix,
    SusceptibilityProfile,
    augmented_matrix,
    decompose_substochastic,
    deficiency,
    deficiency_of_product,
    normalize_rows,
    system_matrix,
    validate_stochastic,
    validate_substochastic,
)
from .dynamics import (
    OpinionTrajectory,
    TVSchedule,
    consensus_check,
    containment_bounds,
    simulate,
    steady_state,
    step,
    tv_simulate,
)
from .errors import (
    DimensionMismatch,
    FJNetError,
    InvalidDelta,
    InvalidParams,
    NegativeEntry,
    NoConvergence,
    NonPeriodicSchedule,
    NotCFJMember,
    NotSchurStable,
    ParseError,
    RowSumViolation,
    SingularSystem,
    TrajectoryTooShort,
    WriteError,
)
from .graphs import (
    INFINITE,
    CFJCertificate,
    ClassParams,
    EpsWalkDistances,
    cfj_membership,
    delta_prejudiced_set,
    eps_walk_distance,
    fj_class_min_s,
    natural_params,
    prejudiced_set,
)
from .stability import (
    CertificateKind,
    ChainBound,
    StabilityReport,
    TVCertificate,
    Verdict,
    chain_row_sum_bound,
    corollary_bound,
    is_schur_stable,
    rho_star,
    spectral_radius,
    stability_report,
    tv_consensus_criterion,
    tv_stability_certificate_cfj,
)

__version__ = "0.1.0"
