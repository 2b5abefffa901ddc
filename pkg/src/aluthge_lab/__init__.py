"""Numerical lab for toral and spherical Aluthge transforms of
2-variable weighted shifts: diagram construction, hyponormality tests,
quasinormal completions, atomic Berger measures, and the threshold
curves of the corner family.
"""

from .diagrams import (
    COMMUTATIVITY_TOL,
    MomentTable,
    OneVarWeights,
    TruncatedPair,
    WeightDiagram,
    build_prop2,
    build_table,
    build_theta,
    build_thm1,
    commutativity_residual,
    core_of,
    moments,
    moments_1var,
    truncate,
    validate_commuting,
)
from .errors import (
    DomainError,
    InfeasibleConstantError,
    InternalConsistencyError,
    InvalidWeightsError,
    NonCommutingInputError,
    WindowError,
)
from .measures import (
    AtomicMeasure2D,
    StampfliData,
    berger_atomic_verify,
    constant_interior_p2,
    is_spherical_isometry,
    is_spherically_quasinormal,
    qt_power_identity_check,
    quasinormal2_measure,
    quasinormal_completion,
    quasinormality_routes,
    stampfli,
    thm1_measure_probe,
)
from .positivity import (
    HypoReport,
    PsdVerdict,
    componentwise_hyponormal,
    full_hypo_report,
    joint_hyponormal,
    k_hyponormal,
    k_hyponormal_verdict,
    moment_matrix_psd,
    one_var_k_hyponormal,
    psd_check,
    six_point_matrix,
    six_point_test,
)
from .regions import (
    RegionReport,
    ThresholdCurves,
    classify,
    crossing_q,
    region_scan,
    thresholds,
)
from .serialize import (
    diagram_from_obj,
    diagram_to_obj,
    dumps,
    load_json,
    measure_from_obj,
    measure_to_obj,
    omega_from_obj,
    omega_to_obj,
)
from .transforms import (
    ContinuityProbe,
    SphericalPolarData,
    ToralResult,
    continuity_probe,
    joint_partial_isometry_check,
    spherical_polar,
    spherical_transform,
    toral_commutativity_test,
    toral_transform,
    transform_distance,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
