"""Caristi-Kirk, Oettli-Thera and CK-infinity ball spaces on exact finite metric spaces."""

from .core import (
    PLUS_INFINITY,
    BallSpaceError,
    FiniteMetricSpace,
    MetricError,
    PreconditionError,
    StructureError,
    Violation,
    check_metric_axioms,
    ext_add,
    ext_scalar,
    scalar,
)
from .functions import (
    CkFunction,
    CkInfFunction,
    OtFunction,
    check_ot_axioms,
    ck_to_ot,
    generate_instance,
    generate_ot,
    ot_elements,
    restrict_ckinf,
)
from .balls import (
    Ball,
    BallAssignment,
    DescentTrace,
    InstanceTooLargeError,
    NotContractiveError,
    Origin,
    check_nest_equivalences,
    check_spherical_completeness,
    check_strongly_contractive,
    ck_assignment,
    ck_ball,
    ckinf_assignment,
    ckinf_ball,
    ckinf_singleton,
    enumerate_maximal_nests,
    explicit_assignment,
    generated_ball_space,
    ot_assignment,
    ot_ball,
    petal,
    singleton_descent,
)
from .theorems import (
    MultiMap,
    SelfMap,
    Theorem,
    TheoremCertificate,
    caristi_fp,
    caristi_fp_multi,
    ekeland_altered,
    ekeland_basic,
    ekeland_usual,
    flower_petal,
    oettli_thera,
    solve_ckinf,
    takahashi,
)

__version__ = "0.1.0"
