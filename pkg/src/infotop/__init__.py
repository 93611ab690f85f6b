"""Finite-support tools for comparing joint distributions through their conditionals.

Measures live on products of finite metric spaces. Besides the usual weak
distances (total variation, Wasserstein-1, Prohorov) the package lifts a joint
law of (a, b) to the law of (a, mu(.|a)) and compares lifts, which detects
when conditionals fail to converge even though the joints do.
"""
from .errors import InconsistencyError, ValidationError
from .measure import (
    DiscreteMeasure,
    FiniteMetricSpace,
    Kernel,
    Point,
    ProductSpace,
    compose,
    cond_indep_gap,
    disintegrate,
    is_consistent,
    marginal,
    product_measure,
    total_variation,
)
from .metrics import (
    RAW,
    TRUNC,
    GroundMetric,
    TransportPlan,
    default_family,
    prohorov,
    setwise_gap,
    tv_distance,
    wasserstein1,
)
from .lift import (
    LiftedAtom,
    LiftedMeasure,
    chi1_glue,
    chi2_flatten,
    expected_cost,
    info_distance,
    integrate_lifted,
    lifted_expectation,
    phi,
    phi1,
    psi,
    psi_inv,
)
from .convergence import AnalysisParams, ConvergenceReport, MeasureSequence, analyze, density_criterion, kernel_criterion
from .decision import DecisionProblem, Strategy, evaluate, extract_deterministic, solve_randomized

__version__ = "0.1.0"
