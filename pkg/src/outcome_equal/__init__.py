"""Post-process discrete joint distributions so outcomes carry no information
about protected attributes, at minimal KL cost."""

__version__ = "0.1.0"

from .audit import AuditReport, ThresholdPolicy, audit, policy_disparity
from .dist import (
    AXES,
    OUTCOME,
    PROTECTED,
    UNPROTECTED,
    S,
    U,
    W,
    JointDistribution,
    Variable,
    VariableSchema,
    conditional,
    from_table,
    kl_divergence,
    marginal,
    mutual_information,
)
from .estimation import Dataset, SmoothingSpec, estimate_joint, load_csv, write_csv
from .projection import (
    FeasibilityReport,
    ScopeSpec,
    brute_force_project,
    feasibility_check,
    information_cost,
    outcome_equalize,
    verify_insensitivity,
    verify_scoped,
)
from .synth import SynthConfig, ground_truth_joint, sample
