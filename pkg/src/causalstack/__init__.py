"""Causal models of action outcomes: learn a network from randomized
execution data, predict goal success, explain predicted failures
contrastively, and compute corrective parametrizations."""

from .discretize import (
    DiscreteData, IntervalScheme, Intervals, discretize_dataset,
    discretize_sample, fit_scheme, midpoint_of, quantile_discretize,
)
from .estimators import CausalOutcomeModel, FailureCorrection, QuantileDiscretizer
from .harness import (
    EvaluationReport, ExperimentConfig, confusion_matrix, demo_timely_shifted,
    run_e1, run_e2,
)
from .independence import CITestResult, ci_test
from .inference import (
    Query, SampleEstimate, exact_infer, logic_sample, predict_success,
    success_probability,
)
from .parameters import CausalModel, Cpt, fit_cpt, fit_cpts
from .prevention import (
    CorrectionTable, PreventionOutcome, precompute_corrections, prevent,
)
from .search import (
    CorrectionResult, TransitionModel, closest_success, generate_transitions,
    render_explanation,
)
from .simulator import (
    SimConfig, StackAction, TowerState, e1_config, e2_config, run_episodes,
    sample_actions, settle, variable_set,
)
from .structure import Dag, pc_stable
from .variables import (
    Dataset, GoalSpec, Provenance, Sample, VariableSet, VariableSpec, is_success,
)

__version__ = "0.1.0"

__all__ = [
    "CITestResult", "CausalModel", "CausalOutcomeModel", "CorrectionResult",
    "CorrectionTable", "Cpt", "Dag", "Dataset", "DiscreteData",
    "EvaluationReport", "ExperimentConfig",
    "FailureCorrection", "GoalSpec", "IntervalScheme", "Intervals",
    "PreventionOutcome", "Provenance", "Query", "QuantileDiscretizer",
    "Sample", "SampleEstimate", "SimConfig", "StackAction", "TowerState",
    "TransitionModel", "VariableSet", "VariableSpec", "ci_test",
    "closest_success", "confusion_matrix", "demo_timely_shifted",
    "discretize_dataset", "discretize_sample", "e1_config", "e2_config",
    "exact_infer", "fit_cpt", "fit_cpts", "fit_scheme", "generate_transitions",
    "is_success", "logic_sample", "midpoint_of", "pc_stable",
    "precompute_corrections", "predict_success", "prevent",
    "quantile_discretize", "render_explanation", "run_e1", "run_e2",
    "run_episodes", "sample_actions", "settle", "success_probability",
    "variable_set",
]
