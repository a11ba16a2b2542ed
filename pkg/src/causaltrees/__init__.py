"""Learning causal directed trees from observational data.

The estimator scores every ordered pair of variables with a regression-based
edge weight (Gaussian log-variance-ratio or residual-entropy form) and finds
the minimum-weight spanning arborescence, which is the exact score optimum
over all directed trees.  Companion tools test substructure hypotheses with
simultaneous confidence bounds, quantify how identifiable a fitted model is,
simulate ground-truth models, and evaluate recovery with structural metrics.
"""

from .arborescence import (
    FORBIDDEN,
    ArborescenceResult,
    WeightMatrix,
    second_best,
    solve,
    solve_constrained,
)
from .entropy import (
    EntropyConfig,
    conditional_mutual_information,
    knn_entropy,
    mutual_information,
)
from .errors import (
    CausalTreeError,
    CholeskyFailure,
    CycleError,
    DegenerateColumn,
    DegenerateSample,
    DisconnectedError,
    EqualTreesError,
    ForbiddenEdgeInTree,
    InfeasibleError,
    LengthMismatch,
    MultipleParentsError,
    MultipleRootsError,
    NoTriples,
    NonFiniteInput,
    NotEquivalentError,
    TooFewSamples,
    ZeroMoment,
)
from .graphs import (
    ROOT,
    Dag,
    DirectedTree,
    Substructure,
    enumerate_trees,
    is_markov_equivalent,
    reversed_path,
    validate_tree,
)
from .identifiability import (
    GapReport,
    ReversalBounds,
    edge_reversal_gap,
    estimate_identifiability_gap,
    gaussian_reversal_bounds,
    min_edge_reversal,
    piw_min_cmi,
    piw_triples,
)
from .inference import (
    ConfidenceBounds,
    MomentStats,
    SubstructureTest,
    confidence_bounds,
    moment_statistics,
    run_substructure_test,
    test_substructure,
)
from .learn import LearnResult, learn
from .metrics import MetricReport, ancestor_metrics, metric_report, shd, sid
from .regression import (
    KERNEL,
    LOCAL_LINEAR,
    Predictor,
    RegressionConfig,
    fit,
    loo_cv_bandwidth,
    predict,
    silverman_bandwidth,
)
from .scoring import (
    CMI_SKELETON,
    ENTROPY,
    GAUSSIAN,
    Dataset,
    ScoreOptions,
    compute_weights,
    entropy_weights,
    gaussian_weights,
    cmi_skeleton_weights,
    tree_score,
)
from .simulate import (
    TYPE1,
    TYPE2,
    GpMechanism,
    LambdaMechanism,
    ScmSpec,
    SimConfig,
    bivariate_scm,
    extend_to_dag,
    generate_tree,
    random_scm,
    sample_gp_mechanism,
    sample_noise,
    sample_scm,
    simulate,
)

__version__ = "0.1.0"

__all__ = [
    "ArborescenceResult",
    "CausalTreeError",
    "CholeskyFailure",
    "CMI_SKELETON",
    "ConfidenceBounds",
    "CycleError",
    "Dag",
    "Dataset",
    "DegenerateColumn",
    "DegenerateSample",
    "DirectedTree",
    "DisconnectedError",
    "ENTROPY",
    "EntropyConfig",
    "EqualTreesError",
    "FORBIDDEN",
    "ForbiddenEdgeInTree",
    "GAUSSIAN",
    "GapReport",
    "GpMechanism",
    "InfeasibleError",
    "KERNEL",
    "LOCAL_LINEAR",
    "LambdaMechanism",
    "LearnResult",
    "LengthMismatch",
    "MetricReport",
    "MomentStats",
    "MultipleParentsError",
    "MultipleRootsError",
    "NonFiniteInput",
    "NoTriples",
    "NotEquivalentError",
    "Predictor",
    "ROOT",
    "RegressionConfig",
    "ReversalBounds",
    "ScmSpec",
    "ScoreOptions",
    "Substructure",
    "SubstructureTest",
    "SimConfig",
    "TYPE1",
    "TYPE2",
    "TooFewSamples",
    "WeightMatrix",
    "ZeroMoment",
    "ancestor_metrics",
    "bivariate_scm",
    "cmi_skeleton_weights",
    "compute_weights",
    "conditional_mutual_information",
    "confidence_bounds",
    "edge_reversal_gap",
    "entropy_weights",
    "enumerate_trees",
    "estimate_identifiability_gap",
    "extend_to_dag",
    "fit",
    "gaussian_reversal_bounds",
    "gaussian_weights",
    "generate_tree",
    "is_markov_equivalent",
    "knn_entropy",
    "learn",
    "loo_cv_bandwidth",
    "metric_report",
    "min_edge_reversal",
    "moment_statistics",
    "mutual_information",
    "piw_min_cmi",
    "piw_triples",
    "predict",
    "random_scm",
    "reversed_path",
    "run_substructure_test",
    "sample_gp_mechanism",
    "sample_noise",
    "sample_scm",
    "second_best",
    "shd",
    "sid",
    "silverman_bandwidth",
    "simulate",
    "solve",
    "solve_constrained",
    "test_substructure",
    "tree_score",
    "validate_tree",
]
