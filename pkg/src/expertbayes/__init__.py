"""Expert-seeded refinement of discrete Bayesian network classifiers."""

from .baselines import (
    K2Config,
    MutualInfoTable,
    conditional_mutual_info,
    learn_k2,
    learn_tan,
    naive_bayes_structure,
)
from .data import Column, Dataset
from .errors import (
    ColumnMismatch,
    CycleWouldForm,
    CyclicStructure,
    EditInapplicable,
    EmptyDataset,
    ExpertBayesError,
    InvalidEvidenceLabel,
    InvalidOrdering,
    LengthMismatch,
    MissingClassColumn,
    NonBinaryClass,
    ParseError,
    RaggedRow,
    SchemaVersionUnsupported,
    SingleStateClass,
    TooFewRows,
    UnestimatedCpt,
)
from .evaluation import (
    DEFAULT_THRESHOLDS,
    CorrelationFlag,
    EvaluationReport,
    ExpertBayesSpec,
    FoldPlan,
    K2Spec,
    LearnerResult,
    OriginalSpec,
    PrPoint,
    TanSpec,
    cross_validate,
    make_folds,
    mcnemar_significance,
    paired_significance,
    screen_correlations,
)
from .inference import Posterior, class_posterior, classify, posterior_matrix
from .learning import estimate_cpts, rebuild_affected
from .network import (
    AddDirection,
    CandidateEdit,
    Cpt,
    EditKind,
    Network,
    NetworkStructure,
    Variable,
    apply_edit,
    detect_cycle,
    markov_blanket,
    topological_order,
    uniform_cpt,
)
from .prng import SplitMix64, child_seed
from .refine import (
    CandidateOutcome,
    RefinementConfig,
    RefinementRun,
    draw_candidate,
    refine,
    score_cci,
)
from .sampling import forward_sample

__version__ = "0.1.0"

__all__ = [
    "AddDirection",
    "CandidateEdit",
    "CandidateOutcome",
    "Column",
    "ColumnMismatch",
    "CorrelationFlag",
    "Cpt",
    "CycleWouldForm",
    "CyclicStructure",
    "Dataset",
    "DEFAULT_THRESHOLDS",
    "EditInapplicable",
    "EditKind",
    "EmptyDataset",
    "EvaluationReport",
    "ExpertBayesError",
    "ExpertBayesSpec",
    "FoldPlan",
    "InvalidEvidenceLabel",
    "InvalidOrdering",
    "K2Config",
    "K2Spec",
    "LearnerResult",
    "LengthMismatch",
    "MissingClassColumn",
    "MutualInfoTable",
    "Network",
    "NetworkStructure",
    "NonBinaryClass",
    "OriginalSpec",
    "ParseError",
    "Posterior",
    "PrPoint",
    "RaggedRow",
    "RefinementConfig",
    "RefinementRun",
    "SchemaVersionUnsupported",
    "SingleStateClass",
    "SplitMix64",
    "TanSpec",
    "TooFewRows",
    "UnestimatedCpt",
    "Variable",
    "apply_edit",
    "child_seed",
    "class_posterior",
    "classify",
    "conditional_mutual_info",
    "cross_validate",
    "detect_cycle",
    "draw_candidate",
    "estimate_cpts",
    "forward_sample",
    "learn_k2",
    "learn_tan",
    "make_folds",
    "markov_blanket",
    "mcnemar_significance",
    "naive_bayes_structure",
    "paired_significance",
    "posterior_matrix",
    "rebuild_affected",
    "refine",
    "score_cci",
    "screen_correlations",
    "topological_order",
    "uniform_cpt",
]
