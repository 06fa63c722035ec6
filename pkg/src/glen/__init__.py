"""Graph Laplacian estimation from exponential-family node signals."""

from .bench import (
    ExperimentConfig,
    RunRecord,
    cgl_baseline,
    export_report,
    ingest_csv_matrix,
    run_suite,
    select_structure_setting,
    select_weight_setting,
)
from .cgl import (
    CglProblem,
    CglSolution,
    StatisticError,
    cgl_objective,
    empirical_statistic,
    solve_cgl,
    vi_statistic,
)
from .estimator import GlenConfig, GlenState, glen_objective, run_glen, save_state
from .families import (
    ExponentialFamily,
    FamilyDomainError,
    SupportError,
    family_from_tag,
)
from .graphs import (
    ErdosRenyi,
    GraphModelSpec,
    StochasticBlock,
    WattsStrogatz,
    WeightedGraph,
    build_laplacian,
    cartesian_product_laplacian,
    normalize_trace,
    path_laplacian,
    ring_laplacian,
    sample_random_graph,
    validate_laplacian,
)
from .metrics import EvalReport, binarize_edges, evaluate, nmi_binary, relative_errors
from .simulate import (
    SignalDataset,
    SyntheticDatasetSpec,
    generate_dataset,
    sample_observations,
    sample_smooth,
    sqrt_pinv_filter,
)

__version__ = "0.1.0"

__all__ = [
    "CglProblem", "CglSolution", "StatisticError", "cgl_objective",
    "empirical_statistic", "solve_cgl", "vi_statistic",
    "GlenConfig", "GlenState", "glen_objective", "run_glen", "save_state",
    "ExponentialFamily", "FamilyDomainError", "SupportError", "family_from_tag",
    "ErdosRenyi", "GraphModelSpec", "StochasticBlock", "WattsStrogatz",
    "WeightedGraph", "build_laplacian", "cartesian_product_laplacian",
    "normalize_trace", "path_laplacian", "ring_laplacian",
    "sample_random_graph", "validate_laplacian",
    "EvalReport", "binarize_edges", "evaluate", "nmi_binary", "relative_errors",
    "SignalDataset", "SyntheticDatasetSpec", "generate_dataset",
    "sample_observations", "sample_smooth", "sqrt_pinv_filter",
    "ExperimentConfig", "RunRecord", "cgl_baseline", "export_report",
    "ingest_csv_matrix", "run_suite", "select_structure_setting",
    "select_weight_setting",
    "__version__",
]
