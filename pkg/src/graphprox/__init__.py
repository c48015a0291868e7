"""graphprox: proximity kernels on graphs, kernel-driven clustering,
LFR benchmark generation and topology-sweep experiments."""

from .clustering import (
    MergeStep,
    Partition,
    kmeans,
    read_partition,
    spectral_cluster,
    ward_cluster,
    write_partition,
)
from .errors import (
    AlphaOutOfRange,
    BadK,
    BadRange,
    ConfigError,
    EigFailure,
    GenerationFailed,
    GraphProxError,
    IndexOutOfRange,
    Infeasible,
    IsolatedNode,
    LengthMismatch,
    MalformedDistance,
    MixedSweep,
    NoConvergence,
    NotPSD,
    SelfLoop,
    SkipLimitExceeded,
    SweepError,
    TooFewNodes,
)
from .graphs import (
    Graph,
    adjacency_matrix,
    degrees,
    laplacian,
    markov_matrix,
    read_edge_list,
    read_edge_list_labeled,
    spectral_radius,
    sym_eig,
    write_edge_list,
)
from .harness import (
    ExperimentConfig,
    GraphCache,
    ResultRow,
    apply_vary,
    emit_csv,
    emit_plot,
    load_config,
    parse_config,
    read_result_csv,
    replicate_seeds,
    run_cell,
    sweep,
)
from .kernels import (
    KernelMatrix,
    KernelParam,
    KernelWorkspace,
    Measure,
    alpha_grid,
    communicability_kernel,
    forest_kernel,
    heat_kernel,
    interior_grid,
    kernel_to_distance,
    pagerank_kernel,
    pagerank_resolvent,
    walk_kernel,
    write_kernel_csv,
)
from .lfr import (
    GenerationReport,
    LfrOutput,
    LfrParams,
    ValidationReport,
    generate_lfr,
    sample_community_sizes,
    sample_power_law,
    validate_lfr,
    write_lfr_output,
)
from .metrics import ContingencyTable, adjusted_rand_index, contingency_table, rand_index

__version__ = "0.1.0"
