"""subh: sublinear h-index estimation with exact query accounting, plus a
hardness workbench (bit-string instances and a graph query oracle) that makes
the matching lower-bound constructions executable and checkable."""

from .errors import (
    BudgetExhausted,
    IndexOutOfRange,
    InvalidConfig,
    InvalidParameter,
    InvalidRank,
    PromiseViolated,
    SelfPair,
    SubhError,
    TooLarge,
    UnknownVertex,
)
from .estimator import (
    FALLBACK_CUTOFF,
    EstimatorParams,
    HEstimate,
    WeakVerdict,
    estimate_h_index,
    strong_estimate,
    weak_estimate,
)
from .exact import (
    TaggedValue,
    discounted_h_index,
    exact_h_index,
    scaled_h_index,
    select_kth,
    tag_values,
)
from .gx import (
    RedEdgeStats,
    TriangleOracle,
    build_adjacency,
    exact_triangle_solver,
    gx_degree,
    gx_edge_sample,
    gx_neighbor,
    gx_pair,
    naive_triangle_count,
    ptp_via_triangles,
    red_edge_stats,
    triangle_budget,
    verify_construction,
)
from .harness import (
    AggregateStats,
    SuiteConfig,
    SuiteResult,
    TrialReport,
    run_suite,
    scaling_check,
    write_csv,
)
from .oracle import ArrayOracle, GenSpec, generate_array, load_array, sample_indices, save_array
from .ptp import (
    PtpInstance,
    PtpOutcome,
    PtpParams,
    hindex_budget,
    load_instance,
    popcount,
    ptp_via_hindex,
    sample_ptp,
    save_instance,
)
from .rng import DEFAULT_SEED, RngHandle
from .simulate import ArrayHistogram, simulate_estimate_h_index

__version__ = "0.1.0"
