"""PageRank by power iteration, with a dense verifier for the Google-matrix spectrum."""
from .core import (
    DENSE_CAP,
    DirectedGraph,
    GoogleOperator,
    PatchPolicy,
    SparseTransition,
    apply_google,
    apply_transition,
    build_transition,
    materialize_dense,
    personalization_vector,
)
from .eigen import eigenvalues_dense, match_multisets
from .errors import (
    DenseCapError,
    DimensionError,
    EigenConvergenceError,
    EmptyGraphError,
    InputError,
    InsufficientTraceError,
    PageRankError,
    ParseError,
)
from .ingest import RandomInstanceSpec, parse_edge_list, random_instance, random_stochastic, write_rank_result
from .solver import ConvergenceTrace, RankResult, SolverConfig, estimate_rate, power_method, residual
from .spectral import SimilarityReport, TheoremReport, build_orthogonal_U, similarity_reduce, verify_theorem

__version__ = "0.1.0"
