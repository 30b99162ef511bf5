"""Uniform sampling of configuration-model graphs by double-edge swaps."""

__version__ = "0.1.0"

from .assortativity import AssortativityTracker, assortativity_oracle, delta_r, init_tracker
from .convergence import (
    ConvergenceReport,
    DiagnosticVerdict,
    compare_diagnostics,
    detect_convergence,
    gelman_rubin,
    geweke,
    ks_two_sample,
    validate_detector,
)
from .corpus import CorpusSpec, generate_corpus, write_corpus
from .enumeration import enumerate_graphs, stub_matching_count
from .exceptions import *  # noqa: F401,F403
from .gap import GapEstimate, HeuristicDecision, autocorrelation, decide_gap, estimate_gap, resolve_gap
from .graph import (
    DegreeStats,
    Graph,
    GraphSpace,
    Labeling,
    check_space,
    degree_stats,
    parse_edge_list,
    read_edge_list,
    render_edge_list,
    write_edge_list,
)
from .mcmc import ChainState, burn_in, chain_series, step_stub, step_vertex
from .rng import make_rng
