"""Ordered uniform matchings: pattern algebra, clique solvers, trace
reconstruction, samplers, and a seeded Monte Carlo harness."""

from .cliques import (
    ChainAntichain,
    GoodEdgeCensus,
    PatternGraph,
    PatternSet,
    SolveResult,
    chain_antichain,
    contains_copy,
    count_avoiding_tuples,
    count_cliques,
    good_edge_census,
    iter_cliques,
    max_clique,
    max_clique_global,
    verify_clique,
)
from .harness import (
    ExperimentSpec,
    FitReport,
    ResultRecord,
    concentration_stats,
    containment_frequency,
    fit_exponent,
    run_experiment,
    spanning_census,
)
from .matchings import (
    OrderedHypergraph,
    OrderedMatching,
    Trace,
    blow_up,
    build_hk,
    chi_interval,
    concatenate,
    from_word,
    is_r_partite,
    is_scattered,
    is_valid_trace,
    pattern_of_pair,
    product,
    remove_letter_matching,
    to_word,
    trace_of,
    unique_clique,
)
from .patterns import (
    Composition,
    Cube,
    Pattern,
    cube_expand,
    enumerate_patterns,
    find_inheritance_index,
    harmonic_family,
    is_harmonious,
    is_mismatch,
    remove_letter,
)
from .reconstruct import (
    ReconVerdict,
    Rule,
    check_reconstructible,
    enumerate_traces,
    named_rule,
    reconstruct,
    rule_fixpoint_check,
)
from .sampling import (
    SplitMix64,
    count_matchings,
    derive_seed,
    edge_probability,
    enumerate_matchings,
    sample_online,
    sample_uniform,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
