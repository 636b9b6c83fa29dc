"""Degree-preserving double hyperarc shuffles on directed hypergraphs.

Sampling from the 16 spaces (features s/d/m allowed or not, stub- or
vertex-labeled), plus exhaustive enumeration and exact Markov chain
verification at desk scale.
"""

from .hypergraph import (
    DegreeSequence,
    DirectedHypergraph,
    FeatureReport,
    HypergraphError,
    SpaceSpec,
    arc,
    canonical_form,
    canonicalize,
    classify_features,
    degree_sequence,
    hypergraph,
    in_space,
    multiset,
)
from .dhg import DhgParseError, parse_dhg, serialize_dhg, split_dhg_stream
from .shuffle import (
    ChainConfig,
    ChainConfigError,
    ChainResult,
    ProposalError,
    ShuffleProposal,
    acceptance_probability,
    apply_shuffle,
    propose,
    proposal_probability,
    run_chain,
    spawn_seed,
    step,
)
from .enumeration import (
    EnumerationLimitError,
    count_stub_realizations,
    enumerate_stub_space,
    enumerate_vertex_space,
    stub_state_to_hypergraph,
)
from .chains import (
    ChainGraph,
    StateSpaceLimitError,
    build_stub_chain,
    build_vertex_chain,
    build_vertex_chain_lumped,
    check_aperiodic,
    check_doubly_stochastic,
    check_regular,
    check_strongly_connected,
    is_exactly_uniform_stationary,
    stationary_distribution,
    tv_curve,
)
from .replicas import sample_replicas
from .validation import (
    CounterexampleReport,
    SampleOutsideSpaceError,
    UniformityReport,
    check_sm_equivalence,
    counterexample_suite,
    map_to_bipartite,
    uniformity_test,
)

__version__ = "0.1.0"

__all__ = [
    "ChainConfig",
    "ChainConfigError",
    "ChainGraph",
    "ChainResult",
    "CounterexampleReport",
    "DegreeSequence",
    "DhgParseError",
    "DirectedHypergraph",
    "EnumerationLimitError",
    "FeatureReport",
    "HypergraphError",
    "ProposalError",
    "SampleOutsideSpaceError",
    "ShuffleProposal",
    "SpaceSpec",
    "StateSpaceLimitError",
    "UniformityReport",
    "acceptance_probability",
    "apply_shuffle",
    "arc",
    "build_stub_chain",
    "build_vertex_chain",
    "build_vertex_chain_lumped",
    "canonical_form",
    "canonicalize",
    "check_aperiodic",
    "check_doubly_stochastic",
    "check_regular",
    "check_sm_equivalence",
    "check_strongly_connected",
    "classify_features",
    "count_stub_realizations",
    "counterexample_suite",
    "degree_sequence",
    "enumerate_stub_space",
    "enumerate_vertex_space",
    "hypergraph",
    "in_space",
    "is_exactly_uniform_stationary",
    "map_to_bipartite",
    "multiset",
    "parse_dhg",
    "proposal_probability",
    "propose",
    "run_chain",
    "sample_replicas",
    "serialize_dhg",
    "spawn_seed",
    "split_dhg_stream",
    "stationary_distribution",
    "step",
    "stub_state_to_hypergraph",
    "tv_curve",
    "uniformity_test",
]
