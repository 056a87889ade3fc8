"""Similarity networks and their transformation into multiple-fault belief networks."""

from .causal import (
    ContextualNoisyOr,
    NoisyOrSpec,
    absent_probability,
    expand_atemporal,
    power_from_single,
    present_from_singles,
    present_probability,
    synthesize_cpt,
)
from .core import (
    ABSENT,
    BINARY,
    PRESENT,
    BeliefNetwork,
    Cpt,
    Finding,
    ValidationReport,
    Variable,
    binary,
    validate_network,
)
from .graphs import (
    DirectedGraph,
    SimilarityGraph,
    SimilarityHypergraph,
    connected_to,
    d_separated,
    graph_union,
    is_acyclic,
    is_connected,
    topological_order,
)
from .oracle import JointTable, independent, joint_table, query
from .simnet import (
    LocalBeliefNetwork,
    SimilarityNetwork,
    SubsetIndependenceAssertion,
    build_global,
    check_soundness,
    extract_subset_independence,
    fill_cpts_by_equality,
    validate_similarity_network,
    verify_subset_independence,
)
from .transform import (
    FaultDependencies,
    MultiFaultNetwork,
    star_restructure,
    transform_global,
    transform_similarity,
)

__version__ = "0.1.0"

__all__ = [
    "JointTable",
    "independent",
    "joint_table",
    "query",
    "ABSENT",
    "BINARY",
    "BeliefNetwork",
    "ContextualNoisyOr",
    "Cpt",
    "DirectedGraph",
    "FaultDependencies",
    "Finding",
    "LocalBeliefNetwork",
    "MultiFaultNetwork",
    "NoisyOrSpec",
    "PRESENT",
    "SimilarityGraph",
    "SimilarityHypergraph",
    "SimilarityNetwork",
    "SubsetIndependenceAssertion",
    "ValidationReport",
    "Variable",
    "absent_probability",
    "binary",
    "build_global",
    "check_soundness",
    "connected_to",
    "d_separated",
    "expand_atemporal",
    "extract_subset_independence",
    "fill_cpts_by_equality",
    "graph_union",
    "is_acyclic",
    "is_connected",
    "power_from_single",
    "present_from_singles",
    "present_probability",
    "star_restructure",
    "synthesize_cpt",
    "topological_order",
    "transform_global",
    "transform_similarity",
    "validate_network",
    "validate_similarity_network",
    "verify_subset_independence",
]
