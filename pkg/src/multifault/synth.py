"""Seeded random instances for property tests and fixture generation."""

from __future__ import annotations

import numpy as np

from . import graphs
from .causal import NoisyOrSpec
from .core import BeliefNetwork, Cpt, Variable, binary, parent_configs
from .graphs import SimilarityGraph
from .simnet import SimilarityNetwork
from .transform import derive_local


def random_row(rng: np.random.Generator, k: int, floor: float = 0.05) -> tuple[float, ...]:
    """Strictly positive probability vector; every entry is at least floor / k."""
    raw = rng.dirichlet(np.ones(k))
    row = (1.0 - floor) * raw + floor / k
    row = row / row.sum()
    return tuple(float(p) for p in row)


def random_dag_network(rng: np.random.Generator, n_nodes: int, arc_prob: float = 0.4,
                       max_parents: int = 3, prefix: str = "X") -> BeliefNetwork:
    """Binary network whose arcs only run from lower to higher index."""
    names = [f"{prefix}{i}" for i in range(n_nodes)]
    arcs = []
    for j in range(n_nodes):
        cands = [i for i in range(j) if rng.random() < arc_prob]
        rng.shuffle(cands)
        arcs += [(names[i], names[j]) for i in cands[:max_parents]]
    variables = [binary(n) for n in names]
    cpts = []
    for n in names:
        parents = sorted(a for a, b in arcs if b == n)
        rows = {key: random_row(rng, 2) for key in parent_configs([binary(p) for p in parents])}
        cpts.append(Cpt(n, tuple(parents), rows))
    return BeliefNetwork.build(variables, arcs, cpts)


def random_noisy_or_spec(rng: np.random.Generator, n: int, name: str = "m") -> NoisyOrSpec:
    leak = float(rng.uniform(0.0, 0.5))
    singles = tuple(float(rng.uniform(leak, 1.0)) for _ in range(n))
    return NoisyOrSpec(name, tuple(f"d{i + 1}" for i in range(n)), leak, singles)


def random_fault_network(rng: np.random.Generator, n_faults: int = 3, n_features: int = 5,
                         fault_var: str = "DISEASE", normal: str = "NORMAL",
                         feature_arc_prob: float = 0.3, max_context: int = 2,
                         monotone: bool = False) -> BeliefNetwork:
    """Single-fault belief network over binary features, strictly positive.

    Each feature splits the faults into random classes sharing one
    distribution (so subset independence occurs naturally). Features with no
    path to the fault variable are dropped; the result has at least one.
    With ``monotone`` every fault makes each feature at least as likely to be
    present as ``normal`` does, as a noisy-OR gate requires.
    """
    while True:
        faults = (normal,) + tuple(f"F{i + 1}" for i in range(n_faults))
        fvar = Variable(fault_var, faults)
        names = [f"X{i + 1}" for i in range(n_features)]
        arcs, cpts = [], [Cpt.prior(fault_var, random_row(rng, len(faults), floor=0.3))]
        for j, x in enumerate(names):
            ctx = [names[i] for i in range(j) if rng.random() < feature_arc_prob]
            rng.shuffle(ctx)
            ctx = sorted(ctx[:max_context])
            labels = rng.integers(0, len(faults), size=len(faults))
            depends = len(set(labels.tolist())) > 1
            parents = sorted(ctx + ([fault_var] if depends else []))
            arcs += [(p, x) for p in parents]
            rows = {}
            for cfg in parent_configs([binary(c) for c in ctx]):
                by_class = {c: random_row(rng, 2) for c in sorted(set(labels.tolist()))}
                if monotone:
                    base = float(rng.uniform(0.02, 0.5))
                    for c in by_class:
                        p = base if c == labels[0] else float(rng.uniform(base, 0.98))
                        by_class[c] = (1.0 - p, p)
                for fault, label in zip(faults, labels.tolist()):
                    a = dict(zip(ctx, cfg))
                    a[fault_var] = fault
                    rows[tuple(a[p] for p in parents)] = by_class[label]
            cpts.append(Cpt(x, tuple(parents), rows))
        keep = graphs.undirected_component(fault_var, [fault_var] + names, arcs)
        if len(keep) > 1:
            break
    variables = [fvar] + [binary(n) for n in names if n in keep]
    arcs = [(a, b) for a, b in arcs if a in keep and b in keep]
    cpts = [c for c in cpts if c.owner in keep]
    return BeliefNetwork.build(variables, arcs, cpts)


def random_similarity_graph(rng: np.random.Generator, nodes: tuple[str, ...],
                            extra_edge_prob: float = 0.2) -> SimilarityGraph:
    """Connected graph: a random spanning tree plus a few extra edges."""
    order = list(nodes)
    rng.shuffle(order)
    edges = set()
    for i in range(1, len(order)):
        j = int(rng.integers(0, i))
        edges.add(frozenset((order[i], order[j])))
    for i in range(len(order)):
        for j in range(i + 1, len(order)):
            if rng.random() < extra_edge_prob:
                edges.add(frozenset((order[i], order[j])))
    return SimilarityGraph(frozenset(nodes), frozenset(edges))


def random_similarity_network(rng: np.random.Generator, n_faults: int = 3,
                              n_features: int = 5, fault_var: str = "DISEASE",
                              normal: str = "NORMAL", **kwargs) -> SimilarityNetwork:
    """Similarity network whose locals are derived from a random ground truth."""
    truth = random_fault_network(rng, n_faults, n_features, fault_var, normal, **kwargs)
    graph = random_similarity_graph(rng, truth.variables[fault_var].instances)
    locals_ = tuple(derive_local(truth, fault_var, edge) for edge in graph.sorted_edges())
    return SimilarityNetwork(truth.variables[fault_var], graph, locals_)
