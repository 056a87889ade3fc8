"""Similarity networks: validation, global construction and subset independence.

A similarity network holds one local belief network per (hyper)edge of a
similarity graph over fault instances. The global network is the graph union
of the locals. Its Cpts are filled by copying rows between faults that a
local network declares indistinguishable for a feature.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from . import graphs, oracle
from .core import (
    BeliefNetwork,
    Cpt,
    ValidationReport,
    Variable,
    _Collector,
    parent_configs,
    validate_network,
)
from .errors import (
    CyclicGlobal,
    InconsistentAssessment,
    InvalidNetwork,
    NotPositive,
    ScopeMismatch,
    UnderdeterminedCpt,
)
from .graphs import SimilarityHypergraph

ASSESSMENT_TOL = 1e-9


def edge_label(edge: Iterable[str]) -> str:
    return "|".join(sorted(edge))


@dataclass(frozen=True)
class LocalBeliefNetwork:
    edge: frozenset[str]
    network: BeliefNetwork

    def __post_init__(self):
        object.__setattr__(self, "edge", frozenset(self.edge))

    @property
    def label(self) -> str:
        return edge_label(self.edge)


@dataclass(frozen=True)
class SimilarityNetwork:
    distinguished: Variable
    graph: SimilarityHypergraph
    locals: tuple[LocalBeliefNetwork, ...]

    def __post_init__(self):
        object.__setattr__(self, "locals",
                           tuple(sorted(self.locals, key=lambda loc: sorted(loc.edge))))

    @property
    def name(self) -> str:
        return self.distinguished.name

    def local_for(self, edge: Iterable[str]) -> LocalBeliefNetwork | None:
        edge = frozenset(edge)
        for loc in self.locals:
            if loc.edge == edge:
                return loc
        return None

    def features(self) -> list[str]:
        return sorted({n for loc in self.locals for n in loc.network.variables} - {self.name})


@dataclass(frozen=True)
class SubsetIndependenceAssertion:
    """``feature`` is irrelevant to discriminating among the faults in ``subset``."""

    feature: str
    subset: frozenset[str] = field()

    def __post_init__(self):
        object.__setattr__(self, "subset", frozenset(self.subset))
        if len(self.subset) < 2:
            raise ValueError("subset independence needs at least two faults")

    def __str__(self):
        return f"{self.feature} not relevant to {{{', '.join(sorted(self.subset))}}}"


@dataclass(frozen=True)
class SoundnessReport(ValidationReport):
    conditions: Mapping[str, bool] = field(default_factory=dict)

    @property
    def sound(self) -> bool:
        return all(self.conditions.values()) and not self.findings


def validate_similarity_network(s: SimilarityNetwork) -> ValidationReport:
    out = _Collector()
    f = s.name
    faults = set(s.distinguished.instances)
    g = s.graph

    for node in sorted(g.nodes - faults):
        out.error("unknown-fault", f"graph node {node!r} is not an instance of {f!r}",
                  f"graph:{node}")
    for node in sorted(faults - g.nodes):
        out.error("fault-not-in-graph", f"fault {node!r} does not appear in the similarity graph",
                  f"graph:{node}")
    if not graphs.is_connected(SimilarityHypergraph(g.nodes | faults, g.edges)):
        out.error("similarity-graph-disconnected", "the similarity graph is not connected")

    seen = defaultdict(int)
    for loc in s.locals:
        seen[loc.edge] += 1
    for edge in sorted(g.edges, key=sorted):
        if seen[edge] == 0:
            out.error("missing-local-network", f"no local network for edge {edge_label(edge)}",
                      f"edge:{edge_label(edge)}")
        elif seen[edge] > 1:
            out.error("duplicate-local-network",
                      f"{seen[edge]} local networks for edge {edge_label(edge)}",
                      f"edge:{edge_label(edge)}")
    for edge in sorted(set(seen) - set(g.edges), key=sorted):
        out.error("extra-local-network", f"local network for non-edge {edge_label(edge)}",
                  f"edge:{edge_label(edge)}")

    shapes: dict[str, tuple[tuple[str, ...], str]] = {}
    for loc in s.locals:
        where = f"local:{loc.label}"
        net = loc.network
        out.findings.extend(validate_network(net, where).findings)
        var = net.variables.get(f)
        if var is None:
            out.error("distinguished-missing", f"local network lacks the distinguished node {f!r}",
                      where)
            continue
        if set(var.instances) != set(loc.edge):
            out.error("local-instance-mismatch",
                      f"distinguished instances {sorted(var.instances)} differ from edge "
                      f"{sorted(loc.edge)}", where)
        if net.parents(f):
            out.error("distinguished-has-predecessor",
                      f"distinguished node has parents {list(net.parents(f))}", where)
        reach = graphs.undirected_component(f, net.nodes, net.arcs)
        for node in sorted(net.nodes - reach):
            out.error("node-disconnected-from-distinguished",
                      f"{node!r} has no path to the distinguished node", f"{where}/node:{node}")
        for name, v in net.variables.items():
            if name == f:
                continue
            if name in shapes and shapes[name][0] != v.instances:
                out.error("variable-mismatch",
                          f"{name!r} has instances {list(v.instances)} here but "
                          f"{list(shapes[name][0])} in local {shapes[name][1]}", where)
            shapes.setdefault(name, (v.instances, loc.label))
    return out.report()


def _require_valid(s: SimilarityNetwork):
    report = validate_similarity_network(s)
    if not report.ok:
        raise InvalidNetwork("similarity network failed validation:\n" + str(report), report)


def union_graph(s: SimilarityNetwork) -> graphs.DirectedGraph:
    return graphs.graph_union(loc.network.graph for loc in s.locals)


def build_global(s: SimilarityNetwork) -> BeliefNetwork:
    """Global belief network: graph union of the locals with filled Cpts."""
    _require_valid(s)
    union = union_graph(s)
    if not graphs.is_acyclic(union.nodes, union.arcs):
        raise CyclicGlobal("the union of the local networks contains a directed cycle")
    variables = {s.name: s.distinguished}
    for loc in s.locals:
        for name, var in loc.network.variables.items():
            variables.setdefault(name, var)
    bn = BeliefNetwork(variables, union.arcs, fill_cpts_by_equality(s))
    report = validate_network(bn)
    if not report.ok:
        raise InvalidNetwork("constructed global network is malformed:\n" + str(report), report)
    return bn


def _distinguished_prior(s: SimilarityNetwork) -> Cpt:
    """Combine the locals' restricted priors into one prior over all faults.

    Each local fixes the ratios among its own faults; ratios are chained
    along the (connected) similarity graph and checked on every edge.
    """
    f = s.name
    order = s.distinguished.instances
    ratios = []
    for loc in s.locals:
        var = loc.network.variables[f]
        ratios.append((loc.label, dict(zip(var.instances, loc.network.cpts[f].rows[()]))))
    weight = {order[0]: 1.0}
    changed = True
    while changed and len(weight) < len(order):
        changed = False
        for label, probs in ratios:
            known = [k for k in sorted(probs) if k in weight and probs[k] > 0.0]
            if not known:
                continue
            k = known[0]
            for j in sorted(probs):
                if j not in weight:
                    weight[j] = weight[k] * probs[j] / probs[k]
                    changed = True
    if len(weight) < len(order):
        raise UnderdeterminedCpt(f"prior of {f!r} cannot be determined from the locals",
                                 node=f, faults=sorted(set(order) - set(weight)))
    for label, probs in ratios:
        mass = sum(weight[j] for j in probs)
        for j, p in probs.items():
            if abs(weight[j] / mass - p) > ASSESSMENT_TOL:
                raise InconsistentAssessment(
                    f"local {label} gives p({j}) = {p!r} within the edge, other locals imply "
                    f"{weight[j] / mass!r}", node=f, local=label)
    total = sum(weight.values())
    return Cpt.prior(f, tuple(weight[i] / total for i in order))


def _rows_differ(a, b) -> bool:
    return max(abs(x - y) for x, y in zip(a, b)) > ASSESSMENT_TOL


def fill_cpts_by_equality(s: SimilarityNetwork) -> dict[str, Cpt]:
    """Assemble every global Cpt from the locals' assessments.

    Rows for a fault come from a local that contains the feature. Faults that
    share an edge whose local omits the feature are merged into one class
    (union-find per feature) and inherit the class's assessed row.
    """
    f = s.name
    union = union_graph(s)
    variables: dict[str, Variable] = {}
    for loc in s.locals:
        for name, var in loc.network.variables.items():
            if name != f:
                variables.setdefault(name, var)
    cpts = {f: _distinguished_prior(s)}
    for x in sorted(variables):
        gparents = tuple(sorted(a for a, b in union.arcs if b == x))
        cpts[x] = _fill_feature(s, x, gparents, variables)
    return cpts


def _fill_feature(s: SimilarityNetwork, x: str, gparents: tuple[str, ...],
                  variables: Mapping[str, Variable]) -> Cpt:
    f = s.name
    has_f = f in gparents
    ctx_names = [p for p in gparents if p != f]
    ctx_vars = [variables[p] for p in ctx_names]
    contexts = list(parent_configs(ctx_vars))
    instances = s.distinguished.instances

    assessed: dict[tuple, tuple[tuple[float, ...], str]] = {}
    merges: list[list[str]] = []
    for loc in s.locals:
        net = loc.network
        edge_faults = [i for i in instances if i in loc.edge]
        if x not in net.variables:
            merges.append(edge_faults)
            continue
        cpt = net.cpts[x]
        scope = set(cpt.parents)
        if not scope <= set(gparents):
            raise ScopeMismatch(f"local {loc.label} conditions {x!r} on {sorted(scope)}, "
                                f"outside the global parents {list(gparents)}",
                                node=x, local=loc.label)
        hidden = [p for p in ctx_names if p not in scope and p in net.variables]
        if hidden:
            raise ScopeMismatch(f"local {loc.label} contains {hidden} without making them "
                                f"parents of {x!r}", node=x, local=loc.label)
        if f not in scope:
            merges.append(edge_faults)
        for fault in (edge_faults if has_f else [None]):
            for ctx in contexts:
                a = dict(zip(ctx_names, ctx))
                a[f] = fault
                row = cpt.row(a)
                key = (fault, ctx)
                if key in assessed and _rows_differ(assessed[key][0], row):
                    raise InconsistentAssessment(
                        f"locals {assessed[key][1]} and {loc.label} disagree on p({x} | "
                        f"{fault or ''} {list(ctx)})", node=x, local=loc.label)
                assessed.setdefault(key, (row, loc.label))

    rows: dict[tuple[str, ...], tuple[float, ...]] = {}
    if not has_f:
        for ctx in contexts:
            if (None, ctx) not in assessed:
                raise UnderdeterminedCpt(f"no local assesses {x!r} for {list(ctx)}", node=x)
            rows[ctx] = assessed[(None, ctx)][0]
        return Cpt(x, gparents, rows)

    classes = graphs._components(instances, merges)
    for members in sorted(classes, key=lambda c: min(instances.index(m) for m in c)):
        ordered = [i for i in instances if i in members]
        for ctx in contexts:
            found = [(m, assessed[(m, ctx)]) for m in ordered if (m, ctx) in assessed]
            if not found:
                raise UnderdeterminedCpt(
                    f"no assessment of {x!r} for faults {ordered} (context {list(ctx)})",
                    node=x, faults=ordered)
            row, source = found[0][1]
            for m, (other, label) in found[1:]:
                if _rows_differ(row, other):
                    raise InconsistentAssessment(
                        f"{x!r} is declared irrelevant among {ordered} but locals {source} "
                        f"and {label} assess different rows", node=x, local=label)
            for m in ordered:
                a = dict(zip(ctx_names, ctx))
                a[f] = m
                key = tuple(a[p] for p in gparents)
                rows[key] = assessed.get((m, ctx), (row, source))[0]
    return Cpt(x, gparents, rows)


def extract_subset_independence(s: SimilarityNetwork) -> list[SubsetIndependenceAssertion]:
    """Assertions implied by features missing from (or cut off within) a local."""
    f = s.name
    everywhere = set(s.features())
    all_faults = frozenset(s.distinguished.instances)
    out = []
    for loc in s.locals:
        if loc.edge >= all_faults:
            continue
        net = loc.network
        reach = graphs.undirected_component(f, net.nodes, net.arcs)
        for x in sorted(everywhere):
            if x not in net.variables or x not in reach:
                out.append(SubsetIndependenceAssertion(x, loc.edge))
    return out


def _find_distinguished(bn: BeliefNetwork, subset: frozenset[str]) -> str:
    hits = [n for n, v in bn.variables.items() if subset <= set(v.instances)]
    if len(hits) != 1:
        raise ValueError(f"cannot identify the fault variable for {sorted(subset)}: {hits}")
    return hits[0]


def verify_subset_independence(bn: BeliefNetwork, a: SubsetIndependenceAssertion,
                               tol: float = 1e-9, fault_var: str | None = None,
                               joint: oracle.JointTable | None = None) -> bool:
    """Check p(x | f_i) = p(x | f_j) for every pair of faults in the subset."""
    f = fault_var or _find_distinguished(bn, a.subset)
    joint = joint if joint is not None else oracle.joint_table(bn)
    order = [i for i in bn.variables[f].instances if i in a.subset]
    dists = []
    for fault in order:
        try:
            dists.append(oracle.query(bn, {f: fault}, a.feature, joint=joint))
        except oracle.ZeroEvidence as exc:
            raise NotPositive(f"p({f} = {fault}) is zero", fault=fault) from exc
    first = dists[0]
    return all(abs(d[k] - first[k]) <= tol for d in dists[1:] for k in first)


def check_soundness(s: SimilarityNetwork, global_bn: BeliefNetwork) -> SoundnessReport:
    """Report the three conditions under which the global construction is sound."""
    out = _Collector()
    connected = graphs.is_connected(
        SimilarityHypergraph(s.graph.nodes | set(s.distinguished.instances), s.graph.edges))
    if not connected:
        out.error("similarity-graph-disconnected", "the similarity graph is not connected")
    acyclic = graphs.is_acyclic(global_bn.nodes, global_bn.arcs)
    if not acyclic:
        out.error("global-cyclic", "the global belief network contains a directed cycle")
    positive = True
    for name, cpt in global_bn.cpts.items():
        for key, row in cpt.rows.items():
            if any(p == 0.0 for p in row):
                positive = False
                where = f"node:{name}/row:{','.join(key)}" if key else f"node:{name}"
                out.warning("positivity-violated", f"zero entry in row {list(row)}", where)
    conditions = {"acyclic": acyclic, "strictly-positive": positive, "connected": connected}
    return SoundnessReport(tuple(out.findings), conditions)

