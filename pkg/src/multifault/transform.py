"""From single-fault models to multiple-fault belief networks.

``star_restructure`` re-derives a similarity network whose graph is a star
centred on the normal instance. ``transform_global`` and
``transform_similarity`` then give every fault its own binary node and build
each manifestation's table with a noisy-OR gate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from . import graphs, oracle
from .causal import ContextualNoisyOr, NoisyOrSpec, synthesize_cpt
from .core import (
    PRESENT,
    BeliefNetwork,
    Cpt,
    Variable,
    binary,
    parent_configs,
    validate_network,
)
from .errors import (
    CyclicGlobal,
    CyclicInput,
    FaultHasParents,
    InvalidNetwork,
    MissingPrior,
    NameCollision,
    NoNormalInstance,
    NonBinaryManifestation,
    UnknownInstance,
    ZeroEvidence,
)
from .graphs import SimilarityGraph
from .simnet import LocalBeliefNetwork, SimilarityNetwork, build_global

DEFAULT_TOL = 1e-9
DEFAULT_NORMAL = "NORMAL"


@dataclass(frozen=True)
class FaultDependencies:
    """Optional arcs among fault nodes, with Cpts for every fault that has parents."""

    arcs: frozenset[tuple[str, str]]
    cpts: Mapping[str, Cpt]

    def __post_init__(self):
        object.__setattr__(self, "arcs", frozenset(tuple(a) for a in self.arcs))
        object.__setattr__(self, "cpts", dict(sorted(self.cpts.items())))


@dataclass(frozen=True)
class AddedAssertion:
    """Independence the multiple-fault network asserts but the star network does not.

    ``manifestations`` are independent given any configuration in which two
    or more of ``faults`` are present.
    """

    manifestations: tuple[str, str]
    faults: tuple[str, ...]

    def __str__(self):
        x, y = self.manifestations
        return (f"{x} independent of {y} given two or more of "
                f"{{{', '.join(self.faults)}}} present")


@dataclass(frozen=True)
class MultiFaultNetwork:
    network: BeliefNetwork
    fault_nodes: tuple[str, ...]
    manifest_nodes: tuple[str, ...]
    provenance: Mapping[str, NoisyOrSpec | ContextualNoisyOr]
    priors: Mapping[str, float]
    added_assertions: tuple[AddedAssertion, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "provenance", dict(sorted(self.provenance.items())))
        object.__setattr__(self, "priors", dict(sorted(self.priors.items())))


def _check_fault_var(bn: BeliefNetwork, fault_var: str, normal: str | None = None):
    if fault_var not in bn.variables:
        raise UnknownInstance(f"network has no variable {fault_var!r}")
    if bn.parents(fault_var):
        raise FaultHasParents(f"{fault_var!r} has parents {list(bn.parents(fault_var))}")
    if normal is not None and normal not in bn.variables[fault_var].instances:
        raise UnknownInstance(f"{fault_var!r} has no instance {normal!r}")


def derive_local(bn: BeliefNetwork, fault_var: str, subset: Iterable[str],
                 tol: float = DEFAULT_TOL, joint: oracle.JointTable | None = None
                 ) -> LocalBeliefNetwork:
    """Local network for discriminating the faults in ``subset``, derived from ``bn``.

    The fault variable is restricted to ``subset``. An arc from the fault
    variable is kept only where some context makes the child's distribution
    differ across the subset by more than ``tol``; nodes left without a path
    to the fault variable are dropped. All distributions are computed from
    the restricted joint.
    """
    _check_fault_var(bn, fault_var)
    fvar = bn.variables[fault_var]
    subset = [i for i in fvar.instances if i in set(subset)]
    if len(subset) < 2:
        raise UnknownInstance(f"subset {subset} names fewer than two instances of {fault_var!r}")
    joint = joint if joint is not None else oracle.joint_table(bn)
    restricted = joint.restrict({fault_var: subset})
    if restricted.total() <= 0.0:
        raise ZeroEvidence(f"faults {subset} have zero prior probability")

    arcs = set(bn.arcs)
    for x in bn.children(fault_var):
        if not _depends_on_fault(bn, restricted, fault_var, subset, x, tol):
            arcs.discard((fault_var, x))
    keep = graphs.undirected_component(fault_var, bn.nodes, arcs)
    arcs = {(a, b) for a, b in arcs if a in keep and b in keep}

    local_f = Variable(fault_var, tuple(subset))
    variables = [local_f] + [bn.variables[n] for n in sorted(keep - {fault_var})]
    prior = restricted.marginal([fault_var]).probs
    prior = prior[[fvar.index(i) for i in subset]]
    cpts = [Cpt.prior(fault_var, tuple(float(p) for p in prior / prior.sum()))]
    for x in sorted(keep - {fault_var}):
        parents = tuple(sorted(a for a, b in arcs if b == x))
        cond = oracle.conditional_rows(restricted, x, parents)
        rows = {}
        for key, row in cond.items():
            if parents and fault_var in parents and key[parents.index(fault_var)] not in subset:
                continue
            if row is None:
                # zero-probability context: take the global table's row
                a = dict(zip(parents, key))
                a.setdefault(fault_var, subset[0])
                row = bn.cpts[x].row(a)
            rows[key] = row
        cpts.append(Cpt(x, parents, rows))
    network = BeliefNetwork.build(variables, arcs, cpts)
    return LocalBeliefNetwork(frozenset(subset), network)


def _depends_on_fault(bn, restricted, fault_var, subset, x, tol) -> bool:
    others = [p for p in bn.parents(x) if p != fault_var]
    cond = oracle.conditional_rows(restricted, x, [fault_var] + others)
    for ctx in parent_configs([bn.variables[p] for p in others]):
        rows = [cond[(fault,) + ctx] for fault in subset]
        rows = [r for r in rows if r is not None]
        for r in rows[1:]:
            if max(abs(a - b) for a, b in zip(r, rows[0])) > tol:
                return True
    return False


def star_restructure(global_bn: BeliefNetwork, fault_var: str, normal: str = DEFAULT_NORMAL,
                     tol: float = DEFAULT_TOL) -> SimilarityNetwork:
    """Similarity network with a star graph centred on ``normal``.

    One local per fault, each derived from ``global_bn`` restricted to
    ``{normal, fault}``.
    """
    report = validate_network(global_bn)
    if not report.ok:
        raise InvalidNetwork("global network failed validation:\n" + str(report), report)
    _check_fault_var(global_bn, fault_var, normal)
    fvar = global_bn.variables[fault_var]
    joint = oracle.joint_table(global_bn)
    faults = [i for i in fvar.instances if i != normal]
    locals_ = [derive_local(global_bn, fault_var, (normal, fi), tol, joint) for fi in faults]
    graph = SimilarityGraph(frozenset(fvar.instances),
                            frozenset(frozenset((normal, fi)) for fi in faults))
    return SimilarityNetwork(fvar, graph, tuple(locals_))


def _is_star(s: SimilarityNetwork, normal: str) -> bool:
    spokes = sorted(tuple(sorted(e)) for e in s.graph.edges)
    wanted = sorted(tuple(sorted((normal, i))) for i in s.distinguished.instances if i != normal)
    return spokes == wanted


def transform_similarity(s: SimilarityNetwork, priors: Mapping[str, float],
                         normal: str = DEFAULT_NORMAL, tol: float = DEFAULT_TOL,
                         fault_deps: FaultDependencies | None = None) -> MultiFaultNetwork:
    """Multiple-fault network from an arbitrary similarity network.

    The global network is built by union, restructured into a star around
    ``normal``, and the star is then converted.
    """
    if normal not in s.distinguished.instances:
        raise NoNormalInstance(f"{s.name!r} has no instance {normal!r}")
    return transform_global(build_global(s), s.name, normal, priors, tol, fault_deps)


def transform_global(bn: BeliefNetwork, fault_var: str, normal: str = DEFAULT_NORMAL,
                     priors: Mapping[str, float] | None = None, tol: float = DEFAULT_TOL,
                     fault_deps: FaultDependencies | None = None) -> MultiFaultNetwork:
    """Multiple-fault network from a single-fault belief network."""
    if fault_var in bn.variables and normal not in bn.variables[fault_var].instances:
        raise NoNormalInstance(f"{fault_var!r} has no instance {normal!r}")
    star = star_restructure(bn, fault_var, normal, tol)
    return transform_star(star, normal, priors or {}, fault_deps)


def transform_star(star: SimilarityNetwork, normal: str, priors: Mapping[str, float],
                   fault_deps: FaultDependencies | None = None) -> MultiFaultNetwork:
    """Convert a star-shaped similarity network centred on ``normal``."""
    f = star.name
    if normal not in star.distinguished.instances:
        raise NoNormalInstance(f"{f!r} has no instance {normal!r}")
    if not _is_star(star, normal):
        raise InvalidNetwork(f"similarity graph is not a star centred on {normal!r}")
    g_star = build_global(star)

    faults = tuple(i for i in star.distinguished.instances if i != normal)
    manifests = tuple(sorted(n for n in g_star.variables if n != f))
    clash = set(faults) & set(manifests)
    if clash:
        raise NameCollision(f"fault names {sorted(clash)} are also feature names")

    deps = fault_deps or FaultDependencies(frozenset(), {})
    dep_children = {b for a, b in deps.arcs}
    for a, b in deps.arcs:
        if a not in faults or b not in faults:
            raise UnknownInstance(f"fault dependency {a} -> {b} names an unknown fault")
    if not graphs.is_acyclic(faults, deps.arcs):
        raise CyclicInput("fault dependencies contain a directed cycle")
    for fault in faults:
        if fault not in dep_children and fault not in priors:
            raise MissingPrior(f"no prior probability for fault {fault!r}")

    arcs = {(a, b) for a, b in g_star.arcs if a != f}
    for fault in faults:
        loc = star.local_for((normal, fault))
        for x in sorted(set(loc.network.variables) - {f}):
            arcs.add((fault, x))
    arcs |= set(deps.arcs)
    if not graphs.is_acyclic(set(faults) | set(manifests), arcs):
        raise CyclicGlobal("multiple-fault network would contain a directed cycle")

    variables = [binary(fi) for fi in faults] + [g_star.variables[x] for x in manifests]
    cpts: list[Cpt] = []
    used_priors = {}
    for fault in faults:
        if fault in dep_children:
            cpts.append(deps.cpts[fault])
        else:
            p = float(priors[fault])
            used_priors[fault] = p
            cpts.append(Cpt.prior(fault, (1.0 - p, p)))

    provenance = {}
    for x in manifests:
        fault_parents = tuple(sorted(a for a, b in arcs if b == x and a in faults))
        context = tuple(g_star.variables[a] for a in sorted(
            a for a, b in arcs if b == x and a not in faults))
        gate = _gate_for(g_star, f, normal, x, fault_parents, context)
        provenance[x] = gate
        cpts.append(synthesize_cpt(gate))

    network = BeliefNetwork.build(variables, arcs, cpts)
    report = validate_network(network)
    if not report.ok:
        raise InvalidNetwork("multiple-fault network is malformed:\n" + str(report), report)
    return MultiFaultNetwork(network, faults, manifests, provenance, used_priors,
                             added_assertions(network, faults, manifests))


def _gate_for(g_star: BeliefNetwork, f: str, normal: str, x: str,
              fault_parents: tuple[str, ...], context: tuple[Variable, ...]):
    var = g_star.variables[x]
    if not var.is_binary:
        raise NonBinaryManifestation(
            f"{x!r} has instances {list(var.instances)}; noisy-OR needs absent/present")
    cpt = g_star.cpts[x]
    present = var.index(PRESENT)
    bundles = {}
    for ctx in parent_configs(context):
        a = dict(zip((v.name for v in context), ctx))
        leak = cpt.row({**a, f: normal})[present]
        singles = tuple(cpt.row({**a, f: fault})[present] for fault in fault_parents)
        bundles[ctx] = NoisyOrSpec(x, fault_parents, leak, singles)
    if not context:
        return bundles[()]
    return ContextualNoisyOr(x, fault_parents, context, bundles)


def added_assertions(network: BeliefNetwork, faults: Sequence[str],
                     manifests: Sequence[str]) -> tuple[AddedAssertion, ...]:
    """Manifestation pairs independent given several present faults.

    The star network only speaks about configurations with at most one
    fault present; each pair listed here is d-separated given all fault
    nodes, so the multiple-fault network extends that independence to
    configurations with two or more of the listed faults present.
    """
    fault_set = set(faults)
    out = []
    for x, y in itertools.combinations(sorted(manifests), 2):
        fx = {a for a in network.parents(x) if a in fault_set}
        fy = {a for a in network.parents(y) if a in fault_set}
        union = fx | fy
        if not fx or not fy or len(union) < 2:
            continue
        if graphs.d_separated(network, {x}, {y}, fault_set):
            out.append(AddedAssertion((x, y), tuple(sorted(union))))
    return tuple(out)
