import itertools

import numpy as np
import pytest

from conftest import cond, load, net
from multifault import oracle, synth
from multifault.core import Cpt, Variable, binary, validate_network
from multifault.documents import document_for, serialize_document
from multifault.errors import (
    CyclicInput,
    FaultHasParents,
    MissingPrior,
    NameCollision,
    NegativeCausalPower,
    NoNormalInstance,
    NonBinaryManifestation,
    UnknownInstance,
)
from multifault.graphs import SimilarityGraph, d_separated
from multifault.simnet import SimilarityNetwork, build_global
from multifault.transform import (
    FaultDependencies,
    derive_local,
    star_restructure,
    transform_global,
    transform_similarity,
)

APPI, RE = "APPI", "RUPTURED ECTOPIC"
STAR_ARCS = {(APPI, "ANOREXIA"), (APPI, "PERITONITIS"), (RE, "PERITONITIS"),
        (RE, "VAGINAL BLEEDING")}


def fault_arcs(mf):
    return {a for a in mf.network.arcs if a[0] in mf.fault_nodes}


def only(mf, fault):
    return {f: "present" if f == fault else "absent" for f in mf.fault_nodes}


def restricted_joint(bn, fault_var, subset, names):
    """Global joint conditioned on the fault lying in ``subset``, over ``names``."""
    joint = oracle.joint_table(bn).condition({fault_var: tuple(subset)})
    return joint.marginal(names)


# -- worked example --------------------------------------------------------

def test_star_network_fault_arcs(appi_star, priors):
    mf = transform_similarity(appi_star, priors)
    assert fault_arcs(mf) == STAR_ARCS
    assert mf.fault_nodes == (APPI, RE)
    assert mf.manifest_nodes == ("ANOREXIA", "PERITONITIS", "VAGINAL BLEEDING")
    assert mf.priors == priors
    assert validate_network(mf.network).findings == ()
    assert not any(mf.network.parents(f) for f in mf.fault_nodes)


def test_appi_star_gate_parameters(appi_star, priors):
    mf = transform_similarity(appi_star, priors)
    per = mf.provenance["PERITONITIS"]
    assert per.faults == (APPI, RE)
    assert per.leak == pytest.approx(0.05, abs=1e-12)
    assert per.singles == pytest.approx((0.5, 0.7), abs=1e-12)
    row = mf.network.cpts["PERITONITIS"].row({APPI: "present", RE: "present"})
    assert row[1] == pytest.approx(1 - 0.95 * (0.5 / 0.95) * (0.3 / 0.95), abs=1e-12)


def test_appi_chain_restructures_to_a_star(appi_chain, priors):
    star = star_restructure(build_global(appi_chain), "DISEASE")
    assert star.graph.edges == {frozenset({"NORMAL", APPI}), frozenset({"NORMAL", RE})}
    nodes = {loc.label: set(loc.network.variables) - {"DISEASE"} for loc in star.locals}
    assert nodes == {"APPI|NORMAL": {"ANOREXIA", "PERITONITIS"},
                     "NORMAL|RUPTURED ECTOPIC": {"PERITONITIS", "VAGINAL BLEEDING"}}
    assert fault_arcs(transform_similarity(appi_chain, priors)) == STAR_ARCS


def test_star_input_is_a_structural_fixed_point(appi_star):
    star = star_restructure(build_global(appi_star), "DISEASE")
    for loc in appi_star.locals:
        again = star.local_for(loc.edge).network
        assert again.nodes == loc.network.nodes and again.arcs == loc.network.arcs
        for x, cpt in loc.network.cpts.items():
            for key, row in cpt.rows.items():
                assert again.cpts[x].rows[key] == pytest.approx(row, abs=1e-12)


def test_appi_star_added_assertions(appi_star, priors):
    mf = transform_similarity(appi_star, priors)
    pairs = {a.manifestations for a in mf.added_assertions}
    assert ("ANOREXIA", "VAGINAL BLEEDING") in pairs
    joint = oracle.joint_table(mf.network)
    for a in mf.added_assertions:
        x, y = a.manifestations
        assert oracle.independent(mf.network, x, y, mf.fault_nodes, 1e-12, joint)


# -- small cases and errors ------------------------------------------------

def test_one_fault_gives_two_nodes():
    bn = load("one-fault.bn.json")
    mf = transform_global(bn, "DISEASE", priors={"F1": 0.1})
    assert set(mf.network.variables) == {"F1", "x"}
    assert mf.network.arcs == {("F1", "x")}
    rows = mf.network.cpts["x"].rows
    assert rows[("absent",)] == pytest.approx((0.8, 0.2), abs=1e-12)
    assert rows[("present",)] == pytest.approx((0.3, 0.7), abs=1e-12)
    assert mf.added_assertions == ()


def test_fault_with_parent_rejected():
    d = Variable("DISEASE", ("NORMAL", "F1"))
    bn = net([binary("z"), d, binary("x")],
             [Cpt.prior("z", (0.5, 0.5)),
              cond("DISEASE", "z", {"absent": (0.9, 0.1), "present": (0.8, 0.2)}),
              cond("x", "DISEASE", {"NORMAL": (0.8, 0.2), "F1": (0.3, 0.7)})])
    with pytest.raises(FaultHasParents):
        transform_global(bn, "DISEASE", priors={"F1": 0.1})
    with pytest.raises(FaultHasParents):
        star_restructure(bn, "DISEASE")


def test_precondition_errors(appi_star, priors, sorethroat):
    with pytest.raises(NoNormalInstance):
        transform_similarity(sorethroat, {})
    with pytest.raises(NoNormalInstance):
        transform_similarity(appi_star, priors, normal="HEALTHY")
    with pytest.raises(MissingPrior):
        transform_similarity(appi_star, {APPI: 0.1})
    with pytest.raises(UnknownInstance):
        star_restructure(build_global(appi_star), "NOPE")
    with pytest.raises(UnknownInstance):
        star_restructure(build_global(appi_star), "DISEASE", normal="HEALTHY")


def test_negative_causal_power_surfaces():
    d = Variable("DISEASE", ("NORMAL", "F1"))
    bn = net([d, binary("x")], [Cpt.prior("DISEASE", (0.9, 0.1)),
                                cond("x", "DISEASE", {"NORMAL": (0.3, 0.7), "F1": (0.8, 0.2)})])
    with pytest.raises(NegativeCausalPower):
        transform_global(bn, "DISEASE", priors={"F1": 0.1})


def test_nonbinary_manifestation_rejected():
    d = Variable("DISEASE", ("NORMAL", "F1"))
    bn = net([d, Variable("x", ("lo", "mid", "hi"))],
             [Cpt.prior("DISEASE", (0.9, 0.1)),
              cond("x", "DISEASE", {"NORMAL": (0.5, 0.3, 0.2), "F1": (0.2, 0.3, 0.5)})])
    with pytest.raises(NonBinaryManifestation):
        transform_global(bn, "DISEASE", priors={"F1": 0.1})


def test_fault_named_like_a_feature():
    d = Variable("DISEASE", ("NORMAL", "x"))
    bn = net([d, binary("x")], [Cpt.prior("DISEASE", (0.9, 0.1)),
                                cond("x", "DISEASE", {"NORMAL": (0.8, 0.2), "x": (0.3, 0.7)})])
    with pytest.raises(NameCollision):
        transform_global(bn, "DISEASE", priors={"x": 0.1})


def test_fault_dependencies(appi_star):
    dep = Cpt.from_configs(RE, [({APPI: "absent"}, (0.98, 0.02)),
                                ({APPI: "present"}, (0.9, 0.1))], [APPI])
    mf = transform_similarity(appi_star, {APPI: 0.05},
                              fault_deps=FaultDependencies(frozenset({(APPI, RE)}), {RE: dep}))
    assert (APPI, RE) in mf.network.arcs
    assert mf.network.cpts[RE] == dep
    assert mf.priors == {APPI: 0.05}
    cyclic = FaultDependencies(frozenset({(APPI, RE), (RE, APPI)}), {})
    with pytest.raises(CyclicInput):
        transform_similarity(appi_star, {}, fault_deps=cyclic)


def test_transform_is_deterministic(appi_chain, priors):
    first = serialize_document(document_for(transform_similarity(appi_chain, priors)))
    second = serialize_document(document_for(transform_similarity(appi_chain, priors)))
    assert first == second


# -- random corpus ---------------------------------------------------------

def corpus(seed, n):
    rng = np.random.default_rng(seed)
    return [synth.random_similarity_network(rng, monotone=True) for _ in range(n)]


PRIORS3 = {"F1": 0.1, "F2": 0.05, "F3": 0.2}


def test_restructured_locals_match_restricted_global():
    for s in corpus(11, 25):
        g = build_global(s)
        star = star_restructure(g, "DISEASE")
        for loc in star.locals:
            names = sorted(loc.network.variables)
            mine = oracle.joint_table(loc.network, order=names)
            theirs = restricted_joint(g, "DISEASE", sorted(loc.edge), names)
            # the global's joint keeps every fault axis; drop the ones outside the edge
            ax = names.index("DISEASE")
            keep = [g.variables["DISEASE"].index(i) for i in mine.instances[ax]]
            assert np.abs(mine.probs - np.take(theirs.probs, keep, axis=ax)).max() <= 1e-9


def test_single_fault_queries_round_trip():
    for s in corpus(12, 25):
        g = build_global(s)
        mf = transform_similarity(s, PRIORS3)
        gj, mj = oracle.joint_table(g), oracle.joint_table(mf.network)
        for x in mf.manifest_nodes:
            want = oracle.query(g, {"DISEASE": "NORMAL"}, x, gj)
            got = oracle.query(mf.network, only(mf, None), x, mj)
            assert abs(got["present"] - want["present"]) <= 1e-9
            for fault in mf.fault_nodes:
                want = oracle.query(g, {"DISEASE": fault}, x, gj)
                got = oracle.query(mf.network, only(mf, fault), x, mj)
                assert abs(got["present"] - want["present"]) <= 1e-9


def test_missing_arc_means_fault_does_not_matter():
    for s in corpus(13, 15):
        mf = transform_similarity(s, PRIORS3)
        joint = oracle.joint_table(mf.network)
        for fault, x in itertools.product(mf.fault_nodes, mf.manifest_nodes):
            if (fault, x) in mf.network.arcs:
                continue
            a = oracle.query(mf.network, only(mf, fault), x, joint)
            b = oracle.query(mf.network, only(mf, None), x, joint)
            assert abs(a["present"] - b["present"]) <= 1e-12


def test_global_entry_point_matches_similarity_path():
    for s in corpus(14, 10):
        a = transform_similarity(s, PRIORS3)
        b = transform_global(build_global(s), "DISEASE", priors=PRIORS3)
        assert serialize_document(document_for(a)) == serialize_document(document_for(b))


def sore_throat_shape(rng):
    """Sore-throat arc structure, binary features, NORMAL added as an instance."""
    faults = ("NORMAL", "VP", "ST", "MONO", "TC", "PA")
    d = Variable("DISEASE", faults)
    feats = ["QOV", "TI", "PUS", "ABD", "TOX", "FEVER"]

    def gate(base):
        return {f: (1 - p, p) for f, p in
                zip(faults, [base] + [float(rng.uniform(base, 0.95)) for _ in faults[1:]])}

    cpts = [Cpt.prior("DISEASE", (0.5, 0.2, 0.1, 0.1, 0.06, 0.04)),
            cond("QOV", "DISEASE", gate(0.1)), cond("TI", "DISEASE", gate(0.2)),
            cond("ABD", "DISEASE", gate(0.05)), Cpt.prior("FEVER", (0.6, 0.4))]
    rows = []
    for t in ("absent", "present"):
        g = gate(0.1 if t == "absent" else 0.3)
        rows += [({"DISEASE": f, "TI": t}, g[f]) for f in faults]
    cpts.append(Cpt.from_configs("PUS", rows, ["DISEASE", "TI"]))
    cpts.append(Cpt.from_configs("TOX", [({"ABD": a, "FEVER": b}, (0.9 - 0.2 * i, 0.1 + 0.2 * i))
                                         for i, (a, b) in enumerate(itertools.product(
                                             ("absent", "present"), repeat=2))],
                                 ["ABD", "FEVER"]))
    bn = net([d] + [binary(x) for x in feats], cpts)
    edges = [("VP", "ST"), ("VP", "MONO"), ("ST", "TC"), ("TC", "PA"), ("NORMAL", "VP")]
    graph = SimilarityGraph(frozenset(faults), frozenset(frozenset(e) for e in edges))
    locals_ = tuple(derive_local(bn, "DISEASE", e) for e in graph.sorted_edges())
    return bn, SimilarityNetwork(d, graph, locals_)


def test_sore_throat_shape_both_pipelines():
    rng = np.random.default_rng(21)
    priors = {f: 0.05 for f in ("VP", "ST", "MONO", "TC", "PA")}
    for _ in range(5):
        bn, s = sore_throat_shape(rng)
        a = transform_similarity(s, priors)
        b = transform_global(bn, "DISEASE", priors=priors)
        assert a.network.nodes == b.network.nodes and a.network.arcs == b.network.arcs
        for x, cpt in a.network.cpts.items():
            for key, row in cpt.rows.items():
                assert b.network.cpts[x].rows[key] == pytest.approx(row, abs=1e-9)
        assert ("ABD", "TOX") in a.network.arcs and ("FEVER", "TOX") in a.network.arcs


def test_added_assertions_when_faults_share_manifestations():
    found = 0
    for s in corpus(15, 30):
        mf = transform_similarity(s, PRIORS3)
        shared = [x for x in mf.manifest_nodes
                  if sum((f, x) in mf.network.arcs for f in mf.fault_nodes) >= 2]
        separated = [(x, y) for x, y in itertools.combinations(shared, 2)
                     if d_separated(mf.network, {x}, {y}, set(mf.fault_nodes))]
        if separated:
            assert mf.added_assertions
            found += 1
        for a in mf.added_assertions:
            assert oracle.independent(mf.network, *a.manifestations, mf.fault_nodes)
    assert found
