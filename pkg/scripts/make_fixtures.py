"""Regenerate fixtures/ from scratch: hand-authored networks, a seeded random
corpus, and golden CLI outputs.

    python3 scripts/make_fixtures.py            # writes fixtures/
    python3 scripts/make_fixtures.py --check    # exit 1 if anything would change
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from pathlib import Path

import numpy as np

from multifault import synth
from multifault.causal import NoisyOrSpec, expand_atemporal
from multifault.cli import run_command
from multifault.core import BeliefNetwork, Cpt, Variable, binary
from multifault.documents import document_for, serialize_document
from multifault.graphs import SimilarityGraph
from multifault.simnet import LocalBeliefNetwork, SimilarityNetwork, build_global
from multifault.transform import transform_similarity

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

A, P = "absent", "present"


def net(variables, cpts) -> BeliefNetwork:
    arcs = [(p, c.owner) for c in cpts for p in c.parents]
    return BeliefNetwork.build(variables, arcs, cpts)


def yes(p: float) -> tuple[float, float]:
    return (round(1.0 - p, 12), p)


def pairwise_prior(name, prior: dict, pair) -> Cpt:
    total = sum(prior[f] for f in pair)
    return Cpt.prior(name, [prior[f] / total for f in pair])


# -- sore throat -----------------------------------------------------------

VP, ST, MONO, TC, PA = ("VIRAL PHARYNGITIS", "STREP THROAT", "MONONUCLEOSIS",
                        "TONSILLAR CELLULITIS", "PERITONSILLAR ABSCESS")
DISEASES = (VP, ST, MONO, TC, PA)
THROAT_PRIOR = {VP: 0.5, ST: 0.3, MONO: 0.1, TC: 0.06, PA: 0.04}

QOV, TI, PUS, ABD, TOX, FEVER = ("QUALITY OF VOICE", "TONSILS INVOLVED", "TONSILLAR PUS",
                                 "ABDOMINAL PAIN", "TOXIC APPEARANCE", "FEVER")
TI_VAR = Variable(TI, ("none", "one", "both"))
QOV_VAR = Variable(QOV, ("normal", "muffled"))

TI_ROWS = {VP: (0.3, 0.1, 0.6), ST: (0.1, 0.1, 0.8), TC: (0.05, 0.85, 0.1)}
PUS_ROWS = {VP: (0.02, 0.1, 0.15), ST: (0.05, 0.6, 0.75), TC: (0.05, 0.5, 0.6)}
ABD_ROWS = {VP: 0.05, ST: 0.3, MONO: 0.2}
QOV_ROWS = {PA: (0.2, 0.8), TC: (0.6, 0.4)}


def _throat_local(pair, features) -> LocalBeliefNetwork:
    d = Variable("DISEASE", pair)
    variables, cpts = [d], [pairwise_prior("DISEASE", THROAT_PRIOR, pair)]
    if QOV in features:
        variables.append(QOV_VAR)
        cpts.append(Cpt.from_configs(QOV, [({"DISEASE": f}, QOV_ROWS[f]) for f in pair],
                                     ["DISEASE"]))
    if TI in features:
        variables += [TI_VAR, binary(PUS)]
        cpts.append(Cpt.from_configs(TI, [({"DISEASE": f}, TI_ROWS[f]) for f in pair],
                                     ["DISEASE"]))
        cpts.append(Cpt.from_configs(
            PUS, [({"DISEASE": f, TI: t}, yes(PUS_ROWS[f][i]))
                  for f in pair for i, t in enumerate(TI_VAR.instances)], ["DISEASE", TI]))
    if ABD in features:
        variables += [binary(ABD), binary(FEVER), binary(TOX)]
        cpts.append(Cpt.from_configs(ABD, [({"DISEASE": f}, yes(ABD_ROWS[f])) for f in pair],
                                     ["DISEASE"]))
        cpts.append(Cpt.prior(FEVER, (0.6, 0.4)))
        cpts.append(Cpt.from_configs(TOX, [
            ({ABD: A, FEVER: A}, yes(0.05)), ({ABD: A, FEVER: P}, yes(0.3)),
            ({ABD: P, FEVER: A}, yes(0.25)), ({ABD: P, FEVER: P}, yes(0.6)),
        ], [ABD, FEVER]))
    return LocalBeliefNetwork(frozenset(pair), net(variables, cpts))


def sore_throat() -> SimilarityNetwork:
    locals_ = (
        _throat_local((TC, PA), {QOV}),
        _throat_local((VP, ST), {TI, ABD}),
        _throat_local((VP, MONO), {ABD}),
        _throat_local((ST, TC), {TI}),
    )
    graph = SimilarityGraph(frozenset(DISEASES), frozenset(loc.edge for loc in locals_))
    return SimilarityNetwork(Variable("DISEASE", DISEASES), graph, locals_)


# -- abdominal pain: APPI and RUPTURED ECTOPIC ----------------------------

NORMAL, APPI, RE = "NORMAL", "APPI", "RUPTURED ECTOPIC"
ANOREXIA, PERITONITIS, VB = "ANOREXIA", "PERITONITIS", "VAGINAL BLEEDING"
ABDO_PRIOR = {NORMAL: 0.8, APPI: 0.1, RE: 0.1}
ABDO_ROWS = {
    ANOREXIA: {NORMAL: 0.1, APPI: 0.6, RE: 0.1},
    PERITONITIS: {NORMAL: 0.05, APPI: 0.5, RE: 0.7},
    VB: {NORMAL: 0.05, APPI: 0.05, RE: 0.6},
}


def _abdo_local(pair, features) -> LocalBeliefNetwork:
    variables = [Variable("DISEASE", pair)] + [binary(x) for x in features]
    cpts = [pairwise_prior("DISEASE", ABDO_PRIOR, pair)]
    cpts += [Cpt.from_configs(x, [({"DISEASE": f}, yes(ABDO_ROWS[x][f])) for f in pair],
                              ["DISEASE"]) for x in features]
    return LocalBeliefNetwork(frozenset(pair), net(variables, cpts))


def _abdo_simnet(locals_) -> SimilarityNetwork:
    graph = SimilarityGraph(frozenset((NORMAL, APPI, RE)),
                            frozenset(loc.edge for loc in locals_))
    return SimilarityNetwork(Variable("DISEASE", (NORMAL, APPI, RE)), graph, locals_)


def appi_star() -> SimilarityNetwork:
    """Star centred on NORMAL."""
    return _abdo_simnet((
        _abdo_local((NORMAL, APPI), (ANOREXIA, PERITONITIS)),
        _abdo_local((NORMAL, RE), (PERITONITIS, VB)),
    ))


def appi_chain() -> SimilarityNetwork:
    """Chain APPI - RUPTURED ECTOPIC - NORMAL; APPI never meets NORMAL."""
    return _abdo_simnet((
        _abdo_local((APPI, RE), (ANOREXIA, PERITONITIS, VB)),
        _abdo_local((NORMAL, RE), (PERITONITIS, VB)),
    ))


PRIORS = {APPI: 0.05, RE: 0.02}


# -- small belief networks -------------------------------------------------

def minimal_bn() -> BeliefNetwork:
    return net([binary("a")], [Cpt.prior("a", (0.3, 0.7))])


def chain_bn() -> BeliefNetwork:
    cpts = [Cpt.prior("a", (0.4, 0.6)),
            Cpt.from_configs("b", [({"a": A}, (0.9, 0.1)), ({"a": P}, (0.2, 0.8))], ["a"])]
    return net([binary("a"), binary("b")], cpts)


def atemporal_example() -> BeliefNetwork:
    spec = NoisyOrSpec("m", ("d1", "d2"), 0.1, (0.5, 0.2))
    return expand_atemporal(spec)


def one_fault_bn() -> BeliefNetwork:
    d = Variable("DISEASE", (NORMAL, "F1"))
    cpts = [Cpt.prior("DISEASE", (0.9, 0.1)),
            Cpt.from_configs("x", [({"DISEASE": NORMAL}, (0.8, 0.2)),
                                   ({"DISEASE": "F1"}, (0.3, 0.7))], ["DISEASE"])]
    return net([d, binary("x")], cpts)


# -- generation ------------------------------------------------------------

def documents() -> dict[str, str]:
    """Relative path -> file content, in a fixed order."""
    out: dict[str, str] = {}

    def put(path, body, distinguished=None):
        out[path] = serialize_document(document_for(body, distinguished))

    put("sorethroat.simnet.json", sore_throat())
    put("appi-star.simnet.json", appi_star())
    put("appi-chain.simnet.json", appi_chain())
    put("appi-star.global.bn.json", build_global(appi_star()), "DISEASE")
    put("sorethroat.global.bn.json", build_global(sore_throat()), "DISEASE")
    put("minimal.bn.json", minimal_bn())
    put("chain.bn.json", chain_bn())
    put("atemporal.bn.json", atemporal_example())
    put("one-fault.bn.json", one_fault_bn(), "DISEASE")
    put("appi-star.mfbn.json", transform_similarity(appi_star(), PRIORS))
    out["priors.json"] = json.dumps(PRIORS, indent=2) + "\n"

    rng = np.random.default_rng(20240601)
    for i in range(12):
        s = synth.random_similarity_network(rng, monotone=True)
        put(f"corpus/random-{i:02d}.simnet.json", s)
        if i < 4:
            faults = [f for f in s.distinguished.instances if f != NORMAL]
            put(f"corpus/random-{i:02d}.mfbn.json", transform_similarity(
                s, {f: round(0.01 * (k + 1), 2) for k, f in enumerate(faults)}))
    for i in range(6):
        put(f"corpus/random-{i:02d}.bn.json", synth.random_dag_network(rng, 5))
    return out


# Golden CLI runs: (output file, argv). Paths are relative to the repo root.
GOLDEN = [
    ("validate-sorethroat.txt", ["validate", "fixtures/sorethroat.simnet.json"]),
    ("validate-sorethroat.json", ["validate", "fixtures/sorethroat.simnet.json",
                                  "--format", "json"]),
    ("build-global-sorethroat.bn.json", ["build-global", "fixtures/sorethroat.simnet.json"]),
    ("star-restructure-appi-chain.simnet.json", ["star-restructure", "fixtures/appi-chain.simnet.json"]),
    ("transform-appi-star.mfbn.json", ["transform", "fixtures/appi-star.simnet.json",
                                   "--priors", "fixtures/priors.json"]),
    ("transform-appi-chain.txt", ["transform", "fixtures/appi-chain.simnet.json",
                             "--priors", "fixtures/priors.json", "--format", "text",
                             "-o", "{tmp}/out.mfbn.json"]),
    ("query-appi-star.json", ["query", "fixtures/appi-star.mfbn.json", "--set", "PERITONITIS=present",
                          "--target", "APPI", "--format", "json"]),
    ("check-independence-appi-star.txt", ["check-independence", "fixtures/appi-star.simnet.json"]),
    ("check-independence-sorethroat.txt", ["check-independence",
                                           "fixtures/sorethroat.simnet.json"]),
    ("export-dot-appi-star.dot", ["export-dot", "fixtures/appi-star.simnet.json"]),
    ("export-dot-appi-star-mfbn.dot", ["export-dot", "fixtures/appi-star.mfbn.json"]),
]


def run_golden(argv: list[str], tmp: Path) -> tuple[int, str]:
    """Run one CLI invocation from the repo root; output paths are masked."""
    import os
    argv = [a.replace("{tmp}", str(tmp)) for a in argv]
    out = io.StringIO()
    cwd = os.getcwd()
    os.chdir(ROOT)
    try:
        code = run_command(argv, out, io.StringIO())
    finally:
        os.chdir(cwd)
    return code, out.getvalue().replace(str(tmp), "{tmp}")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--check", action="store_true")
    args = ap.parse_args(argv)
    import tempfile

    files = documents()
    if not args.check:
        for rel, text in files.items():
            path = FIXTURES / rel
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
    with tempfile.TemporaryDirectory() as tmp:
        for name, cmd in GOLDEN:
            code, text = run_golden(cmd, Path(tmp))
            if code != 0:
                print(f"golden {name}: exit {code}", file=sys.stderr)
                return 1
            files[f"golden/{name}"] = text
    if args.check:
        stale = [rel for rel, text in files.items()
                 if not (FIXTURES / rel).exists()
                 or (FIXTURES / rel).read_text(encoding="utf-8") != text]
        for rel in stale:
            print(f"stale: fixtures/{rel}", file=sys.stderr)
        return 1 if stale else 0
    for rel, text in files.items():
        if rel.startswith("golden/"):
            path = FIXTURES / rel
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
    print(f"wrote {len(files)} files under {FIXTURES.relative_to(ROOT)}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
