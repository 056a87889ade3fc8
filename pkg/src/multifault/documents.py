"""JSON network documents: parsing, schema checks and canonical serialization.

Three kinds share one envelope (``format_version`` + ``kind``):
``belief-network`` (.bn.json), ``similarity-network`` (.simnet.json) and
``multi-fault-network`` (.mfbn.json). The JSON Schema ships with the package
in ``schemas/network-document.schema.json``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any, Union

import jsonschema

from .causal import ContextualNoisyOr, NoisyOrSpec
from .core import BeliefNetwork, Cpt, Variable, parent_configs
from .errors import ParseError, SchemaError, VersionError
from .graphs import SimilarityGraph, SimilarityHypergraph
from .simnet import LocalBeliefNetwork, SimilarityNetwork
from .transform import AddedAssertion, FaultDependencies, MultiFaultNetwork

FORMAT_VERSION = 1
KINDS = ("belief-network", "similarity-network", "multi-fault-network")

Body = Union[BeliefNetwork, SimilarityNetwork, MultiFaultNetwork]


@dataclass(frozen=True)
class NetworkDocument:
    kind: str
    body: Body
    format_version: int = FORMAT_VERSION
    distinguished: str | None = None  # belief-network documents only


def document_for(body: Body, distinguished: str | None = None) -> NetworkDocument:
    if isinstance(body, SimilarityNetwork):
        return NetworkDocument("similarity-network", body)
    if isinstance(body, MultiFaultNetwork):
        return NetworkDocument("multi-fault-network", body)
    return NetworkDocument("belief-network", body, distinguished=distinguished)


@lru_cache(maxsize=1)
def schema() -> dict:
    text = resources.files(__package__).joinpath("schemas/network-document.schema.json")
    return json.loads(text.read_text(encoding="utf-8"))


# -- parsing ---------------------------------------------------------------

def parse_document(text: str) -> NetworkDocument:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    if not isinstance(raw, dict):
        raise SchemaError("document must be a JSON object", path="/")
    version = raw.get("format_version")
    if not isinstance(version, int) or isinstance(version, bool):
        raise SchemaError("format_version must be an integer", path="/format_version")
    if version != FORMAT_VERSION:
        raise VersionError(f"unsupported format_version {version}; this reader handles "
                           f"{FORMAT_VERSION}", path="/format_version")
    validator = jsonschema.Draft202012Validator(schema())
    error = jsonschema.exceptions.best_match(validator.iter_errors(raw))
    if error is not None:
        path = "/" + "/".join(str(p) for p in error.absolute_path)
        raise SchemaError(error.message, path=path)
    try:
        return _build(raw)
    except (ValueError, KeyError) as exc:
        raise SchemaError(str(exc).strip("'\""), path="/") from exc


def load_document(path: str | Path) -> NetworkDocument:
    return parse_document(Path(path).read_text(encoding="utf-8"))


def _build(raw: dict) -> NetworkDocument:
    kind = raw["kind"]
    if kind == "belief-network":
        return NetworkDocument(kind, network_from_json(raw), raw["format_version"],
                               raw.get("distinguished"))
    if kind == "similarity-network":
        return NetworkDocument(kind, _simnet_from_json(raw), raw["format_version"])
    return NetworkDocument(kind, _mfbn_from_json(raw), raw["format_version"])


def _variable(raw: dict) -> Variable:
    return Variable(raw["name"], tuple(raw["instances"]))


def network_from_json(raw: dict) -> BeliefNetwork:
    variables = [_variable(v) for v in raw["variables"]]
    names = [v.name for v in variables]
    dupes = sorted({n for n in names if names.count(n) > 1})
    if dupes:
        raise ValueError(f"duplicate variable names {dupes}")
    cpts = [_cpt_from_json(c) for c in raw["cpts"]]
    owners = [c.owner for c in cpts]
    dupes = sorted({n for n in owners if owners.count(n) > 1})
    if dupes:
        raise ValueError(f"more than one Cpt for {dupes}")
    return BeliefNetwork.build(variables, (tuple(a) for a in raw["arcs"]), cpts)


def _cpt_from_json(raw: dict) -> Cpt:
    parents = raw["parents"]
    if len(set(parents)) != len(parents):
        raise ValueError(f"Cpt for {raw['node']!r} repeats a parent")
    rows = [(r["given"], r["probs"]) for r in raw["rows"]]
    keys = set()
    for given, _ in rows:
        if set(given) != set(parents):
            raise ValueError(f"Cpt row for {raw['node']!r} assigns {sorted(given)}, "
                             f"expected parents {sorted(parents)}")
        key = tuple(given[p] for p in sorted(parents))
        if key in keys:
            raise ValueError(f"Cpt for {raw['node']!r} repeats the row {list(key)}")
        keys.add(key)
    return Cpt.from_configs(raw["node"], rows, parents)


def _simnet_from_json(raw: dict) -> SimilarityNetwork:
    g = raw["graph"]
    edges = frozenset(frozenset(e) for e in g["edges"])
    hyper = g.get("hyper", False) or any(len(e) != 2 for e in edges)
    cls = SimilarityHypergraph if hyper else SimilarityGraph
    graph = cls(frozenset(g["nodes"]), edges)
    locals_ = tuple(LocalBeliefNetwork(frozenset(loc["edge"]), network_from_json(loc["network"]))
                    for loc in raw["locals"])
    return SimilarityNetwork(_variable(raw["distinguished"]), graph, locals_)


def _gate_from_json(manifestation: str, raw: dict):
    faults = tuple(raw["faults"])
    context = tuple(_variable(v) for v in raw.get("context", []))
    bundles = {}
    for b in raw["bundles"]:
        given = b.get("given", {})
        key = tuple(given[v.name] for v in context)
        bundles[key] = NoisyOrSpec(manifestation, faults, b["leak"], tuple(b["singles"]),
                                   tuple(b["powers"]) if "powers" in b else None)
    if not context:
        return bundles[()]
    return ContextualNoisyOr(manifestation, faults, context, bundles)


def _mfbn_from_json(raw: dict) -> MultiFaultNetwork:
    return MultiFaultNetwork(
        network=network_from_json(raw["network"]),
        fault_nodes=tuple(raw["fault_nodes"]),
        manifest_nodes=tuple(raw["manifest_nodes"]),
        provenance={m: _gate_from_json(m, g) for m, g in raw["provenance"].items()},
        priors={k: float(v) for k, v in raw["priors"].items()},
        added_assertions=tuple(AddedAssertion(tuple(a["manifestations"]), tuple(a["faults"]))
                               for a in raw.get("added_assertions", [])),
    )


def fault_deps_from_json(raw: dict) -> FaultDependencies:
    """``{"arcs": [[a, b], ...], "cpts": [...]}`` using the network Cpt encoding."""
    if not isinstance(raw, dict) or "arcs" not in raw or "cpts" not in raw:
        raise SchemaError("fault dependencies need 'arcs' and 'cpts'", path="/")
    try:
        cpts = [_cpt_from_json(c) for c in raw["cpts"]]
        return FaultDependencies(frozenset(tuple(a) for a in raw["arcs"]),
                                 {c.owner: c for c in cpts})
    except (ValueError, KeyError, TypeError) as exc:
        raise SchemaError(str(exc), path="/") from exc


# -- serialization ---------------------------------------------------------

def _variable_json(v: Variable) -> dict:
    return {"name": v.name, "instances": list(v.instances)}


def network_to_json(bn: BeliefNetwork) -> dict:
    cpts = []
    for name, cpt in bn.cpts.items():
        keys = list(cpt.rows)
        if all(p in bn.variables for p in cpt.parents):
            order = list(parent_configs([bn.variables[p] for p in cpt.parents]))
            keys = [k for k in order if k in cpt.rows] + [k for k in keys if k not in set(order)]
        cpts.append({
            "node": name,
            "parents": list(cpt.parents),
            "rows": [{"given": dict(zip(cpt.parents, k)), "probs": list(cpt.rows[k])}
                     for k in keys],
        })
    return {
        "variables": [_variable_json(v) for v in bn.variables.values()],
        "arcs": [list(a) for a in sorted(bn.arcs)],
        "cpts": cpts,
    }


def _gate_json(gate) -> dict:
    if isinstance(gate, NoisyOrSpec):
        context, bundles = (), {(): gate}
    else:
        context, bundles = gate.context, gate.bundles
    out = {"faults": list(gate.faults), "context": [_variable_json(v) for v in context],
           "bundles": []}
    for key in parent_configs(context):
        b = bundles[key]
        out["bundles"].append({"given": dict(zip((v.name for v in context), key)),
                               "leak": b.leak, "singles": list(b.singles),
                               "powers": list(b.powers)})
    return out


def to_json(doc: NetworkDocument) -> dict:
    out: dict[str, Any] = {"format_version": doc.format_version, "kind": doc.kind}
    body = doc.body
    if doc.kind == "belief-network":
        if doc.distinguished is not None:
            out["distinguished"] = doc.distinguished
        out.update(network_to_json(body))
    elif doc.kind == "similarity-network":
        g = body.graph
        graph = {"nodes": sorted(g.nodes), "edges": [list(e) for e in g.sorted_edges()]}
        if not isinstance(g, SimilarityGraph):
            graph["hyper"] = True
        out["distinguished"] = _variable_json(body.distinguished)
        out["graph"] = graph
        out["locals"] = [{"edge": sorted(loc.edge), "network": network_to_json(loc.network)}
                         for loc in body.locals]
    else:
        out["network"] = network_to_json(body.network)
        out["fault_nodes"] = list(body.fault_nodes)
        out["manifest_nodes"] = list(body.manifest_nodes)
        out["priors"] = dict(body.priors)
        out["provenance"] = {m: _gate_json(g) for m, g in body.provenance.items()}
        out["added_assertions"] = [
            {"manifestations": list(a.manifestations), "faults": list(a.faults)}
            for a in body.added_assertions
        ]
    return out


def serialize_document(doc: NetworkDocument) -> str:
    return json.dumps(to_json(doc), indent=2, ensure_ascii=False) + "\n"


def save_document(doc: NetworkDocument, path: str | Path) -> None:
    Path(path).write_text(serialize_document(doc), encoding="utf-8")
