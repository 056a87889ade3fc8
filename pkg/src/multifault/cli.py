"""Command-line front end.

Exit status: 0 on success, 1 when validation fails or the library rejects the
input, 2 on usage errors (bad flags, unreadable files).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence, TextIO

from . import graphs, oracle
from .core import BeliefNetwork, Finding, ValidationReport, validate_network
from .documents import (
    NetworkDocument,
    document_for,
    fault_deps_from_json,
    load_document,
    serialize_document,
)
from .errors import DocumentError, MultifaultError, SchemaError
from .simnet import (
    SimilarityNetwork,
    build_global,
    check_soundness,
    extract_subset_independence,
    validate_similarity_network,
    verify_subset_independence,
)
from .transform import (
    DEFAULT_NORMAL,
    DEFAULT_TOL,
    star_restructure,
    transform_global,
    transform_similarity,
)


class UsageError(Exception):
    pass


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance", type=float, default=DEFAULT_TOL,
                        help="equality tolerance for derived distributions (default 1e-9)")
    common.add_argument("--normal", default=DEFAULT_NORMAL,
                        help="label of the no-fault instance (default NORMAL)")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("-o", "--output", help="write the resulting document here")

    parser = argparse.ArgumentParser(
        prog="multifault",
        description="Validate similarity networks and build multiple-fault belief networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="validate any network document")
    p.add_argument("input")

    p = sub.add_parser("build-global", parents=[common],
                       help="graph union of a similarity network's locals")
    p.add_argument("input")

    p = sub.add_parser("star-restructure", parents=[common],
                       help="re-derive a star similarity network centred on NORMAL")
    p.add_argument("input")
    p.add_argument("--fault", help="fault variable of a belief-network input")

    p = sub.add_parser("transform", parents=[common],
                       help="build a multiple-fault belief network")
    p.add_argument("input")
    p.add_argument("--priors", required=True, help="JSON object: fault -> prior probability")
    p.add_argument("--fault-deps", help="JSON file with arcs and Cpts among fault nodes")
    p.add_argument("--fault", help="fault variable of a belief-network input")

    p = sub.add_parser("query", parents=[common], help="posterior of one variable")
    p.add_argument("input")
    p.add_argument("--set", action="append", default=[], metavar="VAR=VALUE",
                   help="evidence; repeatable; VALUE may be a|b for a disjunction")
    p.add_argument("--target", required=True)

    p = sub.add_parser("check-independence", parents=[common],
                       help="check subset-independence assertions or one d-separation query")
    p.add_argument("input")
    p.add_argument("--x")
    p.add_argument("--y")
    p.add_argument("--given", default="", help="comma-separated conditioning set")

    p = sub.add_parser("export-dot", parents=[common], help="emit a Graphviz DOT diagram")
    p.add_argument("input")
    return parser


# -- helpers ---------------------------------------------------------------

def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: {exc.msg}", line=exc.lineno, column=exc.colno) from exc


def _load(path: str) -> NetworkDocument:
    try:
        return load_document(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _network_of(doc: NetworkDocument) -> BeliefNetwork:
    if doc.kind == "similarity-network":
        return build_global(doc.body)
    if doc.kind == "multi-fault-network":
        return doc.body.network
    return doc.body


def _fault_var(doc: NetworkDocument, flag: str | None) -> str:
    name = flag or doc.distinguished
    if not name:
        raise UsageError("belief-network input needs --fault (or a 'distinguished' field)")
    return name


def _emit_document(doc: NetworkDocument, args, out: TextIO, summary: dict):
    text = serialize_document(doc)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        summary["output"] = args.output
        _emit(summary, args, out)
    else:
        out.write(text)


def _emit(payload: dict, args, out: TextIO):
    if args.format == "json":
        out.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return
    for line in payload.get("lines", []):
        out.write(line + "\n")
    if "output" in payload:
        out.write(f"wrote {payload['output']}\n")


def _report_payload(status: str, report: ValidationReport) -> dict:
    return {
        "status": status,
        "findings": [f.to_dict() for f in report.findings],
        "lines": [status] + [str(f) for f in report.findings],
    }


# -- commands --------------------------------------------------------------

def cmd_validate(args, out) -> int:
    doc = _load(args.input)
    if doc.kind == "similarity-network":
        report = validate_similarity_network(doc.body)
        if report.ok:
            try:
                gbn = build_global(doc.body)
            except MultifaultError as exc:
                report = report + ValidationReport((Finding("error", exc.code, str(exc)),))
            else:
                sound = check_soundness(doc.body, gbn)
                report = report + sound
                if sound.sound and not report.findings:
                    _emit(_report_payload("sound", report), args, out)
                    return 0
    else:
        bn = doc.body.network if doc.kind == "multi-fault-network" else doc.body
        report = validate_network(bn)
    status = "valid" if report.ok else "invalid"
    _emit(_report_payload(status, report), args, out)
    return 0 if report.ok else 1


def cmd_build_global(args, out) -> int:
    doc = _load(args.input)
    if doc.kind != "similarity-network":
        raise UsageError("build-global expects a similarity-network document")
    gbn = build_global(doc.body)
    result = document_for(gbn, distinguished=doc.body.name)
    _emit_document(result, args, out, {
        "status": "ok", "nodes": sorted(gbn.variables), "arcs": [list(a) for a in sorted(gbn.arcs)],
        "lines": [f"global network: {len(gbn.variables)} nodes, {len(gbn.arcs)} arcs"],
    })
    return 0


def cmd_star_restructure(args, out) -> int:
    doc = _load(args.input)
    if doc.kind == "similarity-network":
        gbn, fault = build_global(doc.body), doc.body.name
    elif doc.kind == "belief-network":
        gbn, fault = doc.body, _fault_var(doc, args.fault)
    else:
        raise UsageError("star-restructure expects a belief or similarity network")
    star = star_restructure(gbn, fault, args.normal, args.tolerance)
    lines = [f"local {loc.label}: " + ", ".join(sorted(set(loc.network.variables) - {fault}))
             for loc in star.locals]
    _emit_document(document_for(star), args, out, {
        "status": "ok", "edges": [list(e) for e in star.graph.sorted_edges()], "lines": lines,
    })
    return 0


def cmd_transform(args, out) -> int:
    doc = _load(args.input)
    priors = _read_json(args.priors)
    if not isinstance(priors, dict) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in priors.values()):
        raise SchemaError("priors must be a JSON object mapping fault names to numbers",
                          path=args.priors)
    deps = fault_deps_from_json(_read_json(args.fault_deps)) if args.fault_deps else None
    if doc.kind == "similarity-network":
        mf = transform_similarity(doc.body, priors, args.normal, args.tolerance, deps)
    elif doc.kind == "belief-network":
        mf = transform_global(doc.body, _fault_var(doc, args.fault), args.normal, priors,
                              args.tolerance, deps)
    else:
        raise UsageError("transform expects a belief or similarity network")
    arcs = sorted(a for a in mf.network.arcs if a[0] in set(mf.fault_nodes))
    lines = ["fault arcs: " + ", ".join(f"{a}->{b}" for a, b in arcs)]
    lines += [f"added assertion: {a}" for a in mf.added_assertions]
    _emit_document(document_for(mf), args, out, {
        "status": "ok", "fault_arcs": [list(a) for a in arcs],
        "added_assertions": [str(a) for a in mf.added_assertions], "lines": lines,
    })
    return 0


def _parse_evidence(items: Sequence[str]) -> dict:
    evidence = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep or not name or not value:
            raise UsageError(f"--set expects VAR=VALUE, got {item!r}")
        evidence[name] = value if "|" not in value else tuple(value.split("|"))
    return evidence


def cmd_query(args, out) -> int:
    doc = _load(args.input)
    bn = _network_of(doc)
    evidence = _parse_evidence(args.set)
    for name in list(evidence) + [args.target]:
        if name not in bn.variables:
            raise UsageError(f"unknown variable {name!r}")
    dist = oracle.query(bn, evidence, args.target)
    given = ", ".join(f"{k}={v if isinstance(v, str) else '|'.join(v)}"
                      for k, v in evidence.items())
    lines = [f"p({args.target} | {given})" if given else f"p({args.target})"]
    lines += [f"  {k}\t{v!r}" for k, v in dist.items()]
    _emit({"target": args.target,
           "evidence": {k: v if isinstance(v, str) else list(v) for k, v in evidence.items()},
           "distribution": dist, "lines": lines}, args, out)
    return 0


def cmd_check_independence(args, out) -> int:
    doc = _load(args.input)
    if args.x or args.y:
        if not (args.x and args.y):
            raise UsageError("--x and --y go together")
        bn = _network_of(doc)
        given = [g for g in args.given.split(",") if g]
        dsep = graphs.d_separated(bn, {args.x}, {args.y}, set(given))
        numeric = oracle.independent(bn, args.x, args.y, given, args.tolerance)
        lines = [f"d-separated: {str(dsep).lower()}", f"numerically independent: "
                 f"{str(numeric).lower()}"]
        _emit({"d_separated": dsep, "independent": numeric, "lines": lines}, args, out)
        return 0 if (numeric or not dsep) else 1
    if doc.kind != "similarity-network":
        raise UsageError("without --x/--y, check-independence expects a similarity network")
    s: SimilarityNetwork = doc.body
    gbn = build_global(s)
    joint = oracle.joint_table(gbn)
    results = []
    for a in extract_subset_independence(s):
        ok = verify_subset_independence(gbn, a, args.tolerance, s.name, joint)
        results.append({"feature": a.feature, "subset": sorted(a.subset), "holds": ok})
    lines = [f"{'holds' if r['holds'] else 'FAILS'}: {r['feature']} not relevant to "
             f"{{{', '.join(r['subset'])}}}" for r in results]
    _emit({"assertions": results, "lines": lines}, args, out)
    return 0 if all(r["holds"] for r in results) else 1


def _dot_id(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(doc: NetworkDocument) -> str:
    lines = [f"digraph {_dot_id(doc.kind)} {{", "  rankdir=TB;"]
    small_oval = "shape=ellipse, width=0.35, height=0.2, fontsize=9, distinguished=true"

    def network(bn: BeliefNetwork, special: set, prefix: str = "", indent: str = "  "):
        for name in sorted(bn.variables):
            attrs = f"label={_dot_id(name)}"
            if name in special:
                attrs += ", " + small_oval
            lines.append(f"{indent}{_dot_id(prefix + name)} [{attrs}];")
        for a, b in sorted(bn.arcs):
            lines.append(f"{indent}{_dot_id(prefix + a)} -> {_dot_id(prefix + b)};")

    if doc.kind == "similarity-network":
        s = doc.body
        lines.append('  subgraph "cluster_similarity_graph" {')
        lines.append('    label="similarity graph";')
        for node in sorted(s.graph.nodes):
            lines.append(f"    {_dot_id('graph:' + node)} [label={_dot_id(node)}];")
        for edge in s.graph.sorted_edges():
            for a, b in zip(edge, edge[1:]):
                lines.append(f"    {_dot_id('graph:' + a)} -> {_dot_id('graph:' + b)} [dir=none];")
        lines.append("  }")
        for loc in s.locals:
            lines.append(f"  subgraph {_dot_id('cluster_' + loc.label)} {{")
            lines.append(f"    label={_dot_id(loc.label)};")
            network(loc.network, {s.name}, loc.label + ":", "    ")
            lines.append("  }")
    elif doc.kind == "multi-fault-network":
        network(doc.body.network, set())
    else:
        network(doc.body, {doc.distinguished} if doc.distinguished else set())
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_export_dot(args, out) -> int:
    text = to_dot(_load(args.input))
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return 0


COMMANDS = {
    "validate": cmd_validate,
    "build-global": cmd_build_global,
    "star-restructure": cmd_star_restructure,
    "transform": cmd_transform,
    "query": cmd_query,
    "check-independence": cmd_check_independence,
    "export-dot": cmd_export_dot,
}


def run_command(argv: Sequence[str], out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    fmt = args.format
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return 2
    except MultifaultError as exc:
        payload = {"status": "error", "code": exc.code, "message": str(exc)}
        if isinstance(exc, DocumentError) and exc.location():
            payload["location"] = exc.location()
        if fmt == "json":
            out.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        where = f" ({payload['location']})" if "location" in payload else ""
        err.write(f"error {exc.code}: {exc}{where}\n")
        return 1
    except OSError as exc:
        err.write(f"usage error: {exc}\n")
        return 2
    except ValueError as exc:
        err.write(f"error invalid-input: {exc}\n")
        return 1


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
