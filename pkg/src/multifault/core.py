"""Domain types shared across the package, plus structural validation.

Values here are treated as immutable once constructed. Mappings are copied on
construction and never mutated afterwards.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from . import graphs

ABSENT = "absent"
PRESENT = "present"
BINARY = (ABSENT, PRESENT)

NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True)
class Variable:
    name: str
    instances: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "instances", tuple(self.instances))
        if len(self.instances) < 2:
            raise ValueError(f"variable {self.name!r} needs at least two instances")
        if len(set(self.instances)) != len(self.instances):
            raise ValueError(f"variable {self.name!r} has duplicate instance labels")

    @property
    def is_binary(self) -> bool:
        return set(self.instances) == set(BINARY)

    def index(self, instance: str) -> int:
        return self.instances.index(instance)


def binary(name: str) -> Variable:
    return Variable(name, BINARY)


Config = tuple[str, ...]


def parent_configs(variables: Sequence[Variable]) -> Iterator[Config]:
    """Cartesian product of instance labels, first variable varying slowest."""
    return itertools.product(*(v.instances for v in variables))


@dataclass(frozen=True)
class Cpt:
    """Conditional probability table for ``owner``.

    ``rows`` maps a tuple of parent instance labels (aligned with ``parents``)
    to a probability vector over the owner's instances.
    """

    owner: str
    parents: tuple[str, ...]
    rows: Mapping[Config, tuple[float, ...]] = field(compare=True)

    def __post_init__(self):
        object.__setattr__(self, "parents", tuple(self.parents))
        object.__setattr__(
            self, "rows", {tuple(k): tuple(float(p) for p in v) for k, v in self.rows.items()}
        )

    @classmethod
    def from_configs(cls, owner: str, rows: Iterable[tuple[Mapping[str, str], Sequence[float]]],
                     parents: Iterable[str] | None = None) -> "Cpt":
        """Build a Cpt from ``(assignment, probs)`` pairs, sorting parents by name."""
        rows = list(rows)
        if parents is None:
            parents = rows[0][0].keys() if rows else ()
        order = tuple(sorted(parents))
        table = {}
        for assignment, probs in rows:
            if set(assignment) != set(order):
                raise ValueError(
                    f"row for {owner!r} assigns {sorted(assignment)}, expected {list(order)}"
                )
            table[tuple(assignment[p] for p in order)] = tuple(probs)
        return cls(owner, order, table)

    @classmethod
    def prior(cls, owner: str, probs: Sequence[float]) -> "Cpt":
        return cls(owner, (), {(): tuple(probs)})

    def row(self, assignment: Mapping[str, str]) -> tuple[float, ...]:
        """Row for ``assignment``; keys that are not parents are ignored."""
        return self.rows[tuple(assignment[p] for p in self.parents)]

    def assignments(self) -> Iterator[tuple[dict[str, str], tuple[float, ...]]]:
        for key, probs in self.rows.items():
            yield dict(zip(self.parents, key)), probs


@dataclass(frozen=True)
class BeliefNetwork:
    variables: Mapping[str, Variable]
    arcs: frozenset[tuple[str, str]]
    cpts: Mapping[str, Cpt]

    def __post_init__(self):
        object.__setattr__(self, "variables", dict(sorted(self.variables.items())))
        object.__setattr__(self, "arcs", frozenset((a, b) for a, b in self.arcs))
        object.__setattr__(self, "cpts", dict(sorted(self.cpts.items())))

    @classmethod
    def build(cls, variables: Iterable[Variable], arcs: Iterable[tuple[str, str]],
              cpts: Iterable[Cpt]) -> "BeliefNetwork":
        return cls({v.name: v for v in variables}, frozenset(arcs), {c.owner: c for c in cpts})

    @property
    def nodes(self) -> frozenset[str]:
        return frozenset(self.variables)

    @property
    def graph(self) -> graphs.DirectedGraph:
        return graphs.DirectedGraph(self.nodes, self.arcs)

    def parents(self, name: str) -> tuple[str, ...]:
        return tuple(sorted(a for a, b in self.arcs if b == name))

    def children(self, name: str) -> tuple[str, ...]:
        return tuple(sorted(b for a, b in self.arcs if a == name))

    def topological_order(self) -> list[str]:
        return graphs.topological_order(self.nodes, self.arcs)


@dataclass(frozen=True)
class Finding:
    severity: str  # "error" | "warning"
    code: str
    message: str
    location: str = ""

    def __str__(self):
        where = f" [{self.location}]" if self.location else ""
        return f"{self.severity} {self.code}: {self.message}{where}"

    def to_dict(self) -> dict:
        return {"severity": self.severity, "code": self.code,
                "message": self.message, "location": self.location}


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...] = ()

    @property
    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == "error"]

    @property
    def warnings(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == "warning"]

    @property
    def ok(self) -> bool:
        return not self.errors

    def codes(self) -> set[str]:
        return {f.code for f in self.findings}

    def __add__(self, other: "ValidationReport") -> "ValidationReport":
        return ValidationReport(self.findings + other.findings)

    def __str__(self):
        return "\n".join(str(f) for f in self.findings)


class _Collector:
    def __init__(self, prefix: str = ""):
        self.prefix = prefix
        self.findings: list[Finding] = []

    def error(self, code, message, location=""):
        self.findings.append(Finding("error", code, message, self._loc(location)))

    def warning(self, code, message, location=""):
        self.findings.append(Finding("warning", code, message, self._loc(location)))

    def _loc(self, location):
        if self.prefix and location:
            return f"{self.prefix}/{location}"
        return self.prefix or location

    def report(self) -> ValidationReport:
        return ValidationReport(tuple(self.findings))


def validate_network(bn: BeliefNetwork, location: str = "") -> ValidationReport:
    """Report structural and numerical defects of a candidate belief network.

    Problems are collected, never raised. Zero entries are warnings because
    deterministic rows are legitimate; strict positivity only matters for
    soundness.
    """
    out = _Collector(location)
    names = set(bn.variables)

    for a, b in sorted(bn.arcs):
        for end in (a, b):
            if end not in names:
                out.error("dangling-arc", f"arc {a} -> {b} names undeclared variable {end!r}",
                          f"arc:{a}->{b}")
    inner = {(a, b) for a, b in bn.arcs if a in names and b in names}
    if not graphs.is_acyclic(names, inner):
        out.error("cycle", "the arc set contains a directed cycle")

    for name, var in bn.variables.items():
        cpt = bn.cpts.get(name)
        if cpt is None:
            out.error("missing-cpt", f"no Cpt for {name!r}", f"node:{name}")
            continue
        expected = tuple(sorted(a for a, b in inner if b == name))
        if cpt.parents != expected:
            out.error("cpt-parent-mismatch",
                      f"Cpt parents {list(cpt.parents)} differ from in-neighbours {list(expected)}",
                      f"node:{name}")
            continue
        parent_vars = [bn.variables[p] for p in cpt.parents]
        wanted = set(parent_configs(parent_vars))
        for key in sorted(wanted - set(cpt.rows)):
            out.error("missing-row", f"no row for parent configuration {list(key)}",
                      f"node:{name}")
        for key in sorted(set(cpt.rows) - wanted):
            out.error("extra-row", f"row for unknown parent configuration {list(key)}",
                      f"node:{name}")
        for key in sorted(set(cpt.rows) & wanted):
            _check_row(out, name, var, key, cpt.rows[key])
    for name in sorted(set(bn.cpts) - names):
        out.error("extra-cpt", f"Cpt for undeclared variable {name!r}", f"node:{name}")
    return out.report()


def _check_row(out: _Collector, name: str, var: Variable, key: Config, probs):
    where = f"node:{name}/row:{','.join(key)}" if key else f"node:{name}"
    if len(probs) != len(var.instances):
        out.error("row-length", f"row has {len(probs)} entries, variable has "
                  f"{len(var.instances)} instances", where)
        return
    if any(not math.isfinite(p) or p < 0.0 or p > 1.0 for p in probs):
        out.error("probability-out-of-range", f"entries {list(probs)} leave [0, 1]", where)
        return
    total = math.fsum(probs)
    if abs(total - 1.0) > NORMALIZATION_TOL:
        out.error("row-not-normalized", f"row sums to {total!r}", where)
    if any(p == 0.0 for p in probs):
        out.warning("zero-probability", f"row {list(probs)} contains a zero entry", where)


def is_strictly_positive(bn: BeliefNetwork) -> bool:
    return all(p > 0.0 for cpt in bn.cpts.values() for row in cpt.rows.values() for p in row)
