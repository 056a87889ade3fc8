"""Exact inference by enumerating the full joint distribution.

Deliberately naive: the joint is materialised as one dense array with an axis
per variable. This is the reference every other module is checked against, so
it trades speed for being obviously correct.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Collection, Iterable, Mapping

import numpy as np

from .core import BeliefNetwork
from .errors import TooLarge, UnknownInstance, ZeroEvidence

MAX_STATES = 2 ** 24

# evidence value: one instance label, or a collection of labels read as a disjunction
Evidence = Mapping[str, "str | Collection[str]"]


@dataclass(frozen=True, eq=False)
class JointTable:
    variables: tuple[str, ...]
    instances: tuple[tuple[str, ...], ...]
    probs: np.ndarray

    def axis(self, name: str) -> int:
        return self.variables.index(name)

    def entries(self) -> dict[tuple[str, ...], float]:
        """Map every full assignment to its probability."""
        return {
            key: float(self.probs[idx])
            for key, idx in zip(itertools.product(*self.instances),
                                itertools.product(*(range(len(i)) for i in self.instances)))
        }

    def total(self) -> float:
        return float(self.probs.sum())

    def restrict(self, evidence: Evidence) -> "JointTable":
        """Zero out entries inconsistent with ``evidence`` (not renormalised)."""
        mask = np.ones(self.probs.shape, dtype=bool)
        for name, value in evidence.items():
            ax = self.axis(name)
            allowed = _allowed(self.instances[ax], value, name)
            shape = [1] * self.probs.ndim
            shape[ax] = len(allowed)
            mask = mask & np.asarray(allowed).reshape(shape)
        return JointTable(self.variables, self.instances, np.where(mask, self.probs, 0.0))

    def condition(self, evidence: Evidence) -> "JointTable":
        table = self.restrict(evidence)
        mass = table.total()
        if mass <= 0.0:
            raise ZeroEvidence(f"evidence {dict(evidence)} has probability zero")
        return JointTable(self.variables, self.instances, table.probs / mass)

    def marginal(self, names: Iterable[str]) -> "JointTable":
        """Marginal table over ``names`` in the given order."""
        names = tuple(names)
        keep = [self.axis(n) for n in names]
        drop = tuple(i for i in range(len(self.variables)) if i not in keep)
        summed = self.probs.sum(axis=drop) if drop else self.probs
        # remaining axes are in original order; permute to requested order
        remaining = sorted(keep)
        perm = [remaining.index(k) for k in keep]
        return JointTable(names, tuple(self.instances[k] for k in keep),
                          np.transpose(summed, perm))

    def distribution(self, target: str) -> dict[str, float]:
        m = self.marginal([target]).probs
        return dict(zip(self.instances[self.axis(target)], (float(p) for p in m)))


def _allowed(labels: tuple[str, ...], value, name: str) -> list[bool]:
    wanted = {value} if isinstance(value, str) else set(value)
    unknown = wanted - set(labels)
    if unknown:
        raise UnknownInstance(f"{name!r} has no instance(s) {sorted(unknown)}")
    return [label in wanted for label in labels]


def state_count(bn: BeliefNetwork) -> int:
    return math.prod(len(v.instances) for v in bn.variables.values())


def joint_table(bn: BeliefNetwork, order: Iterable[str] | None = None) -> JointTable:
    """Full joint as the product of every Cpt, multiplied in topological order.

    ``order`` fixes the axis order of the result (default: sorted names).
    """
    if state_count(bn) > MAX_STATES:
        raise TooLarge(f"{state_count(bn)} joint states exceed the guard of {MAX_STATES}")
    names = tuple(order) if order is not None else tuple(sorted(bn.variables))
    instances = tuple(bn.variables[n].instances for n in names)
    probs = np.ones(tuple(len(i) for i in instances))
    for node in bn.topological_order():
        probs = probs * _factor(bn, node, names)
    return JointTable(names, instances, probs)


def _factor(bn: BeliefNetwork, node: str, names: tuple[str, ...]) -> np.ndarray:
    """The Cpt of ``node`` as an array broadcastable against the joint."""
    cpt = bn.cpts[node]
    scope = list(cpt.parents) + [node]
    arr = np.empty(tuple(len(bn.variables[v].instances) for v in scope))
    parent_vars = [bn.variables[p] for p in cpt.parents]
    for idx in itertools.product(*(range(len(v.instances)) for v in parent_vars)):
        key = tuple(v.instances[i] for v, i in zip(parent_vars, idx))
        arr[idx] = cpt.rows[key]
    # reorder scope axes to joint order, then insert singleton axes
    positions = [names.index(v) for v in scope]
    arr = np.transpose(arr, np.argsort(positions))
    shape = [1] * len(names)
    for pos in sorted(positions):
        shape[pos] = arr.shape[sorted(positions).index(pos)]
    return arr.reshape(shape)


def query(bn: BeliefNetwork, evidence: Evidence, target: str,
          joint: JointTable | None = None) -> dict[str, float]:
    """Posterior distribution of ``target`` given ``evidence``."""
    joint = joint if joint is not None else joint_table(bn)
    return joint.condition(evidence).distribution(target)


def independent(bn: BeliefNetwork, x: str, y: str, given: Iterable[str] = (),
                tol: float = 1e-9, joint: JointTable | None = None) -> bool:
    """Numerical test of x independent of y given ``given``.

    Checks |p(x,y|z) - p(x|z)p(y|z)| <= tol for every instance and every
    configuration z of the conditioning set.
    """
    given = tuple(given)
    joint = joint if joint is not None else joint_table(bn)
    table = joint.marginal(given + (x, y)).probs
    pz = table.sum(axis=(-2, -1))
    if np.any(pz <= 0.0):
        raise ZeroEvidence("a configuration of the conditioning set has probability zero")
    cond = table / pz[..., None, None]
    px = cond.sum(axis=-1, keepdims=True)
    py = cond.sum(axis=-2, keepdims=True)
    return bool(np.all(np.abs(cond - px * py) <= tol))


def conditional_rows(joint: JointTable, target: str, given: Iterable[str]
                     ) -> dict[tuple[str, ...], tuple[float, ...] | None]:
    """p(target | given) for each configuration of ``given``.

    Configurations with zero probability map to None.
    """
    given = tuple(given)
    table = joint.marginal(given + (target,))
    out = {}
    for idx in itertools.product(*(range(len(i)) for i in table.instances[:-1])):
        key = tuple(table.instances[k][i] for k, i in enumerate(idx))
        row = table.probs[idx]
        mass = row.sum()
        out[key] = tuple(float(p) for p in row / mass) if mass > 0.0 else None
    return out
