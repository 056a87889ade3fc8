"""Noisy-OR causal independence for binary faults and manifestations.

Two parameterisations of the same gate are supported: per-fault causal powers,
or single-fault assessments ``p(m+ | only d_i present)``. Both paths are kept
separate on purpose so each can check the other.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .core import ABSENT, PRESENT, BeliefNetwork, Cpt, Variable, binary, parent_configs
from .errors import CausalError, DegenerateLeak, NegativeCausalPower

EQUALITY_TOL = 1e-12
LEAK_NODE = "d0"


def causes_name(fault: str, manifestation: str) -> str:
    return f"{fault}__causes__{manifestation}"


def power_from_single(leak: float, single: float) -> float:
    """Causal power of a fault from its single-fault assessment.

    Inverts ``single = 1 - (1 - leak)(1 - power)``. Differences below 1e-12
    between ``single`` and ``leak`` are rounding noise and give power 0.
    """
    if 1.0 - leak < EQUALITY_TOL:
        raise DegenerateLeak(f"leak {leak!r} leaves no room for a causal power", leak=leak)
    if single < leak - EQUALITY_TOL:
        raise NegativeCausalPower(
            f"p(m+|only d) = {single!r} is below the leak {leak!r}", leak=leak, single=single
        )
    return max(0.0, 1.0 - (1.0 - single) / (1.0 - leak))


def single_from_power(leak: float, power: float) -> float:
    return 1.0 - (1.0 - leak) * (1.0 - power)


@dataclass(frozen=True)
class NoisyOrSpec:
    """Noisy-OR parameters of one binary manifestation.

    Supply ``singles`` or ``powers`` (or both, when they agree); the missing
    list is derived.
    """

    manifestation: str
    faults: tuple[str, ...]
    leak: float
    singles: tuple[float, ...] | None = None
    powers: tuple[float, ...] | None = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "faults", tuple(self.faults))
        n = len(self.faults)
        if len(set(self.faults)) != n:
            raise ValueError("fault names must be unique")
        if not 0.0 <= self.leak < 1.0:
            if self.leak >= 1.0:
                raise DegenerateLeak(f"leak {self.leak!r} must be below 1")
            raise CausalError(f"leak {self.leak!r} is not a probability")
        if self.singles is None and self.powers is None:
            raise ValueError("either singles or powers is required")
        for name in ("singles", "powers"):
            values = getattr(self, name)
            if values is not None:
                values = tuple(float(v) for v in values)
                if len(values) != n:
                    raise ValueError(f"{name} has {len(values)} entries for {n} faults")
                if any(not 0.0 <= v <= 1.0 for v in values):
                    raise CausalError(f"{name} {list(values)} leave [0, 1]")
                object.__setattr__(self, name, values)
        if self.powers is None:
            powers = tuple(power_from_single(self.leak, s) for s in self.singles)
            object.__setattr__(self, "powers", powers)
        elif self.singles is None:
            singles = tuple(single_from_power(self.leak, p) for p in self.powers)
            object.__setattr__(self, "singles", singles)
        else:
            for s, p in zip(self.singles, self.powers):
                if abs(single_from_power(self.leak, p) - s) > EQUALITY_TOL:
                    raise CausalError(f"single {s!r} and power {p!r} disagree for leak "
                                      f"{self.leak!r}")

    def present_faults(self, config: Mapping[str, str]) -> list[int]:
        missing = [f for f in self.faults if f not in config]
        if missing:
            raise ValueError(f"configuration does not assign faults {missing}")
        return [i for i, f in enumerate(self.faults) if config[f] == PRESENT]


def absent_probability(spec: NoisyOrSpec, config: Mapping[str, str]) -> float:
    """p(m- | config): the leak fails and every present fault fails to act."""
    out = 1.0 - spec.leak
    for i in spec.present_faults(config):
        out *= 1.0 - spec.powers[i]
    return out


def present_probability(spec: NoisyOrSpec, config: Mapping[str, str]) -> float:
    return 1.0 - absent_probability(spec, config)


def present_from_singles(spec: NoisyOrSpec, config: Mapping[str, str]) -> float:
    """p(m+ | config) straight from the single-fault assessments."""
    base = 1.0 - spec.leak
    if base < EQUALITY_TOL:
        raise DegenerateLeak(f"leak {spec.leak!r} leaves no room for a causal power")
    product = base
    for i in spec.present_faults(config):
        single = spec.singles[i]
        if single < spec.leak - EQUALITY_TOL:
            raise NegativeCausalPower(
                f"p(m+|only {spec.faults[i]}) = {single!r} is below the leak {spec.leak!r}"
            )
        product *= (1.0 - single) / base
    return 1.0 - product


@dataclass(frozen=True)
class ContextualNoisyOr:
    """A noisy-OR gate applied separately within each context configuration.

    ``context`` are the manifestation's non-fault parents; ``bundles`` maps
    each configuration of them (aligned with ``context``) to its own spec.
    """

    manifestation: str
    faults: tuple[str, ...]
    context: tuple[Variable, ...]
    bundles: Mapping[tuple[str, ...], NoisyOrSpec]

    def __post_init__(self):
        object.__setattr__(self, "faults", tuple(self.faults))
        object.__setattr__(self, "context", tuple(self.context))
        object.__setattr__(self, "bundles", {tuple(k): v for k, v in self.bundles.items()})
        missing = set(parent_configs(self.context)) - set(self.bundles)
        if missing:
            raise ValueError(f"no noisy-OR bundle for context {sorted(missing)[0]}")
        for spec in self.bundles.values():
            if spec.faults != self.faults or spec.manifestation != self.manifestation:
                raise ValueError("bundle faults/manifestation disagree with the gate")


def synthesize_cpt(spec: NoisyOrSpec | ContextualNoisyOr) -> Cpt:
    """Full Cpt of the manifestation: one row per fault (and context) configuration.

    Rows come from the single-fault formula; n binary faults give 2**n rows
    per context configuration.
    """
    if isinstance(spec, NoisyOrSpec):
        context: tuple[Variable, ...] = ()
        bundles = {(): spec}
    else:
        context, bundles = spec.context, spec.bundles
    parents = tuple(sorted(spec.faults + tuple(v.name for v in context)))
    rows = {}
    fault_vars = [binary(f) for f in spec.faults]
    for ctx in parent_configs(context):
        bundle = bundles[ctx]
        for faults in parent_configs(fault_vars):
            assignment = dict(zip(spec.faults, faults))
            assignment.update(zip((v.name for v in context), ctx))
            key = tuple(assignment[p] for p in parents)
            try:
                p = present_from_singles(bundle, assignment)
            except CausalError as exc:
                exc.row = assignment
                raise
            rows[key] = (1.0 - p, p)
    return Cpt(spec.manifestation, parents, rows)


def expand_atemporal(spec: NoisyOrSpec, priors: Sequence[float] | None = None) -> BeliefNetwork:
    """The gate as an explicit network of intermediate cause events.

    Each fault gets a binary ``<fault>__causes__<m>`` child that fires with
    the fault's causal power only when the fault is present; a parentless
    ``d0__causes__<m>`` fires with the leak probability; ``m`` is the
    deterministic OR of all cause events. Fault priors default to 0.5.
    """
    m = spec.manifestation
    priors = list(priors) if priors is not None else [0.5] * len(spec.faults)
    variables, arcs, cpts = [], [], []
    for fault, power, prior in zip(spec.faults, spec.powers, priors):
        cause = causes_name(fault, m)
        variables += [binary(fault), binary(cause)]
        arcs += [(fault, cause), (cause, m)]
        cpts.append(Cpt.prior(fault, (1.0 - prior, prior)))
        cpts.append(Cpt(cause, (fault,), {(ABSENT,): (1.0, 0.0), (PRESENT,): (1.0 - power, power)}))
    leak_node = causes_name(LEAK_NODE, m)
    variables.append(binary(leak_node))
    arcs.append((leak_node, m))
    cpts.append(Cpt.prior(leak_node, (1.0 - spec.leak, spec.leak)))

    variables.append(binary(m))
    causes = sorted(v.name for v in variables if v.name.endswith(f"__causes__{m}"))
    rows = {}
    for key in parent_configs([binary(c) for c in causes]):
        fired = PRESENT in key
        rows[key] = (0.0, 1.0) if fired else (1.0, 0.0)
    cpts.append(Cpt(m, tuple(causes), rows))
    return BeliefNetwork.build(variables, arcs, cpts)

