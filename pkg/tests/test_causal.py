from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multifault import oracle, synth
from multifault.causal import (
    ContextualNoisyOr,
    NoisyOrSpec,
    absent_probability,
    expand_atemporal,
    power_from_single,
    present_from_singles,
    present_probability,
    synthesize_cpt,
)
from multifault.core import BINARY, binary, parent_configs, validate_network
from multifault.errors import CausalError, DegenerateLeak, NegativeCausalPower

BOTH = {"d1": "present", "d2": "present"}
NONE2 = {"d1": "absent", "d2": "absent"}


def only(spec, i):
    return {f: "present" if k == i else "absent" for k, f in enumerate(spec.faults)}


def atemporal_rows(spec):
    """p(m+ | fault configuration), summed out of the expanded network's joint."""
    bn = expand_atemporal(spec)
    joint = oracle.joint_table(bn)
    out = {}
    for config in parent_configs([binary(f) for f in spec.faults]):
        evidence = dict(zip(spec.faults, config))
        out[config] = oracle.query(bn, evidence, spec.manifestation, joint)["present"]
    return out


@st.composite
def specs(draw, max_n=6):
    n = draw(st.integers(0, max_n))
    leak = draw(st.floats(0.0, 0.9))
    singles = tuple(draw(st.floats(leak, 1.0)) for _ in range(n))
    return NoisyOrSpec("m", tuple(f"d{i + 1}" for i in range(n)), leak, singles)


# -- worked numbers --------------------------------------------------------

def test_absent_examples():
    spec = NoisyOrSpec("m", ("d1", "d2"), 0.1, powers=(4 / 9, 1 / 9))
    assert absent_probability(spec, NONE2) == pytest.approx(0.9, abs=1e-15)
    assert absent_probability(spec, BOTH) == pytest.approx(4 / 9, abs=1e-12)
    det = NoisyOrSpec("m", ("d1",), 0.0, powers=(1.0,))
    assert absent_probability(det, {"d1": "present"}) == 0.0


def test_present_examples():
    spec = NoisyOrSpec("m", ("d1", "d2"), 0.1, powers=(4 / 9, 1 / 9))
    assert present_probability(spec, NONE2) == pytest.approx(0.1, abs=1e-15)
    assert present_probability(spec, BOTH) == pytest.approx(5 / 9, abs=1e-12)
    single = NoisyOrSpec("m", ("d1",), 0.0, powers=(0.37,))
    assert present_probability(single, {"d1": "present"}) == pytest.approx(0.37, abs=1e-15)


def test_hand_arithmetic_in_fractions():
    leak, s1, s2 = Fraction(1, 10), Fraction(1, 2), Fraction(1, 5)
    p1 = 1 - (1 - s1) / (1 - leak)
    p2 = 1 - (1 - s2) / (1 - leak)
    assert (p1, p2) == (Fraction(4, 9), Fraction(1, 9))
    assert 1 - (1 - leak) * (1 - p1) * (1 - p2) == Fraction(5, 9)


def test_power_from_single_examples():
    assert power_from_single(0.3, 0.3) == 0.0
    assert power_from_single(0.1, 0.5) == pytest.approx(4 / 9, abs=1e-15)
    with pytest.raises(NegativeCausalPower):
        power_from_single(0.1, 0.05)
    with pytest.raises(DegenerateLeak):
        power_from_single(1.0, 1.0)


def test_present_from_singles_examples():
    spec = NoisyOrSpec("m", ("d1", "d2"), 0.1, (0.5, 0.2))
    assert present_from_singles(spec, only(spec, 0)) == pytest.approx(0.5, abs=1e-15)
    assert present_from_singles(spec, NONE2) == pytest.approx(0.1, abs=1e-15)
    assert present_from_singles(spec, BOTH) == pytest.approx(5 / 9, abs=1e-12)
    assert atemporal_rows(spec)[("present", "present")] == pytest.approx(5 / 9, abs=1e-12)


def test_spec_validation():
    with pytest.raises(DegenerateLeak):
        NoisyOrSpec("m", ("d1",), 1.0, (1.0,))
    with pytest.raises(NegativeCausalPower):
        NoisyOrSpec("m", ("d1",), 0.2, (0.1,))
    with pytest.raises(CausalError):
        NoisyOrSpec("m", ("d1",), 0.1, (0.5,), (0.9,))
    with pytest.raises(ValueError):
        NoisyOrSpec("m", ("d1", "d2"), 0.1, (0.5,))
    with pytest.raises(ValueError):
        NoisyOrSpec("m", ("d1",), 0.1)
    agreed = NoisyOrSpec("m", ("d1",), 0.1, (0.5,), (4 / 9,))
    assert agreed.powers == pytest.approx((4 / 9,))


# -- Cpt synthesis ---------------------------------------------------------

def test_two_faults_four_rows():
    cpt = synthesize_cpt(NoisyOrSpec("m", ("d1", "d2"), 0.1, (0.5, 0.2)))
    assert len(cpt.rows) == 4
    assert cpt.parents == ("d1", "d2")


def test_no_faults_single_row():
    cpt = synthesize_cpt(NoisyOrSpec("m", (), 0.25, ()))
    assert cpt.rows == {(): (0.75, 0.25)}


def test_three_faults_match_atemporal_network():
    spec = NoisyOrSpec("m", ("d1", "d2", "d3"), 0.05, (0.3, 0.4, 0.6))
    cpt = synthesize_cpt(spec)
    expected = atemporal_rows(spec)
    assert len(cpt.rows) == 8
    for key, p in expected.items():
        assert cpt.rows[key][1] == pytest.approx(p, abs=1e-12)


def test_errors_carry_the_offending_row():
    bad = ContextualNoisyOr("m", ("d1",), (binary("c"),), {
        ("absent",): NoisyOrSpec("m", ("d1",), 0.1, (0.5,)),
        ("present",): NoisyOrSpec("m", ("d1",), 0.1, powers=(0.5,)),
    })
    # corrupt one bundle after construction to reach the synthesis-time check
    object.__setattr__(bad.bundles[("present",)], "singles", (0.05,))
    with pytest.raises(NegativeCausalPower) as info:
        synthesize_cpt(bad)
    assert info.value.row == {"d1": "present", "c": "present"}


def test_contextual_gate_rows():
    gate = ContextualNoisyOr("m", ("d1", "d2"), (binary("c"),), {
        ("absent",): NoisyOrSpec("m", ("d1", "d2"), 0.1, (0.5, 0.2)),
        ("present",): NoisyOrSpec("m", ("d1", "d2"), 0.3, (0.6, 0.3)),
    })
    cpt = synthesize_cpt(gate)
    assert cpt.parents == ("c", "d1", "d2")
    assert len(cpt.rows) == 8
    assert cpt.rows[("present", "absent", "absent")][1] == pytest.approx(0.3)
    assert cpt.rows[("absent", "present", "present")][1] == pytest.approx(5 / 9, abs=1e-12)
    with pytest.raises(ValueError):
        ContextualNoisyOr("m", ("d1",), (binary("c"),),
                          {("absent",): NoisyOrSpec("m", ("d1",), 0.1, (0.5,))})


# -- the atemporal network -------------------------------------------------

def test_atemporal_structure():
    spec = NoisyOrSpec("m", ("d1", "d2"), 0.1, (0.5, 0.2))
    bn = expand_atemporal(spec)
    assert validate_network(bn).ok
    assert bn.parents("m") == ("d0__causes__m", "d1__causes__m", "d2__causes__m")
    causes = [n for n in bn.variables if "__causes__" in n]
    assert not any(a in causes and b in causes for a, b in bn.arcs)
    assert bn.cpts["d1__causes__m"].rows[("absent",)] == (1.0, 0.0)


def test_atemporal_degenerate_cases():
    empty = expand_atemporal(NoisyOrSpec("m", (), 0.2, ()))
    assert set(empty.variables) == {"d0__causes__m", "m"}
    assert oracle.query(empty, {}, "m")["present"] == pytest.approx(0.2)
    chain = expand_atemporal(NoisyOrSpec("m", ("d1",), 0.0, powers=(1.0,)))
    for state in BINARY:
        assert oracle.query(chain, {"d1": state}, "m")[state] == pytest.approx(1.0)


# -- properties ------------------------------------------------------------

@settings(max_examples=150, deadline=None)
@given(specs(max_n=5))
def test_synthesized_rows_equal_atemporal_marginals(spec):
    cpt = synthesize_cpt(spec)
    for key, p in atemporal_rows(spec).items():
        assert abs(cpt.rows[key][1] - p) <= 1e-12


@settings(max_examples=300, deadline=None)
@given(specs())
def test_singles_and_powers_paths_agree(spec):
    for config in parent_configs([binary(f) for f in spec.faults]):
        a = dict(zip(spec.faults, config))
        assert abs(present_from_singles(spec, a) - present_probability(spec, a)) <= 1e-12
    for i in range(len(spec.faults)):
        assert abs(present_from_singles(spec, only(spec, i)) - spec.singles[i]) <= 1e-12
    none = {f: "absent" for f in spec.faults}
    assert present_probability(spec, none) == pytest.approx(spec.leak, abs=1e-15)


@settings(max_examples=200, deadline=None)
@given(specs(), st.data())
def test_adding_a_fault_never_lowers_presence(spec, data):
    if not spec.faults:
        return
    config = {f: data.draw(st.sampled_from(BINARY)) for f in spec.faults}
    absent = [f for f in spec.faults if config[f] == "absent"]
    if not absent:
        return
    more = dict(config, **{data.draw(st.sampled_from(absent)): "present"})
    assert present_probability(spec, more) >= present_probability(spec, config) - 1e-15


def test_power_round_trip(rng):
    for _ in range(500):
        leak = float(rng.uniform(0, 0.95))
        single = float(rng.uniform(leak, 1.0))
        spec = NoisyOrSpec("m", ("d",), leak, powers=(power_from_single(leak, single),))
        assert abs(present_probability(spec, {"d": "present"}) - single) <= 1e-12


def test_random_spec_generator_is_valid():
    rng = np.random.default_rng(4)
    for n in range(7):
        spec = synth.random_noisy_or_spec(rng, n)
        assert all(s >= spec.leak for s in spec.singles)
