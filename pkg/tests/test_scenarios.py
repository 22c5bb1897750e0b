import math

import numpy as np
import pytest

from entdyn import qmat
from entdyn.entanglement import localize
from entdyn.qmat import Region
from entdyn.scenarios import (
    DEFAULTS,
    EXPECTED,
    ScenarioId,
    eq2_state,
    make_named_state,
    make_scenario,
    mix_triplet,
    parse_state,
    werner,
)


@pytest.mark.parametrize("sid", list(ScenarioId), ids=lambda s: s.value)
def test_every_scenario_builds(sid):
    sc = make_scenario(sid)
    assert sc.params == DEFAULTS[sid]
    assert sc.expected_class is EXPECTED[sid]
    assert sc.spec.channels


def test_overrides_apply_and_validate():
    sc = make_scenario("case1a", {"gamma_up": 0.5})
    assert sc.params["gamma_up"] == 0.5
    for bad in ({"nope": 1.0}, {"gamma_up": -1.0}, {"gamma_up": math.nan}, {"gamma_up": "x"}):
        with pytest.raises(ValueError):
            make_scenario("case1a", bad)
    with pytest.raises(ValueError):
        make_scenario("case3a", {"g": 0.5})
    with pytest.raises(ValueError):
        make_scenario("case3b", {"g": 1.0})
    with pytest.raises(ValueError):
        make_scenario("no_such_case")


def test_nonautonomous_scenarios_carry_schedule():
    assert not make_scenario("case1b").spec.is_autonomous
    assert not make_scenario("case3b").spec.is_autonomous
    assert make_scenario("case3a").spec.is_autonomous


def test_case3b_is_case3a_dissipator_without_hamiltonian():
    a = make_scenario("case3a").spec
    b = make_scenario("case3b").spec
    assert np.max(np.abs(b.hamiltonian)) == 0
    assert len(a.channels) == len(b.channels) == 6
    for x, y in zip(a.channels, b.channels):
        assert np.array_equal(x.jump, y.jump) and x.rate == y.rate


def test_named_mix():
    st = make_named_state("mix")
    assert np.array_equal(st.state, np.eye(4) / 4)
    assert localize(st.state).region is Region.I


def test_named_mix_triplet():
    expected = (qmat.pure(qmat.KET["11"]) + qmat.pure(qmat.PSI_PLUS) + qmat.pure(qmat.KET["00"])) / 3
    assert np.allclose(mix_triplet(), expected)
    assert np.trace(make_named_state("mix_triplet").state).real == pytest.approx(1)


def test_named_eq2_region_iv():
    a, b, c = 0.3, 0.2, 0.2
    rho = make_named_state("eq2", a, b, c).state
    rep = localize(rho)
    assert rep.region is Region.IV
    assert rep.dG == pytest.approx(b * b * (a * a - b * b), rel=1e-12)
    assert abs(rep.d) <= 1e-15


def test_named_state_errors():
    with pytest.raises(ValueError):
        eq2_state(0.3, 0.3, 0.1)
    with pytest.raises(ValueError):
        eq2_state(0.3, 0.2, 0.25)
    with pytest.raises(ValueError):
        werner(1.5)
    with pytest.raises(ValueError):
        make_named_state("werner")
    with pytest.raises(ValueError):
        make_named_state("bogus")


def test_parse_state():
    assert np.allclose(parse_state("werner:0.1"), werner(0.1))
    assert np.allclose(parse_state("eq2:0.3,0.2,0.1j"), eq2_state(0.3, 0.2, 0.1j))
    assert np.allclose(parse_state("singlet"), qmat.pure(qmat.PSI_MINUS))
    assert localize(parse_state("boundary_mix")).region is Region.II
    assert localize(parse_state("separable_pure")).region is Region.V
