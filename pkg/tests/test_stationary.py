import numpy as np
import pytest

from entdyn import lindblad as lb
from entdyn import qmat
from entdyn.entanglement import localize
from entdyn.lindblad import GeneratorSpec, PropagationError
from entdyn.qmat import Region
from entdyn.sampling import MeasureSpec, rng_stream, sample
from entdyn.scenarios import make_scenario, werner_singlet_population
from entdyn.stationary import (
    Cardinality,
    ClassLabel,
    Geometry,
    asymptotic_state,
    classify_dynamics,
    extreme_probes,
    kernel,
)


def _L(sid):
    return lb.build_superoperator(make_scenario(sid).spec)


@pytest.mark.parametrize("sid, dim", [
    ("case2a", 1),
    ("case1a", 1),
    ("case2b_phase", 4),
    ("collective_zero_t", 4),
    ("collective_inf_t", 2),
    ("case3a", 1),
])
def test_kernel_dimension(sid, dim):
    ker = kernel(_L(sid))
    assert ker.dimension == dim
    assert ker.cardinality is (Cardinality.SINGLETON if dim == 1 else Cardinality.FAMILY)
    L = _L(sid)
    for h in ker.kernel_basis:
        assert np.allclose(h, h.conj().T)
        assert np.max(np.abs(L @ lb.vec(h))) < 1e-10


def test_zero_t_collective_kernel_spans_ground_and_singlet():
    ker = kernel(_L("collective_zero_t"))
    sub = np.column_stack([qmat.KET["00"], qmat.PSI_MINUS])
    proj = sub @ sub.conj().T
    for h in ker.kernel_basis:
        assert np.allclose(proj @ h @ proj, h, atol=1e-10)


def test_empty_kernel_rejected():
    with pytest.raises(ArithmeticError):
        kernel(np.eye(16))


def test_thermal_zero_t_asymptote_is_ground():
    spec = make_scenario("case2a").spec
    for i in range(5):
        rho = asymptotic_state(sample(MeasureSpec(), rng_stream(1, i)), spec)
        assert np.max(np.abs(rho - qmat.pure(qmat.KET["00"]))) < 1e-9


def test_infinite_t_asymptote_is_werner():
    spec = make_scenario("collective_inf_t").spec
    for i in range(5):
        rho0 = sample(MeasureSpec(), rng_stream(2, i))
        p = float(np.real(qmat.PSI_MINUS.conj() @ rho0 @ qmat.PSI_MINUS))
        rho = asymptotic_state(rho0, spec)
        assert np.max(np.abs(rho - werner_singlet_population(p))) < 1e-9


def test_case1b_asymptotes_are_interior():
    spec = make_scenario("case1b").spec
    for i in range(10):
        rho = asymptotic_state(sample(MeasureSpec(), rng_stream(3, i)), spec)
        assert localize(rho).region is Region.I
    for p in extreme_probes():
        assert localize(asymptotic_state(p, spec)).region is Region.I


def test_case1b_large_kappa_leaves_interior():
    # with little integrated coupling the asymptote stays close to the initial state
    spec = make_scenario("case1b", {"kappa": 50.0}).spec
    regions = {localize(asymptotic_state(p, spec)).region for p in extreme_probes()}
    assert regions != {Region.I}


def test_asymptotic_state_non_convergence():
    spec = GeneratorSpec(hamiltonian=lb.hamiltonian_case3a(1.0, 2.0))
    with pytest.raises(PropagationError):
        asymptotic_state(qmat.pure(qmat.PHI_PLUS), spec, max_doublings=3)


@pytest.mark.parametrize("sid, label", [
    ("case1a", ClassLabel.C1a),
    ("collective_zero_t", ClassLabel.C2b),
    ("case3a", ClassLabel.C3a),
])
def test_classify_examples(sid, label):
    dyn = classify_dynamics(make_scenario(sid).spec)
    assert dyn.label is label
    assert len(dyn.evidence) == 64 + len(extreme_probes())


def test_classify_needs_enough_probes():
    with pytest.raises(ValueError):
        classify_dynamics(make_scenario("case1a").spec, probes=10)


def test_label_from_parts():
    assert ClassLabel.from_parts(Geometry.ALL_E, Cardinality.FAMILY) is ClassLabel.C3b
    assert ClassLabel.from_parts(Geometry.TOUCHES_BOUNDARY, Cardinality.SINGLETON) is ClassLabel.C2a


@pytest.mark.parametrize("sid, geometry", [("case1b", Geometry.ALL_INT_S), ("case3b", Geometry.ALL_E)])
def test_small_kappa_keeps_geometry_but_collapses_the_set(sid, geometry):
    # at kappa = 0.05 every probe asymptote stays in the required region, but
    # the blurred set is narrower than the singleton threshold
    dyn = classify_dynamics(make_scenario(sid, {"kappa": 0.05}).spec)
    assert dyn.stationary.geometry is geometry
    assert dyn.stationary.cardinality is Cardinality.SINGLETON
    default = classify_dynamics(make_scenario(sid).spec)
    assert default.stationary.geometry is geometry
    assert default.stationary.cardinality is Cardinality.FAMILY
