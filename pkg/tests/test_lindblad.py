import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from entdyn import lindblad as lb
from entdyn import qmat
from entdyn.lindblad import Channel, CouplingSchedule, GeneratorSpec
from entdyn.sampling import MeasureSpec, rng_stream, sample
from entdyn.scenarios import ScenarioId, make_scenario

ALL_SCENARIOS = list(ScenarioId)


def _random_states(n, seed=0):
    return [sample(MeasureSpec(), rng_stream(seed, i)) for i in range(n)]


@pytest.mark.parametrize("sid", ALL_SCENARIOS, ids=lambda s: s.value)
def test_superoperator_matches_direct_evaluation(sid):
    spec = make_scenario(sid).spec
    L = lb.build_superoperator(spec)
    for rho in _random_states(5):
        direct = lb.apply_generator(spec.constant(), rho)
        assert np.allclose(lb.unvec(L @ lb.vec(rho)), direct, atol=1e-13)


@pytest.mark.parametrize("sid", ALL_SCENARIOS, ids=lambda s: s.value)
def test_generator_is_trace_and_hermiticity_preserving(sid):
    spec = make_scenario(sid).spec
    L = lb.build_superoperator(spec)
    # tr(L[X]) = 0 for every X  <=>  vec(I)^T L = 0
    assert np.max(np.abs(lb.vec(np.eye(4)) @ L)) < 1e-13
    for rho in _random_states(3, seed=1):
        out = lb.apply_generator(spec, rho)
        assert np.allclose(out, out.conj().T, atol=1e-13)


def test_semigroup_property():
    spec = make_scenario("case3a").spec
    p = lb.propagator(spec, 0.7)
    q = lb.propagator(spec, 1.1)
    assert np.allclose(p @ q, lb.propagator(spec, 1.8), atol=1e-12)


def test_vec_unvec_round_trip_and_identity():
    rho = _random_states(1)[0]
    a, b = _random_states(2, seed=9)
    assert np.array_equal(lb.unvec(lb.vec(rho)), rho)
    # vec(A X B) = (B^T kron A) vec(X)
    assert np.allclose(lb.vec(a @ rho @ b), np.kron(b.T, a) @ lb.vec(rho))


def test_negative_rates_rejected():
    for build in (lambda: lb.dissipator_thermal_local("A", -1, 0),
                  lambda: lb.dissipator_thermal_local("A", 1, -0.1),
                  lambda: lb.dissipator_phase_local("B", -1),
                  lambda: lb.dissipator_collective(1, -1),
                  lambda: Channel(np.eye(4), -1.0)):
        with pytest.raises(ValueError):
            build()


def test_thermal_single_qubit_stationary_populations():
    spec = GeneratorSpec(channels=lb.dissipator_thermal_local("A", 2.0, 1.0))
    rho = lb.propagate(qmat.pure(qmat.KET["10"]), spec, 40.0)
    # rate equation p1 * gamma_down = p0 * gamma_up
    p0 = rho[0, 0].real + rho[1, 1].real
    assert p0 == pytest.approx(2 / 3, abs=1e-12)


def test_phase_channel_keeps_diagonal_and_damps_coherence():
    spec = GeneratorSpec(channels=lb.dissipator_phase_local("A", 0.7))
    diag = np.diag([0.1, 0.2, 0.3, 0.4]).astype(complex)
    assert np.max(np.abs(lb.apply_generator(spec, diag))) == 0
    plus = np.array([1, 1]) / np.sqrt(2)
    rho = qmat.pure(np.kron(plus, [1, 0]))
    d = lb.apply_generator(spec, rho)
    assert d[0, 2] == pytest.approx(-2 * 0.7 * rho[0, 2])
    assert lb.propagate(rho, spec, 1.3)[0, 2] == pytest.approx(rho[0, 2] * math.exp(-2 * 0.7 * 1.3))


def test_phase_channel_zero_rate_is_zero_generator():
    spec = GeneratorSpec(channels=lb.dissipator_phase_local("B", 0.0))
    assert np.max(np.abs(lb.build_superoperator(spec))) == 0


def test_collective_zero_t_keeps_singlet():
    spec = GeneratorSpec(channels=lb.dissipator_collective(1.0, 0.0))
    singlet = qmat.pure(qmat.PSI_MINUS)
    assert np.max(np.abs(lb.apply_generator(spec, singlet))) < 1e-15


def test_collective_lowering_operator():
    j = lb.collective_lowering()
    assert np.allclose(j, np.kron(qmat.LOWER, qmat.I2) + np.kron(qmat.I2, qmat.LOWER))


def test_eigenbasis_zero_rates_and_validation():
    basis = lb.case3a_eigenbasis()
    chans = lb.dissipator_eigenbasis(basis, {(i, j): 0.0 for i in range(4) for j in range(i + 1, 4)})
    assert np.max(np.abs(lb.dissipator_superoperator(chans))) == 0
    with pytest.raises(ValueError):
        lb.dissipator_eigenbasis([np.ones(4)] * 4, {(0, 1): 1.0})
    with pytest.raises(ValueError):
        lb.dissipator_eigenbasis(basis, {(2, 1): 1.0})


def test_eigenbasis_single_rate_kernel():
    basis = lb.case3a_eigenbasis()
    spec = GeneratorSpec(channels=lb.dissipator_eigenbasis(basis, {(0, 1): 1.0}))
    L = lb.build_superoperator(spec)
    for k in (0, 2, 3):
        assert np.max(np.abs(L @ lb.vec(qmat.pure(basis[k])))) < 1e-14
    assert np.max(np.abs(L @ lb.vec(qmat.pure(basis[1])))) > 0.1


def test_case3a_hamiltonian_spectrum():
    h = lb.hamiltonian_case3a(1.0, 2.0)
    assert np.allclose(np.linalg.eigvalsh(h), [-2, -1, 1, 2])
    basis = lb.case3a_eigenbasis()
    for v, e in zip(basis, [-2, -1, 1, 2]):
        assert np.allclose(h @ v, e * v)
    assert np.allclose(basis[0], qmat.PSI_MINUS) or np.allclose(basis[0], -qmat.PSI_MINUS)
    for omega, g in [(1.0, 1.0), (2.0, 1.0)]:
        with pytest.raises(ValueError):
            lb.hamiltonian_case3a(omega, g)


def test_zero_spec_gives_zero_superoperator():
    assert np.max(np.abs(lb.build_superoperator(GeneratorSpec()))) == 0


def test_propagate_t0_and_ground_state_limit():
    spec = make_scenario("case2a").spec
    rho0 = qmat.pure(qmat.KET["11"])
    assert np.array_equal(lb.propagate(rho0, spec, 0.0), rho0)
    rho = lb.propagate(rho0, spec, 15.0)
    assert np.max(np.abs(rho - qmat.pure(qmat.KET["00"]))) < 1e-8


def test_propagate_rejects_nonautonomous():
    with pytest.raises(ValueError):
        lb.propagate(qmat.I4 / 4, make_scenario("case1b").spec, 1.0)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.01, 20.0))
def test_propagated_states_are_valid(seed, t):
    spec = make_scenario("case3a").spec
    rho = lb.propagate(sample(MeasureSpec(), rng_stream(seed, 0)), spec, t)
    assert np.trace(rho).real == pytest.approx(1, abs=1e-12)
    assert np.min(np.linalg.eigvalsh(rho)) >= -1e-12


def test_reparam_values():
    assert lb.reparam_g(1.0, 0.0) == 0.0
    assert lb.reparam_g(1.0, 1.0) == pytest.approx(0.63212055882855767, rel=1e-15)
    quad_value, _ = quad(lambda s: math.exp(-s), 0, 1, epsabs=1e-14)
    assert lb.reparam_g(1.0, 1.0) == pytest.approx(quad_value, rel=1e-13)
    assert lb.reparam_g(0.3, 1e4) == pytest.approx(1 / 0.3)
    with pytest.raises(ValueError):
        lb.reparam_g(0.0, 1.0)


def test_rk45_scalar_oracle():
    y = lb.integrate_rk45(lambda t, y: -y + np.cos(t), np.array([1.0]), 3.0, 1e-11, 1e-12, 0.01)
    # y' = -y + cos t, y(0) = 1
    exact = 0.5 * (math.cos(3) + math.sin(3)) + 0.5 * math.exp(-3)
    assert y[0].real == pytest.approx(exact, abs=1e-9)


def test_rk45_step_underflow():
    with pytest.raises(lb.PropagationError):
        lb.integrate_rk45(lambda t, y: y ** 2, np.array([1.0]), 2.0, 1e-10, 1e-10, 0.01)


def test_runge_kutta_matches_matrix_exponential_for_constant_coupling():
    spec = make_scenario("case3a").spec
    for rho in _random_states(3, seed=4):
        a = lb.propagate_nonautonomous(rho, spec, 2.5)
        b = lb.propagate(rho, spec, 2.5)
        assert np.max(np.abs(a - b)) < 1e-9


def test_nonautonomous_reduces_to_reparametrised_time():
    spec = make_scenario("case1b").spec
    kappa = spec.schedule.kappa
    for rho in _random_states(3, seed=5):
        a = lb.propagate_nonautonomous(rho, spec, 4.0)
        b = lb.propagate(rho, spec.constant(), lb.reparam_g(kappa, 4.0))
        assert np.max(np.abs(a - b)) < 1e-9


def test_large_kappa_barely_moves_state():
    chans = lb.dissipator_thermal_local("A", 1, 0.3) + lb.dissipator_thermal_local("B", 1, 0.3)
    spec = GeneratorSpec(channels=chans, schedule=CouplingSchedule.exp_decay(1e4))
    rho = _random_states(1, seed=6)[0]
    assert np.max(np.abs(lb.evolve(rho, spec, 5.0) - rho)) < 1e-3


def test_schedule_validation():
    with pytest.raises(ValueError):
        CouplingSchedule.exp_decay(0.0)
    assert CouplingSchedule().factor(10.0) == 1.0
    assert CouplingSchedule.exp_decay(2.0).factor(0.5) == pytest.approx(math.exp(-1))


def test_case3b_interaction_picture_matches_full_equation():
    # the eigenbasis dissipator commutes with the Hamiltonian part, so the
    # full solution is a free rotation of the interaction-picture state
    sc = make_scenario("case3b")
    kappa = sc.spec.schedule.kappa
    h = lb.hamiltonian_case3a(sc.params["omega"], sc.params["g"])
    full = GeneratorSpec(hamiltonian=h, channels=sc.spec.channels, schedule=sc.spec.schedule)
    T = 3.0
    u = np.diag(np.exp(-1j * np.linalg.eigvalsh(h) * T))
    v = np.column_stack(lb.case3a_eigenbasis())
    rot = v @ u @ v.conj().T
    for rho in _random_states(3, seed=8):
        a = lb.propagate_nonautonomous(rho, full, T)
        b = rot @ lb.evolve(rho, sc.spec, T) @ rot.conj().T
        assert np.max(np.abs(a - b)) < 1e-9
