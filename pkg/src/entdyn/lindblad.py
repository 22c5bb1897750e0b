"""Lindblad generators for two qubits and their propagation.

The generator acting on a density matrix is

    L[rho] = -i[H, rho] + sum_j rate_j (2 A rho A^+ - A^+A rho - rho A^+A)

(hbar = 1).  Superoperators act on the column-stacked vector ``vec(rho)``,
so ``vec(A X B) = (B^T kron A) vec(X)``.
"""

from __future__ import annotations

import enum
import math
from collections import OrderedDict
from dataclasses import dataclass, field, replace
from threading import Lock
from typing import Mapping, Sequence

import numpy as np
from scipy.linalg import expm

from . import qmat
from .qmat import I2, LOWER, RAISE, SIGMA_Z, SIGMA_Z_ENERGY, DensityError, on_qubit


class PropagationError(RuntimeError):
    """Numerical propagation failed (step underflow, invalid state, ...)."""


@dataclass(frozen=True, eq=False)
class Channel:
    """One dissipative channel: jump operator and its rate."""

    jump: np.ndarray
    rate: float

    def __post_init__(self):
        jump = np.asarray(self.jump, dtype=complex)
        if jump.shape != (4, 4):
            raise ValueError(f"jump operator must be 4x4, got {jump.shape}")
        if not np.all(np.isfinite(jump)):
            raise ValueError("jump operator has non-finite entries")
        if self.rate < 0:
            raise ValueError(f"negative rate {self.rate!r}")
        object.__setattr__(self, "jump", jump)


class ScheduleKind(enum.Enum):
    CONSTANT = "constant"
    EXP_DECAY = "exp_decay"


@dataclass(frozen=True)
class CouplingSchedule:
    """Multiplicative time dependence of the dissipator, ``exp(-kappa t)``."""

    kind: ScheduleKind = ScheduleKind.CONSTANT
    kappa: float = 0.0

    def __post_init__(self):
        if self.kind is ScheduleKind.EXP_DECAY and not self.kappa > 0:
            raise ValueError("exponential-decay schedule needs kappa > 0")

    @classmethod
    def exp_decay(cls, kappa: float) -> "CouplingSchedule":
        return cls(ScheduleKind.EXP_DECAY, float(kappa))

    def factor(self, t: float) -> float:
        if self.kind is ScheduleKind.CONSTANT:
            return 1.0
        return math.exp(-self.kappa * t)


@dataclass(frozen=True, eq=False)
class GeneratorSpec:
    """Hamiltonian, channels and an optional coupling schedule."""

    hamiltonian: np.ndarray = field(default_factory=lambda: np.zeros((4, 4), complex))
    channels: tuple = ()
    schedule: CouplingSchedule = field(default_factory=CouplingSchedule)

    def __post_init__(self):
        h = np.asarray(self.hamiltonian, dtype=complex)
        if h.shape != (4, 4) or not qmat.is_hermitian(h, 1e-12):
            raise ValueError("hamiltonian must be a Hermitian 4x4 matrix")
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "channels", tuple(self.channels))

    @property
    def is_autonomous(self) -> bool:
        return self.schedule.kind is ScheduleKind.CONSTANT

    @property
    def key(self) -> bytes:
        """Byte fingerprint used for caching propagators."""
        parts = [self.hamiltonian.tobytes()]
        for ch in self.channels:
            parts.append(np.asarray(ch.jump, dtype=complex).tobytes())
            parts.append(np.float64(ch.rate).tobytes())
        parts.append(repr((self.schedule.kind.value, self.schedule.kappa)).encode())
        return b"|".join(parts)

    def rates(self) -> list[float]:
        return [float(ch.rate) for ch in self.channels if ch.rate > 0]

    @property
    def max_rate(self) -> float:
        return max(self.rates(), default=1.0)

    @property
    def min_rate(self) -> float:
        return min(self.rates(), default=1.0)

    def constant(self) -> "GeneratorSpec":
        """The same generator with constant coupling."""
        return replace(self, schedule=CouplingSchedule())

    def dissipator_only(self) -> "GeneratorSpec":
        return GeneratorSpec(channels=self.channels)


# -- channel builders ---------------------------------------------------------

def _check_rates(**rates):
    for name, r in rates.items():
        if r < 0:
            raise ValueError(f"{name} must be non-negative, got {r!r}")


def dissipator_thermal_local(qubit: str, gamma_down: float, gamma_up: float) -> list[Channel]:
    """Decay ``|0><1|`` at ``gamma_down`` and excitation ``|1><0|`` at ``gamma_up``.

    Populations relax at ``2*(gamma_down + gamma_up)``; the one-qubit
    stationary populations satisfy ``p1 / p0 = gamma_up / gamma_down``.
    """
    _check_rates(gamma_down=gamma_down, gamma_up=gamma_up)
    return [
        Channel(on_qubit(LOWER, qubit), float(gamma_down)),
        Channel(on_qubit(RAISE, qubit), float(gamma_up)),
    ]


def dissipator_phase_local(qubit: str, gamma: float) -> list[Channel]:
    """Phase noise ``gamma (sz rho sz - rho)`` on one qubit.

    Stored as a ``sigma_z`` channel of rate ``gamma / 2`` so that the
    one-qubit coherence decays as ``exp(-2 gamma t)``.
    """
    _check_rates(gamma=gamma)
    return [Channel(on_qubit(SIGMA_Z, qubit), float(gamma) / 2)]


def collective_lowering() -> np.ndarray:
    return on_qubit(LOWER, "A") + on_qubit(LOWER, "B")


def dissipator_collective(gamma_down: float, gamma_up: float) -> list[Channel]:
    """Common reservoir with ``J_pm = sigma_pm,A + sigma_pm,B``.

    Rates are halved relative to the channel convention so that, in the
    basis ``{|11>, |Psi+>, |00>, |Psi->}``, populations obey
    ``d rho_11/dt = -2 gamma rho_11 + 2 gamma' rho_22`` and so on.
    """
    _check_rates(gamma_down=gamma_down, gamma_up=gamma_up)
    jm = collective_lowering()
    return [
        Channel(jm, float(gamma_down) / 2),
        Channel(jm.conj().T, float(gamma_up) / 2),
    ]


def dissipator_eigenbasis(eigvecs: Sequence[np.ndarray], rates: Mapping[tuple, float]) -> list[Channel]:
    """Decays ``|i><j|`` (``i < j``, 0-based) between given basis states."""
    vecs = [np.asarray(v, dtype=complex) for v in eigvecs]
    if len(vecs) != 4 or any(v.shape != (4,) for v in vecs):
        raise ValueError("need four 4-component vectors")
    gram = np.array([[np.vdot(a, b) for b in vecs] for a in vecs])
    if np.max(np.abs(gram - np.eye(4))) > 1e-10:
        raise ValueError("eigenbasis is not orthonormal")
    channels = []
    for (i, j), r in sorted(rates.items()):
        if not 0 <= i < j < 4:
            raise ValueError(f"rate key {(i, j)} must satisfy 0 <= i < j < 4")
        _check_rates(**{f"gamma_{i}{j}": r})
        channels.append(Channel(np.outer(vecs[i], vecs[j].conj()), float(r)))
    return channels


def hamiltonian_case3a(omega: float, g: float) -> np.ndarray:
    """Two exchange-coupled qubits in the strong-coupling regime ``g > omega``.

    The spectrum is ``(-g, -omega, omega, g)`` with eigenvectors
    ``|Psi->, |00>, |11>, |Psi+>``.
    """
    if not (omega > 0 and g > omega):
        raise ValueError("need 0 < omega < g")
    z = SIGMA_Z_ENERGY
    flip = qmat.kron(RAISE, LOWER) + qmat.kron(LOWER, RAISE)
    return 0.5 * omega * (qmat.kron(z, I2) + qmat.kron(I2, z)) + g * flip


def case3a_eigenbasis() -> list[np.ndarray]:
    return [qmat.PSI_MINUS, qmat.KET["00"], qmat.KET["11"], qmat.PSI_PLUS]


# -- superoperators -------------------------------------------------------------

def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(4, 4).T.reshape(16)


def unvec(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v)
    lead = v.shape[:-1]
    return np.swapaxes(v.reshape(lead + (4, 4)), -1, -2)


def dissipator_superoperator(channels: Sequence[Channel]) -> np.ndarray:
    """16x16 matrix of the dissipative part."""
    eye = np.eye(4, dtype=complex)
    out = np.zeros((16, 16), dtype=complex)
    for ch in channels:
        a = ch.jump
        ada = a.conj().T @ a
        out += ch.rate * (2 * np.kron(a.conj(), a) - np.kron(eye, ada) - np.kron(ada.T, eye))
    return out


def hamiltonian_superoperator(h: np.ndarray) -> np.ndarray:
    eye = np.eye(4, dtype=complex)
    return -1j * (np.kron(eye, h) - np.kron(h.T, eye))


def build_superoperator(spec: GeneratorSpec) -> np.ndarray:
    """Constant-coupling generator matrix; any schedule is ignored."""
    return hamiltonian_superoperator(spec.hamiltonian) + dissipator_superoperator(spec.channels)


def apply_generator(spec: GeneratorSpec, rho: np.ndarray) -> np.ndarray:
    """Evaluate ``L[rho]`` directly from the operator form (no vectorisation)."""
    rho = np.asarray(rho, dtype=complex)
    h = spec.hamiltonian
    out = -1j * (h @ rho - rho @ h)
    for ch in spec.channels:
        a = ch.jump
        ada = a.conj().T @ a
        out = out + ch.rate * (2 * a @ rho @ a.conj().T - ada @ rho - rho @ ada)
    return out


# -- propagation ------------------------------------------------------------------

class _PropagatorCache:
    """Small thread-safe LRU of ``expm(L t)`` keyed by (generator, t)."""

    def __init__(self, maxsize: int = 4096):
        self._data: OrderedDict = OrderedDict()
        self._lock = Lock()
        self.maxsize = maxsize

    def get(self, spec: GeneratorSpec, t: float) -> np.ndarray:
        key = (spec.constant().key, float(t))
        with self._lock:
            if key in self._data:
                self._data.move_to_end(key)
                return self._data[key]
        prop = expm(build_superoperator(spec) * float(t))
        with self._lock:
            self._data[key] = prop
            while len(self._data) > self.maxsize:
                self._data.popitem(last=False)
        return prop


_CACHE = _PropagatorCache()


def propagator(spec: GeneratorSpec, t: float) -> np.ndarray:
    """``expm(L t)`` for the constant-coupling generator (cached)."""
    if t < 0:
        raise ValueError("t must be non-negative")
    return _CACHE.get(spec, t)


def _revalidate(rho: np.ndarray, tol: float) -> np.ndarray:
    rho = 0.5 * (rho + rho.conj().T)
    try:
        return qmat.validate_density(rho, tol)
    except DensityError as exc:
        raise PropagationError(f"propagated state is not a density matrix: {exc}") from exc


def propagate(rho0: np.ndarray, spec: GeneratorSpec, t: float, tol: float = qmat.DEFAULT_TOL) -> np.ndarray:
    """State at time ``t`` under the autonomous generator."""
    if not spec.is_autonomous:
        raise ValueError("propagate needs a constant schedule; use propagate_nonautonomous")
    rho0 = np.asarray(rho0, dtype=complex)
    if t == 0:
        return rho0.copy()
    rho = unvec(propagator(spec, t) @ vec(rho0))
    return _revalidate(rho, tol)


def propagate_many(rho0s: np.ndarray, spec: GeneratorSpec, times: Sequence[float]) -> np.ndarray:
    """Raw (unvalidated) states, shape ``(n_states, n_times, 4, 4)``."""
    rho0s = np.asarray(rho0s, dtype=complex).reshape(-1, 4, 4)
    props = np.stack([propagator(spec, t) if t > 0 else np.eye(16) for t in times])
    vecs = np.swapaxes(rho0s, -1, -2).reshape(-1, 16)
    out = np.einsum("tij,nj->nti", props, vecs)
    return unvec(out)


def reparam_g(kappa: float, t: float) -> float:
    """Integrated coupling ``(1 - exp(-kappa t)) / kappa``."""
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    if t < 0:
        raise ValueError("t must be non-negative")
    return -math.expm1(-kappa * t) / kappa


# Dormand-Prince 5(4) tableau
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_DP_E = _DP_B5 - _DP_B4


def integrate_rk45(f, y0: np.ndarray, t_end: float, rtol: float, atol: float, h0: float,
                   h_min: float = 1e-14) -> np.ndarray:
    """Adaptive Dormand-Prince integration of ``y' = f(t, y)`` on ``[0, t_end]``."""
    y = np.array(y0, dtype=complex)
    t = 0.0
    if t_end == 0:
        return y
    h = min(h0, t_end)
    k1 = f(t, y)
    while t < t_end:
        if t + h > t_end:
            h = t_end - t
        ks = [k1]
        for s in range(1, 7):
            ys = y + h * sum(a * k for a, k in zip(_DP_A[s], ks))
            ks.append(f(t + _DP_C[s] * h, ys))
        y_new = y + h * sum(b * k for b, k in zip(_DP_B5, ks) if b != 0)
        err_vec = h * sum(e * k for e, k in zip(_DP_E, ks))
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.max(np.abs(err_vec) / scale))
        if err <= 1.0:
            t += h
            y = y_new
            k1 = ks[6]  # first-same-as-last
        factor = 0.9 * err ** (-0.2) if err > 0 else 5.0
        h *= min(5.0, max(0.2, factor))
        if h < h_min * max(1.0, abs(t)) and t < t_end:
            raise PropagationError(f"step size underflow at t = {t!r}")
    return y


def propagate_nonautonomous(rho0: np.ndarray, spec: GeneratorSpec, t: float,
                            rtol: float = 1e-10, atol: float = 1e-10,
                            tol: float = qmat.DEFAULT_TOL) -> np.ndarray:
    """Solve ``rho' = -i[H, rho] + f(t) D[rho]`` by adaptive Runge-Kutta.

    ``f`` is the coupling schedule.  For ``H = 0`` and ``f = exp(-kappa t)``
    the result equals the constant-coupling state at time ``reparam_g(kappa, t)``.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    l_h = hamiltonian_superoperator(spec.hamiltonian)
    l_d = dissipator_superoperator(spec.channels)
    sched = spec.schedule

    def rhs(s, v):
        return l_h @ v + sched.factor(s) * (l_d @ v)

    kappa = sched.kappa if sched.kind is ScheduleKind.EXP_DECAY else 0.0
    h0 = 1.0 / (10 * kappa + 10 * spec.max_rate)
    v = integrate_rk45(rhs, vec(rho0), float(t), rtol, atol, h0)
    return _revalidate(unvec(v), tol)


def evolve(rho0: np.ndarray, spec: GeneratorSpec, t: float) -> np.ndarray:
    """Dispatch on the schedule: matrix exponential or Runge-Kutta."""
    if spec.is_autonomous:
        return propagate(rho0, spec, t)
    return propagate_nonautonomous(rho0, spec, t)
