"""Stationary sets of a generator and the six-way dynamics classification."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import qmat
from .entanglement import localize
from .lindblad import (
    GeneratorSpec,
    PropagationError,
    build_superoperator,
    propagate,
    unvec,
)
from .qmat import LocalizationReport, Region, Verdict
from .sampling import MeasureSpec, rng_stream, sample


class Geometry(enum.Enum):
    ALL_INT_S = "AllIntS"
    TOUCHES_BOUNDARY = "TouchesBoundary"
    ALL_E = "AllE"


class Cardinality(enum.Enum):
    SINGLETON = "Singleton"
    FAMILY = "Family"


class ClassLabel(enum.Enum):
    C1a = "1a"
    C1b = "1b"
    C2a = "2a"
    C2b = "2b"
    C3a = "3a"
    C3b = "3b"

    @classmethod
    def from_parts(cls, geometry: Geometry, cardinality: Cardinality) -> "ClassLabel":
        num = {Geometry.ALL_INT_S: "1", Geometry.TOUCHES_BOUNDARY: "2", Geometry.ALL_E: "3"}[geometry]
        letter = "a" if cardinality is Cardinality.SINGLETON else "b"
        return cls(num + letter)


@dataclass(frozen=True, eq=False)
class StationarySet:
    kernel_basis: list
    dimension: int
    representative_states: list = field(default_factory=list)
    geometry: Geometry | None = None
    cardinality: Cardinality | None = None


@dataclass(frozen=True, eq=False)
class DynamicsClass:
    label: ClassLabel
    evidence: list
    stationary: StationarySet


def kernel(L: np.ndarray, tol: float = 1e-9) -> StationarySet:
    """Hermitian basis of ``ker L`` from an SVD with cutoff ``tol * s_max``."""
    L = np.asarray(L)
    _, s, vh = np.linalg.svd(L)
    smax = s[0] if s.size else 0.0
    null = vh[s <= tol * smax].conj() if smax > 0 else np.eye(16, dtype=complex)
    dim = null.shape[0]
    if dim == 0:
        raise ArithmeticError("generator has an empty kernel; it cannot be trace preserving")
    # L commutes with the adjoint, so the kernel is spanned by Hermitian parts
    herm = []
    for v in null:
        x = unvec(v)
        herm.append(0.5 * (x + x.conj().T))
        herm.append(-0.5j * (x - x.conj().T))
    real = np.array([np.concatenate([h.real.ravel(), h.imag.ravel()]) for h in herm])
    _, rs, rvh = np.linalg.svd(real)
    basis = []
    for row in rvh[:dim]:
        h = row[:16].reshape(4, 4) + 1j * row[16:].reshape(4, 4)
        basis.append(0.5 * (h + h.conj().T))
    card = Cardinality.SINGLETON if dim == 1 else Cardinality.FAMILY
    return StationarySet(kernel_basis=basis, dimension=dim, cardinality=card)


def asymptotic_state(rho0: np.ndarray, spec: GeneratorSpec, tol: float = 1e-10,
                     max_doublings: int = 15) -> np.ndarray:
    """Limit of the trajectory from ``rho0``.

    Autonomous generators are propagated from ``T0 = 10 / max_rate`` with
    doubling until ``|rho(2T) - rho(T)|_max <= tol``.  For a decaying
    coupling the limit is the constant-coupling state at time ``1/kappa``
    (interaction picture).
    """
    if not spec.is_autonomous:
        return propagate(rho0, spec.dissipator_only(), 1.0 / spec.schedule.kappa)
    t = 10.0 / spec.max_rate
    prev = propagate(rho0, spec, t)
    for _ in range(max_doublings):
        nxt = propagate(rho0, spec, 2 * t)
        if np.max(np.abs(nxt - prev)) <= tol:
            return prev
        t, prev = 2 * t, nxt
    raise PropagationError(f"no convergence up to T = {t:g}")


def extreme_probes() -> list[np.ndarray]:
    """Pure states used to reach the edges of a stationary set."""
    kets = list(qmat.KET.values()) + [qmat.PSI_PLUS, qmat.PSI_MINUS, qmat.PHI_PLUS, qmat.PHI_MINUS]
    plus = np.array([1, 1], dtype=complex) / np.sqrt(2)
    zero, one = np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)
    for a, b in [(plus, zero), (zero, plus), (plus, one), (one, plus), (plus, plus)]:
        kets.append(np.kron(a, b))
    return [qmat.pure(k) for k in kets]


def _diameter(states: list[np.ndarray]) -> float:
    arr = np.stack(states).reshape(len(states), -1)
    diff = arr[:, None, :] - arr[None, :, :]
    return float(np.max(np.linalg.norm(diff, axis=-1)))


def _dedup(states, tol=1e-8):
    out = []
    for s in states:
        if all(np.max(np.abs(s - o)) > tol for o in out):
            out.append(s)
    return out


def classify_dynamics(spec: GeneratorSpec, probes: int = 64, rng: np.random.Generator | None = None,
                      eps: float = qmat.DEFAULT_TOL, singleton_diameter: float = 1e-6) -> DynamicsClass:
    """Assign one of the labels 1a..3b from probed asymptotic states."""
    if probes < 64:
        raise ValueError("need at least 64 probes")
    if rng is None:
        rng = rng_stream(0, 0)
    base = spec if spec.is_autonomous else spec.dissipator_only()
    ker = kernel(build_superoperator(base))

    random_states = [sample(MeasureSpec(), rng) for _ in range(probes)]
    extremes = [asymptotic_state(p, spec) for p in extreme_probes()]
    limits = [asymptotic_state(r, spec) for r in random_states] + extremes

    if spec.is_autonomous:
        card = ker.cardinality
    else:
        card = Cardinality.SINGLETON if _diameter(limits) <= singleton_diameter else Cardinality.FAMILY

    reports: list[LocalizationReport] = [localize(s, eps) for s in limits]
    if all(r.region is Region.I for r in reports):
        geom = Geometry.ALL_INT_S
    elif all(r.entanglement is Verdict.ENTANGLED for r in reports):
        geom = Geometry.ALL_E
    else:
        geom = Geometry.TOUCHES_BOUNDARY

    st = StationarySet(
        kernel_basis=ker.kernel_basis,
        dimension=ker.dimension,
        representative_states=_dedup(extremes),
        geometry=geom,
        cardinality=card,
    )
    return DynamicsClass(label=ClassLabel.from_parts(geom, card), evidence=reports, stationary=st)
