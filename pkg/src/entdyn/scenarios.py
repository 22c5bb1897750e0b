"""Parametrised reservoir models and named initial states."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import lindblad as lb
from . import qmat
from .entanglement import NamedState
from .lindblad import CouplingSchedule, GeneratorSpec
from .stationary import ClassLabel


class ScenarioId(enum.Enum):
    CASE1A = "case1a"
    CASE1B = "case1b"
    CASE2A = "case2a"
    CASE2B_PHASE = "case2b_phase"
    CASE2B_COLLECTIVE_ZERO_T = "collective_zero_t"
    CASE2B_COLLECTIVE_INF_T = "collective_inf_t"
    CASE2B_HYBRID = "case2b_hybrid"
    CASE3A = "case3a"
    CASE3B = "case3b"


# kappa = 0.25 keeps the blurred asymptotic set well inside Int S / E while
# leaving it wide enough (>1e-6) to count as more than one state.
DEFAULT_KAPPA = 0.25

DEFAULTS: dict[ScenarioId, dict[str, float]] = {
    ScenarioId.CASE1A: {"gamma_down": 1.0, "gamma_up": 0.3},
    ScenarioId.CASE1B: {"gamma_down": 1.0, "gamma_up": 0.3, "kappa": DEFAULT_KAPPA},
    ScenarioId.CASE2A: {"gamma_down": 1.0, "gamma_up": 0.0},
    ScenarioId.CASE2B_PHASE: {"gamma": 1.0},
    ScenarioId.CASE2B_COLLECTIVE_ZERO_T: {"gamma_down": 1.0, "gamma_up": 0.0},
    ScenarioId.CASE2B_COLLECTIVE_INF_T: {"gamma_down": 1.0, "gamma_up": 1.0},
    ScenarioId.CASE2B_HYBRID: {"gamma_a": 1.0, "gamma_b": 1.0},
    ScenarioId.CASE3A: {"omega": 1.0, "g": 2.0, "gamma": 1.0},
    ScenarioId.CASE3B: {"omega": 1.0, "g": 2.0, "gamma": 1.0, "kappa": DEFAULT_KAPPA},
}

EXPECTED: dict[ScenarioId, ClassLabel] = {
    ScenarioId.CASE1A: ClassLabel.C1a,
    ScenarioId.CASE1B: ClassLabel.C1b,
    ScenarioId.CASE2A: ClassLabel.C2a,
    ScenarioId.CASE2B_PHASE: ClassLabel.C2b,
    ScenarioId.CASE2B_COLLECTIVE_ZERO_T: ClassLabel.C2b,
    ScenarioId.CASE2B_COLLECTIVE_INF_T: ClassLabel.C2b,
    ScenarioId.CASE2B_HYBRID: ClassLabel.C2b,
    ScenarioId.CASE3A: ClassLabel.C3a,
    ScenarioId.CASE3B: ClassLabel.C3b,
}


@dataclass(frozen=True, eq=False)
class Scenario:
    id: ScenarioId
    spec: GeneratorSpec
    expected_class: ClassLabel
    params: dict


def _thermal_pair(gd: float, gu: float) -> list:
    return lb.dissipator_thermal_local("A", gd, gu) + lb.dissipator_thermal_local("B", gd, gu)


def _eigenbasis_channels(gamma: float | Mapping) -> list:
    if isinstance(gamma, Mapping):
        rates = dict(gamma)
    else:
        rates = {(i, j): gamma for i in range(4) for j in range(i + 1, 4)}
    return lb.dissipator_eigenbasis(lb.case3a_eigenbasis(), rates)


def make_scenario(sid: ScenarioId | str, overrides: Mapping[str, float] | None = None) -> Scenario:
    """Build a scenario from its defaults, with optional rate overrides.

    Case 3b is written in the interaction picture: the eigenbasis
    dissipator of case 3a without the Hamiltonian, multiplied by
    ``exp(-kappa t)``.
    """
    sid = ScenarioId(sid)
    params = dict(DEFAULTS[sid])
    for k, v in (overrides or {}).items():
        if k not in params:
            raise ValueError(f"unknown parameter {k!r} for {sid.value}; expected one of {sorted(params)}")
        if not (isinstance(v, (int, float)) and math.isfinite(v) and v >= 0):
            raise ValueError(f"parameter {k!r} must be a finite non-negative number, got {v!r}")
        params[k] = float(v)
    p = params

    if sid is ScenarioId.CASE1A or sid is ScenarioId.CASE2A:
        spec = GeneratorSpec(channels=_thermal_pair(p["gamma_down"], p["gamma_up"]))
    elif sid is ScenarioId.CASE1B:
        spec = GeneratorSpec(channels=_thermal_pair(p["gamma_down"], p["gamma_up"]),
                             schedule=CouplingSchedule.exp_decay(p["kappa"]))
    elif sid is ScenarioId.CASE2B_PHASE:
        spec = GeneratorSpec(channels=lb.dissipator_phase_local("A", p["gamma"])
                             + lb.dissipator_phase_local("B", p["gamma"]))
    elif sid in (ScenarioId.CASE2B_COLLECTIVE_ZERO_T, ScenarioId.CASE2B_COLLECTIVE_INF_T):
        spec = GeneratorSpec(channels=lb.dissipator_collective(p["gamma_down"], p["gamma_up"]))
    elif sid is ScenarioId.CASE2B_HYBRID:
        spec = GeneratorSpec(channels=lb.dissipator_thermal_local("A", p["gamma_a"], 0.0)[:1]
                             + lb.dissipator_phase_local("B", p["gamma_b"]))
    elif sid is ScenarioId.CASE3A:
        spec = GeneratorSpec(hamiltonian=lb.hamiltonian_case3a(p["omega"], p["g"]),
                             channels=_eigenbasis_channels(p["gamma"]))
    else:  # CASE3B
        lb.hamiltonian_case3a(p["omega"], p["g"])  # validates g > omega
        spec = GeneratorSpec(channels=_eigenbasis_channels(p["gamma"]),
                             schedule=CouplingSchedule.exp_decay(p["kappa"]))
    return Scenario(id=sid, spec=spec, expected_class=EXPECTED[sid], params=params)


# -- named states ------------------------------------------------------------------

RHO_MIX = np.eye(4, dtype=complex) / 4
RHO_SINGLET = qmat.pure(qmat.PSI_MINUS)


def werner(p: float) -> np.ndarray:
    """``p * I/4 + (1 - p) * singlet``."""
    if not 0 <= p <= 1:
        raise ValueError("Werner weight must be in [0, 1]")
    return p * RHO_MIX + (1 - p) * RHO_SINGLET


def werner_singlet_population(p: float) -> np.ndarray:
    """Werner state written by its singlet population ``p``."""
    if not 0 <= p <= 1:
        raise ValueError("singlet population must be in [0, 1]")
    triplet = (np.eye(4) - RHO_SINGLET) / 3
    return (1 - p) * triplet + p * RHO_SINGLET


def eq2_state(a: float, b: float, c: complex) -> np.ndarray:
    """X-state with diagonal ``(a, b, b, a)`` and middle coherence ``c``."""
    if abs(2 * a + 2 * b - 1) > 1e-12:
        raise ValueError("need 2a + 2b = 1")
    if a < 0 or b < 0 or abs(c) > b + 1e-15:
        raise ValueError("parameters do not give a positive matrix (need a, b >= 0, |c| <= b)")
    rho = np.diag([a, b, b, a]).astype(complex)
    rho[1, 2] = c
    rho[2, 1] = np.conj(c)
    return rho


def mix_triplet() -> np.ndarray:
    return (qmat.pure(qmat.KET["11"]) + qmat.pure(qmat.PSI_PLUS) + qmat.pure(qmat.KET["00"])) / 3


def make_named_state(name: str, *params) -> NamedState:
    """Construct one of the named fixtures.

    Names: ``mix``, ``singlet``, ``werner`` (p), ``eq2`` (a, b, c),
    ``boundary_mix`` (2/3 mix + 1/3 singlet), ``separable_pure`` (|00>),
    ``mix_triplet``.
    """
    key = name.lower()
    builders = {
        "mix": (0, lambda: RHO_MIX.copy()),
        "singlet": (0, lambda: RHO_SINGLET.copy()),
        "werner": (1, lambda p: werner(p)),
        "eq2": (3, lambda a, b, c: eq2_state(a, b, c)),
        "boundary_mix": (0, lambda: werner(2 / 3)),
        "separable_pure": (0, lambda: qmat.pure(qmat.KET["00"])),
        "mix_triplet": (0, mix_triplet),
    }
    if key not in builders:
        raise ValueError(f"unknown named state {name!r}; known: {sorted(builders)}")
    nargs, fn = builders[key]
    if len(params) != nargs:
        raise ValueError(f"{name} takes {nargs} parameter(s), got {len(params)}")
    return NamedState(name=key, params=tuple(params), state=fn(*params))


def parse_state(text: str) -> np.ndarray:
    """Parse ``name`` or ``name:p1,p2,...`` (e.g. ``eq2:0.3,0.2,0.2``)."""
    name, _, rest = text.partition(":")
    params = [complex(x) if "j" in x else float(x) for x in rest.split(",")] if rest else []
    return make_named_state(name, *params).state
