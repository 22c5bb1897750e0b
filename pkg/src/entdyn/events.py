"""Per-trajectory entanglement events and Monte Carlo event probabilities.

A trajectory is classified from three ingredients:

* the asymptotic state and its localisation,
* the negativity and ``det rho^PT`` at geometrically spaced checkpoints,
* when the asymptotic state sits on the separable boundary, the sign of
  ``det rho^PT`` deep in the tail, evaluated with multiprecision
  propagators because it decays far below double precision.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from statistics import NormalDist
from threading import Lock

import mpmath
import numpy as np
from scipy.linalg import expm

from . import qmat
from .entanglement import localize, min_pt_eigenvalue, negativity
from .lindblad import (
    GeneratorSpec,
    ScheduleKind,
    build_superoperator,
    propagate_many,
    reparam_g,
    unvec,
    vec,
)
from .qmat import LocalizationReport, Verdict, partial_transpose
from .sampling import MeasureSpec, rng_stream, sample
from .stationary import asymptotic_state


class Event(enum.Enum):
    SDE = "SDE"
    ADE = "ADE"
    AE = "AE"
    SBE = "SBE"


class Indeterminate(RuntimeError):
    """The tail of a trajectory could not be certified; ``diagnostics`` says why."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class TooManyIndeterminate(RuntimeError):
    pass


@dataclass(frozen=True)
class TrajectoryOptions:
    eps: float = qmat.DEFAULT_TOL
    t_max: float | None = None  # default 30 / min_rate
    n_checkpoints: int = 256
    death_tol: float = 1e-6
    first_checkpoint: float = 1e-4  # fraction of t_max

    def horizon(self, spec: GeneratorSpec) -> float:
        return self.t_max if self.t_max is not None else 30.0 / spec.min_rate

    def to_dict(self, spec: GeneratorSpec | None = None) -> dict:
        return {
            "eps": self.eps,
            "t_max": self.horizon(spec) if spec is not None else self.t_max,
            "n_checkpoints": self.n_checkpoints,
            "death_tol": self.death_tol,
            "first_checkpoint": self.first_checkpoint,
        }


@dataclass(frozen=True, eq=False)
class EventRecord:
    initial_entangled: bool
    flags: frozenset
    death_time: float | None
    asymptotic_negativity: float
    asymptotic_region: LocalizationReport
    tail_sign: int | None = None

    def __post_init__(self):
        f = self.flags
        if Event.SDE in f and Event.ADE in f:
            raise ValueError("SDE and ADE are exclusive")
        if Event.AE in f and (Event.SDE in f or Event.ADE in f):
            raise ValueError("AE excludes SDE and ADE")
        if (self.death_time is not None) != (Event.SDE in f):
            raise ValueError("death_time is set exactly when SDE is flagged")
        if Event.SBE in f and not (Event.AE in f and not self.initial_entangled):
            raise ValueError("SBE needs AE and a separable initial state")

    def has(self, event: Event) -> bool:
        return event in self.flags

    def to_dict(self) -> dict:
        return {
            "initial_entangled": self.initial_entangled,
            "flags": sorted(e.value for e in self.flags),
            "death_time": self.death_time,
            "asymptotic_negativity": self.asymptotic_negativity,
            "asymptotic_region": self.asymptotic_region.to_dict(),
            "tail_sign": self.tail_sign,
        }


# -- trajectory engine -------------------------------------------------------------

def checkpoint_times(t_max: float, n: int, first_fraction: float = 1e-4) -> np.ndarray:
    """``0`` followed by ``n`` geometrically spaced times ending at ``t_max``."""
    if n < 1:
        raise ValueError("need at least one checkpoint")
    return np.concatenate([[0.0], np.geomspace(t_max * first_fraction, t_max, n)])


# mpmath keeps its working precision in one global context, so every
# multiprecision evaluation runs under this lock
_MP_LOCK = Lock()


def _mp_det(m) -> mpmath.mpf:
    return mpmath.re(mpmath.det(m))


class _Engine:
    """Shared, precomputed data for classifying many trajectories of one generator."""

    def __init__(self, spec: GeneratorSpec, opts: TrajectoryOptions):
        self.spec = spec
        self.opts = opts
        self.t_max = opts.horizon(spec)
        self.times = checkpoint_times(self.t_max, opts.n_checkpoints, opts.first_checkpoint)
        if spec.is_autonomous:
            self.base = spec
            self.eff_times = self.times
        else:
            # interaction picture: the decaying coupling only rescales time
            self.base = spec.dissipator_only()
            kappa = spec.schedule.kappa
            self.eff_times = np.array([reparam_g(kappa, t) for t in self.times])
        self.L = build_superoperator(self.base)
        self._tail_props: dict = {}

    def effective_time(self, t: float) -> float:
        if self.spec.schedule.kind is ScheduleKind.EXP_DECAY:
            return reparam_g(self.spec.schedule.kappa, t)
        return t

    def trajectory(self, rho0: np.ndarray) -> np.ndarray:
        return propagate_many(rho0, self.base, self.eff_times)[0]

    def state_at(self, rho0: np.ndarray, t: float) -> np.ndarray:
        return unvec(expm(self.L * self.effective_time(t)) @ vec(rho0))

    # multiprecision tail ------------------------------------------------------
    def _tail_propagator(self, t: float):
        with _MP_LOCK:
            if t in self._tail_props:
                return self._tail_props[t]
            tau = self.effective_time(t)
            rates = np.abs(np.linalg.eigvals(self.L).real)
            decay = float(np.max(rates)) if rates.size else 0.0
            digits = 40 + math.ceil(4 * decay * tau / math.log(10))
            with mpmath.workdps(digits + 30):
                prop = mpmath.expm(mpmath.matrix(self.L.tolist()) * mpmath.mpf(tau))
            self._tail_props[t] = (prop, digits)
            return self._tail_props[t]

    def tail_det_pt(self, rho0: np.ndarray, t: float) -> tuple[float, bool]:
        """``det rho(t)^PT`` in high precision and whether it is trustworthy.

        The value is computed at two working precisions; it is trusted when
        both agree in sign and to six significant digits.
        """
        prop, digits = self._tail_propagator(t)
        v0 = vec(rho0)
        values = []
        for dps in (digits, digits + 30):
            with _MP_LOCK, mpmath.workdps(dps):
                p = prop.apply(lambda x: +x) if dps == digits else prop
                v = p * mpmath.matrix([mpmath.mpc(complex(x)) for x in v0])
                r = mpmath.matrix(4, 4)
                for j in range(4):
                    for i in range(4):
                        r[i, j] = v[4 * j + i]
                rg = mpmath.matrix(4, 4)
                for a in range(2):
                    for b in range(2):
                        for c in range(2):
                            for d in range(2):
                                rg[2 * a + d, 2 * c + b] = r[2 * a + b, 2 * c + d]
                values.append(_mp_det(rg))
        lo, hi = values
        ok = hi != 0 and mpmath.sign(lo) == mpmath.sign(hi) and abs(lo - hi) <= 1e-6 * abs(hi)
        return float(mpmath.sign(hi)) * (float(abs(hi)) if abs(hi) > 1e-300 else 1e-300), bool(ok)


_ENGINES: dict = {}
_ENGINES_LOCK = Lock()


def _engine(spec: GeneratorSpec, opts: TrajectoryOptions) -> _Engine:
    key = (spec.key, opts)
    with _ENGINES_LOCK:
        eng = _ENGINES.get(key)
        if eng is None:
            if len(_ENGINES) > 64:
                _ENGINES.clear()
            eng = _ENGINES[key] = _Engine(spec, opts)
    return eng


def trajectory_table(rho0: np.ndarray, spec: GeneratorSpec, opts: TrajectoryOptions = TrajectoryOptions()):
    """Checkpoint times and states, ``(times, states)`` with states ``(n+1, 4, 4)``."""
    eng = _engine(spec, opts)
    return eng.times.copy(), eng.trajectory(np.asarray(rho0, dtype=complex))


def _death_time(eng: _Engine, rho0: np.ndarray, t_a: float, t_b: float) -> float:
    """Bisect the last sign change of the smallest PT eigenvalue in ``[t_a, t_b]``."""
    while t_b - t_a > eng.opts.death_tol:
        mid = 0.5 * (t_a + t_b)
        if min_pt_eigenvalue(eng.state_at(rho0, mid)) < 0:
            t_a = mid
        else:
            t_b = mid
    return float(0.5 * (t_a + t_b))


def classify_trajectory(rho0: np.ndarray, spec: GeneratorSpec,
                        opts: TrajectoryOptions = TrajectoryOptions()) -> EventRecord:
    """Flag the trajectory from ``rho0`` with SDE / ADE / AE / SBE.

    Raises
    ------
    Indeterminate
        when the horizon is too short to certify the tail.
    """
    eps = opts.eps
    rho0 = np.asarray(rho0, dtype=complex)
    eng = _engine(spec, opts)
    rho_inf = asymptotic_state(rho0, spec)
    rep_inf = localize(rho_inf, eps)
    neg_inf = negativity(rho_inf)
    initial_entangled = localize(rho0, eps).entanglement is Verdict.ENTANGLED

    states = eng.trajectory(rho0)
    pt = partial_transpose(states)
    lam = np.linalg.eigvalsh(pt)
    neg = -np.sum(np.where(lam < 0, lam, 0.0), axis=-1)
    dg = np.linalg.det(pt).real
    entangled_at = neg > eps
    ever = bool(entangled_at.any())

    def record(flags, death=None, tail=None):
        return EventRecord(initial_entangled, frozenset(flags), death, neg_inf, rep_inf, tail)

    if neg_inf > eps:
        flags = {Event.AE}
        if not initial_entangled:
            flags.add(Event.SBE)
        return record(flags)

    if rep_inf.dG > eps:
        # limit inside the separable interior: the tail must settle above +eps
        if not dg[-1] > eps:
            raise Indeterminate("trajectory has not entered the separable interior by t_max",
                                {"t_max": eng.t_max, "det_pt_end": float(dg[-1])})
        if not ever:
            return record(set(), tail=1)
        last = int(np.flatnonzero(entangled_at)[-1])
        death = _death_time(eng, rho0, eng.times[last], eng.times[last + 1])
        return record({Event.SDE}, death, tail=1)

    # limit on the separable boundary: decide the tail sign in high precision
    signs = []
    diag = {}
    for t in (0.5 * eng.t_max, eng.t_max):
        value, ok = eng.tail_det_pt(rho0, t)
        diag[f"det_pt({t:g})"] = value
        if not ok:
            raise Indeterminate("tail determinant lost in rounding", diag)
        signs.append(int(np.sign(value)))
    if signs[0] != signs[1]:
        raise Indeterminate("tail sign still changing at t_max", diag)
    if signs[-1] < 0:
        return record({Event.ADE}, tail=-1)
    if not ever:
        return record(set(), tail=1)
    last = int(np.flatnonzero(entangled_at)[-1])
    if last + 1 >= len(eng.times):
        raise Indeterminate("entangled at t_max but tail is separable", diag)
    death = _death_time(eng, rho0, eng.times[last], eng.times[last + 1])
    return record({Event.SDE}, death, tail=1)


# -- analytic tail predictors ---------------------------------------------------------

# |11>, |10>, |01>, |00>: excited states first
_DESCENDING = (3, 2, 1, 0)


def case2a_rho_prime(rho0: np.ndarray, cross_weight: float = 1.0) -> np.ndarray:
    """Leading-order matrix for two zero-temperature decay channels.

    ``det rho(t)^PT = exp(-4 k t) det[M + O(exp(-k t / 2))]`` with ``k`` the
    population decay rate, where ``M`` is built from the initial entries in
    the order ``|11>, |10>, |01>, |00>``.  The exact limit has
    ``cross_weight = 1``; other values are kept for comparison only.
    """
    r = np.asarray(rho0, dtype=complex)[np.ix_(_DESCENDING, _DESCENDING)]
    c = np.conj
    w = cross_weight
    return np.array([
        [r[0, 0], c(r[0, 1]), r[0, 2], r[1, 2]],
        [r[0, 1], r[0, 0] + r[1, 1], r[0, 3], r[1, 3] + w * r[0, 2]],
        [c(r[0, 2]), c(r[0, 3]), r[0, 0] + r[2, 2], c(r[2, 3]) + w * c(r[0, 1])],
        [c(r[1, 2]), c(r[1, 3]) + w * c(r[0, 2]), r[2, 3] + w * r[0, 1], 1.0],
    ])


def predict_sign_case2a(rho0: np.ndarray) -> float:
    """Determinant whose sign is the asymptotic sign of ``det rho(t)^PT``."""
    return float(np.linalg.det(case2a_rho_prime(rho0)).real)


def case2bd_rho_prime(rho0: np.ndarray) -> np.ndarray:
    """Block matrix for decay on qubit A plus dephasing on qubit B.

    One 2x2 block per state ``b`` of qubit B:
    ``[[p(1b), rho(1b,0b)*], [rho(1b,0b), p(1b) + p(0b)]]``.
    """
    r = np.asarray(rho0, dtype=complex)
    out = np.zeros((4, 4), dtype=complex)
    for k, b in enumerate((1, 0)):
        exc, gnd = 2 + b, b
        blk = np.array([[r[exc, exc], np.conj(r[exc, gnd])],
                        [r[exc, gnd], r[exc, exc] + r[gnd, gnd]]])
        out[2 * k:2 * k + 2, 2 * k:2 * k + 2] = blk
    return out


def predict_sign_case2bd(rho0: np.ndarray) -> float:
    return float(np.linalg.det(case2bd_rho_prime(rho0)).real)


# -- Monte Carlo ----------------------------------------------------------------------

Z95 = NormalDist().inv_cdf(0.975)


def wilson_interval(hits: int, n: int, z: float = Z95) -> tuple[float, float]:
    if n == 0:
        return (0.0, 1.0)
    p = hits / n
    denom = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z / denom * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n))
    lo = 0.0 if hits == 0 else max(0.0, centre - half)
    hi = 1.0 if hits == n else min(1.0, centre + half)
    return (lo, hi)


@dataclass(frozen=True)
class EventEstimate:
    hits: int
    n: int
    estimate: float
    interval: tuple

    @classmethod
    def of(cls, hits: int, n: int) -> "EventEstimate":
        return cls(hits, n, hits / n if n else float("nan"), wilson_interval(hits, n))

    def to_dict(self) -> dict:
        return {"hits": self.hits, "n": self.n, "estimate": self.estimate,
                "wilson95": list(self.interval)}


@dataclass(frozen=True, eq=False)
class ProbabilityReport:
    scenario: str | None
    measure: MeasureSpec
    n_samples: int
    n_indeterminate: int
    events: dict
    conditional: dict
    options: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "measure": self.measure.to_dict(),
            "n_samples": self.n_samples,
            "n_indeterminate": self.n_indeterminate,
            "events": {k: v.to_dict() for k, v in self.events.items()},
            "conditional": {k: v.to_dict() for k, v in self.conditional.items()},
            "options": self.options,
        }


def _classify_sample(args):
    i, spec, measure, opts = args
    rho0 = sample(measure, rng_stream(measure.seed, i))
    try:
        return classify_trajectory(rho0, spec, opts)
    except Indeterminate:
        return None


def estimate_probabilities(spec: GeneratorSpec, measure: MeasureSpec, n: int,
                           opts: TrajectoryOptions = TrajectoryOptions(), workers: int = 1,
                           scenario: str | None = None, max_indeterminate: float = 0.05) -> ProbabilityReport:
    """Classify ``n`` random initial states and tabulate event frequencies.

    Sample ``i`` is drawn from ``rng_stream(measure.seed, i)``, so the report
    does not depend on ``workers``.
    """
    if n < 100:
        raise ValueError("need n >= 100")
    jobs = [(i, spec, measure, opts) for i in range(n)]
    _engine(spec, opts)  # build shared data before fanning out
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_classify_sample, jobs))
    else:
        records = [_classify_sample(j) for j in jobs]

    done = [r for r in records if r is not None]
    n_ind = n - len(done)
    if n_ind > max_indeterminate * n:
        raise TooManyIndeterminate(f"{n_ind}/{n} trajectories indeterminate; increase t_max")

    m = len(done)
    ent = [r for r in done if r.initial_entangled]
    sep = [r for r in done if not r.initial_entangled]

    def count(rs, ev):
        return sum(r.has(ev) for r in rs)

    events = {e.value: EventEstimate.of(count(done, e), m) for e in Event}
    events["E"] = EventEstimate.of(len(ent), m)
    events["SDE'"] = EventEstimate.of(count(ent, Event.SDE), m)
    events["ADE'"] = EventEstimate.of(count(ent, Event.ADE), m)
    conditional = {
        "SDE|E": EventEstimate.of(count(ent, Event.SDE), len(ent)),
        "ADE|E": EventEstimate.of(count(ent, Event.ADE), len(ent)),
        "AE|E": EventEstimate.of(count(ent, Event.AE), len(ent)),
        "SBE|S": EventEstimate.of(count(sep, Event.SBE), len(sep)),
    }
    return ProbabilityReport(scenario, measure, n, n_ind, events, conditional, opts.to_dict(spec))
