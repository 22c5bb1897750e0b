"""Command-line runner.

    entdyn trajectory    --scenario case2b_phase --state eq2:0.3,0.2,0.2 --out traj.csv
    entdyn classify      --scenario case1a --state werner:0.1
    entdyn stationary    --scenario collective_inf_t
    entdyn probabilities --scenario collective_zero_t --samples 1000 --seed 7

Options may also come from a JSON file given with ``--config``; flags on the
command line override the file.  Exit codes: 0 success, 2 configuration
error, 3 indeterminate result, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass, field, fields
from importlib.metadata import PackageNotFoundError, version

import numpy as np

from . import qmat
from .entanglement import InvalidStateError, det_pt, det_rho, negativity
from .events import (
    Indeterminate,
    TooManyIndeterminate,
    TrajectoryOptions,
    classify_trajectory,
    estimate_probabilities,
    trajectory_table,
)
from .lindblad import PropagationError
from .sampling import MeasureKind, MeasureSpec, rng_stream
from .scenarios import ScenarioId, make_scenario, parse_state
from .stationary import classify_dynamics

EXIT_OK, EXIT_CONFIG, EXIT_INDETERMINATE, EXIT_NUMERICAL = 0, 2, 3, 4
COMMANDS = ("trajectory", "stationary", "probabilities", "classify")
CSV_HEADER = ["t", "det_rho", "det_pt", "negativity", "p00", "p01", "p10", "p11", "rho44"]
SEED_ENV = "ENTDYN_SEED"


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    scenario: str
    rates: dict = field(default_factory=dict)
    state: object = None  # "name:params" or a 4x4 nested list
    t_max: float | None = None
    checkpoints: int = 256
    eps: float = qmat.DEFAULT_TOL
    samples: int = 1000
    seed: int = 0
    measure: str = "hs"
    rank: int = 4
    probes: int = 64
    threads: int = 1
    out: str | None = None

    def options(self) -> TrajectoryOptions:
        return TrajectoryOptions(eps=self.eps, t_max=self.t_max, n_checkpoints=self.checkpoints)

    def measure_spec(self) -> MeasureSpec:
        return MeasureSpec(kind=MeasureKind(self.measure), seed=self.seed, k=self.rank)


def _entry(x) -> complex:
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, str):
        return complex(x.replace(" ", ""))
    return complex(x)


def load_state(value) -> np.ndarray:
    """Named fixture (``werner:0.1``) or explicit 4x4 entries.

    Explicit entries may be numbers, ``[re, im]`` pairs or strings such as
    ``"0.1-0.2j"``; a string starting with ``[`` is read as JSON.
    """
    if isinstance(value, str) and value.lstrip().startswith("["):
        value = json.loads(value)
    if isinstance(value, str):
        rho = parse_state(value)
    else:
        rho = np.array([[_entry(x) for x in row] for row in value], dtype=complex)
        if rho.shape != (4, 4):
            raise ConfigError(f"explicit state must be 4x4, got {rho.shape}")
    return qmat.validate_density(rho)


def _parse_rate(text: str) -> tuple[str, float]:
    key, sep, val = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        return key.strip(), float(val)
    except ValueError:
        raise argparse.ArgumentTypeError(f"rate {key!r} is not a number: {val!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="entdyn", description="Two-qubit asymptotic entanglement dynamics.")
    p.add_argument("command", nargs="?", choices=COMMANDS)
    d = argparse.SUPPRESS  # unset flags must not shadow the config file
    p.add_argument("--config", help="JSON file with any of the options below")
    p.add_argument("--scenario", default=d, choices=[s.value for s in ScenarioId])
    p.add_argument("--rate", dest="rates", action="append", type=_parse_rate, default=d,
                   metavar="KEY=VALUE", help="override a scenario rate; repeatable")
    p.add_argument("--state", default=d, help="named state (werner:0.1) or JSON 4x4 matrix")
    p.add_argument("--t-max", dest="t_max", type=float, default=d)
    p.add_argument("--checkpoints", type=int, default=d)
    p.add_argument("--eps", type=float, default=d)
    p.add_argument("--samples", type=int, default=d)
    p.add_argument("--seed", type=int, default=d, help=f"default from ${SEED_ENV}, else 0")
    p.add_argument("--measure", default=d, choices=[m.value for m in MeasureKind])
    p.add_argument("--rank", type=int, default=d, help="rank for --measure rank_k")
    p.add_argument("--probes", type=int, default=d, help="random probes for stationary")
    p.add_argument("--threads", type=int, default=d)
    p.add_argument("--out", default=d, help="output path (default: standard output)")
    return p


def make_config(argv: list[str] | None = None) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    merged: dict = {}
    path = ns.pop("config", None)
    if path:
        try:
            with open(path) as fh:
                merged.update(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if "seed" not in merged and SEED_ENV in os.environ:
        try:
            merged["seed"] = int(os.environ[SEED_ENV])
        except ValueError:
            raise ConfigError(f"${SEED_ENV} must be an integer") from None
    if "rates" in ns:
        ns["rates"] = {**merged.get("rates", {}), **dict(ns["rates"])}
    merged.update({k: v for k, v in ns.items() if v is not None})

    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(merged) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {unknown}")
    for key in ("command", "scenario"):
        if key not in merged:
            raise ConfigError(f"missing {key}")
    if merged["command"] not in COMMANDS:
        raise ConfigError(f"unknown command {merged['command']!r}")
    cfg = RunConfig(**merged)
    if cfg.command in ("trajectory", "classify") and cfg.state is None:
        raise ConfigError(f"{cfg.command} needs --state")
    if cfg.checkpoints < 1 or cfg.threads < 1 or cfg.eps <= 0:
        raise ConfigError("checkpoints and threads must be >= 1 and eps > 0")
    if cfg.t_max is not None and not cfg.t_max > 0:
        raise ConfigError("t_max must be positive")
    return cfg


# -- commands -----------------------------------------------------------------------

def _metadata(cfg: RunConfig, scenario) -> dict:
    try:
        ver = version("artifact")
    except PackageNotFoundError:
        ver = "unknown"
    meta = {
        "package": "entdyn",
        "version": ver,
        "command": cfg.command,
        "scenario": scenario.id.value,
        "expected_class": scenario.expected_class.value,
        "rates": scenario.params,
        "options": cfg.options().to_dict(scenario.spec),
    }
    if cfg.command in ("trajectory", "classify"):
        meta["state"] = cfg.state
    if cfg.command == "probabilities":
        meta["measure"] = cfg.measure_spec().to_dict()
    if cfg.command == "stationary":
        meta["seed"] = cfg.seed
        meta["probes"] = cfg.probes
    return meta


def _matrix_json(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def _dump_json(obj: dict, out) -> None:
    out.write(json.dumps(obj, sort_keys=True, indent=2))
    out.write("\n")


def _trajectory_rows(rho0, spec, opts):
    times, states = trajectory_table(rho0, spec, opts)
    singlet = qmat.PSI_MINUS
    for t, r in zip(times, states):
        pops = np.real(np.diag(r))
        rho44 = float(np.real(singlet.conj() @ r @ singlet))
        vals = [t, det_rho(r), det_pt(r), negativity(r), *pops, rho44]
        yield [repr(float(v)) for v in vals]


def _open_out(cfg: RunConfig):
    if cfg.out is None:
        return sys.stdout, False
    try:
        return open(cfg.out, "w", newline=""), True
    except OSError as exc:
        raise ConfigError(f"cannot write {cfg.out}: {exc}") from exc


def run(cfg: RunConfig) -> int:
    """Execute one configured command and return the exit code."""
    try:
        scenario = make_scenario(cfg.scenario, cfg.rates)
        opts = cfg.options()
        rho0 = load_state(cfg.state) if cfg.state is not None else None
        meta = _metadata(cfg, scenario)
        if cfg.command == "probabilities":
            cfg.measure_spec()
            if cfg.samples < 100:
                raise ConfigError("probabilities needs --samples >= 100")
        if cfg.command == "stationary" and cfg.probes < 64:
            raise ConfigError("stationary needs --probes >= 64")
    except (ConfigError, ValueError, TypeError) as exc:
        print(f"entdyn: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if cfg.command == "trajectory":
            rows = list(_trajectory_rows(rho0, scenario.spec, opts))
            out, close = _open_out(cfg)
            try:
                w = csv.writer(out, lineterminator="\n")
                w.writerow(CSV_HEADER)
                w.writerows(rows)
            finally:
                if close:
                    out.close()
            if cfg.out is not None:
                with open(cfg.out + ".meta.json", "w") as fh:
                    _dump_json(meta, fh)
            return EXIT_OK

        if cfg.command == "classify":
            result = classify_trajectory(rho0, scenario.spec, opts).to_dict()
        elif cfg.command == "stationary":
            dyn = classify_dynamics(scenario.spec, probes=cfg.probes, rng=rng_stream(cfg.seed, 0), eps=cfg.eps)
            result = {
                "kernel_dimension": dyn.stationary.dimension,
                "class_label": dyn.label.value,
                "geometry": dyn.stationary.geometry.value,
                "cardinality": dyn.stationary.cardinality.value,
                "representative_states": [_matrix_json(s) for s in dyn.stationary.representative_states],
                "localizations": [r.to_dict() for r in dyn.evidence],
            }
        else:
            report = estimate_probabilities(scenario.spec, cfg.measure_spec(), cfg.samples, opts,
                                            workers=cfg.threads, scenario=scenario.id.value)
            result = report.to_dict()
        result["metadata"] = meta
        out, close = _open_out(cfg)
        try:
            _dump_json(result, out)
        finally:
            if close:
                out.close()
        return EXIT_OK
    except ConfigError as exc:
        print(f"entdyn: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (Indeterminate, TooManyIndeterminate) as exc:
        diag = getattr(exc, "diagnostics", {})
        print(f"entdyn: indeterminate: {exc} {json.dumps(diag, sort_keys=True)}", file=sys.stderr)
        return EXIT_INDETERMINATE
    except (PropagationError, InvalidStateError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"entdyn: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = make_config(argv)
    except ConfigError as exc:
        print(f"entdyn: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg)
