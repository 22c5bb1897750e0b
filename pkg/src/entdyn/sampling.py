"""Random two-qubit states and reproducible random streams."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import qmat
from .entanglement import localize
from .qmat import Verdict


class MeasureKind(enum.Enum):
    HILBERT_SCHMIDT = "hs"
    HAAR_PURE = "haar_pure"
    RANK_K = "rank_k"


@dataclass(frozen=True)
class MeasureSpec:
    kind: MeasureKind = MeasureKind.HILBERT_SCHMIDT
    seed: int = 0
    k: int = 4

    def __post_init__(self):
        if self.kind is MeasureKind.RANK_K and self.k not in (1, 2, 3, 4):
            raise ValueError("rank k must be 1..4")

    @property
    def rank(self) -> int:
        return {MeasureKind.HILBERT_SCHMIDT: 4, MeasureKind.HAAR_PURE: 1}.get(self.kind, self.k)

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "seed": self.seed, "k": self.rank}


class SamplingExhausted(RuntimeError):
    pass


def rng_stream(seed: int, stream_id: int) -> np.random.Generator:
    """Independent generator for ``(seed, stream_id)``.

    Streams are derived from a ``SeedSequence`` spawn key, so building one
    stream never touches another.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(stream_id),))
    return np.random.Generator(np.random.Philox(ss))


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def sample(measure: MeasureSpec, rng: np.random.Generator) -> np.ndarray:
    """Draw one 4x4 density matrix.

    Hilbert-Schmidt: ``G G^+ / tr(G G^+)`` for a 4x4 complex Ginibre ``G``;
    the rank-k family uses a 4xk factor and Haar-pure states are the k=1 case.
    """
    g = _ginibre(rng, 4, measure.rank)
    rho = g @ g.conj().T
    rho = rho / np.trace(rho).real
    return 0.5 * (rho + rho.conj().T)


def sample_conditioned(measure: MeasureSpec, predicate: Verdict, rng: np.random.Generator,
                       max_tries: int = 10_000, eps: float = qmat.DEFAULT_TOL) -> np.ndarray:
    """Rejection-sample until the localisation verdict equals ``predicate``."""
    if max_tries < 1:
        raise ValueError("max_tries must be >= 1")
    if predicate is Verdict.BOUNDARY:
        raise ValueError("conditioning on the boundary has probability zero")
    for _ in range(max_tries):
        rho = sample(measure, rng)
        if localize(rho, eps).entanglement is predicate:
            return rho
    raise SamplingExhausted(f"no {predicate.value} state in {max_tries} draws")


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = _ginibre(rng, n, n) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
