"""Separability localisation from the determinants of rho and rho^PT."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qmat import (
    DEFAULT_TOL,
    LocalizationReport,
    Region,
    Verdict,
    determinant,
    partial_transpose,
)

# sign pattern of (det rho, det rho^PT) -> region
_REGIONS = {
    (1, 1): Region.I,
    (1, 0): Region.II,
    (1, -1): Region.III,
    (0, 1): Region.IV,
    (0, 0): Region.V,
    (0, -1): Region.VI,
}


class InvalidStateError(ValueError):
    pass


def _real_det(m: np.ndarray) -> float:
    d = determinant(m)
    scale = max(1.0, float(np.max(np.abs(m))) ** m.shape[-1])
    if abs(d.imag) > 1e-12 * scale:
        raise ArithmeticError(f"determinant of a Hermitian matrix has imaginary part {d.imag:.3e}")
    return float(d.real)


def det_pt(rho: np.ndarray) -> float:
    """Real determinant of the partial transpose (on qubit B)."""
    return _real_det(partial_transpose(rho))


def det_rho(rho: np.ndarray) -> float:
    return _real_det(np.asarray(rho))


def _sign(x: float, eps: float) -> int:
    if x > eps:
        return 1
    if x < -eps:
        return -1
    return 0


def localize(rho: np.ndarray, eps: float = DEFAULT_TOL) -> LocalizationReport:
    """Place ``rho`` in one of the six regions I..VI.

    Values with magnitude ``<= eps`` count as zero.  A state with
    ``det rho < -eps`` is not a valid state and raises ``InvalidStateError``.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    d = det_rho(rho)
    dg = det_pt(rho)
    sd = _sign(d, eps)
    if sd < 0:
        raise InvalidStateError(f"det rho = {d:.3e} < -eps; not a density matrix")
    sg = _sign(dg, eps)
    verdict = {1: Verdict.SEPARABLE, 0: Verdict.BOUNDARY, -1: Verdict.ENTANGLED}[sg]
    return LocalizationReport(d=d, dG=dg, region=_REGIONS[(sd, sg)], entanglement=verdict)


def negativity(rho: np.ndarray) -> float:
    """Sum of the magnitudes of the negative eigenvalues of rho^PT."""
    w = np.linalg.eigvalsh(partial_transpose(rho))
    return float(np.sum(np.abs(w[w < 0])))


def min_pt_eigenvalue(rho: np.ndarray) -> np.ndarray:
    """Smallest eigenvalue of rho^PT; vectorised over leading axes."""
    return np.linalg.eigvalsh(partial_transpose(rho))[..., 0]


def werner_det_pt(p: float) -> float:
    """det of rho^PT for the Werner state with singlet population ``p``.

    The PT spectrum is ``(1+2p)/6`` (three times) and ``(1-2p)/2``.
    """
    return ((1 + 2 * p) / 6) ** 3 * (1 - 2 * p) / 2


@dataclass(frozen=True, eq=False)
class NamedState:
    name: str
    params: tuple
    state: np.ndarray
