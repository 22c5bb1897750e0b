"""Dense 2x2 / 4x4 complex matrix helpers.

Basis ordering is fixed to |00>, |01>, |10>, |11> with the first label
belonging to qubit A.  ``|0>`` is the ground (lower-energy) level.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-9

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)


class DensityError(ValueError):
    """Raised when a matrix fails density-matrix validation.

    ``invariant`` names the first failed check (``"shape"``, ``"finite"``,
    ``"hermitian"``, ``"trace"`` or ``"positivity"``) and ``magnitude``
    reports how badly it failed.
    """

    def __init__(self, invariant: str, magnitude: float, detail: str = ""):
        self.invariant = invariant
        self.magnitude = float(magnitude)
        msg = f"{invariant} violated (magnitude {self.magnitude:.3e})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class Region(enum.Enum):
    """Location of a two-qubit state from the signs of (det rho, det rho^PT)."""

    I = "I"  # noqa: E741
    II = "II"
    III = "III"
    IV = "IV"
    V = "V"
    VI = "VI"


class Verdict(enum.Enum):
    ENTANGLED = "Entangled"
    SEPARABLE = "Separable"
    BOUNDARY = "Boundary"


@dataclass(frozen=True)
class LocalizationReport:
    d: float
    dG: float
    region: Region
    entanglement: Verdict

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "dG": self.dG,
            "region": self.region.value,
            "entanglement": self.entanglement.value,
        }


def _check_square(m: np.ndarray, dims=(2, 4)) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in dims:
        raise ValueError(f"expected a square matrix of size {dims}, got shape {m.shape}")
    return m


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two single-qubit operators, qubit A leftmost."""
    a = _check_square(a, (2,))
    b = _check_square(b, (2,))
    return np.kron(a, b)


def partial_transpose(rho: np.ndarray, qubit: str = "B") -> np.ndarray:
    """Transpose the indices of one qubit of a 4x4 operator.

    For ``qubit="B"`` entry ``(2a+b, 2c+d)`` moves to ``(2a+d, 2c+b)``.
    Works on stacks of matrices with trailing shape ``(4, 4)``.
    """
    rho = np.asarray(rho)
    if rho.shape[-2:] != (4, 4):
        raise ValueError(f"partial_transpose needs 4x4 input, got {rho.shape}")
    lead = rho.shape[:-2]
    t = rho.reshape(lead + (2, 2, 2, 2))
    if qubit == "B":
        t = np.swapaxes(t, -3, -1)
    elif qubit == "A":
        t = np.swapaxes(t, -4, -2)
    else:
        raise ValueError("qubit must be 'A' or 'B'")
    return t.reshape(lead + (4, 4))


def determinant(m: np.ndarray) -> complex:
    """Determinant by LU factorisation with partial pivoting."""
    m = np.asarray(m)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise ValueError("determinant needs a square matrix")
    return np.linalg.det(m)


def is_hermitian(m: np.ndarray, tol: float = 1e-10) -> bool:
    m = np.asarray(m)
    scale = max(np.linalg.norm(m), 1.0)
    return bool(np.linalg.norm(m - m.conj().T) <= tol * scale)


def eig_hermitian(m: np.ndarray, vectors: bool = False, tol: float = 1e-10):
    """Ascending real eigenvalues (and optionally eigenvectors as columns)."""
    m = _check_square(m)
    if not is_hermitian(m, tol):
        raise ValueError("eig_hermitian: matrix is not Hermitian")
    h = 0.5 * (m + m.conj().T)
    if vectors:
        return np.linalg.eigh(h)
    return np.linalg.eigvalsh(h)


def validate_density(m: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Check that ``m`` is a density matrix and return a cleaned copy.

    Eigenvalues in ``[-tol, 0)`` are clamped to zero and the result is
    renormalised to unit trace.  A matrix that needs no clamping is returned
    unchanged (as a complex array).

    Raises
    ------
    DensityError
        naming the first violated invariant.
    """
    try:
        m = _check_square(m)
    except ValueError as exc:
        raise DensityError("shape", np.nan, str(exc)) from None
    m = np.asarray(m, dtype=complex)
    if not np.all(np.isfinite(m)):
        raise DensityError("finite", np.inf)
    herm_err = float(np.max(np.abs(m - m.conj().T)))
    if herm_err > tol:
        raise DensityError("hermitian", herm_err)
    tr = np.trace(m).real
    if abs(tr - 1.0) > tol:
        raise DensityError("trace", abs(tr - 1.0), f"trace = {tr!r}")
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    if w[0] < -tol:
        raise DensityError("positivity", -w[0], f"min eigenvalue = {w[0]!r}")
    if w[0] < 0:
        w = np.clip(w, 0.0, None)
        m = (v * w) @ v.conj().T
        m = m / np.trace(m).real
    return m


def pure(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


# single-qubit operators; |1> is the excited level
LOWER = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|
RAISE = LOWER.conj().T  # |1><0|
SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)
# energy-ordered z operator: |0> at -1, |1> at +1
SIGMA_Z_ENERGY = -SIGMA_Z

KET = {
    "00": np.array([1, 0, 0, 0], dtype=complex),
    "01": np.array([0, 1, 0, 0], dtype=complex),
    "10": np.array([0, 0, 1, 0], dtype=complex),
    "11": np.array([0, 0, 0, 1], dtype=complex),
}
PSI_PLUS = np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2)
PSI_MINUS = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)
PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
PHI_MINUS = np.array([1, 0, 0, -1], dtype=complex) / np.sqrt(2)

# {|11>, |Psi+>, |00>, |Psi->} as columns: the collective-reservoir basis
COLLECTIVE_BASIS = np.column_stack([KET["11"], PSI_PLUS, KET["00"], PSI_MINUS])


def on_qubit(op: np.ndarray, qubit: str) -> np.ndarray:
    """Embed a 2x2 operator on qubit ``"A"`` or ``"B"``."""
    if qubit == "A":
        return kron(op, I2)
    if qubit == "B":
        return kron(I2, op)
    raise ValueError("qubit must be 'A' or 'B'")
