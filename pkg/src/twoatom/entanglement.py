"""Two-qubit entanglement measures: concurrence, EOF and negativity."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, StructureError
from .qcore import basis_index, partial_transpose_second

_SY = np.array([[0, -1j], [1j, 0]])
SIGMA_YY = np.kron(_SY, _SY)

_IMAG_FAIL = 1e-8

_X_MASK = np.eye(4, dtype=bool) | np.fliplr(np.eye(4, dtype=bool))


@dataclass(frozen=True)
class MeasureResult:
    concurrence: float
    eof: float
    negativity: float
    lambdas: tuple[float, float, float, float]

    @property
    def wootters(self) -> float:
        """Signed lambda_1 - lambda_2 - lambda_3 - lambda_4 (before the max)."""
        l1, l2, l3, l4 = self.lambdas
        return l1 - l2 - l3 - l4


def binary_entropy(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def eof_from_concurrence(c: float) -> float:
    c = min(max(c, 0.0), 1.0)
    return binary_entropy(0.5 * (1.0 + math.sqrt(1.0 - c * c)))


def _psd_sqrt(rho):
    w, v = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def wootters_lambdas(rho) -> np.ndarray:
    """Descending square roots of the spectrum of
    R = rho (sy x sy) rho* (sy x sy).

    They are obtained as singular values of sqrt(rho) sqrt(rho~), which have
    the same squares as the eigenvalues of R but do not suffer the
    sqrt(round-off) error of near-zero eigenvalues of R.
    """
    rho = np.asarray(rho, dtype=complex)
    r = rho @ SIGMA_YY @ rho.conj() @ SIGMA_YY
    ev = np.linalg.eigvals(r)
    if np.max(np.abs(ev.imag)) > _IMAG_FAIL:
        raise NumericalError(
            "R-tilde spectrum has a large imaginary part; input is probably not "
            "a valid density matrix", achieved=float(np.max(np.abs(ev.imag))))
    root = _psd_sqrt(rho)
    root_tilde = SIGMA_YY @ root.conj() @ SIGMA_YY
    return np.linalg.svd(root @ root_tilde, compute_uv=False)


def concurrence(rho) -> float:
    lam = wootters_lambdas(rho)
    return max(0.0, float(lam[0] - lam[1] - lam[2] - lam[3]))


def eof(rho) -> float:
    """Entanglement of formation, log base 2."""
    return eof_from_concurrence(concurrence(rho))


def negativity(rho) -> float:
    ev = np.linalg.eigvalsh(partial_transpose_second(rho))
    return float(-ev[ev < 0].sum())


def measures(rho) -> MeasureResult:
    lam = wootters_lambdas(rho)
    c = max(0.0, float(lam[0] - lam[1] - lam[2] - lam[3]))
    return MeasureResult(c, eof_from_concurrence(c), negativity(rho),
                         tuple(float(x) for x in lam))


def is_x_state(rho, tol: float = 1e-12) -> bool:
    rho = np.asarray(rho)
    return bool(np.all(np.abs(rho[~_X_MASK]) <= tol))


def xstate_concurrence(rho, tol: float = 1e-12) -> float:
    """Concurrence of a matrix with support on the diagonal and anti-diagonal.

    C = 2 max(0, |rho_{11,00}| - sqrt(rho_{10,10} rho_{01,01}),
                 |rho_{10,01}| - sqrt(rho_{11,11} rho_{00,00}))
    """
    rho = np.asarray(rho, dtype=complex)
    if not is_x_state(rho, tol):
        raise StructureError("matrix is not X-shaped")
    i11, i10, i01, i00 = (basis_index(s) for s in ("11", "10", "01", "00"))
    d = rho.diagonal().real
    outer = abs(rho[i11, i00]) - math.sqrt(max(d[i10] * d[i01], 0.0))
    inner = abs(rho[i10, i01]) - math.sqrt(max(d[i11] * d[i00], 0.0))
    return 2.0 * max(0.0, outer, inner)
