"""
Extraction of the maximally entangled component (|01> + |10>)/sqrt(2) from
Psi-family output states.

A Psi-family output has the form ``p1 * rho1 + (1 - p1) * rho2`` with
``rho1`` the symmetric one-excitation Bell state and ``rho2`` supported on
span{|00>, |11>}.  The two parts live in orthogonal subspaces, so a
three-outcome projective measurement (or a parity ancilla) separates them.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneracyError, StructureError
from .qcore import (
    AtomicFamily,
    Family,
    ThermalSpec,
    basis_index,
    ket,
    projector,
    symmetrize,
)
from .dynamics import reduced_states

I11, I10, I01, I00 = (basis_index(s) for s in ("11", "10", "01", "00"))

BELL_PLUS_ONE_EXCITATION = (ket("01") + ket("10")) / np.sqrt(2.0)
RHO1 = projector(BELL_PLUS_ONE_EXCITATION)

_STRUCT_TOL = 1e-12

# entries allowed to be nonzero in the Psi-output pattern
_PATTERN = np.zeros((4, 4), dtype=bool)
for _i, _j in [(I00, I00), (I11, I11), (I00, I11), (I11, I00)]:
    _PATTERN[_i, _j] = True
for _i in (I01, I10):
    for _j in (I01, I10):
        _PATTERN[_i, _j] = True


@dataclass(frozen=True)
class PostselectDecomposition:
    p1: float
    rho1: np.ndarray
    rho2: np.ndarray | None  # None when p1 == 1

    def recombine(self) -> np.ndarray:
        out = self.p1 * self.rho1
        if self.rho2 is not None:
            out = out + (1.0 - self.p1) * self.rho2
        return out


def check_psi_structure(rho, tol: float = _STRUCT_TOL) -> np.ndarray:
    """Return the symmetrised matrix if it has the Psi-output pattern,
    otherwise raise StructureError."""
    rho = symmetrize(rho)
    off = np.max(np.abs(rho[~_PATTERN]))
    if off > tol:
        raise StructureError(
            f"entries outside the {{|00>,|11>}} + one-excitation pattern reach {off:.3e}")
    block = rho[np.ix_([I01, I10], [I01, I10])]
    if np.max(np.abs(block - block[0, 0])) > tol:
        raise StructureError(
            "one-excitation block is not proportional to [[1, 1], [1, 1]]; "
            "no decomposition into a Bell component and a {|00>,|11>} remainder exists")
    return rho


def decompose(rho) -> PostselectDecomposition:
    """Split a Psi-family output into ``p1 * rho1 + (1 - p1) * rho2``."""
    rho = check_psi_structure(rho)
    b3 = rho[I01, I01].real
    p1 = float(2.0 * b3)
    b1, b4 = rho[I00, I00].real, rho[I11, I11].real
    norm = b1 + b4
    if norm <= _STRUCT_TOL:
        if abs(1.0 - p1) > _STRUCT_TOL:
            raise DegeneracyError("b1 + b4 vanishes while p1 < 1")
        return PostselectDecomposition(p1, RHO1.copy(), None)
    rho2 = np.zeros((4, 4), dtype=complex)
    rho2[I00, I00] = b1
    rho2[I11, I11] = b4
    rho2[I00, I11] = rho[I00, I11]
    rho2[I11, I00] = rho[I11, I00]
    return PostselectDecomposition(p1, RHO1.copy(), rho2 / norm)


@dataclass(frozen=True)
class ThreeOutcome:
    p00: float
    p11: float
    p_rest: float
    rest_state: np.ndarray | None


def measure_three_outcome(rho, threshold: float = 1e-12) -> ThreeOutcome:
    """Projective measurement {|00><00|, |11><11|, complement}.

    Probabilities are Born-rule expectations of the three projectors, so
    ``p_rest == 1 - p00 - p11`` holds for unit-trace input.  ``rest_state`` is
    the normalised post-measurement state of the third outcome, or None when
    its probability is below ``threshold``.
    """
    rho = np.asarray(rho, dtype=complex)
    p00 = float(rho[I00, I00].real)
    p11 = float(rho[I11, I11].real)
    p_rest = float(rho[I01, I01].real + rho[I10, I10].real)
    rest = None
    if p_rest > threshold:
        proj = np.zeros((4, 4))
        proj[I01, I01] = proj[I10, I10] = 1.0
        rest = proj @ rho @ proj / p_rest
    return ThreeOutcome(p00, p11, p_rest, rest)


# --------------------------------------------------------------------------
# parity ancilla
# --------------------------------------------------------------------------

def _cnot(control: int, target: int, n_qubits: int = 3) -> np.ndarray:
    """CNOT on ``n_qubits`` qubits, each ordered (|1>, |0>) as in the
    two-qubit basis; qubit 0 is the most significant."""
    dim = 2 ** n_qubits
    u = np.zeros((dim, dim))
    for i in range(dim):
        # index bit 0 in a slot means the qubit is in |1>
        bits = [(i >> (n_qubits - 1 - q)) & 1 for q in range(n_qubits)]
        excited = [1 - b for b in bits]
        if excited[control]:
            excited[target] ^= 1
        j = 0
        for q in range(n_qubits):
            j = (j << 1) | (1 - excited[q])
        u[j, i] = 1.0
    return u


PARITY_GATE = _cnot(0, 2) @ _cnot(1, 2)
AUX_ZERO = np.array([[0, 0], [0, 1]], dtype=complex)  # |0><0| in (|1>, |0>) order
AUX_ONE = np.array([[1, 0], [0, 0]], dtype=complex)


def nondemolition_circuit(rho) -> np.ndarray:
    """Apply CNOT(1->aux) CNOT(2->aux) to ``rho (x) |0><0|_aux``.

    The 8x8 result is ordered as kron(two-qubit basis, (|1>, |0>)_aux).
    """
    rho = check_psi_structure(rho)
    joint = np.kron(rho, AUX_ZERO)
    return PARITY_GATE @ joint @ PARITY_GATE.T


def ancilla_branches(joint) -> tuple[float, np.ndarray | None, float, np.ndarray | None]:
    """Project the ancilla of an 8x8 state: (prob_1, state_1, prob_0, state_0)
    with the two-qubit states normalised (None for zero probability)."""
    joint = np.asarray(joint, dtype=complex).reshape(4, 2, 4, 2)
    out = []
    for a in (0, 1):  # slot 0 is |1>_aux
        block = joint[:, a, :, a]
        prob = float(np.trace(block).real)
        out.append((prob, block / prob if prob > 1e-15 else None))
    (p_one, s_one), (p_zero, s_zero) = out
    return p_one, s_one, p_zero, s_zero


# --------------------------------------------------------------------------
# statistics over a parameter grid
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class P1Statistics:
    betas: np.ndarray
    gts: np.ndarray
    p1: np.ndarray  # shape (len(betas), len(gts))
    maxima: np.ndarray
    means: np.ndarray
    stds: np.ndarray

    @property
    def relative_spread(self) -> float:
        """(max - min) / mean of the per-beta maxima."""
        m = self.maxima
        mean = float(np.mean(m))
        return float((m.max() - m.min()) / mean) if mean > 0 else 0.0


def p1_curve(beta: float, spec: ThermalSpec, gts, omega_over_g: float = 0.0) -> np.ndarray:
    states = reduced_states(AtomicFamily(Family.PSI, beta), spec, gts, omega_over_g)
    return np.array([decompose(r).p1 for r in states])


def p1_statistics(betas, spec: ThermalSpec, gts, omega_over_g: float = 0.0) -> P1Statistics:
    betas = np.atleast_1d(np.asarray(betas, dtype=float))
    gts = np.atleast_1d(np.asarray(gts, dtype=float))
    if betas.size == 0 or gts.size == 0:
        raise ValueError("grids must be nonempty")
    table = np.array([p1_curve(b, spec, gts, omega_over_g) for b in betas])
    return P1Statistics(betas, gts, table, table.max(axis=1),
                        table.mean(axis=1), table.std(axis=1))


def require_psi(fam: AtomicFamily) -> None:
    if fam.family is not Family.PSI:
        raise StructureError(
            "postselection needs the Psi family; Phi-family outputs do not split "
            "into orthogonal positive parts")
