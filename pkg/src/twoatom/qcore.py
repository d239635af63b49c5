"""
Two-qubit and thermal-field primitives.

All two-qubit operators share one fixed basis ordering::

    index 0 -> |11>,  index 1 -> |10>,  index 2 -> |01>,  index 3 -> |00>

where ``1`` is the excited and ``0`` the ground level, first label = atom 1.
The ordering is the Kronecker product with single-qubit order ``(|1>, |0>)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidParameterError

BASIS = ("11", "10", "01", "00")
_INDEX = {label: i for i, label in enumerate(BASIS)}

# Permutation to the conventional order (|00>, |01>, |10>, |11>).
_COMPUTATIONAL = [_INDEX["00"], _INDEX["01"], _INDEX["10"], _INDEX["11"]]


def basis_index(label: str) -> int:
    """Position of a two-qubit basis ket, e.g. ``basis_index("01") == 2``."""
    try:
        return _INDEX[label]
    except KeyError:
        raise InvalidParameterError(f"unknown basis label {label!r}") from None


def ket(label: str) -> np.ndarray:
    v = np.zeros(4, dtype=complex)
    v[basis_index(label)] = 1.0
    return v


def projector(vec) -> np.ndarray:
    vec = np.asarray(vec, dtype=complex)
    return np.outer(vec, vec.conj())


def computational_order(rho) -> np.ndarray:
    """Reorder a 4x4 operator to (|00>, |01>, |10>, |11>) for comparison with
    matrices written in the conventional layout."""
    rho = np.asarray(rho)
    return rho[np.ix_(_COMPUTATIONAL, _COMPUTATIONAL)]


def from_computational_order(mat) -> np.ndarray:
    mat = np.asarray(mat)
    inv = np.argsort(_COMPUTATIONAL)
    return mat[np.ix_(inv, inv)]


def symmetrize(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    return 0.5 * (rho + rho.conj().T)


# --------------------------------------------------------------------------
# thermal field
# --------------------------------------------------------------------------

def kappa_from_nbar(nbar: float) -> float:
    """kappa = hbar*Omega / 2kT from the mean photon number."""
    if nbar < 0:
        raise InvalidParameterError(f"nbar must be >= 0, got {nbar}")
    if nbar == 0:
        return math.inf
    return 0.5 * math.log1p(1.0 / nbar)


def nbar_from_kappa(kappa: float) -> float:
    if not kappa > 0:
        raise InvalidParameterError(f"kappa must be > 0, got {kappa}")
    if math.isinf(kappa):
        return 0.0
    return 1.0 / math.expm1(2.0 * kappa)


@dataclass(frozen=True)
class ThermalSpec:
    """Single-mode thermal field and its photon-number truncation.

    Parameters
    ----------
    nbar : float
        Mean photon number.
    epsilon_tail : float
        Largest admissible probability weight beyond ``n_max``.
    n_cap : int, optional
        Explicit truncation. When omitted the smallest ``N`` whose tail weight
        is below ``epsilon_tail`` is used.
    """

    nbar: float
    epsilon_tail: float = 1e-12
    n_cap: int | None = None

    def __post_init__(self):
        if not (self.nbar >= 0) or math.isinf(self.nbar):
            raise InvalidParameterError(f"nbar must be finite and >= 0, got {self.nbar}")
        if not (0 < self.epsilon_tail < 1):
            raise InvalidParameterError(
                f"epsilon_tail must lie in (0, 1), got {self.epsilon_tail}")
        if self.n_cap is not None and self.n_cap < 0:
            raise InvalidParameterError(f"n_cap must be >= 0, got {self.n_cap}")

    @classmethod
    def from_kappa(cls, kappa: float, epsilon_tail: float = 1e-12, n_cap=None):
        return cls(nbar_from_kappa(kappa), epsilon_tail, n_cap)

    @property
    def kappa(self) -> float:
        return kappa_from_nbar(self.nbar)

    @property
    def ratio(self) -> float:
        """Geometric ratio p_{n+1}/p_n = nbar/(1+nbar)."""
        return self.nbar / (1.0 + self.nbar)

    @cached_property
    def n_max(self) -> int:
        if self.n_cap is not None:
            return self.n_cap
        if self.nbar == 0:
            return 0
        # tail beyond N is r**(N+1)
        r = self.ratio
        n = max(0, math.ceil(math.log(self.epsilon_tail) / math.log(r)) - 1)
        while n > 0 and r ** n < self.epsilon_tail:
            n -= 1
        while r ** (n + 1) >= self.epsilon_tail:
            n += 1
        return n

    @property
    def tail_weight(self) -> float:
        """Probability carried by photon numbers above ``n_max``."""
        if self.nbar == 0:
            return 0.0
        return self.ratio ** (self.n_max + 1)


def thermal_weights(spec: ThermalSpec) -> np.ndarray:
    """Photon-number probabilities p_0..p_{n_max} of the thermal state,
    p_n = nbar**n / (1 + nbar)**(n + 1)."""
    n = np.arange(spec.n_max + 1)
    if spec.nbar == 0:
        p = np.zeros(n.size)
        p[0] = 1.0
        return p
    log_p = n * math.log(spec.ratio) - math.log1p(spec.nbar)
    return np.exp(log_p)


# --------------------------------------------------------------------------
# atomic input families
# --------------------------------------------------------------------------

class Family(str, enum.Enum):
    PHI = "Phi"
    PSI = "Psi"

    @classmethod
    def parse(cls, value) -> "Family":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        for member in cls:
            if member.value.lower() == key:
                return member
        raise InvalidParameterError(f"unknown family {value!r}; expected Phi or Psi")


@dataclass(frozen=True)
class AtomicFamily:
    family: Family
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "family", Family.parse(self.family))

    def state(self) -> np.ndarray:
        return family_state(self)


def family_state(fam: AtomicFamily) -> np.ndarray:
    """Input atomic ket.

    Phi: sin(beta)|01> + cos(beta)|10>;  Psi: sin(beta)|00> + cos(beta)|11>.
    """
    s, c = math.sin(fam.beta), math.cos(fam.beta)
    if fam.family is Family.PHI:
        return s * ket("01") + c * ket("10")
    return s * ket("00") + c * ket("11")


# --------------------------------------------------------------------------
# density-matrix checks and partial transpose
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DensityReport:
    passed: bool
    hermiticity_defect: float
    trace_defect: float
    min_eigenvalue: float
    tol: float

    def __bool__(self):
        return self.passed

    def failures(self) -> list[str]:
        out = []
        if self.hermiticity_defect > self.tol:
            out.append(f"hermiticity defect {self.hermiticity_defect:.3e}")
        if self.trace_defect > self.tol:
            out.append(f"trace defect {self.trace_defect:.3e}")
        if self.min_eigenvalue < -self.tol:
            out.append(f"min eigenvalue {self.min_eigenvalue:.3e}")
        return out


def validate_density(rho, tol: float = 1e-10) -> DensityReport:
    """Check Hermiticity, unit trace and positivity of a 4x4 matrix."""
    if not tol > 0:
        raise InvalidParameterError("tol must be positive")
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise InvalidParameterError(f"expected a 4x4 matrix, got shape {rho.shape}")
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    trace = float(abs(np.trace(rho) - 1.0))
    lam_min = float(np.linalg.eigvalsh(symmetrize(rho))[0])
    passed = herm <= tol and trace <= tol and lam_min >= -tol
    return DensityReport(passed, herm, trace, lam_min, tol)


def partial_transpose_second(rho) -> np.ndarray:
    """Transpose the second-qubit indices of a two-qubit operator."""
    r = np.asarray(rho, dtype=complex).reshape(2, 2, 2, 2)
    return r.transpose(0, 3, 2, 1).reshape(4, 4)
