"""
Resonant two-atom / single-mode dynamics under the rotating-wave interaction.

Times are dimensionless, ``gt``; frequencies are in units of the coupling g.
The Rabi frequency of tetrad ``n`` is ``alpha_n = 2*sqrt(n + 3/2)``.

Two independent routes to the reduced atomic state are provided:

* closed forms (``phi_reduced``, ``psi_reduced``) built from thermal series,
* ``oracle_evolve``, which builds every excitation sector from ladder-operator
  matrix elements, exponentiates it numerically and traces out the field.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidParameterError, NumericalError, TruncationError
from .qcore import (
    AtomicFamily,
    Family,
    ThermalSpec,
    basis_index,
    family_state,
    projector,
    symmetrize,
    thermal_weights,
    validate_density,
)

I11, I10, I01, I00 = (basis_index(s) for s in ("11", "10", "01", "00"))

SQRT2 = math.sqrt(2.0)
VACUUM_RABI = SQRT2  # alpha_{-1} = 2 sqrt(1/2)


def rabi(n):
    """alpha_n = 2 sqrt(n + 3/2) in units of g (valid for n >= -3/2)."""
    return 2.0 * np.sqrt(np.asarray(n, dtype=float) + 1.5)


# --------------------------------------------------------------------------
# interaction blocks and dressed states
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TetradBlock:
    n: int
    matrix: np.ndarray

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


def hint_block(n: int) -> TetradBlock:
    """Interaction Hamiltonian (units of hbar g) on the tetrad
    {|n,11>, |n+1,10>, |n+1,01>, |n+2,00>}."""
    if n < 0 or int(n) != n:
        raise InvalidParameterError(f"block index must be a non-negative integer, got {n}")
    a, b = math.sqrt(n + 1), math.sqrt(n + 2)
    m = np.array([
        [0, a, a, 0],
        [a, 0, 0, b],
        [a, 0, 0, b],
        [0, b, b, 0],
    ], dtype=float)
    return TetradBlock(int(n), m)


@dataclass(frozen=True)
class DressedBasis:
    n: int
    vectors: np.ndarray  # rows are |1>_n .. |4>_n in tetrad coordinates
    energies: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.vectors
        return (v.T * self.energies) @ v


def dressed_states(n: int) -> DressedBasis:
    """Normalised eigenvectors of ``hint_block(n)`` in tetrad coordinates.

    |1>_n and |2>_n have eigenvalue 0, |3>_n has -alpha_n and |4>_n has
    +alpha_n.  The bright states carry the |n,11> : |n+2,00> ratio
    sqrt(n+1) : sqrt(n+2) fixed by the block's couplings.
    """
    if n < 0 or int(n) != n:
        raise InvalidParameterError(f"block index must be a non-negative integer, got {n}")
    s = math.sqrt((n + 2) / (n + 1))
    q = math.sqrt((2 * n + 3) / (2 * n + 4))
    bright = math.sqrt((n + 2) / (4 * n + 6))
    vecs = np.array([
        math.sqrt((n + 1) / (2 * n + 3)) * np.array([-s, 0, 0, 1]),
        math.sqrt(0.5) * np.array([0, 1, -1, 0]),
        bright * np.array([1 / s, -q, -q, 1]),
        bright * np.array([1 / s, q, q, 1]),
    ])
    alpha = float(rabi(n))
    return DressedBasis(int(n), vecs, np.array([0.0, 0.0, -alpha, alpha]))


# --------------------------------------------------------------------------
# thermal series
# --------------------------------------------------------------------------

def h_series(spec: ThermalSpec, gt, order: str = "h2"):
    """Thermal Rabi sums.

    h1(t) = sum_n p_n cos(alpha_{n-1} t) / (n + 1/2)
    h2(t) = sum_n p_n cos(alpha_{n-1} t)

    ``gt`` may be a scalar or an array.
    """
    if order not in ("h1", "h2"):
        raise InvalidParameterError(f"order must be 'h1' or 'h2', got {order!r}")
    p = thermal_weights(spec)
    n = np.arange(p.size)
    t = np.asarray(gt, dtype=float)
    w = p / (n + 0.5) if order == "h1" else p
    phase = np.multiply.outer(t, rabi(n - 1))
    out = np.cos(phase) @ w
    return float(out) if out.ndim == 0 else out


def _artanh_ratio(q: float) -> float:
    """artanh(q)/q with the q -> 0 limit."""
    if q < 1e-8:
        return 1.0 + q * q / 3.0
    return math.atanh(q) / q


def m_constants(spec: ThermalSpec, use_arctan: bool = False) -> tuple[float, float]:
    """m_plus, m_minus = 1 +/- M artanh(exp(-kappa)) with
    M = (1 - exp(-2 kappa)) exp(kappa).

    ``use_arctan`` substitutes arctan for artanh; it exists only so that the
    verification command can demonstrate that arctan breaks rho(0).
    """
    q = 0.0 if spec.nbar == 0 else math.exp(-spec.kappa)
    if use_arctan:
        ratio = 1.0 if q == 0 else math.atan(q) / q
    else:
        ratio = _artanh_ratio(q)
    # M * f(q) = (1 - q^2) f(q) / q
    x = (1.0 - q * q) * ratio
    return 1.0 + x, 1.0 - x


# --------------------------------------------------------------------------
# closed-form reduced states
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PhiCoefficients:
    gt: float
    a1: float
    a2: float
    a3: float
    a4: float
    a5: float
    h1_2t: float
    h2_t: float
    h2_2t: float
    m_plus: float
    m_minus: float
    family = Family.PHI

    def matrix(self) -> np.ndarray:
        rho = np.zeros((4, 4), dtype=complex)
        rho[I00, I00] = self.a1
        rho[I01, I01] = self.a2
        rho[I01, I10] = rho[I10, I01] = self.a3
        rho[I10, I10] = self.a4
        rho[I11, I11] = self.a5
        return rho


@dataclass(frozen=True)
class PsiCoefficients:
    gt: float
    b1: float
    b2: complex
    b3: float
    b4: float
    family = Family.PSI

    def matrix(self) -> np.ndarray:
        rho = np.zeros((4, 4), dtype=complex)
        rho[I00, I00] = self.b1
        rho[I00, I11] = self.b2
        rho[I11, I00] = np.conj(self.b2)
        for i in (I01, I10):
            for j in (I01, I10):
                rho[i, j] = self.b3
        rho[I11, I11] = self.b4
        return rho


def _phi_arrays(beta, spec, gt, use_arctan=False):
    t = np.asarray(gt, dtype=float)
    s2 = math.sin(2 * beta)
    c2 = math.cos(2 * beta)
    h1_2t = np.asarray(h_series(spec, 2 * t, "h1"))
    h2_t = np.asarray(h_series(spec, t, "h2"))
    h2_2t = np.asarray(h_series(spec, 2 * t, "h2"))
    mp, mm = m_constants(spec, use_arctan)
    up = (1 + s2) / 8
    lo = (1 - s2) / 4
    a1 = up * (mp - h2_2t - 0.5 * h1_2t)
    a2 = up * (1 + h2_2t) - 0.5 * h2_t * c2 + lo
    a3 = up * (1 + h2_2t) - lo
    a4 = up * (1 + h2_2t) + 0.5 * h2_t * c2 + lo
    a5 = up * (mm - h2_2t + 0.5 * h1_2t)
    return dict(a1=a1, a2=a2, a3=a3, a4=a4, a5=a5,
                h1_2t=h1_2t, h2_t=h2_t, h2_2t=h2_2t, m_plus=mp, m_minus=mm)


def phi_coefficients(beta: float, spec: ThermalSpec, gt: float,
                     use_arctan: bool = False) -> PhiCoefficients:
    if gt < 0:
        raise InvalidParameterError("gt must be >= 0")
    d = _phi_arrays(beta, spec, gt, use_arctan)
    return PhiCoefficients(gt=float(gt), **{k: float(v) for k, v in d.items()})


def phi_reduced(beta: float, spec: ThermalSpec, gt: float) -> np.ndarray:
    """Reduced atomic state for the input sin(b)|01> + cos(b)|10>."""
    return phi_coefficients(beta, spec, gt).matrix()


def _psi_arrays(beta, spec, gt, omega_over_g=0.0):
    t = np.asarray(gt, dtype=float)
    p = thermal_weights(spec)
    n = np.arange(p.size, dtype=float)
    s, c = math.sin(beta), math.cos(beta)

    # |n,00> lives in tetrad n-2; its n=0 coefficient n/(2n-1) vanishes, so
    # the imaginary alpha_{-2} is never evaluated.
    lo = np.zeros_like(n)
    lo[1:] = 2.0 * np.sqrt(n[1:] - 0.5)
    c0 = (n - 1) / (2 * n - 1)
    c1 = n / (2 * n - 1)
    d4 = n * (n - 1) / (2 * n - 1) ** 2
    e3 = n / (4 * n - 2)
    hi = rabi(n)

    cos_lo = np.cos(np.multiply.outer(t, lo))
    cos_hi = np.cos(np.multiply.outer(t, hi))
    sin2_lo = np.sin(np.multiply.outer(t, lo)) ** 2
    sin2_hi = np.sin(np.multiply.outer(t, hi)) ** 2

    A = c0 + c1 * cos_lo
    B = (n + 2) / (2 * n + 3) + (n + 1) / (2 * n + 3) * cos_hi

    b1 = (s * s * A ** 2 + c * c * (n + 1) * (n + 2) / (2 * n + 3) ** 2 * (1 - cos_hi) ** 2) @ p
    b2 = s * c * ((A * B) @ p) * np.exp(2j * omega_over_g * t)
    b3 = (s * s * e3 * sin2_lo + c * c * (n + 1) / (4 * n + 6) * sin2_hi) @ p
    b4 = (s * s * d4 * (1 - cos_lo) ** 2 + c * c * B ** 2) @ p
    return dict(b1=b1, b2=b2, b3=b3, b4=b4)


def psi_coefficients(beta: float, spec: ThermalSpec, gt: float,
                     omega_over_g: float = 0.0) -> PsiCoefficients:
    if gt < 0:
        raise InvalidParameterError("gt must be >= 0")
    d = _psi_arrays(beta, spec, gt, omega_over_g)
    return PsiCoefficients(gt=float(gt), b1=float(d["b1"]), b2=complex(d["b2"]),
                           b3=float(d["b3"]), b4=float(d["b4"]))


def psi_reduced(beta: float, spec: ThermalSpec, gt: float,
                omega_over_g: float = 0.0) -> np.ndarray:
    """Reduced atomic state for the input sin(b)|00> + cos(b)|11>.

    The free evolution appears only as the phase exp(2i Omega t) on the
    |00><11| coherence, with ``Omega t = omega_over_g * gt``.
    """
    return psi_coefficients(beta, spec, gt, omega_over_g).matrix()


def reduced_state(fam: AtomicFamily, spec: ThermalSpec, gt: float,
                  omega_over_g: float = 0.0) -> np.ndarray:
    if fam.family is Family.PHI:
        return phi_reduced(fam.beta, spec, gt)
    return psi_reduced(fam.beta, spec, gt, omega_over_g)


def reduced_states(fam: AtomicFamily, spec: ThermalSpec, gts,
                   omega_over_g: float = 0.0) -> np.ndarray:
    """Closed-form reduced states on a batch of times, shape (T, 4, 4)."""
    t = np.atleast_1d(np.asarray(gts, dtype=float))
    if np.any(t < 0):
        raise InvalidParameterError("gt must be >= 0")
    out = np.zeros((t.size, 4, 4), dtype=complex)
    if fam.family is Family.PHI:
        d = _phi_arrays(fam.beta, spec, t)
        out[:, I00, I00] = d["a1"]
        out[:, I01, I01] = d["a2"]
        out[:, I01, I10] = out[:, I10, I01] = d["a3"]
        out[:, I10, I10] = d["a4"]
        out[:, I11, I11] = d["a5"]
    else:
        d = _psi_arrays(fam.beta, spec, t, omega_over_g)
        out[:, I00, I00] = d["b1"]
        out[:, I00, I11] = d["b2"]
        out[:, I11, I00] = np.conj(d["b2"])
        for i in (I01, I10):
            for j in (I01, I10):
                out[:, i, j] = d["b3"]
        out[:, I11, I11] = d["b4"]
    return out


# --------------------------------------------------------------------------
# brute-force oracle
# --------------------------------------------------------------------------

_EXCITED = {"11": 2, "10": 1, "01": 1, "00": 0}


@lru_cache(maxsize=None)
def sector_basis(k: int) -> tuple[tuple[int, str], ...]:
    """Bare states (photons, atoms) with total excitation number k."""
    states = []
    for atoms in ("11", "10", "01", "00"):
        m = k - _EXCITED[atoms]
        if m >= 0:
            states.append((m, atoms))
    return tuple(states)


def _apply_hint(state):
    """H_int/(hbar g) acting on a bare state; returns {state: amplitude}."""
    m, atoms = state
    out = {}
    for i in range(2):
        bit = atoms[i]
        if bit == "0" and m > 0:
            # sigma_+^(i) b
            new = atoms[:i] + "1" + atoms[i + 1:]
            key = (m - 1, new)
            out[key] = out.get(key, 0.0) + math.sqrt(m)
        elif bit == "1":
            # sigma_-^(i) b^dagger
            new = atoms[:i] + "0" + atoms[i + 1:]
            key = (m + 1, new)
            out[key] = out.get(key, 0.0) + math.sqrt(m + 1)
    return out


@lru_cache(maxsize=None)
def sector_hamiltonian(k: int) -> np.ndarray:
    basis = sector_basis(k)
    pos = {s: i for i, s in enumerate(basis)}
    h = np.zeros((len(basis), len(basis)))
    for j, s in enumerate(basis):
        for target, amp in _apply_hint(s).items():
            h[pos[target], j] += amp
    return h


@lru_cache(maxsize=None)
def _sector_eig(k: int):
    return np.linalg.eigh(sector_hamiltonian(k))


def _sector_propagator(k: int, gt: float) -> np.ndarray:
    e, v = _sector_eig(k)
    return (v * np.exp(-1j * e * gt)) @ v.T


def oracle_evolve(fam: AtomicFamily, spec: ThermalSpec, gt: float,
                  omega_over_g: float = 0.0) -> np.ndarray:
    """Reduced atomic state by explicit sector-by-sector propagation.

    Each photon number n of the thermal mixture is propagated separately:
    the product state |n> (x) |atoms> is split over excitation sectors, each
    sector is evolved with its numerically diagonalised interaction block
    (plus the free phase exp(-i Omega k t)), and the field is traced out.
    """
    if gt < 0:
        raise InvalidParameterError("gt must be >= 0")
    if spec.tail_weight > spec.epsilon_tail:
        raise TruncationError(
            f"truncation at n_max={spec.n_max} drops weight {spec.tail_weight:.3e} "
            f"> epsilon_tail={spec.epsilon_tail:.3e}")
    psi0 = family_state(fam)
    p = thermal_weights(spec)
    labels = ("11", "10", "01", "00")
    rho = np.zeros((4, 4), dtype=complex)
    for n, pn in enumerate(p):
        if pn == 0.0:
            continue
        by_photon: dict[int, np.ndarray] = {}
        sectors: dict[int, np.ndarray] = {}
        for idx, atoms in enumerate(labels):
            amp = psi0[idx]
            if amp == 0:
                continue
            k = n + _EXCITED[atoms]
            basis = sector_basis(k)
            vec = sectors.setdefault(k, np.zeros(len(basis), dtype=complex))
            vec[basis.index((n, atoms))] += amp
        for k, vec in sectors.items():
            out = _sector_propagator(k, gt) @ vec
            out *= np.exp(-1j * omega_over_g * gt * k)
            for amp, (m, atoms) in zip(out, sector_basis(k)):
                slot = by_photon.setdefault(m, np.zeros(4, dtype=complex))
                slot[basis_index(atoms)] += amp
        for vec in by_photon.values():
            rho += pn * projector(vec)
    return rho


# --------------------------------------------------------------------------
# time averages
# --------------------------------------------------------------------------

def averaged_phi_vacuum(beta: float) -> np.ndarray:
    """Average of the vacuum Phi-family state over one common period
    (gt in [0, sqrt(2) pi])."""
    s = math.sin(2 * beta)
    rho = np.zeros((4, 4), dtype=complex)
    rho[I00, I00] = 2 * (1 + s)
    rho[I01, I01] = rho[I10, I10] = 3 - s
    rho[I01, I10] = rho[I10, I01] = 3 * s - 1
    return rho / 8


def averaged_psi_vacuum(beta: float) -> np.ndarray:
    """Infinite-time average of the vacuum Psi-family state.

    All oscillating terms, the free phase on |00><11| included, average out.
    """
    s2 = math.sin(2 * beta)
    cc = math.cos(beta) ** 2
    rho = np.zeros((4, 4), dtype=complex)
    rho[I00, I00] = 4 * (2 - math.cos(2 * beta))
    rho[I00, I11] = rho[I11, I00] = 4 * s2
    for i in (I01, I10):
        for j in (I01, I10):
            rho[i, j] = cc
    rho[I11, I11] = 6 * cc
    return rho / 12


def numeric_time_average(fam: AtomicFamily, spec: ThermalSpec, window: float,
                         samples: int = 2001, omega_over_g: float = 0.0,
                         chunk: int = 4096) -> np.ndarray:
    """Trapezoidal average of the closed-form state over gt in [0, window]."""
    if not window > 0:
        raise InvalidParameterError("window must be positive")
    if samples < 2:
        raise InvalidParameterError("samples must be >= 2")
    t = np.linspace(0.0, window, samples)
    w = np.full(samples, 1.0)
    w[0] = w[-1] = 0.5
    w /= w.sum()
    acc = np.zeros((4, 4), dtype=complex)
    for start in range(0, samples, chunk):
        sl = slice(start, start + chunk)
        acc += np.tensordot(w[sl], reduced_states(fam, spec, t[sl], omega_over_g), axes=1)
    acc = symmetrize(acc)
    report = validate_density(acc, tol=max(1e-9, 4 * spec.tail_weight))
    if not report:
        raise NumericalError("time average is not a valid density matrix: "
                              + ", ".join(report.failures()))
    return acc


def resolved_step(spec: ThermalSpec) -> float:
    """Largest gt step resolving the fastest retained Rabi oscillation.

    The closed forms contain cos(alpha t) and cos(2 alpha t), so the fastest
    frequency is 2 alpha_{n_max}.
    """
    return math.pi / (10 * 2 * float(rabi(spec.n_max)))
