"""Row generators behind the command-line sweeps.

Every generator returns a list of plain dicts in deterministic order
(beta-major, then gt) so the CLI writers can emit CSV or JSON unchanged.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import abelplana
from .dynamics import (
    averaged_phi_vacuum,
    averaged_psi_vacuum,
    h_series,
    numeric_time_average,
    reduced_states,
)
from .entanglement import concurrence, eof_from_concurrence, measures
from .errors import NumericalError
from .postselect import decompose, measure_three_outcome, p1_statistics
from .qcore import BASIS, AtomicFamily, Family, ThermalSpec, family_state, projector, validate_density

ROW_TOL = 1e-9

MATRIX_COLUMNS = [f"rho_{a}_{b}_{part}" for a in BASIS for b in BASIS for part in ("re", "im")]
SURFACE_COLUMNS = ["beta", "gt", "nbar", "C", "EOF", "negativity"] + MATRIX_COLUMNS


def validity_tol(spec: ThermalSpec) -> float:
    """Validation tolerance; a deliberately loose truncation widens the
    admissible trace defect."""
    return max(ROW_TOL, 2.0 * spec.tail_weight)


def _matrix_fields(rho) -> dict:
    out = {}
    for i, a in enumerate(BASIS):
        for j, b in enumerate(BASIS):
            out[f"rho_{a}_{b}_re"] = float(rho[i, j].real)
            out[f"rho_{a}_{b}_im"] = float(rho[i, j].imag)
    return out


def _checked(rho, spec, where):
    report = validate_density(rho, tol=validity_tol(spec))
    if not report:
        raise NumericalError(f"invalid density matrix at {where}: " + ", ".join(report.failures()))
    return rho


def _map(fn, items, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def surface_rows(family, betas, spec: ThermalSpec, gts, omega_over_g=0.0, threads=1):
    fam0 = Family.parse(family)
    gts = np.asarray(gts, dtype=float)

    def one_beta(beta):
        states = reduced_states(AtomicFamily(fam0, beta), spec, gts, omega_over_g)
        rows = []
        for gt, rho in zip(gts, states):
            _checked(rho, spec, f"beta={beta}, gt={gt}")
            m = measures(rho)
            row = {"beta": float(beta), "gt": float(gt), "nbar": spec.nbar,
                   "C": m.concurrence, "EOF": m.eof, "negativity": m.negativity}
            row.update(_matrix_fields(rho))
            rows.append(row)
        return rows

    return [r for block in _map(one_beta, list(betas), threads) for r in block]


# --------------------------------------------------------------------------
# time-averaged mixtures
# --------------------------------------------------------------------------

AVERAGE_COLUMNS = ["family", "beta", "nbar", "C_averaged", "C_initial", "eof_averaged", "eof_initial"]


@dataclass
class AverageResult:
    rows: list
    crossings: dict = field(default_factory=dict)


def averaged_state(family, beta, spec: ThermalSpec, window=None, samples=4001, omega_over_g=0.0):
    fam = AtomicFamily(family, beta)
    if spec.nbar == 0 and window is None:
        if fam.family is Family.PHI:
            return averaged_phi_vacuum(beta)
        return averaged_psi_vacuum(beta)
    if window is None:
        window = 10.0 * math.sqrt(spec.kappa)
    return numeric_time_average(fam, spec, window, samples, omega_over_g)


def _refine_roots(f, grid, xtol=1e-13, noise=1e-10):
    """Sign changes of ``f`` on ``grid`` refined by brentq.

    Grid values below ``noise`` are skipped when looking for sign changes, so
    a tangency (e.g. the dark state, where both concurrences touch 1) does
    not produce spurious roots from round-off.
    """
    pts = [(b, v) for b in grid for v in [f(b)] if abs(v) >= noise]
    roots = []
    for (a, fa), (b, fb) in zip(pts, pts[1:]):
        if fa * fb < 0:
            roots.append(float(brentq(f, a, b, xtol=xtol, rtol=4 * np.finfo(float).eps)))
    return roots


def average_crossings(family, spec, grid, window=None, samples=4001, omega_over_g=0.0):
    """Angles at which the averaged state changes character.

    Phi: the averaged concurrence crosses the input concurrence.
    Psi: the averaged state enters or leaves the separable set.
    """
    fam = Family.parse(family)

    def state(b):
        return averaged_state(fam, b, spec, window, samples, omega_over_g)

    if fam is Family.PHI:
        def f(b):
            return concurrence(state(b)) - concurrence(projector(family_state(AtomicFamily(fam, b))))
    else:
        def f(b):
            return measures(state(b)).wootters
    return _refine_roots(f, list(grid))


def average_rows(families, betas, spec: ThermalSpec, window=None, samples=4001,
                 omega_over_g=0.0, threads=1) -> AverageResult:
    rows = []
    crossings = {}
    for family in families:
        fam = Family.parse(family)

        def one(beta):
            avg = averaged_state(fam, beta, spec, window, samples, omega_over_g)
            _checked(avg, spec, f"averaged beta={beta}")
            c_avg = concurrence(avg)
            c_init = concurrence(projector(family_state(AtomicFamily(fam, beta))))
            return {"family": fam.value, "beta": float(beta), "nbar": spec.nbar,
                    "C_averaged": c_avg, "C_initial": c_init,
                    "eof_averaged": eof_from_concurrence(c_avg),
                    "eof_initial": eof_from_concurrence(c_init)}

        rows.extend(_map(one, list(betas), threads))
        crossings[fam.value] = average_crossings(fam, spec, list(betas), window, samples, omega_over_g)
    return AverageResult(rows, crossings)


# --------------------------------------------------------------------------
# postselection
# --------------------------------------------------------------------------

POSTSELECT_COLUMNS = ["beta", "gt", "nbar", "p1", "p_rest"]


def postselect_rows(betas, spec: ThermalSpec, gts, omega_over_g=0.0, threads=1):
    gts = np.asarray(gts, dtype=float)

    def one_beta(beta):
        states = reduced_states(AtomicFamily(Family.PSI, beta), spec, gts, omega_over_g)
        rows = []
        for gt, rho in zip(gts, states):
            _checked(rho, spec, f"beta={beta}, gt={gt}")
            rows.append({"beta": float(beta), "gt": float(gt), "nbar": spec.nbar,
                         "p1": decompose(rho).p1,
                         "p_rest": measure_three_outcome(rho).p_rest})
        return rows

    rows = [r for block in _map(one_beta, list(betas), threads) for r in block]
    stats = p1_statistics(betas, spec, gts, omega_over_g)
    summary = {
        "per_beta": [
            {"beta": float(b), "max": float(mx), "mean": float(mn), "std": float(sd)}
            for b, mx, mn, sd in zip(stats.betas, stats.maxima, stats.means, stats.stds)
        ],
        "relative_spread_of_maxima": stats.relative_spread,
    }
    return rows, summary


# --------------------------------------------------------------------------
# h2 asymptotics
# --------------------------------------------------------------------------

ASYMPTOTIC_COLUMNS = ["kappa", "gt", "t_tilde", "h2_series", "h2_integral", "h2_hot"]


def asymptotic_rows(spec: ThermalSpec, gts):
    kappa = spec.kappa
    rows = []
    for gt in gts:
        rows.append({"kappa": kappa, "gt": float(gt), "t_tilde": float(gt) / math.sqrt(kappa),
                     "h2_series": float(h_series(spec, gt, "h2")),
                     "h2_integral": abelplana.h2_integral(kappa, float(gt)),
                     "h2_hot": abelplana.h2_hot(kappa, float(gt))})
    return rows
