"""Self-checks run by ``twoatom verify``."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import abelplana
from .dynamics import (
    averaged_phi_vacuum,
    averaged_psi_vacuum,
    h_series,
    numeric_time_average,
    oracle_evolve,
    phi_coefficients,
    reduced_state,
    reduced_states,
    rabi,
)
from .entanglement import eof
from .postselect import ancilla_branches, decompose, measure_three_outcome, nondemolition_circuit
from .qcore import AtomicFamily, Family, ThermalSpec, family_state, projector, validate_density

ORACLE_BETAS = (0.0, 0.3, math.pi / 4, 1.2, 3 * math.pi / 4)
ORACLE_NBARS = (0.0, 0.64, 5.9)
ORACLE_GTS = (0.0, 0.7, 2.1, 5.0, 12.0)


@dataclass
class Check:
    name: str
    deviation: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.deviation <= self.tol)

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.name:<28s} max_dev={self.deviation:.3e}  tol={self.tol:.1e}"


@dataclass
class VerifyReport:
    checks: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self):
        yield from (f"WARNING: {w}" for w in self.warnings)
        yield from (c.line() for c in self.checks)


def run_checks(epsilon_tail: float = 1e-12, omega_over_g: float = 0.0,
               use_arctan: bool = False) -> VerifyReport:
    report = VerifyReport()
    specs = [ThermalSpec(nb, epsilon_tail) for nb in ORACLE_NBARS]
    loose = max(s.tail_weight for s in specs)
    for s in specs:
        if s.tail_weight > 1e-9:
            report.warnings.append(
                f"truncation at nbar={s.nbar} (n_max={s.n_max}) drops weight "
                f"{s.tail_weight:.2e}, above the 1e-9 validation tolerance")

    def phi_state(beta, spec, gt):
        if use_arctan:
            return phi_coefficients(beta, spec, gt, use_arctan=True).matrix()
        return reduced_state(AtomicFamily(Family.PHI, beta), spec, gt)

    # closed forms against the brute-force sectors
    dev = 0.0
    for spec in specs:
        for beta in ORACLE_BETAS:
            for gt in ORACLE_GTS:
                dev = max(dev, np.max(np.abs(
                    phi_state(beta, spec, gt)
                    - oracle_evolve(AtomicFamily(Family.PHI, beta), spec, gt))))
                fam = AtomicFamily(Family.PSI, beta)
                dev = max(dev, np.max(np.abs(
                    reduced_state(fam, spec, gt, omega_over_g)
                    - oracle_evolve(fam, spec, gt, omega_over_g))))
    report.checks.append(Check("oracle equivalence", float(dev), 1e-9 + 4 * loose))

    # dark state
    gts = np.linspace(0.0, 20.0, 200)
    dev = 0.0
    for spec in specs:
        for gt in gts:
            dev = max(dev, abs(1.0 - eof(phi_state(3 * math.pi / 4, spec, gt))))
    report.checks.append(Check("dark-state EOF = 1", dev, 1e-9))

    # rho(t=0) is the input state
    dev = 0.0
    for spec in specs:
        for beta in np.linspace(0.0, math.pi, 13):
            for family in Family:
                fam = AtomicFamily(family, beta)
                rho0 = (phi_state(beta, spec, 0.0) if family is Family.PHI
                        else reduced_state(fam, spec, 0.0))
                dev = max(dev, np.max(np.abs(rho0 - projector(family_state(fam)))))
    report.checks.append(Check("t=0 identity", float(dev), 1e-10 + 4 * loose))

    # h2 series against Abel-Plana integral
    dev = 0.0
    for kappa in (0.05, 0.3, 1.0, 2.0):
        spec = ThermalSpec.from_kappa(kappa)
        for gt in (0.0, 0.5, 2.0, 5.0, 10.0):
            dev = max(dev, abs(h_series(spec, gt) - abelplana.h2_integral(kappa, gt)))
    report.checks.append(Check("h2 series vs integral", dev, 1e-6))

    # vacuum averages
    dev = 0.0
    vac = ThermalSpec(0.0)
    for beta in np.linspace(0.0, math.pi, 7):
        num = numeric_time_average(AtomicFamily(Family.PHI, beta), vac,
                                   math.sqrt(2) * math.pi, 100_000)
        dev = max(dev, np.max(np.abs(num - averaged_phi_vacuum(beta))))
    report.checks.append(Check("Phi vacuum average", float(dev), 1e-8))

    dev = 0.0
    period = 2 * math.pi / float(rabi(0))
    for beta in np.linspace(0.0, math.pi, 7):
        num = numeric_time_average(AtomicFamily(Family.PSI, beta), vac, period, 257)
        dev = max(dev, np.max(np.abs(num - averaged_psi_vacuum(beta))))
    report.checks.append(Check("Psi vacuum average", float(dev), 1e-12))

    # postselection identities
    dev = 0.0
    for spec in specs:
        for beta in ORACLE_BETAS:
            for rho in reduced_states(AtomicFamily(Family.PSI, beta), spec,
                                      np.linspace(0, 8, 17), omega_over_g):
                p1 = decompose(rho).p1
                outcome = measure_three_outcome(rho)
                p_aux, _, _, _ = ancilla_branches(nondemolition_circuit(rho))
                dev = max(dev, abs(p1 - outcome.p_rest), abs(p1 - p_aux))
    report.checks.append(Check("p1 identities", dev, 1e-12))

    # every sweep output is a density matrix
    worst = 0.0
    for spec in specs:
        tol = max(1e-9, 2 * spec.tail_weight)
        for family in Family:
            for beta in np.linspace(0, math.pi, 9):
                for rho in reduced_states(AtomicFamily(family, beta), spec,
                                          np.linspace(0, 12, 25), omega_over_g):
                    r = validate_density(rho, tol)
                    worst = max(worst, r.hermiticity_defect / tol,
                                r.trace_defect / tol, -r.min_eigenvalue / tol)
    # deviation is reported relative to the tolerance
    report.checks.append(Check("density validity (rel)", worst, 1.0))
    return report
