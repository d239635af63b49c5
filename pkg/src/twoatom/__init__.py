"""Entanglement dynamics of two two-level atoms in a resonant thermal cavity mode."""
from .errors import (
    DegeneracyError,
    InvalidParameterError,
    NumericalError,
    StructureError,
    TruncationError,
    TwoAtomError,
)
from .qcore import AtomicFamily, Family, ThermalSpec, thermal_weights, validate_density
from .dynamics import oracle_evolve, phi_reduced, psi_reduced, reduced_state, reduced_states
from .entanglement import concurrence, eof, measures, negativity
from .postselect import decompose, measure_three_outcome, p1_statistics

__version__ = "0.1.0"

__all__ = [
    "AtomicFamily", "Family", "ThermalSpec", "thermal_weights", "validate_density",
    "oracle_evolve", "phi_reduced", "psi_reduced", "reduced_state", "reduced_states",
    "concurrence", "eof", "measures", "negativity",
    "decompose", "measure_three_outcome", "p1_statistics",
    "TwoAtomError", "InvalidParameterError", "TruncationError", "NumericalError",
    "StructureError", "DegeneracyError",
]
