"""Stability of CMC Clifford tori as constrained Willmore surfaces in S^3."""

from .oracle import (
    OracleReport,
    VariationSpec,
    VerificationError,
    db_fd,
    first_variation_fd,
    lambda_from_quotient,
    second_variation_fd,
    verify_mode,
)
from .revolution import GeometryError, Profile, clifford_profile, conformal_class, willmore_energy
from .spectrum import (
    ModeIndex,
    SpectrumEntry,
    StabilityReport,
    apply_operator,
    eigenvalue,
    lagrange_multiplier,
    morse_index,
    spectrum_table,
    thresholds,
)
from .torus import TorusParameter, geometric_data, make_torus, willmore_energy_clifford

__version__ = "0.1.0"
