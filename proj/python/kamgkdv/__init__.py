"""Verification toolkit for quasi-periodic tori of quasi-linear gKdV equations.

The heavy lifting lives in the compiled extension `_kamgkdv`; this package
re-exports its surface.
"""

from _kamgkdv import (  # noqa: F401
    Session,
    TorusEmbedding,
    check_diophantine,
    check_hypothesis_s,
    check_resonant_coeffs,
    check_s0_s1,
    simulate_energy_drift,
    spectral_constants,
)

__all__ = [
    "Session",
    "TorusEmbedding",
    "check_diophantine",
    "check_hypothesis_s",
    "check_resonant_coeffs",
    "check_s0_s1",
    "simulate_energy_drift",
    "spectral_constants",
]
