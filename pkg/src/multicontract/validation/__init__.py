"""Theorem validation: brute-force oracles and per-instance checks.

Sweeps live in multicontract.validation.harness, which depends on the engine.
"""

from multicontract.validation.oracle import brute_fixed_points, brute_periodic
from multicontract.validation.theorems import CardinalityError, validate

__all__ = ["CardinalityError", "brute_fixed_points", "brute_periodic", "validate"]
