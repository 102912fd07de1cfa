"""
Controllers package: operations over the Euler-angle models.
"""

from .abelian import conjecture_probe, exact_moment, jacobian, prefactor_report, tilde
from .euler import forward, inverse, shift_identity_residual
from .expansion import entry_function, expand, symbolic_entries
from .haar import density, mc_integrate, normalization, quad_integrate, sample
from .hull import hull_contains_zero
from .verification import run_verification

__all__ = [
    'conjecture_probe', 'exact_moment', 'jacobian', 'prefactor_report', 'tilde',
    'forward', 'inverse', 'shift_identity_residual',
    'entry_function', 'expand', 'symbolic_entries',
    'density', 'mc_integrate', 'normalization', 'quad_integrate', 'sample',
    'hull_contains_zero',
    'run_verification',
]
