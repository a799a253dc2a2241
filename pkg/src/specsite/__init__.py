"""Spectra of finite algebras under user-specified geometries."""

__version__ = "0.1.0"

from .algebra import (
    Congruence,
    FiniteAlgebra,
    Homomorphism,
    Signature,
    check_homomorphism,
    enumerate_homs,
    find_isomorphism,
    principal_congruence,
    pushout_surjection,
    quotient,
)
from .errors import BudgetExceeded, InputError, SpecsiteError, VerificationFailure
from .plugin import GeometrySpec
from .theories import geometry
