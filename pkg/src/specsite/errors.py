"""Exception hierarchy.

Errors fall in three families, mirrored by the CLI exit codes:

* ``InputError``: malformed or invalid input (exit 2)
* ``BudgetExceeded``: a brute-force search hit its cap (exit 3)
* ``VerificationFailure``: a computed object contradicts a proved property,
  or a plugin's closed form disagrees with the generic computation (exit 1)
"""


class SpecsiteError(Exception):
    pass


class InputError(SpecsiteError):
    pass


class SignatureMismatch(InputError):
    pass


class LawViolation(InputError):
    """Operation tables do not satisfy the theory's equational laws."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotSurjective(InputError):
    pass


class NotAFunctor(InputError):
    pass


class NotLocalInput(InputError):
    pass


class BudgetExceeded(SpecsiteError):
    def __init__(self, what, budget):
        super().__init__(f"{what}: search exceeded budget of {budget}")
        self.budget = budget


class VerificationFailure(SpecsiteError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class StepRuleDiverged(VerificationFailure):
    pass


class OracleDisagreement(VerificationFailure):
    pass


class AdmissibilityViolation(VerificationFailure):
    pass


class CompletenessGap(VerificationFailure):
    pass


class StalkMismatch(VerificationFailure):
    pass


class UniversalityGap(VerificationFailure):
    pass


class RestrictionMismatch(VerificationFailure):
    pass


class EquivalenceViolation(VerificationFailure):
    pass


class ReconstructionFailure(VerificationFailure):
    pass
