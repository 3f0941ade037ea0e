"""Exception taxonomy.

Every error that maps to a CLI exit code derives from CubjordError and
carries a short machine-readable `code`.  Exit mapping: precondition /
recipe problems -> 2, budget -> 3, failed checks -> 1 (checks report
failures, they do not normally raise).
"""


class CubjordError(Exception):
    code = "error"

    def __init__(self, message=""):
        super().__init__(message)
        self.message = message


class PreconditionError(CubjordError):
    """Input violates a documented precondition (CLI exit 2)."""

    code = "precondition"


class NotPrime(PreconditionError):
    code = "NotPrime"


class NotIrreducible(PreconditionError):
    code = "NotIrreducible"


class NotSeparable(PreconditionError):
    code = "NotSeparable"


class NotEtale(PreconditionError):
    code = "NotEtale"


class NotAssociative(PreconditionError):
    code = "NotAssociative"


class NotCommutative(PreconditionError):
    code = "NotCommutative"


class NotDegreeThree(PreconditionError):
    code = "NotDegreeThree"


class InvalidGamma(PreconditionError):
    code = "InvalidGamma"


class InvalidMu(PreconditionError):
    code = "InvalidMu"


class NotInvertible(PreconditionError):
    code = "NotInvertible"


class DimensionTooLarge(PreconditionError):
    code = "DimensionTooLarge"


class AdmissibilityViolation(PreconditionError):
    code = "AdmissibilityViolation"


class CompatibilityViolation(PreconditionError):
    """One of the two defining equations of an extension datum failed.

    `failed` lists which ("u" / "b") did not hold.
    """

    code = "CompatibilityViolation"

    def __init__(self, message="", failed=()):
        super().__init__(message)
        self.failed = tuple(failed)


class AxiomFailure(PreconditionError):
    code = "AxiomFailure"


class SingularStructure(PreconditionError):
    code = "SingularStructure"


class FixedSpaceDimensionUnexpected(PreconditionError):
    code = "FixedSpaceDimensionUnexpected"


class NotSplit(PreconditionError):
    code = "NotSplit"


class NoGenerator(PreconditionError):
    code = "NoGenerator"


class Exhausted(PreconditionError):
    """A guaranteed search ran out of candidates (tiny fields only)."""

    code = "Exhausted"


class ProductNotOne(PreconditionError):
    code = "ProductNotOne"


class PsiInvalid(PreconditionError):
    code = "PsiInvalid"


class TooLarge(PreconditionError):
    code = "TooLarge"


class ConventionFailure(CubjordError):
    """A constructed canonical candidate failed to certify."""

    code = "ConventionFailure"


class BudgetExceeded(CubjordError):
    """Enumeration space exceeds the configured cap (CLI exit 3)."""

    code = "BudgetExceeded"


class RecipeError(CubjordError):
    """Malformed recipe / schema violation (CLI exit 2)."""

    code = "RecipeError"


class InternalVerificationError(CubjordError):
    """A verification that must succeed by theory failed: implementation bug."""

    code = "InternalVerificationError"
