"""Exception hierarchy shared by all fglcalc modules."""


class FGLCalcError(Exception):
    """Base class for every error raised by this package."""


class MixedContext(FGLCalcError):
    pass


class NonNilpotentSubstitution(FGLCalcError):
    pass


class NonUnitLeadingCoefficient(FGLCalcError):
    pass


class NotRationalBase(FGLCalcError):
    pass


class SourceTargetMismatch(FGLCalcError):
    pass


class NonInvertiblePhi(FGLCalcError):
    pass


class OverdeterminedSystem(FGLCalcError):
    pass


class UnsupportedTheory(FGLCalcError):
    pass


class NonPrime(FGLCalcError):
    pass


class InhomogeneousElement(FGLCalcError):
    pass


class DanglingGenerator(FGLCalcError):
    pass


class IntegralityFailure(FGLCalcError):
    """A value that must be p-locally integral has a denominator divisible by p."""


class TruncationTooLow(FGLCalcError):
    pass


class UnsupportedSpace(FGLCalcError):
    pass


class UnsupportedBundle(FGLCalcError):
    pass


class InfiniteRank(FGLCalcError):
    pass


class ExpressionError(FGLCalcError):
    pass
