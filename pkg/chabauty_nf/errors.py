"""
Exception hierarchy for chabauty-nf.

Input-validation failures also derive from ValueError so the CLI can report
them as invalid input.
"""


class ChabautyError(Exception):
    """Base class for every error raised by the package"""


# Number fields

class NumberFieldError(ChabautyError, ValueError):
    """Invalid number field data"""


class NotMonic(NumberFieldError):
    """Defining polynomial is not monic with integer coefficients"""


class Reducible(NumberFieldError):
    """Defining polynomial has a nontrivial rational factor"""


class IrreducibilityUnprovable(NumberFieldError):
    """Irreducibility could not be certified within budget"""


class DivisionByZero(ChabautyError, ZeroDivisionError):
    """Inverse of zero requested"""


class RamifiedOrIndexDivisor(NumberFieldError):
    """Defining polynomial is not squarefree modulo the prime"""


class PrecisionExhausted(ChabautyError):
    """Result indistinguishable from zero at the working precision"""


# Local fields

class LocalFieldError(ChabautyError, ValueError):
    """Invalid local field operation"""


class NonIntegralDenominator(LocalFieldError):
    """Denominator divisible by p where an integral embedding was requested"""


class NotASquare(LocalFieldError):
    """Reduction is a non-residue"""


class NotAUnit(LocalFieldError):
    """Element is not a unit of the local ring"""


class PrecisionAmbiguous(PrecisionExhausted):
    """Pivot or rank decision needs more digits"""


class PrecisionLoss(PrecisionExhausted):
    """A leading coefficient lost all its digits"""


# Curves and divisors

class CurveError(ChabautyError, ValueError):
    """Invalid curve or divisor data"""


class WrongDegree(CurveError):
    """Model is not of degree 5"""


class SingularModel(CurveError):
    """Model has zero discriminant"""


class NotOnJacobian(CurveError):
    """Mumford pair fails u | v^2 - f or a point is off the curve"""


class BadReduction(CurveError):
    """Curve or data does not reduce well at the place"""


class NonIntegralPoint(CurveError):
    """Point coordinates are not integral at the place"""


# Finite groups

class FiniteGroupError(ChabautyError):
    """Failure in a residue field group computation"""


class BudgetExhausted(FiniteGroupError):
    """Random sampling did not pin down the group structure"""


class NoSolution(FiniteGroupError):
    """Target lies outside the subgroup spanned by the generators"""


class NotSmooth(FiniteGroupError):
    """Group order is not smooth enough for Pohlig-Hellman"""


# Integration

class IntegrationError(ChabautyError):
    """Failure while evaluating a p-adic integral"""


class OutOfBall(IntegrationError):
    """Parameter value has valuation below 1"""


class NotInKernel(IntegrationError):
    """Divisor does not reduce to the identity"""


class KernelAssertionFailed(IntegrationError):
    """Multiple by the group order failed to reach the kernel of reduction"""


# Criterion and sieve

class RankDefect(ChabautyError):
    """More zero rows than the generic count after Hermite reduction"""


class ExplosionGuard(ChabautyError):
    """Sieve coset set would exceed the configured cap"""


class NoUsablePrime(ChabautyError):
    """No prime in the pool satisfies the certification conditions"""


class SchemaError(ChabautyError, ValueError):
    """Problem or certificate file does not match the schema"""

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class SoundnessViolation(ChabautyError):
    """A known point lost its coset during the sieve"""
