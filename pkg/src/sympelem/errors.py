"""Exception types shared across the package.

Every failure mode that callers are expected to branch on gets its own
class; everything derives from SympelemError so CLI code can catch one
base type and map it to an exit code.
"""


class SympelemError(Exception):
    pass


class EvenModulus(SympelemError):
    """2 is a zero divisor, so the residue ring is unusable here."""


class NilpotentS(SympelemError):
    """Attempted to localize at a nilpotent element."""


class ZeroDivisorS(SympelemError):
    """Attempted to localize at a (detectable) zero divisor."""


class DimensionMismatch(SympelemError):
    pass


class BadIndices(SympelemError):
    pass


class NonZeroDet(SympelemError):
    """A 2x2 block that must be singular is not."""


class RowConditionFailed(SympelemError):
    """The 2x2 witness does not carry (lambda, mu) in its first column."""


class AlphabetViolation(SympelemError):
    """A word contains atoms outside the alphabet a stage accepts."""


class StepVerificationFailed(SympelemError):
    """A rewrite step changed the evaluation; indicates a rule bug."""


class StepBudgetExceeded(SympelemError):
    """Fuel ran out before the rewriting terminated."""


class NoRuleFound(SympelemError):
    """No admitted reduction rule applies to a generator."""


class NotE2Witnessed(SympelemError):
    """A corner must come with an explicit transvection factorization."""


class UnsupportedBlock(SympelemError):
    """A diagonal block is not a product of the two unit shapes."""


class ExponentTooSmall(SympelemError):
    """Conjugation decomposition requires m > k."""


class NotHomotopy(SympelemError):
    """A word over R[X] does not evaluate to the identity at X = 0."""


class CoverNotComaximal(SympelemError):
    """The supplied cover data fails its defining equation."""


class LocalWordMismatch(SympelemError):
    """A local word does not evaluate to the target matrix."""


class ParseError(SympelemError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
