"""Exception hierarchy.

Every numerical failure raised by the library derives from
:class:`NumericalError`; invalid inputs derive from :class:`ValueError` as
well so callers can treat them as usage errors.
"""


class DynRMatError(Exception):
    """Base class for all library errors."""


class NumericalError(DynRMatError):
    """A computation could not be completed numerically."""


class InputError(DynRMatError, ValueError):
    """Invalid input data (bad permutation, malformed descriptor, ...)."""


class NotZeroWeight(InputError):
    def __init__(self, value, index):
        self.value = value
        self.index = index
        super().__init__(f"entry {index} of size {value:.3e} violates the zero-weight pattern")


class InvalidPermutation(InputError):
    pass


class EvaluationPole(NumericalError):
    def __init__(self, where, detail=""):
        self.where = where
        msg = f"non-finite evaluation at {where}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class NonFiniteResidual(NumericalError):
    pass


class SingularPartialTranspose(NumericalError):
    pass


class NonConvergent(NumericalError):
    pass


class PoleAtArgument(NumericalError):
    pass


class InconsistentP(NumericalError):
    pass


class DerivativeUnstable(NumericalError):
    pass


class FitFailure(NumericalError):
    pass


class ExtrapolationUnstable(NumericalError):
    pass


class LimitNotReached(NumericalError):
    def __init__(self, sequence, msg="limit not reached"):
        self.sequence = list(sequence)
        super().__init__(f"{msg}: {self.sequence}")


class NotClosedForm(InputError):
    pass


class StencilValidationFailed(NumericalError):
    pass


class NotHecke(NumericalError):
    pass


class NotQuasiconstant(NumericalError):
    def __init__(self, pair, spread):
        self.pair = pair
        self.spread = spread
        super().__init__(f"pair {pair} is not quasiconstant (spread {spread:.3e})")


class InconsistentCocycle(NumericalError):
    pass


class NotTransitive(NumericalError):
    pass


class CyclicOrder(NumericalError):
    pass


class NotInvertible(NumericalError):
    pass


class OracleMismatch(NumericalError):
    pass


class SingularInput(InputError):
    pass


class RankUnstable(NumericalError):
    def __init__(self, ranks):
        self.ranks = list(ranks)
        super().__init__(f"numerical rank differs across trials: {self.ranks}")


class ClassificationError(NumericalError):
    """Wraps a failure inside the classification pipeline with its stage."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {cause}")


class DivisionByZero(NumericalError, ZeroDivisionError):
    pass
