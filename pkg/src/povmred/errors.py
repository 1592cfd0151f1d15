"""Exception hierarchy.

Every error raised deliberately by the library derives from
:class:`PovmredError`.  Validation failures carry the offending magnitude so
that callers (and the CLI) can report how far off an input was.
"""


class PovmredError(Exception):
    """Base class for all library errors."""


class ValidationError(PovmredError, ValueError):
    def __init__(self, message, magnitude=None):
        super().__init__(message)
        self.magnitude = magnitude


class NotHermitian(ValidationError):
    pass


class NotPSD(ValidationError):
    pass


class NotPositiveDefinite(ValidationError):
    pass


class CompletenessViolated(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class DuplicateLabel(ValidationError):
    pass


class LabelMismatch(ValidationError):
    pass


class NotADensityMatrix(ValidationError):
    pass


class NotMarkov(ValidationError):
    pass


class EigFailure(PovmredError, ArithmeticError):
    pass


class DegenerateSample(PovmredError):
    pass


class VanishingOutcome(PovmredError):
    pass


class ToleranceAmbiguity(PovmredError):
    """Approximate proportionality chained into a group that is not coherent."""


class AmbiguousMatching(PovmredError):
    pass


class SolverStalled(PovmredError):
    pass


class Infeasible(PovmredError):
    pass
