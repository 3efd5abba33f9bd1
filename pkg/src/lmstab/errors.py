"""Exception hierarchy shared across the package."""


class LMStabError(Exception):
    """Base class for all errors raised by lmstab."""


class HomogeneityError(LMStabError):
    pass


class RingMismatchError(LMStabError):
    pass


class ParseError(LMStabError):
    pass


class CharDividesDegree(LMStabError):
    """The Euler relation fails when the characteristic divides the degree."""


class PreconditionError(LMStabError):
    pass


class SamplingError(LMStabError):
    def __init__(self, message, predicate=None):
        super().__init__(message)
        self.predicate = predicate


class WitnessUnavailable(LMStabError):
    pass


class InternalInconsistency(LMStabError):
    """Two certificates disagree. Always a bug, never a user error."""
