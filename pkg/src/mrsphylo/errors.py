"""Exception hierarchy shared by the interval, expression, engine and model layers."""


class MRSError(Exception):
    """Base class for every error raised by this package."""


class DomainError(MRSError, ValueError):
    """An argument lies outside the domain of a real or interval operation."""


class DivisorContainsZero(DomainError):
    """Interval division by an interval that contains zero."""


class OverflowBound(MRSError, ArithmeticError):
    """An interval bound overflowed to a non-finite value."""


class ParseError(MRSError, ValueError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class EnclosureFailure(MRSError):
    """The interval extension of a target could not be made well defined on a box."""

    def __init__(self, message, box=None, label=None):
        super().__init__(message)
        self.box = box
        self.label = label


class DegenerateProposal(MRSError):
    """The proposal has zero total mass."""


class OutOfDomain(MRSError, ValueError):
    """A point lies outside every piece of a partition."""


class TrialsExhausted(MRSError):
    """A single sample consumed ``trials_max`` proposals without an acceptance.

    ``samples`` and ``report`` hold the partial results gathered before the abort.
    """

    def __init__(self, message, samples=None, report=None):
        super().__init__(message)
        self.samples = samples if samples is not None else []
        self.report = report
