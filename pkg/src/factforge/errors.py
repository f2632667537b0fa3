"""Exception hierarchy shared by all pipeline stages."""


class FactForgeError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(FactForgeError):
    """A domain object violates one of its invariants."""


class EmptyInput(ValidationError):
    """Input text is empty after trimming."""


class BackendUnavailable(FactForgeError):
    """An HTTP backend could not be reached within its retry budget."""

    def __init__(self, message: str, retriable: bool = True):
        super().__init__(message)
        self.retriable = retriable


class FixtureMiss(FactForgeError):
    """The mock backend has no entry for a prompt.

    Signals an incomplete test fixture; never silently mapped to an
    empty response.
    """


class UnparseableOutput(FactForgeError):
    """No line of an extractor response parsed under the triple grammar."""


class NoAlignment(FactForgeError):
    """No token of a triple's object occurs in its source sentence."""


class InconsistentGroup(FactForgeError):
    """Extended triples sharing a predicate id disagree on subject or predicate."""


class MalformedQGenOutput(FactForgeError):
    """Question-generation output is missing required lines or the trailing '?'."""


class AnswerLeak(MalformedQGenOutput):
    """A generated question contains its own answer."""


class SnapshotLoadError(FactForgeError):
    """A KG snapshot or alias file is malformed."""


class EmptyAnswer(ValidationError):
    """A retrieved answer is empty and cannot form an evidence triple."""


class MalformedJudgeOutput(FactForgeError):
    """The entailment judge emitted neither recognised token."""


class NoCandidateCorrection(FactForgeError):
    """A questionable fact has no retrieved value to revise towards."""


class NoEligibleLink(FactForgeError):
    """No link in a sentence has same-type replacement candidates."""


class InstanceMismatch(FactForgeError):
    """System reports and gold instances do not cover the same inputs."""


class BudgetExceeded(FactForgeError):
    """The verification wall-clock budget ran out before any sentence finished."""
