"""Exception types raised across the pipeline."""


class CausalStackError(Exception):
    """Base class for all library-specific errors."""


class DegenerateColumnError(CausalStackError):
    """A data column has too few distinct values to support the requested bins."""


class OutOfRangeError(CausalStackError):
    """A continuous value lies outside its variable's declared range."""


class ConditioningSetTooLargeError(CausalStackError):
    """A conditional-independence test was requested with too many conditioning variables."""


class EvidenceStarvedError(CausalStackError):
    """Rejection sampling accepted too few samples to form an estimate."""

    def __init__(self, accepted: int, required: int):
        super().__init__(
            f"evidence starved: accepted {accepted} samples, need at least {required}"
        )
        self.accepted = accepted
        self.required = required


class StateSpaceCapError(CausalStackError):
    """Exact enumeration was requested on a state space above the configured cap."""


class NoSuccessStateError(CausalStackError):
    """The whole interval lattice is predicted below the success threshold."""


class StructureLearningError(CausalStackError):
    """The learned graph is missing edges required by the experiment pipeline."""
