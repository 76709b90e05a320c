"""Shared exception types for the analysis pipelines."""


class LoziError(Exception):
    pass


class InconsistencyError(LoziError):
    """A computed object contradicts an invariant that is proven to hold.

    This signals a software or precision defect, never a property of the
    parameters; pipelines treat it as fatal.
    """


class BudgetExceededError(LoziError):
    """A depth, iterate, or bit-length budget ran out before a decision."""
