"""Shared exception types."""

from __future__ import annotations


class BlockrigError(Exception):
    """Base class for all package errors."""


class BudgetExceededError(BlockrigError):
    """An exact search would exceed its configured budget.

    Carries the offending size so callers (and the CLI) can report what
    was too large.
    """

    def __init__(self, message: str, size: int, budget: int):
        super().__init__(f"{message}: size {size} exceeds budget {budget}")
        self.size = size
        self.budget = budget


class DimensionError(BlockrigError, ValueError):
    """Shapes or lengths of operands do not match."""


class InvalidWitnessError(BlockrigError):
    """A certificate or decomposition failed revalidation."""


class MachineError(BlockrigError):
    """A Turing machine run could not proceed."""


class UndefinedTransitionError(MachineError):
    def __init__(self, state: str, reads: tuple):
        super().__init__(f"no transition from state {state!r} on symbols {reads!r}")
        self.state = state
        self.reads = reads


class StepLimitExceededError(MachineError):
    def __init__(self, limit: int):
        super().__init__(f"machine did not halt within {limit} steps")
        self.limit = limit
