"""Exact desk-scale workbench for GF(2) rigidity, independent multiplayer
games and their parallel repetitions, and instrumented multi-tape Turing
machine runs."""

__version__ = "0.1.0"

from . import f2, formats, games, rigidity, tensork, tm  # noqa: F401
from .errors import (  # noqa: F401
    BlockrigError,
    BudgetExceededError,
    DimensionError,
    InvalidWitnessError,
    MachineError,
    StepLimitExceededError,
    UndefinedTransitionError,
)
