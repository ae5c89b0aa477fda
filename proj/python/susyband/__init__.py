"""Periodic Schrodinger band structures and supersymmetric partners."""

from ._core import *  # noqa: F401,F403
from ._core import (
    ConfigError,
    DomainError,
    Error,
    NumericalError,
    Potential,
    SingularTransformError,
)

__all__ = [name for name in dir() if not name.startswith("_")]
