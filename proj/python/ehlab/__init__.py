"""Kicked-rotator ergodic-hierarchy toolkit (C++ core)."""

from ._core import *  # noqa: F401,F403
from ._core import ConfigError, NumericError

__all__ = [name for name in dir() if not name.startswith("_")]
