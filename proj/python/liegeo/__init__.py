"""Normal geodesics and bang-bang steering on matrix Lie groups."""

from ._core import *  # noqa: F401,F403
from ._core import LiegeoError, LieModel, Trajectory

__all__ = [name for name in dir() if not name.startswith("_")]
