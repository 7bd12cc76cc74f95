"""Parallel deflation PCA: engines, baselines, theory checks and metrics."""

from ._pdpca import *  # noqa: F401,F403
from ._pdpca import Error

__all__ = [name for name in dir() if not name.startswith("_")]
