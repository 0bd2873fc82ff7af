"""pvcurt — deterministic P&O power-curtailment (MPRT) simulator for
single-stage grid-scale PV systems."""

from ._core import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
