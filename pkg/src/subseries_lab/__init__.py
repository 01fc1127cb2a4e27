"""Selecting subseries that send several conditionally convergent series to infinity."""

__version__ = "0.1.0"

from . import constructions, counterexample, fn32, series  # noqa: E402,F401
from .errors import (DepthExhausted, InstanceContradiction, OutOfRange,  # noqa: E402,F401
                     PreconditionViolated, SubseriesError, UnresolvableVerdict)
