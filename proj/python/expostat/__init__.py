"""Exact Laplace-transform identities and Monte Carlo checks for exponential order statistics."""

from ._expostat import *  # noqa: F401,F403
from ._expostat import DegenerateSampleError, DivisionByZeroError, ParameterError, PoleError  # noqa: F401
