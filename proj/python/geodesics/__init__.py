"""Closed geodesics on hyperbolic surfaces and their symbolic models."""

from ._geodesics import *  # noqa: F401,F403
from ._geodesics import GeodesicsError, __version__  # noqa: F401
