"""Positivity-preserving simulation of the mean-reverting CEV model."""

from ._cevlab import *  # noqa: F401,F403
from ._cevlab import __version__  # noqa: F401
