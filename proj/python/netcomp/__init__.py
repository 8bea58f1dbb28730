"""Collateralized clearing, systematic-shock risk and portfolio compression."""

from ._netcomp import *  # noqa: F401,F403
from ._netcomp import __doc__  # noqa: F401
