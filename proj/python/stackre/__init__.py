"""Stackelberg reinsurance equilibrium: closed forms and Monte Carlo checks."""

from ._stackre import *  # noqa: F401,F403
from ._stackre import __doc__  # noqa: F401
