"""Bottom-up fleet energy and CO2 accounting for plug-in hybrids."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
