"""Range-image LiDAR toolkit (Python bindings of the C++ core)."""

from ._core import *  # noqa: F401,F403
from ._core import DataError, BeamModel  # noqa: F401

__version__ = "0.1.0"
