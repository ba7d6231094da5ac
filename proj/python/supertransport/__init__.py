"""Grassmann algebra, flows on the odd tangent bundle, graded connections and
1|1 parallel transport."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
