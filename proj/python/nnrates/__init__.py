"""k-NN convergence-rate toolkit: exact region and bound calculus, plus the
simulation harness, exposed from the C++ core."""

from ._nnrates import *  # noqa: F401,F403
from ._nnrates import Error, __doc__  # noqa: F401

__version__ = "0.1.0"
