"""SU(2) phase-space quantum-state reconstruction.

Simulate displaced-projector measurements on spin-j states, invert them into
density matrices and quasiprobability distributions, and map spectroscopy /
interferometry / trapped-ion control parameters onto the required rotations.
"""

from ._spintomo import *  # noqa: F401,F403
from ._spintomo import __version__  # noqa: F401
