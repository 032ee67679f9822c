"""Chromosome-overlap segmentation: core routines from the C++ library."""

from ._chromoseg import *  # noqa: F401,F403
from ._chromoseg import __doc__  # noqa: F401
