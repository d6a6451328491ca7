"""Microscopic freeway CACC simulation with an analytical DSRC reception model."""

try:
    from ._dsrcsim import *  # noqa: F401,F403
    from ._dsrcsim import __doc__  # noqa: F401
except ImportError:  # running against a build tree on PYTHONPATH
    from _dsrcsim import *  # noqa: F401,F403
    from _dsrcsim import __doc__  # noqa: F401

__version__ = "0.1.0"
