"""Field-of-view aware Gaussian mixture multi-object estimation."""

from ._core import *  # noqa: F401,F403

__version__ = "0.1.0"
