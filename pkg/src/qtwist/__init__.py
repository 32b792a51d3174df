"""Numerical verification of the quaternionic twistor construction.

The package is organised bottom-up: quaternion algebra and embeddings
(:mod:`qtwist.quaternion`), H-modules and their localization over CP^1
(:mod:`qtwist.hmodule`), charts and Nijenhuis tensors
(:mod:`qtwist.geometry`), the twistor structure (:mod:`qtwist.twistor`)
and a small example gallery (:mod:`qtwist.gallery`).
"""

from .config import TOL, Tolerances
from .errors import QTwistError

__version__ = "0.1.0"

__all__ = ["TOL", "Tolerances", "QTwistError", "__version__"]
