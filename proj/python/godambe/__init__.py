"""Estimating-equation inference with observation operators.

Weak (kernel-paired) moments and characteristic functions, inference
functionals, sandwich/Godambe information, and the information hierarchy
audit I_classical >= I_O >= G_psi, with Monte Carlo experiment runners.
"""

from godambe._core import *  # noqa: F401,F403
from godambe._core import __version__  # noqa: F401
