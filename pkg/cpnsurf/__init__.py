"""cpnsurf - Weierstrass immersions of CP^N sigma-model solutions.

cpnsurf constructs solutions of the CP^N sigma model, integrates the
generalized Weierstrass immersion into su(N+1) and computes the induced
geometry: fundamental forms, curvatures, frames, Willmore functional and
topological charge.
"""

__version__ = "0.1.0"
__author__ = "cpnsurf developers"
__license__ = "MIT"

from .errors import CpnError
from .immersion import Immersion, immerse
from .jobs import JobConfig, solution_from_spec
from .model import CpnSolution, make_holomorphic, make_mixed_cp2

__all__ = [
    "CpnError",
    "CpnSolution",
    "Immersion",
    "JobConfig",
    "immerse",
    "make_holomorphic",
    "make_mixed_cp2",
    "solution_from_spec",
]
