"""Self-reinforced preferential attachment tree: simulator and verification lab.

A new vertex attaches to an old vertex with probability proportional to the
sum of that vertex's degrees over all prior times.  The package grows the
tree at scale (O(1) per step via the edge-age sampler), runs the classical
shifted preferential attachment tree for comparison, and checks the growth
exponents and convergence behaviour against exact deterministic recursions,
Gamma-function bounds, and a stochastic-approximation / ODE comparison.
"""

__version__ = "0.1.0"

from srpat.constants import PHI, PSI
from srpat.core import SimConfig, TreeState, Trajectory, init, simulate

__all__ = [
    "PHI",
    "PSI",
    "SimConfig",
    "TreeState",
    "Trajectory",
    "init",
    "simulate",
    "__version__",
]
