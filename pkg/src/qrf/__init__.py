"""Quantum reference frames for finite groups, U(1) and SU(2).

Coherent-state frames, physical Hilbert spaces from coherent group
averaging, relational Dirac observables via the G-twirl, the relational
Schroedinger and Heisenberg reductions, unitary frame changes, and
symmetry-induced transformations of relational observables.
"""

__version__ = "0.1.0"

from . import framechange, frames, groups, linalg, perspective, reductions, reps  # noqa: F401,E402
from .linalg import Tolerance  # noqa: F401

__all__ = [
    "__version__",
    "Tolerance",
    "linalg",
    "groups",
    "reps",
    "frames",
    "perspective",
    "reductions",
    "framechange",
]
