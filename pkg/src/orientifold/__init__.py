"""Orientifold Spin^k structures: finite groups with an orientation character,
Clifford algebras with their real structure, equivariant Cech cohomology with
twisted coefficients, Spin^c lifting obstructions, and lattice Dirac operators
that are equivariant under an anti-unitary group action.
"""

from . import cech, clifford, dirac_lattice, groups, spin, spinc_structures
from .cech import Cochain, EquivariantCover, cohomology
from .clifford import MultiVector, build_gamma_rep
from .errors import OrientifoldError
from .groups import CircleRational, IntegersTwisted, ZTwo, make_orientifold_group, preset_group
from .spin import SOGroup, SpincElement, SpinElement
from .spinc_structures import SpinkProblem, compute_w3, find_spinc_lift, soucond_check

__version__ = "0.1.0"

__all__ = [
    "cech",
    "clifford",
    "dirac_lattice",
    "groups",
    "spin",
    "spinc_structures",
    "Cochain",
    "EquivariantCover",
    "cohomology",
    "MultiVector",
    "build_gamma_rep",
    "OrientifoldError",
    "CircleRational",
    "IntegersTwisted",
    "ZTwo",
    "make_orientifold_group",
    "preset_group",
    "SOGroup",
    "SpincElement",
    "SpinElement",
    "SpinkProblem",
    "compute_w3",
    "find_spinc_lift",
    "soucond_check",
]
