"""Decomposition, decision and enumeration of number-conserving cellular automata."""

from .engine import (
    Decomposition,
    SignedPermutation,
    apply_symmetry,
    coeff_bounds,
    count_per_split,
    decompose,
    enumerate_catalog,
    enumerate_ncca,
    is_number_conserving,
    orbit_representatives,
    symmetry_group,
)
from .lattice import Direction, DirectionPair, GridGeometry, lambda_canonical, omega
from .localfn import Configuration, LocalFunction, from_wolfram_code, wolfram_code
from .neighborhood import NeighborhoodConfig, StateSet
from .perturb import Perturbation, pert_dim, pert_eval, pert_to_lut
from .split import SplitFunction, count_splits, enumerate_splits, split_to_lut

__version__ = "0.1.0"

__all__ = [
    "apply_symmetry",
    "coeff_bounds",
    "Configuration",
    "count_per_split",
    "count_splits",
    "decompose",
    "Decomposition",
    "Direction",
    "DirectionPair",
    "enumerate_catalog",
    "enumerate_ncca",
    "enumerate_splits",
    "from_wolfram_code",
    "GridGeometry",
    "is_number_conserving",
    "lambda_canonical",
    "LocalFunction",
    "NeighborhoodConfig",
    "omega",
    "orbit_representatives",
    "pert_dim",
    "pert_eval",
    "pert_to_lut",
    "Perturbation",
    "SignedPermutation",
    "split_to_lut",
    "SplitFunction",
    "StateSet",
    "symmetry_group",
    "wolfram_code",
]
