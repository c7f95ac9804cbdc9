"""
p-local commensurability graphs of finite permutation groups: subgroup
lattices, graph construction and analytics, alternating-group components and
a verification suite for their structural properties
"""

from .catalog import group, parse_descriptor
from .config import Settings
from .graphs import CommGraph, build_graph, components, distance, geodesic
from .groups import FiniteGroup
from .lattice import Subgroup, SubgroupLattice, all_subgroups, lattice_of
from .permutations import Permutation, parse_cycles
from .verify import SuiteConfig, run_suite

__all__ = [
    "CommGraph",
    "FiniteGroup",
    "Permutation",
    "Settings",
    "Subgroup",
    "SubgroupLattice",
    "SuiteConfig",
    "all_subgroups",
    "build_graph",
    "components",
    "distance",
    "geodesic",
    "group",
    "lattice_of",
    "parse_cycles",
    "parse_descriptor",
    "run_suite",
]
