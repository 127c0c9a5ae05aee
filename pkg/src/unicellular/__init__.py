"""Random high-genus unicellular maps as C-decorated plane trees.

Samplers for uniform plane trees and odd-cycle permutations, the quotient
multigraph, short-cycle census, limit-law constants and a Monte Carlo
harness comparing the two.
"""
from .cperm import CPermutation, SamplerBudgetExceeded, sample_cperm
from .cycle_census import CycleCensus, count_short_cycles
from .decorated_map import DecoratedTree, MultiGraph, underlying_graph
from .harness import ConfigError, ExperimentConfig, run_experiment
from .plane_tree import PlaneTree, sample_plane_tree
from .theory import TheoryTable, build_theory

__version__ = "0.1.0"

__all__ = [
    "CPermutation",
    "ConfigError",
    "CycleCensus",
    "DecoratedTree",
    "ExperimentConfig",
    "MultiGraph",
    "PlaneTree",
    "SamplerBudgetExceeded",
    "TheoryTable",
    "build_theory",
    "count_short_cycles",
    "run_experiment",
    "sample_cperm",
    "sample_plane_tree",
    "underlying_graph",
]
