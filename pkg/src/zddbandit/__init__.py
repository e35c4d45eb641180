"""Adversarial combinatorial bandits on ZDD-compressed decision sets."""
from .builder import (Edge, Graph, GridSpec, brute_force_st_paths, brute_force_steiner_trees, build_grid,
                      build_st_paths, read_graph, reduce_from_family)
from .combwm import CombWM, bound_expected, bound_highprob, init, run, schedule
from .zdd import (Zdd, contains, count, enumerate_family, max_cardinality, min_additive_cost, read_zdd, validate,
                  write_zdd)

__version__ = "0.1.0"
