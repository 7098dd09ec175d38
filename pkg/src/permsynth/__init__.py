"""Permutation and linear reversible circuit synthesis on constrained qubit topologies."""

from permsynth.circuit import Circuit, Gate, depth, to_cnots, verify
from permsynth.gf2 import Gf2Matrix, Permutation, from_permutation
from permsynth.topology import CouplingGraph, distance, parse_graph

__all__ = [
    "Circuit",
    "CouplingGraph",
    "Gate",
    "Gf2Matrix",
    "Permutation",
    "depth",
    "distance",
    "from_permutation",
    "parse_graph",
    "to_cnots",
    "verify",
]
