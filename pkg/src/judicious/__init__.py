"""Balanced judicious bipartition solved through odd cycle transversal,
gadget reduction and hypergraph painting over tree decompositions."""

from .abcbjb import AbcInstance, solve_abcbjb, translate
from .errors import GateExceeded, InputError
from .graph import Bipartition, Hypergraph, MultiGraph
from .hp import HPInstance, brute_force_hp, solve_hp_favorable
from .oct import solve_oct
from .pipeline import AbBjbInstance, BjbInstance, SolveAnswer, solve_abbjb, solve_bjb, solve_jb
from .tables import AJPTable

__all__ = [
    "AJPTable",
    "AbBjbInstance",
    "AbcInstance",
    "Bipartition",
    "BjbInstance",
    "GateExceeded",
    "Hypergraph",
    "HPInstance",
    "InputError",
    "MultiGraph",
    "SolveAnswer",
    "brute_force_hp",
    "solve_abbjb",
    "solve_abcbjb",
    "solve_bjb",
    "solve_hp_favorable",
    "solve_jb",
    "solve_oct",
    "translate",
]
