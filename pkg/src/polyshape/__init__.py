"""Common-shape polyomino puzzles: SAT search, exact-cover oracle, reductions."""

from .geometry import Polyomino, canonical_key, orientations, parse_ascii
from .instance import Mode, PieceSet, PuzzleInstance, Solution, verify_solution
from .placement import Box
from .search import find_common_multiple, find_shape_logic

__all__ = [
    "Box",
    "Mode",
    "PieceSet",
    "Polyomino",
    "PuzzleInstance",
    "Solution",
    "canonical_key",
    "find_common_multiple",
    "find_shape_logic",
    "orientations",
    "parse_ascii",
    "verify_solution",
]
__version__ = "0.1.0"
