"""Weighted finite automata as matrix product states and operators."""
from .automaton import (SymbolTable, WeightedAutomaton, direct_sum, evaluate,
                        evaluate_periodic, is_deterministic, scale, to_dot)
from .errors import AutoMPSError, SpecError
from .grid2d import (GridEnvironment, SignalingAgent, compile_grid, dense_grid_operator,
                     four_x_agent, grid_weight, snake_automaton_four_x)
from .mp_compile import edit_site, unroll, unroll_periodic
from .mp_state import (MatrixProductOperator, MatrixProductState, amplitude, expectation,
                       inner, random_mps)
from .variational import EnvironmentCache, sweep

__version__ = "0.1.0"

__all__ = [
    "SymbolTable", "WeightedAutomaton", "direct_sum", "evaluate", "evaluate_periodic",
    "is_deterministic", "scale", "to_dot", "AutoMPSError", "SpecError",
    "GridEnvironment", "SignalingAgent", "compile_grid", "dense_grid_operator",
    "four_x_agent", "grid_weight", "snake_automaton_four_x", "edit_site", "unroll",
    "unroll_periodic", "MatrixProductOperator", "MatrixProductState", "amplitude",
    "expectation", "inner", "random_mps", "EnvironmentCache", "sweep",
]
