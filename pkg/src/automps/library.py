"""
Ready-made symbol tables and automata.

Spin convention: symbol ``"0"`` is spin up (ket (1, 0)) and ``"1"`` is spin
down (ket (0, 1)).  Operator automata share the alphabet ``("I", "X", "Z")``
so that they can be added together.
"""
import numpy as np

from .automaton import SymbolTable, WeightedAutomaton, direct_sum, scale

PAULI = {
    "I": np.eye(2),
    "X": np.array([[0, 1], [1, 0]]),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.array([[1, 0], [0, -1]]),
}

SPIN_KETS = SymbolTable.states({"0": [1, 0], "1": [0, 1]})
PAULI_OPS = SymbolTable.operators(PAULI)
OPERATOR_ALPHABET = ("I", "X", "Z")


def unit_automaton(kind="state"):
    """One state, every symbol has weight 1: evaluates to 1 on every word."""
    if kind == "state":
        symbols, alphabet = SPIN_KETS, ("0", "1")
    else:
        symbols, alphabet = SymbolTable.operators({"I": np.eye(2)}), ("I",)
    return WeightedAutomaton(["A"], alphabet, {a: [[1]] for a in alphabet}, [1], [1], symbols)


def _one_marker(low, high, symbols, alphabet):
    # A: no marker seen yet; B: exactly one seen
    return WeightedAutomaton.from_edges(
        ["A", "B"],
        [("A", "A", low, 1), ("A", "B", high, 1), ("B", "B", low, 1)],
        initial={"A": 1}, final={"B": 1}, symbols=symbols, alphabet=alphabet)


def w_automaton():
    """Accepts words with exactly one ``1``: the W state."""
    return _one_marker("0", "1", SPIN_KETS, ("0", "1"))


def field_automaton():
    """The W pattern with 0 -> I and 1 -> Z: the operator sum_k Z_k."""
    return _one_marker("I", "Z", PAULI_OPS, OPERATOR_ALPHABET)


def _neighbor_pair(low, high, symbols, alphabet):
    # A: nothing yet; B: first of the pair just seen; C: pair complete
    return WeightedAutomaton.from_edges(
        ["A", "B", "C"],
        [("A", "A", low, 1), ("A", "B", high, 1), ("B", "C", high, 1), ("C", "C", low, 1)],
        initial={"A": 1}, final={"C": 1}, symbols=symbols, alphabet=alphabet)


def neighbor_automaton():
    """Accepts words containing exactly one pair of adjacent ``1``s (1100 + 0110 + 0011)."""
    return _neighbor_pair("0", "1", SPIN_KETS, ("0", "1"))


def neighbor_coupling_automaton():
    """The operator sum_k X_k X_{k+1}."""
    return _neighbor_pair("I", "X", PAULI_OPS, OPERATOR_ALPHABET)


def ends_in_two_dfa():
    """DFA accepting binary words whose last two symbols are equal.

    B and D remember a single trailing 0 or 1, C and E remember two equal
    trailing symbols; C and E accept.
    """
    edges = [
        ("A", "B", "0", 1), ("A", "D", "1", 1),
        ("B", "C", "0", 1), ("B", "D", "1", 1),
        ("C", "C", "0", 1), ("C", "D", "1", 1),
        ("D", "B", "0", 1), ("D", "E", "1", 1),
        ("E", "B", "0", 1), ("E", "E", "1", 1),
    ]
    return WeightedAutomaton.from_edges(
        "ABCDE", edges, initial={"A": 1}, final={"C": 1, "E": 1},
        symbols=SPIN_KETS, alphabet=("0", "1"))


def cat_automaton():
    """All up plus all down: two disconnected loops, both initial and final."""
    return WeightedAutomaton.from_edges(
        ["A", "B"], [("A", "A", "0", 1), ("B", "B", "1", 1)],
        initial={"A": 1, "B": 1}, final={"A": 1, "B": 1},
        symbols=SPIN_KETS, alphabet=("0", "1"))


def transverse_field_ising(g=1.0, coupling=1.0):
    """H = -coupling * sum X_k X_{k+1} - g * sum Z_k as a five-state automaton."""
    return direct_sum(scale(neighbor_coupling_automaton(), -coupling),
                      scale(field_automaton(), -g))


def corpus():
    """The automata every equivalence check runs over, keyed by name."""
    return {
        "w": w_automaton(),
        "neighbor": neighbor_automaton(),
        "neighbor_coupling": neighbor_coupling_automaton(),
        "field": field_automaton(),
        "ends_in_two": ends_in_two_dfa(),
        "cat": cat_automaton(),
    }
