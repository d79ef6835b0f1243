"""
Complex-weighted finite automata.

An automaton is the 5-tuple (Q, Sigma, W, alpha, Omega) together with a
:class:`SymbolTable` that says what each alphabet symbol stands for
physically: a ket (for states) or a d x d matrix (for operators).  The value
assigned to a word a_1 ... a_N is ``alpha . W[a_1] ... W[a_N] . Omega``.
"""
from dataclasses import dataclass

import numpy as np

from .complexfmt import format_complex
from .errors import CompositionError, SymbolError

__all__ = [
    "SymbolTable",
    "WeightedAutomaton",
    "evaluate",
    "evaluate_periodic",
    "direct_sum",
    "scale",
    "is_deterministic",
    "to_dot",
    "pattern_state",
]

STATE = "state"
OPERATOR = "operator"


@dataclass(frozen=True, eq=False)
class SymbolTable:
    """Physical realization of alphabet symbols.

    ``entries`` maps a symbol name to a length-``d`` ket when ``kind`` is
    ``"state"`` and to a ``d x d`` matrix when ``kind`` is ``"operator"``.
    """

    kind: str
    d: int
    entries: dict

    def __post_init__(self):
        if self.kind not in (STATE, OPERATOR):
            raise ValueError(f"unknown symbol table kind {self.kind!r}")
        shape = (self.d,) if self.kind == STATE else (self.d, self.d)
        fixed = {}
        for name, value in self.entries.items():
            arr = np.array(value, dtype=complex)
            if arr.shape != shape:
                raise ValueError(f"symbol {name!r} has shape {arr.shape}, expected {shape}")
            arr.flags.writeable = False
            fixed[name] = arr
        object.__setattr__(self, "entries", fixed)

    @classmethod
    def states(cls, entries):
        d = len(next(iter(entries.values())))
        return cls(STATE, d, entries)

    @classmethod
    def operators(cls, entries):
        d = len(next(iter(entries.values())))
        return cls(OPERATOR, d, entries)

    @property
    def names(self):
        return tuple(self.entries)

    def __contains__(self, name):
        return name in self.entries

    def __getitem__(self, name):
        try:
            return self.entries[name]
        except KeyError:
            raise SymbolError(f"symbol {name!r} is not in the symbol table") from None

    def same_as(self, other):
        if self.kind != other.kind or self.d != other.d or set(self.entries) != set(other.entries):
            return False
        return all(np.array_equal(v, other.entries[k]) for k, v in self.entries.items())


class WeightedAutomaton:
    """The 5-tuple (Q, Sigma, W, alpha, Omega) plus a symbol table.

    ``weights[a]`` is the |Q| x |Q| matrix whose (p, q) entry is the weight
    of the transition p --a--> q.
    """

    def __init__(self, states, alphabet, weights, initial, final, symbols):
        self.states = tuple(states)
        self.alphabet = tuple(alphabet)
        nq = len(self.states)
        if nq < 1:
            raise ValueError("an automaton needs at least one state")
        if len(set(self.states)) != nq:
            raise ValueError(f"duplicate state names in {self.states}")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError(f"duplicate symbols in {self.alphabet}")
        self.weights = {}
        for a in self.alphabet:
            if a not in weights:
                raise SymbolError(f"no weight matrix for symbol {a!r}")
            if a not in symbols:
                raise SymbolError(f"symbol {a!r} has no entry in the symbol table")
            w = np.array(weights[a], dtype=complex)
            if w.shape != (nq, nq):
                raise ValueError(f"weight matrix for {a!r} has shape {w.shape}, expected {(nq, nq)}")
            w.flags.writeable = False
            self.weights[a] = w
        extra = set(weights) - set(self.alphabet)
        if extra:
            raise SymbolError(f"weight matrices given for symbols outside the alphabet: {sorted(extra)}")
        self.initial = np.array(initial, dtype=complex).reshape(nq)
        self.final = np.array(final, dtype=complex).reshape(nq)
        self.initial.flags.writeable = False
        self.final.flags.writeable = False
        self.symbols = symbols

    @classmethod
    def from_edges(cls, states, edges, initial, final, symbols, alphabet=None):
        """Build from ``(source, target, symbol, weight)`` edge records.

        ``initial`` and ``final`` map state names to weights.  Parallel edges
        with the same symbol accumulate.
        """
        states = list(states)
        index = {s: i for i, s in enumerate(states)}
        if alphabet is None:
            alphabet = symbols.names
        nq = len(states)
        weights = {a: np.zeros((nq, nq), dtype=complex) for a in alphabet}
        for src, dst, sym, w in edges:
            if sym not in weights:
                raise SymbolError(f"edge symbol {sym!r} is not in the alphabet")
            weights[sym][index[src], index[dst]] += w
        alpha = np.zeros(nq, dtype=complex)
        omega = np.zeros(nq, dtype=complex)
        for s, w in initial.items():
            alpha[index[s]] += w
        for s, w in final.items():
            omega[index[s]] += w
        return cls(states, alphabet, weights, alpha, omega, symbols)

    @property
    def n_states(self):
        return len(self.states)

    @property
    def kind(self):
        return self.symbols.kind

    def edges(self):
        """Yield ``(source, target, symbol, weight)`` for every nonzero weight."""
        for i, src in enumerate(self.states):
            for j, dst in enumerate(self.states):
                for a in self.alphabet:
                    w = self.weights[a][i, j]
                    if w != 0:
                        yield src, dst, a, complex(w)

    def word(self, word):
        """Normalize ``word`` to a tuple of symbol names, checking each one."""
        if isinstance(word, str):
            word = tuple(word)
        word = tuple(word)
        for a in word:
            if a not in self.weights:
                raise SymbolError(f"symbol {a!r} is not in the alphabet {self.alphabet}")
        return word

    def __add__(self, other):
        return direct_sum(self, other)

    def __repr__(self):
        return (f"WeightedAutomaton(states={self.states}, alphabet={self.alphabet}, "
                f"kind={self.kind!r})")


def evaluate(a, word):
    """alpha . W[w_1] ... W[w_N] . Omega"""
    row = a.initial
    for sym in a.word(word):
        row = row @ a.weights[sym]
    return complex(row @ a.final)


def evaluate_periodic(a, word):
    """tr(W[w_1] ... W[w_N]); the initial and final distributions are ignored."""
    prod = np.eye(a.n_states, dtype=complex)
    for sym in a.word(word):
        prod = prod @ a.weights[sym]
    return complex(np.trace(prod))


def _disjoint_names(left, right):
    if not set(left) & set(right):
        return list(left), list(right)
    return [f"{s}.1" for s in left], [f"{s}.2" for s in right]


def direct_sum(a, b):
    """Automaton whose value on every word is the sum of the values of a and b."""
    if set(a.alphabet) != set(b.alphabet):
        raise CompositionError(f"alphabets differ: {a.alphabet} vs {b.alphabet}")
    if not a.symbols.same_as(b.symbols):
        raise CompositionError("symbol tables differ")
    na, nb = a.n_states, b.n_states
    weights = {}
    for sym in a.alphabet:
        w = np.zeros((na + nb, na + nb), dtype=complex)
        w[:na, :na] = a.weights[sym]
        w[na:, na:] = b.weights[sym]
        weights[sym] = w
    left, right = _disjoint_names(a.states, b.states)
    return WeightedAutomaton(
        left + right, a.alphabet, weights,
        np.concatenate([a.initial, b.initial]),
        np.concatenate([a.final, b.final]),
        a.symbols,
    )


def scale(a, c):
    """Multiply every output of ``a`` by ``c`` (only alpha is touched)."""
    return WeightedAutomaton(a.states, a.alphabet, a.weights, c * a.initial, a.final, a.symbols)


def _zero_one(arr):
    return bool(np.all((arr == 0) | (arr == 1)))


def is_deterministic(a):
    """True for a DFA: 0/1 entries, one nonzero per row of alpha and each W."""
    if not (_zero_one(a.initial) and _zero_one(a.final)):
        return False
    if np.count_nonzero(a.initial) != 1:
        return False
    for w in a.weights.values():
        if not _zero_one(w):
            return False
        if np.any(np.count_nonzero(w, axis=1) != 1):
            return False
    return True


def _quote(s):
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(a, name="wfa"):
    """GraphViz DOT text for the automaton.

    One node statement per state (final states drawn as double circles), one
    edge statement per nonzero weight labelled ``symbol/weight``, and one
    edge from an unlabelled point into each initial state.
    """
    lines = [f"digraph {_quote(name)} {{", "  rankdir=LR;", "  node [shape=circle];"]
    for q, w in zip(a.states, a.final):
        if w != 0:
            label = q if w == 1 else f"{q}\\n{format_complex(w, digits=6)}"
            lines.append(f"  {_quote(q)} [shape=doublecircle, label={_quote(label)}];")
        else:
            lines.append(f"  {_quote(q)};")
    lines.append('  node [shape=point, label=""];')
    for q, w in zip(a.states, a.initial):
        if w != 0:
            attrs = "" if w == 1 else f" [label={_quote(format_complex(w, digits=6))}]"
            lines.append(f"  {_quote('__start_' + q)} -> {_quote(q)}{attrs};")
    for src, dst, sym, w in a.edges():
        label = f"{sym}/{format_complex(w, digits=6)}"
        lines.append(f"  {_quote(src)} -> {_quote(dst)} [label={_quote(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def pattern_state(a):
    """Reinterpret ``a`` as a state automaton over its own alphabet.

    Each symbol becomes a computational basis ket of dimension |Sigma|, so
    the amplitudes of the compiled state are exactly the automaton's values.
    Used to compare operator automata word by word.
    """
    k = len(a.alphabet)
    kets = {sym: np.eye(k)[i] for i, sym in enumerate(a.alphabet)}
    return WeightedAutomaton(a.states, a.alphabet, a.weights, a.initial, a.final,
                             SymbolTable(STATE, k, kets))
