"""
Signaling agents on rectangular grids.

An agent is the 2D analog of an automaton transition function.  Every
vertex receives one signal from above and one from the left, reads the
symbol at its site and emits one signal to the right and one downwards,
with a complex weight.  Top and left boundary channels carry the initial
signal; bottom and right boundary channels must end in an accepted final
signal.  The value of a symbol grid is the sum over all consistent signal
assignments of the product of transition weights.

Compiling an agent yields one rank-6 tensor per vertex with labels
``(up, left, down, right, row, col)``; the last two are the physical
operator indices.  Vertex coordinates are 1-based ``(r, c)`` (row, column)
everywhere except in :class:`GridEnvironment`, which follows the
column-first ``(i, j)`` convention of its recursion.
"""
from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.sparse as sp

from .automaton import SymbolTable, WeightedAutomaton
from .errors import RangeError, ShapeError, SizeError, SymbolError
from .library import PAULI
from .tensor_core import Tensor, contract_shared

__all__ = [
    "Transition",
    "SignalingAgent",
    "GridOperator",
    "four_x_agent",
    "identity_agent",
    "compile_grid",
    "grid_weight",
    "enumerate_grid",
    "brute_force_weight",
    "square_placements",
    "dense_grid_operator",
    "sparse_grid_operator",
    "env2d",
    "GridEnvironment",
    "full_contraction",
    "snake_automaton_four_x",
]

GRID_LABELS = ("up", "left", "down", "right", "row", "col")
MAX_DENSE_GRID_SITES = 10
MAX_SPARSE_GRID_SITES = 16
MAX_ENV_SITES = 16

FOUR_X_SIGNALS = ("Exterior", "BoundaryWithX", "Boundary", "InteriorWithX", "Interior")
FOUR_X_SYMBOLS = SymbolTable.operators({"I": PAULI["I"], "X": PAULI["X"]})


@dataclass(frozen=True)
class Transition:
    up: str
    left: str
    symbol: str
    right: str
    down: str
    weight: complex = 1.0


class SignalingAgent:
    """Transition table over named signals.

    ``corner_final_signals`` optionally replaces ``final_signals`` on the two
    channels leaving the bottom-right vertex; by default the corner is
    treated like any other boundary vertex.
    """

    def __init__(self, signal_names, transitions, symbols, initial_signal,
                 final_signals, corner_final_signals=None):
        self.signal_names = tuple(signal_names)
        if len(set(self.signal_names)) != len(self.signal_names):
            raise ValueError(f"duplicate signal names in {self.signal_names}")
        self.symbols = symbols
        self.transitions = tuple(transitions)
        known = set(self.signal_names)
        for t in self.transitions:
            for s in (t.up, t.left, t.right, t.down):
                if s not in known:
                    raise ValueError(f"undefined signal {s!r} in transition {t}")
            if t.symbol not in symbols:
                raise SymbolError(f"symbol {t.symbol!r} is not in the symbol table")
            if t.weight == 0:
                raise ValueError(f"zero weight in transition {t}")
        keys = [(t.up, t.left, t.symbol, t.right, t.down) for t in self.transitions]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate transitions")
        for s in (initial_signal, *final_signals, *(corner_final_signals or ())):
            if s not in known:
                raise ValueError(f"undefined signal {s!r}")
        self.initial_signal = initial_signal
        self.final_signals = frozenset(final_signals)
        self.corner_final_signals = (None if corner_final_signals is None
                                     else frozenset(corner_final_signals))

    @property
    def n_signals(self):
        return len(self.signal_names)

    @property
    def alphabet(self):
        return self.symbols.names

    def index(self, signal):
        return self.signal_names.index(signal)

    def weight_tensor(self):
        """Rank-5 array indexed (up, left, symbol, right, down)."""
        s = self.n_signals
        w = np.zeros((s, s, len(self.alphabet), s, s), dtype=complex)
        for t in self.transitions:
            w[self.index(t.up), self.index(t.left), self.alphabet.index(t.symbol),
              self.index(t.right), self.index(t.down)] += t.weight
        return w

    def operator_tensor(self):
        """Rank-6 array (up, left, down, right, row, col) before boundary conditions."""
        w = self.weight_tensor()
        phys = np.array([self.symbols[a] for a in self.alphabet])
        return np.einsum("ulard,apq->uldrpq", w, phys)

    def _vector(self, names):
        v = np.zeros(self.n_signals)
        for n in names:
            v[self.index(n)] = 1
        return v

    def initial_vector(self):
        return self._vector([self.initial_signal])

    def final_vector(self, corner=False):
        if corner and self.corner_final_signals is not None:
            return self._vector(self.corner_final_signals)
        return self._vector(self.final_signals)

    def same_as(self, other):
        return (self.signal_names == other.signal_names
                and set(self.transitions) == set(other.transitions)
                and self.symbols.same_as(other.symbols)
                and self.initial_signal == other.initial_signal
                and self.final_signals == other.final_signals
                and self.corner_final_signals == other.corner_final_signals)


def four_x_agent(reject_vacuum=True):
    """Agent accepting a single 2x2 block of X on an otherwise identity grid.

    Every accepted grid floods the region below and right of the block with
    ``Interior``, so the bottom-right vertex always emits ``Interior``.  With
    ``reject_vacuum`` that vertex must do so, which removes the all-identity
    grid (pure ``Exterior``) from the accepted set.
    """
    E, BX, B, IX, IN = FOUR_X_SIGNALS
    rows = [
        (E, E, "I", E, E),
        (E, E, "X", BX, BX),
        (BX, E, "X", IX, B),
        (E, BX, "X", B, IX),
        (E, B, "I", B, IN),
        (B, E, "I", IN, B),
        (IX, IX, "X", IN, IN),
        (IN, IN, "I", IN, IN),
    ]
    return SignalingAgent(
        FOUR_X_SIGNALS, [Transition(*r) for r in rows], FOUR_X_SYMBOLS,
        initial_signal=E, final_signals={E, B, IN},
        corner_final_signals={IN} if reject_vacuum else None)


def identity_agent(symbols=None, symbol="I", weight=1.0):
    """One signal and one transition: every site must carry ``symbol``."""
    symbols = symbols or SymbolTable.operators({"I": PAULI["I"]})
    return SignalingAgent(("S",), [Transition("S", "S", symbol, "S", "S", weight)],
                          symbols, "S", {"S"})


class GridOperator:
    """Rank-6 vertex tensors of a compiled agent, plus their symbolic weights.

    ``weights[(r, c)]`` is indexed ``(up, left, down, right, symbol)`` with the
    boundary conditions already absorbed, so boundary channels have extent 1.
    """

    def __init__(self, rows, cols, weights, symbols, alphabet, n_signals=None):
        if rows < 1 or cols < 1:
            raise SizeError(f"grid must be at least 1x1, got {rows}x{cols}")
        self.rows = rows
        self.cols = cols
        self.weights = dict(weights)
        self.symbols = symbols
        self.alphabet = tuple(alphabet)
        self.n_signals = n_signals
        phys = np.array([symbols[a] for a in self.alphabet])
        self.tensors = {
            rc: Tensor(GRID_LABELS, np.einsum("uldra,apq->uldrpq", w, phys))
            for rc, w in self.weights.items()
        }
        self._check_bonds()

    def _check_bonds(self):
        for (r, c), w in self.weights.items():
            if c < self.cols and w.shape[3] != self.weights[(r, c + 1)].shape[1]:
                raise ShapeError(f"horizontal channel mismatch at {(r, c)}")
            if r < self.rows and w.shape[2] != self.weights[(r + 1, c)].shape[0]:
                raise ShapeError(f"vertical channel mismatch at {(r, c)}")

    @property
    def d(self):
        return self.symbols.d

    @property
    def n_sites(self):
        return self.rows * self.cols

    def tensor(self, r, c):
        return self.tensors[(r, c)]

    def scaled(self, factor):
        return GridOperator(self.rows, self.cols,
                            {rc: factor * w if rc == (1, 1) else w for rc, w in self.weights.items()},
                            self.symbols, self.alphabet, self.n_signals)


def compile_grid(agent, rows, cols):
    """One vertex tensor per site with the boundary conditions folded in."""
    if rows < 1 or cols < 1:
        raise SizeError(f"grid must be at least 1x1, got {rows}x{cols}")
    base = np.moveaxis(agent.weight_tensor(), 2, 4)  # (up, left, right, down, symbol)
    base = np.swapaxes(base, 2, 3)  # (up, left, down, right, symbol)
    start = agent.initial_vector()
    weights = {}
    for r in range(1, rows + 1):
        for c in range(1, cols + 1):
            w = base
            corner = (r, c) == (rows, cols)
            if r == 1:
                w = np.einsum("u,uldra->ldra", start, w)[None]
            if c == 1:
                w = np.einsum("l,uldra->udra", start, w)[:, None]
            if r == rows:
                w = np.einsum("uldra,d->ulra", w, agent.final_vector(corner))[:, :, None]
            if c == cols:
                w = np.einsum("uldra,r->ulda", w, agent.final_vector(corner))[:, :, :, None]
            weights[(r, c)] = w
    return GridOperator(rows, cols, weights, agent.symbols, agent.alphabet, agent.n_signals)


def _config_indices(g, config):
    grid = [list(row) for row in config]
    if len(grid) != g.rows or any(len(row) != g.cols for row in grid):
        shape = (len(grid), len(grid[0]) if grid else 0)
        raise ShapeError(f"configuration is {shape[0]}x{shape[1]}, grid is {g.rows}x{g.cols}")
    try:
        return [[g.alphabet.index(s) for s in row] for row in grid]
    except ValueError as exc:
        raise SymbolError(f"unknown symbol in configuration: {exc}") from None


class _Frontier:
    """Row-major sweep state: the open down channels of the processed part
    of the grid plus the open horizontal channel of the current row.

    The array has one axis per column followed by one horizontal axis.
    """

    def __init__(self, g):
        self.g = g
        self.array = np.ones((1,) * (g.cols + 1), dtype=complex)

    @staticmethod
    def step(g, array, r, c, sym_index):
        w = g.weights[(r, c)][..., sym_index]  # (up, left, down, right)
        if c == 1:
            # new row: the horizontal axis has extent 1 from the last row's close
            array = array.reshape(array.shape[:-1] + (1,))
        # contract up with column axis c-1 and left with the horizontal axis
        out = np.tensordot(array, w, axes=([c - 1, g.cols], [0, 1]))
        # out axes: other columns (in order), down, right
        out = np.moveaxis(out, -2, c - 1)
        if c == g.cols:
            out = out.sum(axis=-1, keepdims=True)
        return out


def grid_weight(g, config):
    """Value of a symbol grid: the contracted network with all symbols fixed.

    ``config`` is a sequence of rows; a row is a string of one-character
    symbols or a sequence of symbol names.
    """
    idx = _config_indices(g, config)
    array = _Frontier(g).array
    for r in range(1, g.rows + 1):
        for c in range(1, g.cols + 1):
            array = _Frontier.step(g, array, r, c, idx[r - 1][c - 1])
    return complex(array.sum())


def enumerate_grid(g, prune=True):
    """Yield ``(config, weight)`` for every symbol grid with nonzero weight.

    Grids are explored depth-first in row-major order so that prefixes share
    their partial contractions.  With ``prune`` a branch is dropped as soon
    as its partial contraction vanishes; without it all ``|alphabet|^(rows*cols)``
    grids are evaluated.
    """
    n_sym = len(g.alphabet)
    sites = [(r, c) for r in range(1, g.rows + 1) for c in range(1, g.cols + 1)]

    def walk(pos, array, prefix):
        if pos == len(sites):
            value = complex(array.sum())
            if value != 0:
                rows = [tuple(g.alphabet[k] for k in prefix[i * g.cols:(i + 1) * g.cols])
                        for i in range(g.rows)]
                yield tuple(rows), value
            return
        r, c = sites[pos]
        for k in range(n_sym):
            nxt = _Frontier.step(g, array, r, c, k)
            if prune and not np.any(nxt):
                continue
            yield from walk(pos + 1, nxt, prefix + [k])

    yield from walk(0, _Frontier(g).array, [])


def brute_force_weight(agent, config):
    """Reference value of a symbol grid straight from the transition table.

    Visits vertices in row-major order and branches over every transition
    matching the already-fixed up and left signals, checking boundary
    signals at the end.  No tensors are involved.
    """
    grid = [list(row) for row in config]
    rows, cols = len(grid), len(grid[0])
    by_input = {}
    for t in agent.transitions:
        by_input.setdefault((t.up, t.left, t.symbol), []).append(t)
    finals, corner = agent.final_signals, agent.corner_final_signals or agent.final_signals

    def accepted(r, c, signal):
        return signal in (corner if (r, c) == (rows - 1, cols - 1) else finals)

    def go(pos, down_signals, left_signal):
        if pos == rows * cols:
            return 1.0
        r, c = divmod(pos, cols)
        up = down_signals[c]
        left = agent.initial_signal if c == 0 else left_signal
        total = 0.0
        for t in by_input.get((up, left, grid[r][c]), ()):
            if r == rows - 1 and not accepted(r, c, t.down):
                continue
            if c == cols - 1 and not accepted(r, c, t.right):
                continue
            nxt = down_signals[:c] + (t.down,) + down_signals[c + 1:]
            total += t.weight * go(pos + 1, nxt, t.right)
        return total

    return complex(go(0, (agent.initial_signal,) * cols, agent.initial_signal))


def square_placements(rows, cols, size=2, fill="X", background="I"):
    """Every grid holding one ``size x size`` block of ``fill``; independent of agents."""
    out = []
    for r0 in range(rows - size + 1):
        for c0 in range(cols - size + 1):
            out.append(tuple(
                tuple(fill if (r0 <= r < r0 + size and c0 <= c < c0 + size) else background
                      for c in range(cols))
                for r in range(rows)))
    return out


def _config_operator(g, config, kron):
    mats = [g.symbols[s] for row in config for s in row]
    return reduce(kron, mats)


def dense_grid_operator(g):
    """sum_config grid_weight(config) * (x) local operators, as a dense matrix."""
    if g.n_sites > MAX_DENSE_GRID_SITES:
        raise SizeError(f"dense_grid_operator limited to {MAX_DENSE_GRID_SITES} sites")
    dim = g.d ** g.n_sites
    total = np.zeros((dim, dim), dtype=complex)
    for config, value in enumerate_grid(g):
        total += value * _config_operator(g, config, np.kron)
    return total


def sparse_grid_operator(g):
    """Sparse (CSR) form of the grid operator, for up to 16 sites."""
    if g.n_sites > MAX_SPARSE_GRID_SITES:
        raise SizeError(f"sparse_grid_operator limited to {MAX_SPARSE_GRID_SITES} sites")
    dim = g.d ** g.n_sites
    total = sp.csr_matrix((dim, dim), dtype=complex)

    def kron(a, b):
        return sp.kron(sp.csr_matrix(a), sp.csr_matrix(b), format="csr")

    for config, value in enumerate_grid(g):
        total = total + value * _config_operator(g, config, kron)
    total.eliminate_zeros()
    return total


def _h(c, r):
    # horizontal channel leaving vertex (row r, column c) to the right
    return f"h{c}.{r}"


def _v(c, r):
    # vertical channel leaving vertex (row r, column c) downwards
    return f"v{c}.{r}"


def _site_operator(g, i, j):
    """Operator tensor of vertex (column i, row j) with channel labels."""
    t = g.tensor(j, i)
    return t.relabel({"up": _v(i, j - 1), "left": _h(i - 1, j),
                      "down": _v(i, j), "right": _h(i, j)})


def _ones(labels):
    return Tensor(labels, np.ones((1,) * len(labels)))


class GridEnvironment:
    """Cached local quadratic forms ``O_{i,j}`` of ``<bra|G|ket>`` for product states.

    Indices follow the recursion: ``i`` is the column (1..cols) and ``j``
    the row (1..rows).  ``bra`` and ``ket`` map ``(i, j)`` to length-``d``
    site vectors.  The cached families are

    * ``E[i,j]``: transfer tensor of one vertex,
    * ``A[i,j]``: column ``i`` above row ``j``, ``A[i,1] = I``,
    * ``B[i,j]``: column ``i`` below row ``j``, ``B[i,rows] = I``,
    * ``C[i,j] = A[i,j] E[i,j] B[i,j]``: the whole of column ``i``,
    * ``L[i,j] = L[i-1,j] C[i-1,j]``, ``L[1,j] = I``,
    * ``R[i,j] = R[i+1,j] C[i+1,j]``, ``R[cols,j] = I``,

    and ``computed`` counts how many entries of each family were built.
    """

    FAMILIES = ("E", "A", "B", "C", "L", "R")

    def __init__(self, g, bra, ket, caching=True):
        if g.n_sites > MAX_ENV_SITES:
            raise SizeError(f"exact 2D contraction limited to {MAX_ENV_SITES} sites")
        self.g = g
        self.caching = caching
        self.bra = {}
        self.ket = {}
        for i in range(1, g.cols + 1):
            for j in range(1, g.rows + 1):
                self.bra[(i, j)] = self._vec(bra[(i, j)])
                self.ket[(i, j)] = self._vec(ket[(i, j)])
        self.cache = {f: {} for f in self.FAMILIES}
        self.computed = {f: 0 for f in self.FAMILIES}

    def _vec(self, v):
        v = np.asarray(v, dtype=complex).reshape(-1)
        if v.shape != (self.g.d,):
            raise ShapeError(f"site vector of length {v.shape[0]}, expected {self.g.d}")
        return v

    def _check(self, i, j):
        if not (1 <= i <= self.g.cols and 1 <= j <= self.g.rows):
            raise RangeError(f"site {(i, j)} outside the {self.g.rows}x{self.g.cols} grid")

    def reset_counters(self):
        self.computed = {f: 0 for f in self.FAMILIES}

    def _get(self, family, key, build):
        table = self.cache[family]
        if self.caching and key in table:
            return table[key]
        value = build()
        self.computed[family] += 1
        if self.caching:
            table[key] = value
        return value

    def E(self, i, j):
        def build():
            op = _site_operator(self.g, i, j)
            b = Tensor(("row",), self.bra[(i, j)].conj())
            k = Tensor(("col",), self.ket[(i, j)])
            return contract_shared(contract_shared(b, op), k)
        return self._get("E", (i, j), build)

    def A(self, i, j):
        if j == 1:
            return _ones([_v(i, 0)])
        return self._get("A", (i, j), lambda: contract_shared(self.A(i, j - 1), self.E(i, j - 1)))

    def B(self, i, j):
        if j == self.g.rows:
            return _ones([_v(i, self.g.rows)])
        return self._get("B", (i, j), lambda: contract_shared(self.E(i, j + 1), self.B(i, j + 1)))

    def C(self, i, j):
        return self._get("C", (i, j), lambda: contract_shared(
            contract_shared(self.A(i, j), self.E(i, j)), self.B(i, j)))

    def L(self, i, j):
        if i == 1:
            return _ones([_h(0, r) for r in range(1, self.g.rows + 1)])
        return self._get("L", (i, j), lambda: contract_shared(self.L(i - 1, j), self.C(i - 1, j)))

    def R(self, i, j):
        if i == self.g.cols:
            return _ones([_h(self.g.cols, r) for r in range(1, self.g.rows + 1)])
        return self._get("R", (i, j), lambda: contract_shared(self.C(i + 1, j), self.R(i + 1, j)))

    def local(self, i, j):
        """O_{i,j} contracted with the site operator: a (row, col) matrix ``M``
        with ``conj(bra_ij) . M . ket_ij == <bra|G|ket>``."""
        self._check(i, j)
        t = contract_shared(self.L(i, j), self.A(i, j))
        t = contract_shared(t, _site_operator(self.g, i, j))
        t = contract_shared(t, self.B(i, j))
        t = contract_shared(t, self.R(i, j))
        return t.transpose(("row", "col")).data

    def prepare_row(self, j):
        """Initial environments for a left-to-right pass along row ``j``."""
        for i in range(1, self.g.cols + 1):
            self.R(i, j)
        self.L(1, j)

    def update_site(self, i, j, bra=None, ket=None):
        """Replace site vectors at (i, j) and drop every cached entry that depends on them."""
        self._check(i, j)
        if bra is not None:
            self.bra[(i, j)] = self._vec(bra)
        if ket is not None:
            self.ket[(i, j)] = self._vec(ket)
        stale = {
            "E": lambda k: k == (i, j),
            "A": lambda k: k[0] == i and k[1] > j,
            "B": lambda k: k[0] == i and k[1] < j,
            "C": lambda k: k[0] == i,
            "L": lambda k: k[0] > i,
            "R": lambda k: k[0] < i,
        }
        for family, test in stale.items():
            self.cache[family] = {k: v for k, v in self.cache[family].items() if not test(k)}

    def expectation(self):
        """<bra|G|ket> from the cached column transfers."""
        t = self.L(self.g.cols, 1)
        t = contract_shared(t, self.C(self.g.cols, 1))
        return complex(t.data.sum())


def env2d(g, bra, ket, i, j):
    """Local (row, col) matrix at column ``i``, row ``j`` from a fresh
    :class:`GridEnvironment`.  Reuse one environment object to benefit
    from caching across sites."""
    return GridEnvironment(g, bra, ket).local(i, j)


def full_contraction(g, bra, ket, site=None):
    """Contract ``<bra|G|ket>`` from scratch, vertex by vertex in row-major order.

    With ``site = (i, j)`` (column, row) that vertex keeps its physical
    indices open and the result is the local (row, col) matrix.
    """
    if g.n_sites > MAX_ENV_SITES:
        raise SizeError(f"exact 2D contraction limited to {MAX_ENV_SITES} sites")
    t = None
    for j in range(1, g.rows + 1):
        for i in range(1, g.cols + 1):
            op = _site_operator(g, i, j)
            if (i, j) != site:
                b = Tensor(("row",), np.conj(np.asarray(bra[(i, j)], dtype=complex)))
                k = Tensor(("col",), np.asarray(ket[(i, j)], dtype=complex))
                op = contract_shared(contract_shared(b, op), k)
            t = op if t is None else contract_shared(t, op)
    keep = ("row", "col") if site is not None else ()
    boundary = [l for l in t.labels if l not in keep]
    data = t.transpose(tuple(boundary) + keep).data
    data = data.reshape((-1,) + data.shape[len(boundary):]).sum(axis=0)
    return data if site is not None else complex(data)


def snake_automaton_four_x(cols):
    """1D automaton on the row-major ordering of a grid with ``cols`` columns
    accepting exactly the grids holding one 2x2 block of X.

    Before the block the automaton tracks the current column so that a block
    cannot start in the last column; after the top half of the block it
    counts the ``cols - 2`` identity sites separating it from the bottom
    half.  The state count is ``2 * cols + 2``.
    """
    if cols < 2:
        raise SizeError(f"need at least 2 columns, got {cols}")
    pre = [f"pre{k}" for k in range(cols)]
    gap = [f"gap{k}" for k in range(cols - 1)]
    edges = []
    for k in range(cols):
        edges.append((pre[k], pre[(k + 1) % cols], "I", 1))
        if k < cols - 1:
            edges.append((pre[k], "top", "X", 1))
    edges.append(("top", gap[0], "X", 1))
    edges += [(a, b, "I", 1) for a, b in zip(gap, gap[1:])]
    edges.append((gap[-1], "bottom", "X", 1))
    edges.append(("bottom", "done", "X", 1))
    edges.append(("done", "done", "I", 1))
    states = pre + ["top"] + gap + ["bottom", "done"]
    return WeightedAutomaton.from_edges(
        states, edges, initial={pre[0]: 1}, final={"done": 1},
        symbols=FOUR_X_SYMBOLS, alphabet=("I", "X"))
