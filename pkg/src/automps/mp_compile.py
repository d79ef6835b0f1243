"""
Compile weighted automata into matrix product states and operators.

Unrolling makes one copy of the automaton's states per site.  Site ``k``
gets the tensor ``sum_a W[a] (x) phys(a)`` where ``phys(a)`` is the ket or
matrix of symbol ``a``; on open chains the initial distribution is folded
into site 1 and the final distribution into site N, so the end bonds have
extent 1.  Operator chains keep the per-symbol blocks so that single sites
can be edited later at the symbol level.
"""
from dataclasses import dataclass

import numpy as np

from .automaton import OPERATOR
from .errors import EditError, RangeError, SizeError
from .mp_state import OPEN, PERIODIC, MatrixProductOperator, MatrixProductState
from .tensor_core import Tensor

__all__ = ["SiteBlocks", "OperatorPattern", "unroll", "unroll_periodic", "edit_site"]

INITIAL = "<initial>"
FINAL = "<final>"


@dataclass(frozen=True)
class SiteBlocks:
    """Symbolic content of one site: for each symbol, its bond-space weight matrix."""

    left_states: tuple
    right_states: tuple
    blocks: dict


@dataclass(frozen=True)
class OperatorPattern:
    symbols: object
    sites: tuple


def _site_blocks(a, n_sites, periodic):
    states = tuple(a.states)
    out = []
    for k in range(n_sites):
        blocks = {}
        for sym in a.alphabet:
            w = a.weights[sym]
            if not periodic:
                if k == 0:
                    w = a.initial[None, :] @ w
                if k == n_sites - 1:
                    w = w @ a.final[:, None]
            blocks[sym] = np.array(w)
        left = (INITIAL,) if (k == 0 and not periodic) else states
        right = (FINAL,) if (k == n_sites - 1 and not periodic) else states
        out.append(SiteBlocks(left, right, blocks))
    return out


def _realize(site_blocks, symbols):
    """Dense site tensor from symbolic blocks."""
    labels = ("left", "phys", "right") if symbols.kind != OPERATOR else ("left", "row", "col", "right")
    first = next(iter(site_blocks.blocks.values()))
    shape = first.shape[:1] + (symbols.d,) * (len(labels) - 2) + first.shape[1:]
    data = np.zeros(shape, dtype=complex)
    for sym, w in site_blocks.blocks.items():
        phys = symbols[sym]
        if symbols.kind == OPERATOR:
            data += np.einsum("lr,pq->lpqr", w, phys)
        else:
            data += np.einsum("lr,p->lpr", w, phys)
    return Tensor(labels, data)


def _compile(a, n_sites, periodic):
    if n_sites < 1:
        raise SizeError(f"need at least one site, got {n_sites}")
    blocks = _site_blocks(a, n_sites, periodic)
    sites = [_realize(b, a.symbols) for b in blocks]
    boundary = PERIODIC if periodic else OPEN
    if a.kind == OPERATOR:
        return MatrixProductOperator(sites, boundary, OperatorPattern(a.symbols, tuple(blocks)))
    return MatrixProductState(sites, boundary)


def unroll(a, n_sites):
    """Open-chain MPS (state automaton) or MPO (operator automaton) of ``n_sites`` sites."""
    return _compile(a, n_sites, periodic=False)


def unroll_periodic(a, n_sites):
    """Periodic chain whose amplitudes are the trace evaluations of ``a``."""
    return _compile(a, n_sites, periodic=True)


def edit_site(m, site, from_symbol, to_symbol, edges=None):
    """Re-realize the ``from_symbol`` edges at one site with ``to_symbol``.

    ``edges`` optionally restricts the edit to transitions given as
    ``(source_state, target_state)`` name pairs; by default every edge
    labelled ``from_symbol`` at that site is changed.  Bond structure and
    all other sites are untouched.
    """
    if getattr(m, "pattern", None) is None:
        raise EditError("operator carries no symbolic pattern; compile it from an automaton")
    pattern = m.pattern
    if not 1 <= site <= len(pattern.sites):
        raise RangeError(f"site {site} outside 1..{len(pattern.sites)}")
    for sym in (from_symbol, to_symbol):
        if sym not in pattern.symbols:
            raise EditError(f"symbol {sym!r} is not in the symbol table")
    sb = pattern.sites[site - 1]
    src = sb.blocks.get(from_symbol)
    if src is None or not np.any(src):
        raise EditError(f"no {from_symbol!r} edge at site {site}")

    mask = np.ones(src.shape, dtype=bool)
    if edges is not None:
        mask[:] = False
        for s_from, s_to in edges:
            try:
                i = sb.left_states.index(s_from)
                j = sb.right_states.index(s_to)
            except ValueError:
                raise EditError(f"no bond state pair {(s_from, s_to)} at site {site}") from None
            mask[i, j] = True
        if not np.any(src[mask]):
            raise EditError(f"none of the selected edges at site {site} carries {from_symbol!r}")
    if from_symbol == to_symbol:
        return m

    moved = np.where(mask, src, 0)
    blocks = dict(sb.blocks)
    blocks[from_symbol] = src - moved
    blocks[to_symbol] = blocks.get(to_symbol, np.zeros_like(src)) + moved
    new_sb = SiteBlocks(sb.left_states, sb.right_states, blocks)
    sites = list(m.sites)
    sites[site - 1] = _realize(new_sb, pattern.symbols)
    new_sites = tuple(pattern.sites[:site - 1]) + (new_sb,) + tuple(pattern.sites[site:])
    return MatrixProductOperator(sites, m.boundary, OperatorPattern(pattern.symbols, new_sites))
