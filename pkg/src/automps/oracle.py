"""
Brute-force dense references.

Everything here is exponential in the system size on purpose: these are the
slow, obviously-correct paths the fast contractions are checked against.
Size guards are hard errors.
"""
import itertools
from functools import reduce

import numpy as np
import scipy.sparse as sp

from .automaton import OPERATOR, evaluate
from .errors import HermiticityError, SizeError
from .mp_state import PERIODIC

MAX_STATE_SITES = 16
MAX_DENSE_OPERATOR_SITES = 10
MAX_SPARSE_OPERATOR_SITES = 16
MAX_WORDS = 2 ** 20


def dense_state(s):
    """Full amplitude vector, row-major over configurations."""
    if s.n_sites > MAX_STATE_SITES:
        raise SizeError(f"dense_state limited to {MAX_STATE_SITES} sites")
    first = s.sites[0].data
    vec = np.einsum("wd,dpr->wpr", np.eye(first.shape[0]), first)
    for site in s.sites[1:]:
        vec = np.einsum("wcl,lpr->wcpr", vec, site.data)
        w, c, p, r = vec.shape
        vec = vec.reshape(w, c * p, r)
    if s.boundary == PERIODIC:
        return np.einsum("wcw->c", vec)
    return vec[0, :, 0]


def _operator_blocks(m, kron):
    blocks = None
    for site in m.sites:
        data = site.data  # (l, p, q, r)
        nl, _, _, nr = data.shape
        if blocks is None:
            # rows: wrap bond index, then open right bond
            blocks = {(w, r): kron(None, data[w, :, :, r]) for w in range(nl) for r in range(nr)}
            continue
        new = {}
        for (w, l), mat in blocks.items():
            for r in range(nr):
                local = data[l, :, :, r]
                if not np.any(local):
                    continue
                term = kron(mat, local)
                key = (w, r)
                new[key] = term if key not in new else new[key] + term
        blocks = new
    return blocks


def _assemble(m, kron, zero):
    blocks = _operator_blocks(m, kron)
    total = zero
    for (w, r), mat in blocks.items():
        if m.boundary == PERIODIC and w != r:
            continue
        total = total + mat
    return total


def dense_operator(m):
    """d^N x d^N matrix of an operator chain."""
    if m.n_sites > MAX_DENSE_OPERATOR_SITES:
        raise SizeError(f"dense_operator limited to {MAX_DENSE_OPERATOR_SITES} sites")
    dim = m.d ** m.n_sites

    def kron(a, b):
        return np.array(b, dtype=complex) if a is None else np.kron(a, b)

    return _assemble(m, kron, np.zeros((dim, dim), dtype=complex))


def sparse_operator(m):
    """Sparse (CSR) form of an operator chain, for up to 16 sites."""
    if m.n_sites > MAX_SPARSE_OPERATOR_SITES:
        raise SizeError(f"sparse_operator limited to {MAX_SPARSE_OPERATOR_SITES} sites")
    dim = m.d ** m.n_sites

    def kron(a, b):
        b = sp.csr_matrix(np.asarray(b, dtype=complex))
        return b if a is None else sp.kron(a, b, format="csr")

    total = _assemble(m, kron, sp.csr_matrix((dim, dim), dtype=complex))
    total.eliminate_zeros()
    return total


def kron_chain(mats):
    return reduce(np.kron, [np.asarray(x, dtype=complex) for x in mats])


def kron_sum(terms, symbols):
    """Sum of Kronecker products; each term is a word of symbol names,
    optionally paired with a coefficient: ``"XXII"`` or ``(c, "XXII")``."""
    total = None
    for term in terms:
        coeff, word = (1.0, term) if isinstance(term, str) else term
        mat = coeff * kron_chain([symbols[ch] for ch in word])
        total = mat if total is None else total + mat
    return total


def exact_ground(hdense, atol=1e-10):
    """Lowest eigenpair by full diagonalization."""
    h = np.asarray(hdense, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise HermiticityError(f"not a square matrix: {h.shape}")
    if not np.allclose(h, h.conj().T, atol=atol, rtol=0):
        raise HermiticityError("matrix is not Hermitian")
    w, v = np.linalg.eigh(h)
    return float(w[0]), v[:, 0]


def enumerate_words(a, n):
    """evaluate(a, w) for every word of length n, keyed by the word tuple."""
    if len(a.alphabet) ** n > MAX_WORDS:
        raise SizeError(f"{len(a.alphabet)}^{n} words exceeds the {MAX_WORDS} cap")
    return {w: evaluate(a, w) for w in itertools.product(a.alphabet, repeat=n)}


def automaton_dense(a, n):
    """sum_w evaluate(a, w) * phys(w_1) (x) ... (x) phys(w_n), by enumeration.

    A matrix for operator automata, a vector for state automata.
    """
    total = None
    for word, value in enumerate_words(a, n).items():
        if value == 0:
            continue
        term = value * kron_chain([a.symbols[s] for s in word])
        total = term if total is None else total + term
    if total is None:
        d = a.symbols.d
        shape = (d ** n, d ** n) if a.kind == OPERATOR else (d ** n,)
        total = np.zeros(shape, dtype=complex)
    return total
