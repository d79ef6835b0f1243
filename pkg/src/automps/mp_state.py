"""
Matrix product states and operators.

Site tensors of a state carry the labels ``("left", "phys", "right")``;
operator sites carry ``("left", "row", "col", "right")``.  Sites and bonds
are numbered from 1 as in the usual chain notation: bond ``k`` joins site
``k`` and site ``k + 1``.  States are not normalized.
"""
import numpy as np

from .errors import GaugeError, RangeError, ShapeError
from .tensor_core import ContractionStats, Tensor, contract

__all__ = [
    "MatrixProductState",
    "MatrixProductOperator",
    "amplitude",
    "inner",
    "transfer_matrix",
    "expectation",
    "apply_gauge",
    "compress_bond",
    "random_mps",
    "product_mps",
    "identity_mpo",
    "mpo_from_arrays",
    "mps_from_dense",
]

OPEN = "open"
PERIODIC = "periodic"

MPS_LABELS = ("left", "phys", "right")
MPO_LABELS = ("left", "row", "col", "right")
TRANSFER_LABELS = ("l_bra", "l_op", "l_ket", "r_bra", "r_op", "r_ket")


class _Chain:
    labels = ()

    def __init__(self, sites, boundary=OPEN):
        if boundary not in (OPEN, PERIODIC):
            raise ShapeError(f"unknown boundary {boundary!r}")
        sites = [s if isinstance(s, Tensor) else Tensor(self.labels, s) for s in sites]
        sites = [s.transpose(self.labels) for s in sites]
        if not sites:
            raise ShapeError("a chain needs at least one site")
        for k in range(len(sites) - 1):
            if sites[k].dim("right") != sites[k + 1].dim("left"):
                raise ShapeError(f"bond {k + 1} extents disagree: "
                                 f"{sites[k].dim('right')} vs {sites[k + 1].dim('left')}")
        if boundary == OPEN:
            if sites[0].dim("left") != 1 or sites[-1].dim("right") != 1:
                raise ShapeError("open chains need extent-1 end bonds")
        elif sites[0].dim("left") != sites[-1].dim("right"):
            raise ShapeError("periodic chain wrap bond extents disagree")
        self.sites = tuple(sites)
        self.boundary = boundary

    def __len__(self):
        return len(self.sites)

    @property
    def n_sites(self):
        return len(self.sites)

    @property
    def d(self):
        return self.sites[0].dims[1]

    def bond_extents(self):
        """Extents of bonds 0..N (bond 0 is the left end, bond N the right end)."""
        return [self.sites[0].dim("left")] + [s.dim("right") for s in self.sites]

    def site(self, k):
        if not 1 <= k <= self.n_sites:
            raise RangeError(f"site {k} outside 1..{self.n_sites}")
        return self.sites[k - 1]

    def replace_site(self, k, tensor):
        sites = list(self.sites)
        self.site(k)
        sites[k - 1] = tensor
        return self._rebuild(sites)

    def _rebuild(self, sites):
        return type(self)(sites, self.boundary)

    def conj(self):
        return self._rebuild([s.conj() for s in self.sites])


class MatrixProductState(_Chain):
    labels = MPS_LABELS

    def matrices(self, config):
        """The bond-space matrices selected by a configuration of physical indices."""
        config = _config(config)
        if len(config) != self.n_sites:
            raise ShapeError(f"configuration has {len(config)} letters for {self.n_sites} sites")
        mats = []
        for s, c in zip(self.sites, config):
            if not 0 <= c < s.dims[1]:
                raise ShapeError(f"letter {c} outside physical dimension {s.dims[1]}")
            mats.append(s.data[:, c, :])
        return mats


class MatrixProductOperator(_Chain):
    """Operator chain.  ``pattern`` optionally keeps the symbolic site blocks
    the operator was compiled from (see :mod:`automps.mp_compile`)."""

    labels = MPO_LABELS

    def __init__(self, sites, boundary=OPEN, pattern=None):
        super().__init__(sites, boundary)
        for s in self.sites:
            if s.dims[1] != s.dims[2]:
                raise ShapeError("operator row and column dimensions differ")
        self.pattern = pattern

    def _rebuild(self, sites):
        return type(self)(sites, self.boundary, None)


def _config(config):
    if isinstance(config, str):
        return [int(ch) for ch in config]
    return [int(c) for c in config]


def amplitude(s, config):
    """Amplitude of ``s`` on a configuration (a digit string or index sequence)."""
    mats = s.matrices(config)
    prod = mats[0]
    for m in mats[1:]:
        prod = prod @ m
    if s.boundary == PERIODIC:
        return complex(np.trace(prod))
    return complex(prod[0, 0])


def _check_pair(a, b):
    if a.n_sites != b.n_sites or a.d != b.d:
        raise ShapeError(f"chains differ: {a.n_sites} sites / d={a.d} vs {b.n_sites} / d={b.d}")
    if a.boundary != b.boundary:
        raise ShapeError("cannot mix open and periodic chains")


def _left_boundary(extents, periodic):
    """Starting environment: a scalar 1, or for periodic chains the identity on the wrap bonds."""
    if not periodic:
        return Tensor(("b", "o", "k"), np.ones((1, 1, 1)))
    eb, eo, ek = extents
    eye = np.einsum("ad,be,cf->abcdef", np.eye(eb), np.eye(eo), np.eye(ek))
    return Tensor(("wb", "wo", "wk", "b", "o", "k"), eye)


def _close(env, periodic):
    if not periodic:
        return complex(env.data.reshape(-1)[0])
    return complex(np.einsum("abcabc->", env.data))


def transfer_matrix(bra_site, op_site, ket_site, stats=None):
    """E = sum over physical indices of conj(bra) . op . ket.

    The result carries :data:`TRANSFER_LABELS`: the grouped left index
    (bra, op, ket) followed by the grouped right index in the same order.
    """
    b = bra_site.conj().relabel({"left": "l_bra", "phys": "p_bra", "right": "r_bra"})
    o = op_site.relabel({"left": "l_op", "right": "r_op"})
    k = ket_site.relabel({"left": "l_ket", "phys": "p_ket", "right": "r_ket"})
    t = contract(b, o, [("p_bra", "row")], stats=stats)
    t = contract(t, k, [("col", "p_ket")], stats=stats)
    return t.transpose(TRANSFER_LABELS)


def absorb_transfer(env, e, stats=None):
    """L . E: extend a left environment (labels b, o, k on the open side) by one site."""
    out = contract(env, e, [("b", "l_bra"), ("o", "l_op"), ("k", "l_ket")], stats=stats)
    return out.relabel({"r_bra": "b", "r_op": "o", "r_ket": "k"})


def expectation(bra, op, ket, stats=None):
    """<bra|op|ket> by forming the transfer matrix of every site and
    contracting them left to right; cost is linear in the chain length."""
    _check_pair(bra, ket)
    if op.n_sites != ket.n_sites or op.d != ket.d:
        raise ShapeError("operator and state sizes differ")
    if op.boundary != ket.boundary:
        raise ShapeError("cannot mix open and periodic chains")
    periodic = ket.boundary == PERIODIC
    wrap = (bra.sites[0].dim("left"), op.sites[0].dim("left"), ket.sites[0].dim("left"))
    env = _left_boundary(wrap, periodic)
    for b, o, k in zip(bra.sites, op.sites, ket.sites):
        env = absorb_transfer(env, transfer_matrix(b, o, k, stats=stats), stats=stats)
    return _close(env, periodic)


def identity_mpo(n, d=2, boundary=OPEN):
    site = np.eye(d).reshape(1, d, d, 1)
    return MatrixProductOperator([site] * n, boundary)


def inner(bra, ket, stats=None):
    """<bra|ket> in O(N): the expectation of the identity chain."""
    _check_pair(bra, ket)
    return expectation(bra, identity_mpo(ket.n_sites, ket.d, ket.boundary), ket, stats=stats)


def _interior_bond(s, bond):
    n = s.n_sites
    if not 1 <= bond <= n - 1:
        raise RangeError(f"bond {bond} is not an interior bond (1..{n - 1})")


def apply_gauge(s, bond, x, x_inv, atol=1e-10):
    """Insert ``x . x_inv`` on a bond: site ``bond`` absorbs ``x`` on its
    right, site ``bond + 1`` absorbs ``x_inv`` on its left.

    ``x`` may be rectangular (D x D') as long as ``x . x_inv`` is the D x D
    identity; the bond extent then becomes D'.
    """
    _interior_bond(s, bond)
    x = np.asarray(x, dtype=complex)
    x_inv = np.asarray(x_inv, dtype=complex)
    ext = s.sites[bond - 1].dim("right")
    if x.ndim != 2 or x_inv.ndim != 2 or x.shape[0] != ext or x_inv.shape != x.shape[::-1]:
        raise GaugeError(f"gauge shapes {x.shape}, {x_inv.shape} do not fit bond extent {ext}")
    if not np.allclose(x @ x_inv, np.eye(ext), atol=atol, rtol=0):
        raise GaugeError("x . x_inv is not the identity on the bond")
    left = s.sites[bond - 1]
    right = s.sites[bond]
    gx = Tensor(("right", "new"), x)
    gi = Tensor(("left", "new"), x_inv.T)
    new_left = contract(left, gx, [("right", "right")]).relabel({"new": "right"})
    new_right = contract(gi, right, [("left", "left")]).relabel({"new": "left"})
    sites = list(s.sites)
    sites[bond - 1] = new_left.transpose(s.labels)
    sites[bond] = new_right.transpose(s.labels)
    return s._rebuild(sites)


def compress_bond(s, bond, rel_tol=1e-12):
    """Merge the two sites around ``bond`` and split them again by SVD,
    keeping singular values strictly above ``rel_tol`` times the largest.

    The left site becomes an isometry; singular values go to the right.
    """
    _interior_bond(s, bond)
    if rel_tol < 0:
        raise ValueError("rel_tol must be nonnegative")
    left = s.sites[bond - 1].relabel({"phys": "p1"})
    right = s.sites[bond].relabel({"phys": "p2", "left": "mid_l", "right": "mid_r"})
    merged = contract(left, right, [("right", "mid_l")])
    m = merged.matrix(["left", "p1"], ["p2", "mid_r"])
    u, sv, vh = np.linalg.svd(m, full_matrices=False)
    smax = sv[0] if sv.size else 0.0
    keep = max(int(np.count_nonzero(sv > rel_tol * smax)), 1)
    u = u[:, :keep]
    sv_vh = sv[:keep, None] * vh[:keep]
    dl, d1 = left.dim("left"), left.dim("p1")
    d2, dr = right.dim("p2"), right.dim("mid_r")
    sites = list(s.sites)
    sites[bond - 1] = Tensor(MPS_LABELS, u.reshape(dl, d1, keep))
    sites[bond] = Tensor(MPS_LABELS, sv_vh.reshape(keep, d2, dr))
    return s._rebuild(sites)


def _capped_bonds(n, d, bond, boundary):
    if boundary == PERIODIC:
        return [bond] * (n + 1)
    return [min(bond, d ** k, d ** (n - k)) for k in range(n + 1)]


def random_mps(n, d=2, bond=2, seed=None, boundary=OPEN, rng=None):
    """Random state whose entries are uniform in the complex unit square.

    Open-chain bond extents are capped at ``min(bond, d**k, d**(n-k))``.
    """
    rng = np.random.default_rng(seed) if rng is None else rng
    ext = _capped_bonds(n, d, bond, boundary)
    sites = []
    for k in range(n):
        shape = (ext[k], d, ext[k + 1])
        sites.append(rng.random(shape) + 1j * rng.random(shape))
    return MatrixProductState(sites, boundary)


def product_mps(kets):
    """Bond-extent-1 state from a list of single-site kets."""
    return MatrixProductState([np.asarray(k, dtype=complex).reshape(1, -1, 1) for k in kets])


def mpo_from_arrays(arrays, boundary=OPEN):
    return MatrixProductOperator(arrays, boundary)


def stats_for_expectation(bra, op, ket):
    """Multiply-add count of one :func:`expectation` call."""
    stats = ContractionStats()
    expectation(bra, op, ket, stats=stats)
    return stats


def mps_from_dense(vec, n, d=2):
    """Exact open-chain MPS of a dense amplitude vector by successive SVDs
    (no truncation beyond exact zeros)."""
    vec = np.asarray(vec, dtype=complex)
    if vec.size != d ** n:
        raise ShapeError(f"vector of length {vec.size} is not {d}^{n}")
    sites = []
    rest = vec.reshape(1, -1)
    for _ in range(n - 1):
        left = rest.shape[0]
        m = rest.reshape(left * d, -1)
        u, sv, vh = np.linalg.svd(m, full_matrices=False)
        keep = max(int(np.count_nonzero(sv > 0)), 1)
        sites.append(u[:, :keep].reshape(left, d, keep))
        rest = sv[:keep, None] * vh[:keep]
    sites.append(rest.reshape(rest.shape[0], d, 1))
    return MatrixProductState(sites)
