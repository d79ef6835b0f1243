"""
One-site variational ground-state search with cached environments.

Left environments obey ``L_1 = I, L_i = L_{i-1} . E_{i-1}`` and right
environments ``R_N = I, R_i = R_{i+1} . E_{i+1}``, where ``E_k`` is the
transfer matrix of site ``k``.  An :class:`EnvironmentCache` stores them per
site and recomputes only what a site update invalidated, so a sweep that
moves one site at a time absorbs exactly one new transfer matrix per step.

Each step minimizes the Rayleigh quotient ``v* H v / v* N v`` of one site
tensor, where ``H`` and ``N`` are the environments of the Hamiltonian and of
the identity operator, by solving the generalized eigenproblem.
"""
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import HermiticityError, RangeError, ShapeError
from .mp_state import (MPS_LABELS, MatrixProductState, absorb_transfer, expectation,
                       identity_mpo, inner, transfer_matrix)
from .tensor_core import ContractionStats, Tensor, contract, gen_eig_smallest

__all__ = [
    "EnvironmentCache",
    "StepRecord",
    "SweepReport",
    "local_problem",
    "optimize_site",
    "sweep",
    "HermiticityWarning",
]

ROW_LABELS = ("bra_left", "bra_phys", "bra_right")
COL_LABELS = ("ket_left", "ket_phys", "ket_right")
# dense Hermiticity check in verification mode stays below this dimension
VERIFY_MAX_DIM = 2 ** 12
EIG_TOL = 1e-10


class HermiticityWarning(UserWarning):
    pass


def _boundary():
    return Tensor(("b", "o", "k"), np.ones((1, 1, 1)))


class EnvironmentCache:
    """Left/right partial contractions of <s|op|s>, keyed by site (1-based).

    ``absorptions`` counts transfer matrices absorbed into environments and
    ``stats`` the underlying contractions and multiply-adds.  With
    ``caching=False`` every request is recomputed from the chain ends, which
    is the reference the cached path is checked against.
    """

    def __init__(self, op, state, caching=True):
        if op.n_sites != state.n_sites or op.d != state.d:
            raise ShapeError("operator and state sizes differ")
        if op.boundary != "open" or state.boundary != "open":
            raise ShapeError("environment caching is implemented for open chains")
        self.op = op
        self.op_id = id(op)
        self.sites = list(state.sites)
        self.n = state.n_sites
        self.caching = caching
        self.state_version = 0
        self.left = {1: _boundary()}
        self.right = {self.n: _boundary()}
        self.absorptions = 0
        self.stats = ContractionStats()

    @property
    def state(self):
        return MatrixProductState(self.sites)

    def _check(self, site):
        if not 1 <= site <= self.n:
            raise RangeError(f"site {site} outside 1..{self.n}")

    def _transfer(self, k):
        s = self.sites[k - 1]
        self.absorptions += 1
        return transfer_matrix(s, self.op.sites[k - 1], s, stats=self.stats)

    def env_left(self, site):
        """L_site: contraction of all transfer matrices of sites < site."""
        self._check(site)
        if not self.caching:
            env = _boundary()
            for k in range(1, site):
                env = absorb_transfer(env, self._transfer(k), stats=self.stats)
            return env
        start = max(i for i in self.left if i <= site)
        env = self.left[start]
        for k in range(start, site):
            env = absorb_transfer(env, self._transfer(k), stats=self.stats)
            self.left[k + 1] = env
        return env

    def _absorb_right(self, env, k):
        e = self._transfer(k)
        out = contract(e, env, [("r_bra", "b"), ("r_op", "o"), ("r_ket", "k")], stats=self.stats)
        return out.relabel({"l_bra": "b", "l_op": "o", "l_ket": "k"})

    def env_right(self, site):
        """R_site: contraction of all transfer matrices of sites > site."""
        self._check(site)
        if not self.caching:
            env = _boundary()
            for k in range(self.n, site, -1):
                env = self._absorb_right(env, k)
            return env
        start = min(i for i in self.right if i >= site)
        env = self.right[start]
        for k in range(start, site, -1):
            env = self._absorb_right(env, k)
            self.right[k - 1] = env
        return env

    def invalidate(self, site):
        """Forget every environment that depends on ``site``."""
        self._check(site)
        self.left = {i: t for i, t in self.left.items() if i <= site}
        self.right = {i: t for i, t in self.right.items() if i >= site}
        self.state_version += 1

    def update_site(self, site, tensor):
        self._check(site)
        self.sites[site - 1] = tensor.transpose(MPS_LABELS)
        self.invalidate(site)


def local_problem(h_cache, n_cache, site):
    """The site matrices (H, N) of the quadratic forms in the site tensor.

    ``h_cache`` holds environments of the Hamiltonian and ``n_cache`` those of
    the identity operator for the same state.  Both results are labelled
    ``ROW_LABELS + COL_LABELS``: rows index the conjugated (bra) copy of the
    site tensor and columns the ket copy.
    """
    if h_cache.sites is not n_cache.sites and any(
            a is not b for a, b in zip(h_cache.sites, n_cache.sites)):
        raise ShapeError("the two caches describe different states")
    return (_site_matrix(h_cache, site), _site_matrix(n_cache, site))


def _site_matrix(cache, site):
    left = cache.env_left(site)
    left = left.relabel({"b": "bra_left", "k": "ket_left"})
    right = cache.env_right(site).relabel({"b": "bra_right", "k": "ket_right"})
    op = cache.op.sites[site - 1].relabel({"row": "bra_phys", "col": "ket_phys"})
    t = contract(left, op, [("o", "left")], stats=cache.stats)
    t = contract(t, right, [("right", "o")], stats=cache.stats)
    return t.transpose(ROW_LABELS + COL_LABELS)


def optimize_site(h_cache, n_cache, site, tol=EIG_TOL):
    """Replace one site tensor by the lowest generalized eigenvector.

    Returns ``(energy, state, residual)``.  Both caches are updated and
    invalidated on the dependent side only.
    """
    hmat, nmat = local_problem(h_cache, n_cache, site)
    pair = gen_eig_smallest(hmat, nmat, tol=tol)
    tensor = pair.vector.relabel(dict(zip(COL_LABELS, MPS_LABELS))).transpose(MPS_LABELS)
    h_cache.update_site(site, tensor)
    n_cache.update_site(site, tensor)
    return pair.value, h_cache.state, pair.residual


@dataclass
class StepRecord:
    sweep: int
    site: int
    direction: str
    energy: float
    residual: float
    absorptions: int
    metric_absorptions: int
    madds: int


@dataclass
class SweepReport:
    steps: list = field(default_factory=list)
    energies: list = field(default_factory=list)
    local_energies: list = field(default_factory=list)
    converged: bool = False
    init_absorptions: int = 0

    @property
    def energy(self):
        return self.energies[-1] if self.energies else None


def _schedule(n, sweep_index):
    if n == 1:
        return [(1, "right")]
    first = 1 if sweep_index == 0 else 2
    return ([(k, "right") for k in range(first, n + 1)]
            + [(k, "left") for k in range(n - 1, 0, -1)])


def _shift_gauge(h_cache, n_cache, site, towards):
    """Move the non-isometric part of ``site`` onto its neighbour ``towards``
    with a QR step.  The represented state is unchanged."""
    a = h_cache.sites[site - 1].data
    b = h_cache.sites[towards - 1].data
    dl, d, dr = a.shape
    if towards > site:
        q, r = np.linalg.qr(a.reshape(dl * d, dr))
        new_a = q.reshape(dl, d, q.shape[1])
        new_b = np.einsum("ij,jpr->ipr", r, b)
    else:
        q, r = np.linalg.qr(a.reshape(dl, d * dr).conj().T)
        new_a = q.conj().T.reshape(q.shape[1], d, dr)
        new_b = np.einsum("lpj,jk->lpk", b, r.conj().T)
    for cache in (h_cache, n_cache):
        cache.update_site(site, Tensor(MPS_LABELS, new_a))
        cache.update_site(towards, Tensor(MPS_LABELS, new_b))


def _verify_hermitian(h):
    dim = h.d ** h.n_sites
    if dim > VERIFY_MAX_DIM:
        return
    from .oracle import dense_operator
    dense = dense_operator(h)
    if not np.allclose(dense, dense.conj().T, atol=1e-10, rtol=0):
        warnings.warn("Hamiltonian is not Hermitian", HermiticityWarning, stacklevel=3)


def sweep(h, s0, max_sweeps=20, tol=1e-10, orthogonalize=True, verify=False, caching=True,
          eig_tol=EIG_TOL):
    """Alternate left-to-right and right-to-left one-site optimizations.

    Stops once the global energy changes by less than ``tol`` between two
    consecutive sweeps, or after ``max_sweeps``.  With ``orthogonalize`` a
    QR gauge step follows each update so that the metric stays well
    conditioned; the state and the local energies are unaffected by it.
    ``eig_tol`` is the relative residual accepted from each local solve.
    Returns ``(state, report)``.
    """
    if max_sweeps < 1:
        raise ValueError("max_sweeps must be at least 1")
    if verify:
        _verify_hermitian(h)
    h_cache = EnvironmentCache(h, s0, caching=caching)
    n_cache = EnvironmentCache(identity_mpo(h.n_sites, h.d), s0, caching=caching)
    n_cache.sites = h_cache.sites  # one shared list of site tensors

    report = SweepReport()
    h_cache.env_right(1)
    n_cache.env_right(1)
    report.init_absorptions = h_cache.absorptions
    n = h.n_sites
    for sweep_index in range(max_sweeps):
        plan = _schedule(n, sweep_index)
        for pos, (site, direction) in enumerate(plan):
            before = (h_cache.absorptions, n_cache.absorptions, h_cache.stats.madds)
            energy, _, resid = optimize_site(h_cache, n_cache, site, tol=eig_tol)
            after_solve = (h_cache.absorptions, n_cache.absorptions, h_cache.stats.madds)
            report.steps.append(StepRecord(
                sweep_index, site, direction, energy, resid,
                after_solve[0] - before[0], after_solve[1] - before[1],
                after_solve[2] - before[2]))
            report.local_energies.append(energy)
            if orthogonalize and n > 1:
                nxt = plan[pos + 1][0] if pos + 1 < len(plan) else (
                    _schedule(n, sweep_index + 1)[0][0])
                if nxt != site:
                    _shift_gauge(h_cache, n_cache, site, site + 1 if nxt > site else site - 1)
        state = h_cache.state
        report.energies.append((expectation(state, h, state) / inner(state, state)).real)
        if len(report.energies) > 1 and abs(report.energies[-1] - report.energies[-2]) < tol:
            report.converged = True
            break
    return h_cache.state, report


def dense_hermiticity_error(h):
    """Raise if the dense form of a small operator chain is not Hermitian."""
    from .oracle import dense_operator
    dense = dense_operator(h)
    if not np.allclose(dense, dense.conj().T, atol=1e-10, rtol=0):
        raise HermiticityError("operator is not Hermitian")
