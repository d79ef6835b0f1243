"""
Dense complex tensors with named indices.

Every indexed object in the package (site tensors, transfer matrices,
environments, local eigenproblems) is a :class:`Tensor`: a complex numpy
array together with one unique string label per axis.  Contractions are
specified by label pairs rather than by axis positions.
"""
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateMetricError, DimensionError, LabelError, SplitError

__all__ = [
    "Tensor",
    "EigenPair",
    "ContractionStats",
    "contract",
    "contract_shared",
    "svd_split",
    "gen_eig_smallest",
]


class Tensor:
    """Immutable complex array with one unique label per axis."""

    __slots__ = ("labels", "data")

    def __init__(self, labels, data):
        labels = tuple(labels)
        arr = np.array(data, dtype=complex)
        if arr.ndim != len(labels):
            raise DimensionError(
                f"{len(labels)} labels given for an array of rank {arr.ndim}")
        if len(set(labels)) != len(labels):
            raise LabelError(f"duplicate labels in {labels}")
        if any(s < 1 for s in arr.shape):
            raise DimensionError(f"index extents must be >= 1, got {arr.shape}")
        arr.flags.writeable = False
        self.labels = labels
        self.data = arr

    @property
    def dims(self):
        return self.data.shape

    @property
    def rank(self):
        return len(self.labels)

    def dim(self, label):
        return self.data.shape[self.axis(label)]

    def axis(self, label):
        try:
            return self.labels.index(label)
        except ValueError:
            raise LabelError(f"unknown label {label!r}; have {self.labels}") from None

    def transpose(self, labels):
        """Return the same tensor with its axes reordered to ``labels``."""
        labels = tuple(labels)
        if sorted(labels) != sorted(self.labels):
            raise LabelError(f"cannot reorder {self.labels} as {labels}")
        return Tensor(labels, np.transpose(self.data, [self.axis(l) for l in labels]))

    def relabel(self, mapping):
        return Tensor([mapping.get(l, l) for l in self.labels], self.data)

    def conj(self):
        return Tensor(self.labels, self.data.conj())

    def scaled(self, c):
        return Tensor(self.labels, c * self.data)

    def matrix(self, row_labels, col_labels):
        """Flatten into a 2D array with the given row and column groupings."""
        t = self.transpose(tuple(row_labels) + tuple(col_labels))
        nrow = int(np.prod([t.dim(l) for l in row_labels], dtype=int))
        return t.data.reshape(nrow, -1)

    def norm(self):
        return float(np.linalg.norm(self.data))

    def __mul__(self, c):
        return self.scaled(c)

    __rmul__ = __mul__

    def __add__(self, other):
        other = other.transpose(self.labels)
        if other.dims != self.dims:
            raise DimensionError(f"cannot add tensors of shapes {self.dims} and {other.dims}")
        return Tensor(self.labels, self.data + other.data)

    def __repr__(self):
        inner = ", ".join(f"{l}:{d}" for l, d in zip(self.labels, self.dims))
        return f"Tensor({inner})"


@dataclass
class ContractionStats:
    """Counts pairwise contractions and scalar multiply-adds."""

    contractions: int = 0
    madds: int = 0

    def reset(self):
        self.contractions = 0
        self.madds = 0


def contract(a, b, pairs, stats=None):
    """Sum over the paired indices of ``a`` and ``b``.

    The result carries the unpaired labels of ``a`` followed by the unpaired
    labels of ``b``, each in their original order.  ``pairs`` is a sequence
    of ``(label_in_a, label_in_b)``.  When ``stats`` is given, the number of
    scalar multiply-adds performed is added to it.
    """
    pairs = list(pairs)
    ax_a = [a.axis(la) for la, _ in pairs]
    ax_b = [b.axis(lb) for _, lb in pairs]
    for (la, lb), ia, ib in zip(pairs, ax_a, ax_b):
        if a.dims[ia] != b.dims[ib]:
            raise DimensionError(
                f"extent mismatch contracting {la!r} ({a.dims[ia]}) with {lb!r} ({b.dims[ib]})")
    free_a = [l for i, l in enumerate(a.labels) if i not in ax_a]
    free_b = [l for i, l in enumerate(b.labels) if i not in ax_b]
    if len(set(free_a) | set(free_b)) != len(free_a) + len(free_b):
        raise LabelError(f"result would repeat labels: {free_a} + {free_b}")
    data = np.tensordot(a.data, b.data, axes=(ax_a, ax_b))
    if stats is not None:
        stats.contractions += 1
        free_b_size = int(np.prod([b.dims[i] for i in range(b.rank) if i not in ax_b], dtype=int))
        stats.madds += int(a.data.size) * free_b_size
    return Tensor(free_a + free_b, data)


def contract_shared(a, b, stats=None):
    """Contract every label that ``a`` and ``b`` have in common."""
    shared = [l for l in a.labels if l in b.labels]
    return contract(a, b, [(l, l) for l in shared], stats=stats)


def svd_split(t, left_labels, left_bond="bond_l", right_bond="bond_r"):
    """Singular value decomposition across a bipartition of the labels.

    Returns ``(u, s, v)`` where ``u`` carries ``left_labels`` plus
    ``left_bond``, ``s`` is the nonincreasing vector of singular values and
    ``v`` carries ``right_bond`` plus the remaining labels.
    """
    left_labels = list(left_labels)
    for l in left_labels:
        t.axis(l)
    right_labels = [l for l in t.labels if l not in left_labels]
    if not left_labels or not right_labels:
        raise SplitError("left_labels must be a nonempty proper subset of the tensor labels")
    m = t.matrix(left_labels, right_labels)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    k = s.shape[0]
    u_t = Tensor(left_labels + [left_bond],
                 u.reshape([t.dim(l) for l in left_labels] + [k]))
    v_t = Tensor([right_bond] + right_labels,
                 vh.reshape([k] + [t.dim(l) for l in right_labels]))
    return u_t, s, v_t


@dataclass
class EigenPair:
    value: float
    vector: Tensor
    residual: float = field(default=0.0)


# relative cutoff below which eigenvalues of the metric are treated as null
METRIC_CUTOFF = 1e-10


def _as_square(t):
    if t.rank % 2:
        raise DimensionError(f"cannot view a rank-{t.rank} tensor as a square matrix")
    half = t.rank // 2
    rows, cols = t.labels[:half], t.labels[half:]
    m = t.matrix(rows, cols)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"row and column groupings differ in size: {m.shape}")
    return m, rows, cols


def gen_eig_smallest(h, n, tol=1e-10):
    """Smallest eigenpair of ``h v = lambda n v`` on the range of ``n``.

    Both tensors are read as square matrices: the first half of their labels
    indexes rows, the second half columns, and the two must use the same
    flattening.  Directions along which ``n`` has eigenvalues below
    ``METRIC_CUTOFF`` times its largest eigenvalue are projected out before
    solving.  The returned vector carries the column labels of ``h`` and is
    normalized so that ``v* n v = 1``.  A warning is issued when the
    achieved residual exceeds ``tol * ||h||``.
    """
    hm, _, cols = _as_square(h)
    nm, _, _ = _as_square(n)
    if hm.shape != nm.shape:
        raise DimensionError(f"h is {hm.shape} but n is {nm.shape}")
    hm = 0.5 * (hm + hm.conj().T)
    nm = 0.5 * (nm + nm.conj().T)

    w, u = np.linalg.eigh(nm)
    wmax = w[-1] if w.size else 0.0
    if not np.isfinite(wmax) or wmax <= 1e-300:
        raise DegenerateMetricError("metric is numerically zero")
    keep = w > METRIC_CUTOFF * wmax
    proj = u[:, keep] / np.sqrt(w[keep])
    hp = proj.conj().T @ hm @ proj
    hp = 0.5 * (hp + hp.conj().T)
    lam, y = np.linalg.eigh(hp)
    vec = proj @ y[:, 0]
    value = float(lam[0])

    resid_vec = hm @ vec - value * (nm @ vec)
    # restrict the residual to the range of the metric
    basis = u[:, keep]
    resid = float(np.linalg.norm(basis.conj().T @ resid_vec))
    hnorm = float(np.linalg.norm(hm, 2))
    if resid > tol * max(hnorm, 1e-300):
        warnings.warn(f"generalized eigensolve residual {resid:.2e} exceeds tolerance",
                      RuntimeWarning, stacklevel=2)

    col_dims = [h.dim(l) for l in cols]
    return EigenPair(value, Tensor(cols, vec.reshape(col_dims)), resid)
