import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from automps.errors import DegenerateMetricError, DimensionError, LabelError, SplitError
from automps.tensor_core import (ContractionStats, Tensor, contract, contract_shared,
                                 gen_eig_smallest, svd_split)
from helpers import random_complex, random_hermitian, random_spd

UP = np.array([1, 0])
DOWN = np.array([0, 1])


def test_tensor_rejects_duplicate_labels_and_rank_mismatch():
    with pytest.raises(LabelError):
        Tensor(("a", "a"), np.eye(2))
    with pytest.raises(DimensionError):
        Tensor(("a",), np.eye(2))


def test_tensor_is_immutable():
    t = Tensor(("a",), [1, 2])
    with pytest.raises(ValueError):
        t.data[0] = 5


def test_identity_composition():
    a = Tensor(("i", "j"), np.eye(2))
    b = Tensor(("j", "k"), np.eye(2))
    out = contract(a, b, [("j", "j")])
    assert out.labels == ("i", "k")
    assert np.array_equal(out.data, np.eye(2))


def test_w_state_walk_yields_single_term():
    # Site tensors of the two-state W pattern with physical kets inline.
    first = Tensor(("p1", "b1"), np.stack([UP, DOWN], axis=1))
    mid = np.zeros((2, 2, 2))
    mid[0, :, 0] = UP
    mid[0, :, 1] = DOWN
    mid[1, :, 1] = UP
    second = Tensor(("b1", "p2", "b2"), mid)
    third = Tensor(("b2", "p3", "b3"), mid)
    last = Tensor(("b3", "p4"), np.stack([DOWN, UP], axis=0))
    psi = contract_shared(contract_shared(contract_shared(first, second), third), last)
    psi = psi.transpose(("p1", "p2", "p3", "p4")).data
    assert psi[0, 0, 1, 0] == 1
    nonzero = {tuple(ix) for ix in np.argwhere(psi)}
    assert nonzero == {(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)}


def test_full_contraction_with_conjugate_is_squared_norm(rng):
    t = Tensor(("a", "b", "c"), random_complex(rng, 2, 3, 4))
    out = contract(t.conj(), t, [("a", "a"), ("b", "b"), ("c", "c")])
    direct = sum(abs(x) ** 2 for x in t.data.ravel())
    assert out.rank == 0
    assert abs(complex(out.data) - direct) < 1e-12


def test_contract_errors():
    a = Tensor(("i", "j"), np.ones((2, 3)))
    b = Tensor(("k", "l"), np.ones((2, 2)))
    with pytest.raises(DimensionError):
        contract(a, b, [("j", "k")])
    with pytest.raises(LabelError):
        contract(a, b, [("zz", "k")])
    with pytest.raises(LabelError):
        contract(a, Tensor(("i", "m"), np.ones((2, 2))), [])


def test_contraction_stats_count_multiply_adds():
    a = Tensor(("i", "j"), np.ones((2, 3)))
    b = Tensor(("j", "k"), np.ones((3, 5)))
    stats = ContractionStats()
    contract(a, b, [("j", "j")], stats=stats)
    assert stats.contractions == 1
    assert stats.madds == 2 * 3 * 5
    stats.reset()
    assert stats.madds == 0


@given(st.integers(0, 2 ** 32 - 1), st.complex_numbers(max_magnitude=10, allow_nan=False,
                                                       allow_infinity=False))
def test_contract_is_bilinear(seed, alpha):
    rng = np.random.default_rng(seed)
    a = Tensor(("i", "j"), random_complex(rng, 2, 3))
    b = Tensor(("j", "k"), random_complex(rng, 3, 2))
    lhs = contract(a.scaled(alpha), b, [("j", "j")]).data
    rhs = alpha * contract(a, b, [("j", "j")]).data
    assert np.allclose(lhs, rhs, atol=1e-12 * max(1, abs(alpha)) * 10, rtol=0)


@given(st.integers(0, 2 ** 32 - 1))
def test_contract_is_associative(seed):
    rng = np.random.default_rng(seed)
    a = Tensor(("i", "j"), random_complex(rng, 2, 3))
    b = Tensor(("j", "k", "x"), random_complex(rng, 3, 2, 2))
    c = Tensor(("k", "l"), random_complex(rng, 2, 4))
    left = contract_shared(contract_shared(a, b), c).transpose(("i", "x", "l")).data
    right = contract_shared(a, contract_shared(b, c)).transpose(("i", "x", "l")).data
    assert np.allclose(left, right, atol=1e-12, rtol=0)


def test_svd_of_identity():
    _, s, _ = svd_split(Tensor(("a", "b"), np.eye(2)), ["a"])
    assert np.allclose(s, [1, 1], atol=1e-15)


def test_svd_of_rank_one():
    u = np.array([0.6, 0.8])
    v = np.array([1j, 0, 0])
    _, s, _ = svd_split(Tensor(("a", "b"), np.outer(u, v)), ["a"])
    assert np.count_nonzero(s > 1e-12) == 1
    assert abs(s[0] - 1) < 1e-12


def test_svd_detects_redundant_bond_node():
    # cat-state pair of sites with the middle bond enlarged to 3 by an embedding
    left = np.zeros((2, 2))
    left[0, 0] = left[1, 1] = 1  # phys x bond
    embed = np.array([[1, 0, 0], [0, 0, 1]])
    right = np.zeros((2, 2))
    right[0, 0] = right[1, 1] = 1
    a = Tensor(("p1", "bond"), left @ embed)
    b = Tensor(("bond", "p2"), embed.T @ right)
    _, s, _ = svd_split(contract_shared(a, b), ["p1"])
    assert np.count_nonzero(s > 1e-12) == 2


def test_svd_split_errors():
    t = Tensor(("a", "b"), np.eye(2))
    with pytest.raises(SplitError):
        svd_split(t, [])
    with pytest.raises(SplitError):
        svd_split(t, ["a", "b"])


@given(st.integers(0, 2 ** 32 - 1))
def test_svd_reconstruction_and_oracle(seed):
    rng = np.random.default_rng(seed)
    t = Tensor(("a", "b", "c"), random_complex(rng, 2, 3, 4))
    u, s, v = svd_split(t, ["a", "c"])
    rebuilt = contract(u.scaled(1), Tensor(("bond_l", "bond_r"), np.diag(s)), [("bond_l", "bond_l")])
    rebuilt = contract_shared(rebuilt, v).transpose(t.labels)
    assert np.linalg.norm(rebuilt.data - t.data) <= 1e-12 * np.linalg.norm(t.data)
    oracle = np.linalg.svd(t.matrix(["a", "c"], ["b"]), compute_uv=False)
    assert np.allclose(s, oracle, atol=1e-12, rtol=0)
    assert np.all(np.diff(s) <= 1e-15) and np.all(s >= 0)
    um = u.matrix(["a", "c"], ["bond_l"])
    vm = v.matrix(["bond_r"], ["b"])
    assert np.allclose(um.conj().T @ um, np.eye(um.shape[1]), atol=1e-12)
    assert np.allclose(vm @ vm.conj().T, np.eye(vm.shape[0]), atol=1e-12)


def _square(m, names=("r", "c")):
    return Tensor(names, m)


def test_gen_eig_diagonal():
    pair = gen_eig_smallest(_square(np.diag([2.0, 1.0])), _square(np.eye(2)))
    assert abs(pair.value - 1) < 1e-14
    assert np.allclose(np.abs(pair.vector.data), [0, 1], atol=1e-14)


def test_gen_eig_identical_forms(rng):
    n = random_spd(rng, 5)
    pair = gen_eig_smallest(_square(n), _square(n))
    assert abs(pair.value - 1) < 1e-10


def test_gen_eig_matches_dense_oracle(rng):
    h = random_hermitian(rng, 8)
    n = random_spd(rng, 8)
    pair = gen_eig_smallest(_square(h), _square(n))
    assert abs(pair.value - scipy.linalg.eigh(h, n, eigvals_only=True)[0]) < 1e-10
    v = pair.vector.data
    assert abs(v.conj() @ n @ v - 1) < 1e-10


def test_gen_eig_residual_contract_on_random_instances(rng):
    for _ in range(100):
        size = int(rng.integers(1, 17))
        h, n = random_hermitian(rng, size), random_spd(rng, size)
        pair = gen_eig_smallest(_square(h), _square(n))
        v = pair.vector.data
        assert np.linalg.norm(h @ v - pair.value * n @ v) <= 1e-10 * np.linalg.norm(h, 2)


def test_gen_eig_projects_out_null_metric_directions():
    h = np.diag([5.0, -100.0, 1.0])
    n = np.diag([1.0, 0.0, 1.0])  # the -100 direction has no norm
    pair = gen_eig_smallest(_square(h), _square(n))
    assert abs(pair.value - 1.0) < 1e-12


def test_gen_eig_rejects_zero_metric():
    with pytest.raises(DegenerateMetricError):
        gen_eig_smallest(_square(np.eye(2)), _square(np.zeros((2, 2))))


def test_gen_eig_keeps_column_labels():
    h = Tensor(("a", "b", "c", "d"), np.eye(4).reshape(2, 2, 2, 2))
    pair = gen_eig_smallest(h, h)
    assert pair.vector.labels == ("c", "d")
