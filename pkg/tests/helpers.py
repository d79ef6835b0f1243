"""Small shared oracles for the test-suite."""
import itertools
import re

import numpy as np


def random_complex(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def naive_chain(a, word):
    """alpha . W... . Omega with explicit index loops."""
    nq = a.n_states
    row = [a.initial[i] for i in range(nq)]
    for sym in word:
        w = a.weights[sym]
        row = [sum(row[i] * w[i, j] for i in range(nq)) for j in range(nq)]
    return sum(row[j] * a.final[j] for j in range(nq))


def words(alphabet, n):
    return ["".join(w) for w in itertools.product(alphabet, repeat=n)]


def ends_in_two(word):
    return 1 if re.fullmatch(r"[01]*(00|11)", word) else 0


def random_hermitian(rng, n):
    m = random_complex(rng, n, n)
    return m + m.conj().T


def random_spd(rng, n):
    m = random_complex(rng, n, n)
    return m @ m.conj().T + 0.1 * np.eye(n)
