import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog
from scipy.stats import wasserstein_distance

from cee.metrics import distance, emd, hamming_matrix, intrinsic_difference


def lp_emd(p, q):
    """Transport LP solved with scipy, independent of the package's solver."""
    k = len(p)
    D = hamming_matrix(int(math.log2(k)))
    A_eq = []
    for i in range(k):
        row = np.zeros((k, k))
        row[i, :] = 1
        A_eq.append(row.ravel())
    for j in range(k):
        col = np.zeros((k, k))
        col[:, j] = 1
        A_eq.append(col.ravel())
    res = linprog(D.ravel(), A_eq=np.array(A_eq), b_eq=np.concatenate([p, q]), bounds=(0, None), method="highs")
    return res.fun


def test_hamming():
    assert hamming_matrix(2).tolist() == [[0, 1, 1, 2], [1, 0, 2, 1], [1, 2, 0, 1], [2, 1, 1, 0]]


def test_one_bit_closed_form():
    assert emd(np.array([1.0, 0.0]), np.array([0.5, 0.5])) == 0.5
    assert np.isclose(emd(np.array([0.3, 0.7]), np.array([0.6, 0.4])), wasserstein_distance([0, 1], [0, 1], [0.3, 0.7], [0.6, 0.4]))


def test_intrinsic_difference():
    assert intrinsic_difference(np.array([1.0, 0.0]), np.array([0.5, 0.5])) == 1.0
    assert intrinsic_difference(np.array([0.5, 0.5]), np.array([1.0, 0.0])) == math.inf
    assert distance(np.array([0.25] * 4), np.array([0.25] * 4), "id") == 0.0


def test_unknown_metric():
    with pytest.raises(ValueError):
        distance(np.array([1.0]), np.array([1.0]), "kl")


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_emd_matches_lp(bits, seed):
    rng = np.random.default_rng(seed)
    p, q = rng.dirichlet(np.ones(2**bits)), rng.dirichlet(np.ones(2**bits))
    assert abs(emd(p, q) - lp_emd(p, q)) < 1e-8


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_emd_bounded_by_bits(bits, seed):
    rng = np.random.default_rng(seed)
    p, q = rng.dirichlet(np.ones(2**bits) * 0.2), rng.dirichlet(np.ones(2**bits) * 0.2)
    assert 0 <= emd(p, q) <= bits + 1e-12


def test_axioms_small_set():
    rng = np.random.default_rng(5)
    ds = [rng.dirichlet(np.ones(4)) for _ in range(12)]
    for a, b in itertools.product(ds, ds):
        assert abs(emd(a, b) - emd(b, a)) < 1e-9
    for a, b, c in itertools.product(ds[:6], ds[:6], ds[:6]):
        assert emd(a, c) <= emd(a, b) + emd(b, c) + 1e-9
