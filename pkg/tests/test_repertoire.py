import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from cee.errors import UnreachableStateError
from cee.repertoire import cause_repertoire, effect_repertoire, repertoire, unconstrained_repertoire
from cee.tpm import permute_mask, random_tpm, reorder_elements, tpm_from_functions
from conftest import and_system, copy_system

seeds = st.integers(0, 2**32 - 1)


def test_not_effect(NOT):
    assert np.allclose(effect_repertoire(NOT, 1, 1, 1).probs, [1, 0])


def test_noise_effect(NOISE):
    for s in (0, 1):
        assert np.allclose(effect_repertoire(NOISE, 1, s, 1).probs, [0.5, 0.5])


def test_and_effect_matches_oracle():
    t = and_system()
    got = effect_repertoire(t, 0b01, 0b01, 0b10).probs
    want = oracles.effect_rep(t.matrix, 2, 0b01, 0b01, 0b10)
    assert np.allclose(got, want)
    assert np.allclose(got, [0.5, 0.5])


def test_not_cause(NOT):
    assert np.allclose(cause_repertoire(NOT, 1, 1, 1).probs, [1, 0])


def test_noise_cause(NOISE):
    assert np.allclose(cause_repertoire(NOISE, 1, 0, 1).probs, [0.5, 0.5])


def test_copy_cause():
    t = copy_system()
    got = cause_repertoire(t, 0b10, 0b10, 0b01).probs
    assert np.allclose(got, [0, 1])
    assert np.allclose(got, oracles.cause_rep(t.matrix, 2, 0b10, 0b10, 0b01))


def test_unconstrained(NOT):
    t = and_system()
    assert np.allclose(unconstrained_repertoire(t, 0b11, "cause").probs, 0.25)
    assert np.allclose(unconstrained_repertoire(NOT, 1, "effect").probs, [0.5, 0.5])
    assert np.allclose(unconstrained_repertoire(t, 0b10, "effect").probs, [0.75, 0.25])


def test_unreachable_state_raises():
    # both elements always end up 0, so state 1 on element 0 has no cause
    t = tpm_from_functions(2, lambda b: [0, 0])
    with pytest.raises(UnreachableStateError):
        cause_repertoire(t, 0b01, 0b01, 0b11)


def test_severed_everything_is_unconstrained():
    t = random_tpm(2, np.random.default_rng(3))
    for d in ("cause", "effect"):
        sev = [(i, j) for i in (0, 1) for j in (0, 1)]
        cut = repertoire(t, d, 0b11, 0b10, 0b11, sev).probs
        assert np.allclose(cut, unconstrained_repertoire(t, 0b11, d).probs)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), seeds, st.data())
def test_matches_oracle(n, seed, data):
    t = random_tpm(n, np.random.default_rng(seed), 0.3)
    full = (1 << n) - 1
    mech = data.draw(st.integers(0, full))
    purview = data.draw(st.integers(1, full))
    state = data.draw(st.integers(0, full))
    e = effect_repertoire(t, mech, state, purview).probs
    assert np.allclose(e, oracles.effect_rep(t.matrix, n, mech, state, purview), atol=1e-12)
    want = oracles.cause_rep(t.matrix, n, mech, state, purview)
    if want is None:
        with pytest.raises(UnreachableStateError):
            cause_repertoire(t, mech, state, purview)
    else:
        assert np.allclose(cause_repertoire(t, mech, state, purview).probs, want, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), seeds, st.data())
def test_sums_to_one(n, seed, data):
    t = random_tpm(n, np.random.default_rng(seed))
    full = (1 << n) - 1
    mech, purview, state = data.draw(st.integers(0, full)), data.draw(st.integers(1, full)), data.draw(st.integers(0, full))
    for d in ("cause", "effect"):
        r = repertoire(t, d, mech, state, purview)
        assert abs(r.probs.sum() - 1) < 1e-9
        assert (r.probs >= 0).all()


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), seeds, st.integers(0, 7))
def test_empty_mechanism_is_unconstrained_effect(n, seed, state):
    t = random_tpm(n, np.random.default_rng(seed))
    state &= (1 << n) - 1
    full = (1 << n) - 1
    assert np.array_equal(effect_repertoire(t, 0, state, full).probs, unconstrained_repertoire(t, full, "effect").probs)


@settings(max_examples=20, deadline=None)
@given(st.permutations(range(3)), seeds)
def test_permutation_roundtrip_and_point_masses(perm, seed):
    rng = np.random.default_rng(seed)
    images = rng.permutation(8)
    t = tpm_from_functions(3, lambda b: [(images[b[0] + 2 * b[1] + 4 * b[2]] >> i) & 1 for i in range(3)])
    state = int(rng.integers(8))
    eff = effect_repertoire(t, 7, state, 7).probs
    assert eff[images[state]] == 1.0
    # the cause of the image is the original state
    cause = cause_repertoire(t, 7, int(images[state]), 7).probs
    assert cause[state] == 1.0
    # relabel, compute, map back
    inv = [perm.index(i) for i in range(3)]
    r = reorder_elements(t, perm)
    mech, purview = 0b011, 0b101
    pstate = permute_state(state, perm)
    a = effect_repertoire(r, permute_mask(mech, perm), pstate, permute_mask(purview, perm))
    b = effect_repertoire(reorder_elements(r, inv), mech, state, purview)
    assert np.allclose(b.probs, effect_repertoire(t, mech, state, purview).probs)
    assert np.isclose(a.probs.max(), effect_repertoire(t, mech, state, purview).probs.max())


def permute_state(state, perm):
    return sum(((state >> i) & 1) << perm[i] for i in range(len(perm)))
