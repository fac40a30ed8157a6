import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from cee.algebra import tensor_product
from cee.system import (
    SystemCut,
    cause_effect_structure,
    cut_tpm,
    find_complexes,
    is_local_maximum,
    relations,
    system_cuts,
    system_phi,
)
from cee.tpm import noise_tpm, not_tpm, permute_mask, random_tpm, reorder_elements
from conftest import majority_system

seeds = st.integers(0, 2**32 - 1)


def test_system_cuts():
    assert system_cuts(0b100) == [SystemCut(0b100, 0b100)]
    cuts = system_cuts(0b111)
    assert len(cuts) == 6
    assert all(c.source & c.target == 0 and c.source | c.target == 0b111 for c in cuts)
    assert len(system_cuts(0b111, bidirectional=True)) == 3


def test_cause_side_links_reversed():
    c = SystemCut(0b01, 0b10)
    assert c.severed("effect") == {(0, 1)}
    assert c.severed("cause") == {(1, 0)}


def test_noise_big_phi_zero(NOISE):
    assert system_phi(NOISE, 1, 0).big_phi == 0.0
    assert find_complexes(NOISE, 0).complexes == []


def test_not_pair_whole_is_reducible(NOT_NOT):
    assert system_phi(NOT_NOT, 0b11, 0b10).big_phi == pytest.approx(0, abs=1e-12)


def test_not_pair_complexes(NOT_NOT):
    search = find_complexes(NOT_NOT, 0b10)
    assert sorted(c.elements for c in search.complexes) == [0b01, 0b10]
    single = system_phi(not_tpm(), 1, 1).big_phi
    for c in search.complexes:
        assert c.big_phi == pytest.approx(single)
    assert all(c.exclusive for c in search.complexes)
    assert oracles.complexes(NOT_NOT.matrix, 2, 0b10).keys() == {0b01, 0b10}


def test_identity_single_complex(IDENTITY):
    search = find_complexes(IDENTITY, 1)
    assert [c.elements for c in search.complexes] == [1]
    want, _ = oracles.system_phi(IDENTITY.matrix, 1, 1, 1)
    assert search.complexes[0].big_phi == pytest.approx(want)


def test_majority_matches_oracle():
    t = majority_system()
    for s in range(1, 8):
        got = system_phi(t, s, 0b110)
        want, cut = oracles.system_phi(t.matrix, 3, s, 0b110)
        assert got.big_phi == pytest.approx(want, abs=1e-12)
        assert (got.cut and (got.cut.source, got.cut.target)) == cut


def test_majority_exclusion_flags():
    search = find_complexes(majority_system(), 0b110)
    masks = [c.elements for c in search.complexes]
    assert masks == sorted(oracles.complexes(majority_system().matrix, 3, 0b110))
    taken = 0
    for c in search.complexes:
        assert c.exclusive == (not c.elements & taken)
        taken |= c.elements if c.exclusive else 0


def test_ces_single_not(NOT):
    ces = cause_effect_structure(NOT, 1, 1)
    assert len(ces.distinctions) == 1 and ces.relations == []
    assert ces.sum_phi == ces.distinctions[0].phi


def test_ces_forced_product(NOT_NOT):
    ces = cause_effect_structure(NOT_NOT, 0b11, 0b01)
    assert sorted(d.mechanism for d in ces.distinctions) == [0b01, 0b10]
    assert ces.reducible == [0b11]
    assert ces.relations == []


def test_ces_noise_empty():
    ces = cause_effect_structure(noise_tpm(2), 0b11, 0)
    assert ces.distinctions == [] and ces.sum_phi == 0
    assert sorted(ces.reducible) == [1, 2, 3]


def test_relations_overlap_and_order():
    t = majority_system()
    ces2 = cause_effect_structure(t, 0b111, 0b111, relations_order=2)
    ces3 = cause_effect_structure(t, 0b111, 0b111, relations_order=3)
    assert all(r.overlap and len(r.members) >= 2 for r in ces3.relations)
    assert {len(r.members) for r in ces2.relations} <= {2}
    assert len(ces3.relations) >= len(ces2.relations)
    with pytest.raises(ValueError):
        relations(ces2.distinctions, order=4)


def test_sum_phi_exact():
    t = random_tpm(3, np.random.default_rng(7), 0.5)
    ces = cause_effect_structure(t, 0b111, 0b011)
    assert ces.sum_phi == sum(d.phi for d in ces.distinctions)


def test_local_maximum_helper():
    phis = {1: 0.5, 2: 0.2, 3: 0.3}
    assert is_local_maximum(phis, 1)
    assert not is_local_maximum(phis, 2)
    assert not is_local_maximum(phis, 3)


def test_sum_distinctions_mode():
    t = majority_system()
    r = system_phi(t, 0b111, 0b110, mode="sum-distinctions")
    assert r.big_phi >= 0
    assert system_phi(noise_tpm(2), 0b11, 0, mode="sum-distinctions").big_phi == 0
    # reducible product: every cut between factors leaves the distinctions alone
    t2 = tensor_product(not_tpm(), not_tpm())
    assert system_phi(t2, 0b11, 0, mode="sum-distinctions").big_phi == pytest.approx(0, abs=1e-12)


def test_cut_tpm_noises_links():
    t = tensor_product(not_tpm(), not_tpm())
    # severing the self link of element 0 makes it noise
    c = cut_tpm(t, SystemCut(0b01, 0b01))
    assert np.allclose(c.node[:, 0], 0.5)
    assert np.allclose(c.node[:, 1], t.node[:, 1])


def test_unknown_mode():
    with pytest.raises(ValueError):
        system_phi(not_tpm(), 1, 0, mode="bogus")


@settings(max_examples=15, deadline=None)
@given(seeds, seeds, st.integers(0, 7))
def test_straddling_subsets_of_products(s1, s2, state):
    t = tensor_product(random_tpm(1, np.random.default_rng(s1), 0.5), random_tpm(2, np.random.default_rng(s2), 0.5))
    for subset in (0b011, 0b101, 0b111):
        assert system_phi(t, subset, state).big_phi == pytest.approx(0, abs=1e-9)


@settings(max_examples=10, deadline=None)
@given(seeds, st.permutations(range(3)), st.integers(0, 7))
def test_complexes_equivariant(seed, perm, state):
    t = random_tpm(3, np.random.default_rng(seed), 0.5)
    a = find_complexes(t, state)
    b = find_complexes(reorder_elements(t, perm), permute_mask(state, perm))
    got = {permute_mask(c.elements, perm): c.big_phi for c in a.complexes}
    want = {c.elements: c.big_phi for c in b.complexes}
    assert got.keys() == want.keys()
    for k in got:
        assert got[k] == pytest.approx(want[k], abs=1e-9)
