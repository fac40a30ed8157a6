import numpy as np
import pytest

from cee.algebra import tensor_product
from cee.tpm import Tpm, identity_tpm, noise_tpm, not_tpm, tpm_from_functions


def and_system() -> Tpm:
    # element 0 holds its value, element 1 becomes AND of both
    return tpm_from_functions(2, lambda b: [b[0], b[0] & b[1]])


def copy_system() -> Tpm:
    # element 1 copies element 0, element 0 copies element 1
    return tpm_from_functions(2, lambda b: [b[1], b[0]])


def xor_system() -> Tpm:
    # element 0 holds, element 1 becomes XOR of both
    return tpm_from_functions(2, lambda b: [b[0], b[0] ^ b[1]])


def majority_system() -> Tpm:
    return tpm_from_functions(3, lambda b: [int(sum(b) >= 2)] * 3)


def nor_pair() -> Tpm:
    # two correlated copies of a NOT: each becomes NOR of the pair
    return tpm_from_functions(2, lambda b: [1 - (b[0] | b[1])] * 2)


def two_nor_pairs() -> Tpm:
    return tensor_product(nor_pair(), nor_pair())


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


@pytest.fixture
def NOT():
    return not_tpm()


@pytest.fixture
def NOISE():
    return noise_tpm(1)


@pytest.fixture
def IDENTITY():
    return identity_tpm(1)


@pytest.fixture
def NOT_NOT():
    return tensor_product(not_tpm(), not_tpm())
