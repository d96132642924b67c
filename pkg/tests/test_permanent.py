import itertools
import math

import numpy as np
import pytest

from conftest import random_network
from nsfeed.fock import FockState
from nsfeed.network import BeamSplitter, NetworkSpec, compose, ns_canonical
from nsfeed.permanent import (
    brute_force_evolve,
    brute_force_element,
    column_norms,
    expand_multi_index,
    fock_basis,
    matrix_element,
    matrix_element_naive,
    permanent,
    permanent_naive,
    permanent_ryser,
)


def rand_c(rng, d):
    return rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))


def test_permanent_small_cases():
    assert permanent([[3 - 1j]]) == 3 - 1j
    for d in range(1, 7):
        assert permanent(np.eye(d)) == pytest.approx(1.0)
    assert permanent(np.ones((3, 3))) == pytest.approx(6.0)
    assert permanent_naive(np.ones((3, 3))) == pytest.approx(6.0)
    a, b, c, d = 1.5, -2j, 0.3, 4 + 1j
    assert permanent([[a, b], [c, d]]) == pytest.approx(a * d + b * c)
    assert permanent(np.zeros((0, 0))) == 1


def test_permanent_rejects_non_square():
    with pytest.raises(ValueError):
        permanent(np.ones((2, 3)))
    with pytest.raises(ValueError):
        permanent(np.ones((2, 3)), method="naive")


@pytest.mark.parametrize("d", [1, 2, 3, 4, 5])
def test_ryser_matches_naive(rng, d):
    for _ in range(20):
        m = rand_c(rng, d)
        assert abs(permanent_ryser(m) - permanent_naive(m)) < 1e-10 * max(1.0, abs(permanent_naive(m)))


def test_expand_multi_index(rng):
    L = rand_c(rng, 3)
    assert np.array_equal(expand_multi_index(L, (0, 1, 0), (0, 1, 0)), [[L[1, 1]]])
    assert np.array_equal(expand_multi_index(L, (1, 1, 0), (1, 1, 0)), L[:2, :2])
    e = expand_multi_index(L, (2, 1, 0), (2, 1, 0))
    expect = [[L[0, 0], L[0, 0], L[0, 1]], [L[0, 0], L[0, 0], L[0, 1]], [L[1, 0], L[1, 0], L[1, 1]]]
    assert np.array_equal(e, expect)
    with pytest.raises(ValueError):
        expand_multi_index(L, (1, 0, 0), (2, 0, 0))
    with pytest.raises(ValueError):
        expand_multi_index(L, (0, 0, 0), (0, 0, 0))


def test_worked_matrix_elements(rng):
    L = rand_c(rng, 3)
    assert matrix_element(L, (0, 1, 0), (0, 1, 0)) == pytest.approx(L[1, 1])
    assert matrix_element(L, (1, 1, 0), (1, 1, 0)) == pytest.approx(L[0, 0] * L[1, 1] + L[0, 1] * L[1, 0])
    # repeated-index element: naive permanent 2 L11^2 L22 + 4 L11 L12 L21, prefactor 1/2
    third = L[0, 0] ** 2 * L[1, 1] + 2 * L[0, 0] * L[0, 1] * L[1, 0]
    assert matrix_element(L, (2, 1, 0), (2, 1, 0)) == pytest.approx(third)
    assert matrix_element_naive(L, (2, 1, 0), (2, 1, 0)) == pytest.approx(third)
    # the single-coefficient cross term is not equivalent
    wrong = L[0, 0] * (L[0, 0] * L[1, 1] + L[0, 1] * L[1, 0] + L[0, 0] * L[0, 1])
    assert abs(matrix_element(L, (2, 1, 0), (2, 1, 0)) - wrong) > 1e-3


def test_superselection_and_vacuum(rng):
    L = rand_c(rng, 3)
    assert matrix_element(L, (1, 0, 0), (2, 0, 0)) == 0
    assert matrix_element(L, (0, 0, 0), (0, 0, 0)) == 1
    with pytest.raises(ValueError):
        matrix_element(L, (1, 0), (1, 0, 0))


def test_hong_ou_mandel():
    net = NetworkSpec(2, (BeamSplitter(0, 1, math.pi / 4),))
    amp = brute_force_element(net, (2, 0), (1, 1), cutoff=2)
    assert abs(amp) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert abs(brute_force_element(net, (1, 1), (1, 1), cutoff=2)) < 1e-15
    assert matrix_element(compose(net), (2, 0), (1, 1)) == pytest.approx(amp, abs=1e-15)


def test_brute_force_identity():
    net = NetworkSpec(3)
    for occ in [(0, 0, 0), (1, 2, 0), (2, 1, 1)]:
        assert brute_force_element(net, occ, occ, cutoff=4) == 1


def test_brute_force_cutoff_errors():
    net = NetworkSpec(2, (BeamSplitter(0, 1, 0.3),))
    with pytest.raises(ValueError):
        brute_force_element(net, (1, 1), (1, 1), cutoff=1)


def test_ns_network_oracle():
    net = ns_canonical()
    L = compose(net)
    for occ in [(1, 1, 0), (2, 1, 0), (0, 1, 0)]:
        assert abs(matrix_element(L, occ, occ) - brute_force_element(net, occ, occ, 4)) < 1e-10


def test_oracle_equivalence_random(rng):
    for _ in range(10):
        net = random_network(rng)
        L = compose(net)
        for k in range(0, 4):
            for n in fock_basis(3, k):
                full = brute_force_evolve(net, n, 4)
                for m in fock_basis(3, k):
                    assert abs(matrix_element(L, m, n) - full.get(m.occupations, 0)) < 1e-10


def test_unitarity_relations(rng):
    net = random_network(rng, n_elements=6)
    L = compose(net).matrix
    for k in (1, 2, 3):
        for n in fock_basis(3, k):
            assert column_norms(L, n) == pytest.approx(1.0, abs=1e-10)
            for m in fock_basis(3, k):
                lhs = matrix_element(L, m, n)
                rhs = np.conj(matrix_element(L.conj().T, n, m))
                assert abs(lhs - rhs) < 1e-10


def test_fock_basis_counts():
    assert len(fock_basis(3, 2)) == 6
    assert fock_basis(2, 1) == [FockState((0, 1)), FockState((1, 0))]
