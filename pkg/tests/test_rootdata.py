from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import pytest

from weyl_painleve.rootdata import (
    Chain,
    InvalidSubdiagramError,
    OddComponentError,
    SystemSpec,
    cartan,
    chi,
    complement_chi,
    components,
    even_chain_subsets,
    fundamental_weight,
    null_root,
    orientation,
    pairing,
    reflect,
    simple_root,
    verify_chi_lemmas,
)

Fr = Fraction


def test_cartan_examples():
    assert cartan(SystemSpec(2)) == [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]]
    assert cartan(SystemSpec(3))[0][2] == 0
    for l in range(2, 9):
        assert all(sum(row) == 0 for row in cartan(SystemSpec(l)))


def test_orientation_examples():
    U = orientation(SystemSpec(2))
    assert U[0][1] == 1 and U[0][2] == -1
    assert orientation(SystemSpec(4))[4][0] == 1
    for l in range(2, 9):
        U = orientation(SystemSpec(l))
        n = l + 1
        assert all(U[i][j] + U[j][i] == 0 for i in range(n) for j in range(n))


def test_fundamental_weights():
    spec = SystemSpec(2)
    assert fundamental_weight(spec, 1).coeffs == (Fr(2, 3), Fr(1, 3))
    assert fundamental_weight(spec, 2).coeffs == (Fr(1, 3), Fr(2, 3))
    for l in range(2, 9):
        sp = SystemSpec(l)
        assert all(c == 0 for c in fundamental_weight(sp, 0).flatten())


@pytest.mark.parametrize("l", range(2, 9))
def test_dual_basis(l):
    spec = SystemSpec(l)
    for i in range(1, l + 1):
        w = fundamental_weight(spec, i)
        for j in range(1, l + 1):
            assert pairing(spec, w, j) == (1 if i == j else 0)


@pytest.mark.parametrize("l", range(2, 9))
def test_simple_roots_from_weights(l):
    spec = SystemSpec(l)
    w = [fundamental_weight(spec, i) for i in range(l + 1)]
    for j in spec.nodes():
        expr = 2 * w[j] - w[spec.mod(j - 1)] - w[spec.mod(j + 1)]
        if j == 0:
            expr = expr + null_root(spec)
        assert expr.flatten() == simple_root(spec, j).flatten()


@pytest.mark.parametrize("l", range(2, 7))
def test_reflections_on_weights(l):
    spec = SystemSpec(l)
    for j in range(1, l + 1):
        w = fundamental_weight(spec, j)
        assert reflect(spec, w, 0).flatten() == (w + simple_root(spec, 0)).flatten()
        for i in range(1, l + 1):
            want = w - simple_root(spec, i) if i == j else w
            assert reflect(spec, w, i).flatten() == want.flatten()


def test_chi_examples():
    spec3 = SystemSpec(3)
    w = lambda i: fundamental_weight(spec3, i)  # noqa: E731
    assert chi(spec3, [Chain(1, 2)]).flatten() == (w(1) - w(2)).flatten()
    assert all(c == 0 for c in chi(spec3, []).flatten())
    spec2 = SystemSpec(2)
    got = chi(spec2, [Chain(1, 2)])
    assert got.coeffs == (Fr(1, 3), Fr(-1, 3))


def test_chi_overlap_rejected():
    with pytest.raises(InvalidSubdiagramError, match="invalid subdiagram"):
        chi(SystemSpec(4), [Chain(0, 2), Chain(1, 2)])


def test_even_chain_subsets_examples():
    as_sets = lambda xs: {frozenset(x) for x in xs}  # noqa: E731
    assert as_sets(even_chain_subsets(SystemSpec(2), 3)) == {frozenset({0, 1, 2})}
    assert as_sets(even_chain_subsets(SystemSpec(4), 3)) == as_sets(
        [{0, 1, 2}, {1, 2, 3}, {2, 3, 4}, {3, 4, 0}, {4, 0, 1}]
    )
    assert as_sets(even_chain_subsets(SystemSpec(3), 2)) == as_sets([{0, 1}, {1, 2}, {2, 3}, {3, 0}])
    s5 = as_sets(even_chain_subsets(SystemSpec(5), 2))
    assert len(s5) == 9
    assert {frozenset({0, 3}), frozenset({1, 4}), frozenset({2, 5})} <= s5


@pytest.mark.parametrize("l", range(2, 11))
def test_even_chain_subsets_methods_agree(l):
    spec = SystemSpec(l)
    for d in range(1, l + 2):
        a = sorted(even_chain_subsets(spec, d, method="filter"))
        b = sorted(even_chain_subsets(spec, d, method="pattern"))
        assert a == b
        assert (len(a) == 0) == ((l + 1 - d) % 2 == 1)
        for K in a:
            comp = set(spec.nodes()) - set(K)
            assert all(c.length % 2 == 0 for c in components(spec, comp))


def test_complement_chi_examples():
    assert all(c == 0 for c in complement_chi(SystemSpec(2), (0, 1, 2)).flatten())
    spec = SystemSpec(3)
    w = lambda i: fundamental_weight(spec, i)  # noqa: E731
    got = complement_chi(spec, (0, 1))
    assert got.flatten() == (w(2) - w(3)).flatten()
    assert got.coeffs == (Fr(1, 4), Fr(2, 4), Fr(-1, 4))


def test_complement_chi_odd_component():
    with pytest.raises(OddComponentError, match="odd component"):
        complement_chi(SystemSpec(3), (0,))


@pytest.mark.parametrize("l", range(2, 9))
def test_complement_chi_matches_components(l):
    spec = SystemSpec(l)
    for d in range(1, l + 2):
        for K in even_chain_subsets(spec, d):
            comp = set(spec.nodes()) - set(K)
            assert complement_chi(spec, K).flatten() == chi(spec, components(spec, comp)).flatten()


@pytest.mark.parametrize("l", range(2, 9))
def test_chi_lemmas(l):
    res = verify_chi_lemmas(SystemSpec(l))
    assert res.passed, res.failures[:3]


def test_spec_basics():
    assert SystemSpec(4).n == 2 and SystemSpec(4).is_even
    assert SystemSpec(5).n == 2 and not SystemSpec(5).is_even
    assert SystemSpec(3).mod(-1) == 3
    with pytest.raises(ValueError):
        SystemSpec(1)


def test_pairs_listing_is_exhaustive_for_small_l():
    spec = SystemSpec(5)
    direct = [K for K in combinations(range(6), 2)
              if all(c.length % 2 == 0 for c in components(spec, set(range(6)) - set(K)))]
    assert sorted(direct) == sorted(tuple(sorted(K)) for K in even_chain_subsets(spec, 2))
