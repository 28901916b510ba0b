from __future__ import annotations

import random
from fractions import Fraction

import pytest

import appendix as A
from weyl_painleve.dynamics import (
    build_all_h,
    build_F,
    build_h0,
    build_model,
    derivation_from_h,
    f_poly,
    a_poly,
    k_poly,
    odd_constant_weight,
    poisson,
    radical_basis,
    radical_generators,
    random_polynomial,
    rotate,
    verify_adjacent_differences,
    verify_hamiltonian_form,
    verify_model_shape,
    verify_poisson_structure,
    verify_radical,
)
from weyl_painleve.exprfield import Polynomial, derive, equals, fvar
from weyl_painleve.render import render_text
from weyl_painleve.rootdata import SystemSpec
from weyl_painleve.weylaction import generator_maps


def sym(p):
    return A.parse(render_text(p))


@pytest.mark.parametrize("l", [2, 3, 4, 5])
def test_build_F_matches_transcription(l):
    F = build_F(SystemSpec(l))
    assert A.same(sym(F[0]), A.f0_prime(l))


@pytest.mark.parametrize("l", [2, 3, 4, 5])
def test_build_h0_matches_transcription(l):
    assert A.same(sym(build_h0(SystemSpec(l))), A.h0(l))


def test_poisson_examples():
    spec = SystemSpec(2)
    f = lambda i: f_poly(spec, i)  # noqa: E731
    assert poisson(spec, f(1), f(2)) == Polynomial.const(1)
    assert poisson(spec, f(1), f(1)).is_zero()
    got = poisson(spec, build_h0(spec), f(0))
    want = f(0) * (f(1) - f(2)) + a_poly(spec, 0) - k_poly(spec)
    assert equals(got, want)


def test_adjacent_h_difference_l2():
    spec = SystemSpec(2)
    h = build_all_h(spec)
    k = k_poly(spec)
    x = sum((f_poly(spec, i) for i in spec.nodes()), Polynomial())
    assert equals(h[1] - h[0], k * f_poly(spec, 2) - k * x / 3)


def test_common_top_degree_component():
    for l in range(2, 7):
        spec = SystemSpec(l)
        h = build_all_h(spec)
        top = 3 if spec.is_even else 4

        def head(p):
            return {m: c for m, c in p.terms.items() if sum(e for v, e in m if v.kind.name == "F") == top}

        assert all(head(hj) == head(h[0]) for hj in h)


def test_l3_constant_difference_sign_pattern():
    spec = SystemSpec(3)
    h = build_all_h(spec)
    d = h[1] - h[0]
    const = {m: c for m, c in d.terms.items() if all(v.kind.name == "ALPHA" for v, _ in m)}
    assert const
    assert all(sum(e for _, e in m) == 2 for m in const)


def test_radical_generators_examples():
    f = lambda spec, i: f_poly(spec, i)  # noqa: E731
    s2, s3 = SystemSpec(2), SystemSpec(3)
    assert radical_generators(s2) == [f(s2, 0) + f(s2, 1) + f(s2, 2)]
    assert radical_generators(s3) == [f(s3, 0) + f(s3, 2), f(s3, 1) + f(s3, 3)]
    s4 = SystemSpec(4)
    g = radical_generators(s4)[0]
    assert all(poisson(s4, g, f(s4, j)).is_zero() for j in s4.nodes())


@pytest.mark.parametrize("l", range(2, 9))
def test_radical_dimension(l):
    spec = SystemSpec(l)
    assert len(radical_basis(spec)) == (1 if spec.is_even else 2)


def test_derivation_from_h_examples():
    s2 = SystemSpec(2)
    D = derivation_from_h(s2, build_h0(s2))
    f0 = f_poly(s2, 0)
    assert equals(D.images[fvar(0)], poisson(s2, build_h0(s2), f0) + k_poly(s2))
    g = radical_generators(s2)[0]
    assert equals(derive(g, build_model(s2).derivation), k_poly(s2))
    s3 = SystemSpec(3)
    D3 = derivation_from_h(s3, build_h0(s3))
    for j in s3.nodes():
        assert equals(D3.images[fvar(j)], build_model(s3).F[j])


def test_odd_growth_of_radical():
    for l in (3, 5):
        spec = SystemSpec(l)
        model = build_model(spec)
        k = k_poly(spec)
        for g in radical_generators(spec):
            assert equals(model.derive(g), k * g / 2)


@pytest.mark.parametrize("l", [3, 5, 7])
def test_odd_constant_term_two_ways(l):
    spec = SystemSpec(l)
    w = odd_constant_weight(spec).to_polynomial()
    half = sum((a_poly(spec, 2 * r + 1) for r in range(spec.n + 1)), Polynomial()) / 2
    assert equals(w * w, half * half)


def test_rotation_covariance():
    for l in range(2, 7):
        spec = SystemSpec(l)
        F = build_F(spec)
        assert all(rotate(spec, F[j]) == F[spec.mod(j + 1)] for j in spec.nodes())


@pytest.mark.parametrize("l", range(2, 7))
def test_radical_invariance(l):
    spec = SystemSpec(l)
    act = generator_maps(spec)
    gs = radical_generators(spec)
    for s in act.s:
        assert all(equals(s(g), g) for g in gs)
    if spec.is_even:
        assert equals(act.pi(gs[0]), gs[0])
    else:
        assert equals(act.pi(gs[0]), gs[1]) and equals(act.pi(gs[1]), gs[0])


@pytest.mark.parametrize("l", [2, 3, 4])
def test_verifiers_pass(l):
    spec = SystemSpec(l)
    for check in (verify_model_shape, verify_hamiltonian_form, verify_adjacent_differences, verify_radical):
        res = check(spec)
        assert res.passed, (check.__name__, res.failures[:2])
    res = verify_poisson_structure(spec, 20, 1)
    assert res.passed, res.failures[:2]


def test_poisson_bilinear_antisymmetric():
    spec = SystemSpec(4)
    rng = random.Random(7)
    for _ in range(20):
        a, b, c = (random_polynomial(spec, rng) for _ in range(3))
        assert equals(poisson(spec, a, b), -poisson(spec, b, a))
        assert equals(poisson(spec, a + c, b), poisson(spec, a, b) + poisson(spec, c, b))
        assert equals(poisson(spec, Fraction(3, 2) * a, b), Fraction(3, 2) * poisson(spec, a, b))
