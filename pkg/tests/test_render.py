from __future__ import annotations

from fractions import Fraction

from weyl_painleve.exprfield import Polynomial, alpha, fvar, qvar, xvar
from weyl_painleve.render import count_groups, render_latex, render_text, render_vector_field


def f(i):
    return Polynomial.var(fvar(i))


def a(i):
    return Polynomial.var(alpha(i))


def test_text_basics():
    assert render_text(Polynomial()) == "0"
    assert render_text(f(0) * f(1) - f(2)) == "f0*f1 - f2"
    assert render_text(f(0) ** 2) == "f0^2"
    assert render_text(Fraction(1, 3) * (a(1) - a(2)) * f(0)) == "(1/3)*(a1 - a2)*f0"


def test_grouping_by_dynamical_monomial():
    p = a(0) * f(1) + a(2) * f(1) + f(0)
    assert count_groups(p) == 2
    assert render_text(p) == "f0 + (a0 + a2)*f1"


def test_latex_basics():
    assert render_latex(a(1) * f(0)) == r"\alpha_{1} f_{0}"
    assert render_latex(Fraction(1, 2) * f(3)) == r"\frac{1}{2} f_{3}"


def test_names_override():
    x = Polynomial.var(xvar(0))
    assert render_text(x * Polynomial.var(qvar(1)), {xvar(0): "x"}) == "q1*x"


def test_rational_rendering():
    assert render_text(a(1) / f(1)) == "a1*f1^-1"
    assert render_text(a(1) / (f(1) + f(2))) == "(a1)/(f1 + f2)"
    assert render_latex(a(1) / (f(1) + f(2))) == r"\frac{\alpha_{1}}{f_{1} + f_{2}}"


def test_vector_field_line():
    F0 = f(0) * (f(1) - f(2)) + a(0)
    assert render_vector_field(0, F0) == "f0' = f0*(f1 - f2) + a0"
    assert render_vector_field(0, F0, latex=True).startswith("f_{0}' = ")
