"""Deterministic text and LaTeX renderers for polynomials and rational expressions.

Output groups terms by their monomial in the dynamical variables (f, q, p,
x, tau) and prints each coefficient as a rational multiple of a primitive
integer polynomial in the alphas, e.g. ``- (1/3)*(2*a1 + a2)*f2``.  A
denominator that is a single monomial is printed as negative exponents.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .exprfield import Kind, Polynomial, RationalExpr, VarId, as_rational, mono_sort_key

_PARAM_KINDS = frozenset({Kind.ALPHA})

_LATEX_SYMBOL = {
    Kind.ALPHA: r"\alpha",
    Kind.F: "f",
    Kind.Q: "q",
    Kind.P: "p",
    Kind.X: "x",
    Kind.TAU: r"\tau",
    Kind.TAULOG: r"\lambda",
}


def text_name(v: VarId, names: Mapping[VarId, str] | None = None) -> str:
    if names and v in names:
        return names[v]
    return repr(v)


def latex_name(v: VarId, names: Mapping[VarId, str] | None = None) -> str:
    if names and v in names:
        return names[v]
    return f"{_LATEX_SYMBOL[v.kind]}_{{{v.index}}}"


class _Style:
    def __init__(self, latex: bool, names):
        self.latex = latex
        self.names = names

    def var(self, v, e):
        if self.latex:
            s = latex_name(v, self.names)
            return s if e == 1 else f"{s}^{{{e}}}"
        s = text_name(v, self.names)
        return s if e == 1 else f"{s}^{e}"

    def mono(self, m):
        sep = " " if self.latex else "*"
        return sep.join(self.var(v, e) for v, e in m)

    def scalar(self, c: Fraction, standalone: bool) -> str:
        if c.denominator == 1:
            return str(c.numerator)
        if self.latex:
            return rf"\frac{{{c.numerator}}}{{{c.denominator}}}"
        return f"{c}" if standalone else f"({c})"

    def paren(self, s):
        return rf"\left({s}\right)" if self.latex else f"({s})"

    @property
    def times(self):
        return " " if self.latex else "*"


def _join(pieces: list[tuple[int, str]]) -> str:
    if not pieces:
        return "0"
    out = []
    for i, (sign, body) in enumerate(pieces):
        if i == 0:
            out.append(("-" if sign < 0 else "") + body)
        else:
            out.append((" - " if sign < 0 else " + ") + body)
    return "".join(out)


def _plain_poly(p: Polynomial, st: _Style) -> str:
    """Flat rendering, used for primitive integer coefficient polynomials."""
    pieces = []
    for m, c in p.sorted_terms():
        a = abs(c)
        if not m:
            pieces.append((c, st.scalar(a, True)))
        elif a == 1:
            pieces.append((c, st.mono(m)))
        else:
            pieces.append((c, st.scalar(a, False) + st.times + st.mono(m)))
    return _join(pieces)


def _coefficient_piece(coef: Polynomial, main, st: _Style) -> tuple[int, str]:
    factors = []
    if coef.is_constant():
        c = coef.constant_value()
        sign = 1 if c > 0 else -1
        a = abs(c)
        if not main:
            return sign, st.scalar(a, True)
        if a != 1:
            factors.append(st.scalar(a, False))
    else:
        r = coef.rational_content()
        if coef.leading_coefficient() < 0:
            r = -r
        prim = coef / r
        sign = 1 if r > 0 else -1
        a = abs(r)
        if a != 1:
            factors.append(st.scalar(a, False))
        if prim.is_monomial():
            factors.append(st.mono(next(iter(prim.terms))))
        else:
            factors.append(st.paren(_plain_poly(prim, st)))
    if main:
        factors.append(st.mono(main))
    return sign, st.times.join(factors)


def _laurent_terms(e) -> dict:
    """Terms with possibly negative exponents; only for monomial denominators."""
    r = as_rational(e)
    if r.den.is_constant():
        c = r.den.constant_value()
        return {m: v / c for m, v in r.num.terms.items()}
    (dm, dc), = r.den.terms.items()
    out = {}
    for m, c in r.num.terms.items():
        d = dict(m)
        for v, x in dm:
            d[v] = d.get(v, 0) - x
        out[tuple(sorted((v, x) for v, x in d.items() if x))] = c / dc
    return out


def _grouped(terms: dict, st: _Style) -> list[tuple[int, str]]:
    groups: dict = {}
    for m, c in terms.items():
        main = tuple((v, x) for v, x in m if v.kind not in _PARAM_KINDS)
        par = tuple((v, x) for v, x in m if v.kind in _PARAM_KINDS)
        groups.setdefault(main, {})[par] = c
    pieces = []
    for main in sorted(groups, key=mono_sort_key):
        pieces.append(_coefficient_piece(Polynomial(groups[main]), main, st))
    return pieces


def _render(e, st: _Style) -> str:
    r = as_rational(e)
    if r.den.is_constant() or r.den.is_monomial():
        return _join(_grouped(_laurent_terms(r), st))
    num = _join(_grouped(r.num.terms, st))
    den = _join(_grouped(r.den.terms, st))
    if st.latex:
        return rf"\frac{{{num}}}{{{den}}}"
    return f"({num})/({den})"


def render_text(e, names: Mapping[VarId, str] | None = None) -> str:
    return _render(e, _Style(False, names))


def render_latex(e, names: Mapping[VarId, str] | None = None) -> str:
    return _render(e, _Style(True, names))


def count_groups(e) -> int:
    """Number of distinct monomials in the non-parameter variables."""
    terms = _laurent_terms(e)
    return len({tuple((v, x) for v, x in m if v.kind not in _PARAM_KINDS) for m in terms})


def render_vector_field(j: int, F: Polynomial, latex: bool = False) -> str:
    """``f_j' = f_j*(...) + rest``: terms of f-degree >= 2 divisible by f_j are factored."""
    st = _Style(latex, None)
    fj = VarId(Kind.F, j)
    inner = {}
    rest = {}
    for m, c in F.terms.items():
        fdeg = sum(x for v, x in m if v.kind == Kind.F)
        d = dict(m)
        if fdeg >= 2 and d.get(fj, 0) >= 1:
            d[fj] -= 1
            inner[tuple(sorted((v, x) for v, x in d.items() if x))] = c
        else:
            rest[m] = c
    lhs = f"{latex_name(fj)}'" if latex else f"f{j}'"
    pieces = []
    if inner:
        body = _join(_grouped(inner, st))
        pieces.append((1, st.mono(((fj, 1),)) + st.times + st.paren(body)))
    pieces.extend(_grouped(rest, st))
    return f"{lhs} = {_join(pieces)}"
