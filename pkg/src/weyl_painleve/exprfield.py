"""Exact arithmetic in the field Q(alpha_0..alpha_l, f_0..f_l, ...).

Polynomials are sparse: a monomial is a tuple of ``(VarId, exponent)`` pairs
sorted by variable, and a polynomial maps monomials to nonzero rational
coefficients.  Rational expressions are numerator/denominator pairs whose
equality is decided by cross-multiplication, so nothing depends on whether
a fraction happens to be reduced.
"""

from __future__ import annotations

import heapq
import random as _random
from enum import Enum, IntEnum
from fractions import Fraction
from math import gcd as _igcd
from typing import Callable, Iterable, Mapping, NamedTuple, Union

__all__ = [
    "Kind",
    "VarId",
    "Polynomial",
    "RationalExpr",
    "FieldMap",
    "MapKind",
    "ZeroDenominatorError",
    "SingularSubstitutionError",
    "alpha",
    "fvar",
    "qvar",
    "pvar",
    "xvar",
    "tau",
    "taulog",
    "as_rational",
    "equals",
    "substitute",
    "partial",
    "derive",
    "poly_gcd",
    "exact_div",
    "set_gcd_threshold",
]


class ZeroDenominatorError(ZeroDivisionError):
    pass


class SingularSubstitutionError(ZeroDivisionError):
    pass


class Kind(IntEnum):
    ALPHA = 0
    F = 1
    Q = 2
    P = 3
    X = 4
    TAU = 5
    TAULOG = 6


class VarId(NamedTuple):
    kind: Kind
    index: int

    def __repr__(self) -> str:
        return f"{_TEXT_PREFIX[self.kind]}{self.index}"


_TEXT_PREFIX = {
    Kind.ALPHA: "a",
    Kind.F: "f",
    Kind.Q: "q",
    Kind.P: "p",
    Kind.X: "x",
    Kind.TAU: "tau",
    Kind.TAULOG: "ltau",
}


def alpha(i: int) -> VarId:
    return VarId(Kind.ALPHA, i)


def fvar(i: int) -> VarId:
    return VarId(Kind.F, i)


def qvar(i: int) -> VarId:
    return VarId(Kind.Q, i)


def pvar(i: int) -> VarId:
    return VarId(Kind.P, i)


def xvar(i: int) -> VarId:
    return VarId(Kind.X, i)


def tau(i: int) -> VarId:
    return VarId(Kind.TAU, i)


def taulog(i: int) -> VarId:
    """Formal symbol standing for tau_i'/tau_i."""
    return VarId(Kind.TAULOG, i)


Monomial = tuple  # tuple[tuple[VarId, int], ...], sorted by VarId
Scalar = Union[int, Fraction]

_ONE = Fraction(1)


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def _mono_div(a: Monomial, b: Monomial) -> Monomial | None:
    """a / b if b divides a, else None."""
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        r = d.get(v, 0) - e
        if r < 0:
            return None
        if r:
            d[v] = r
        else:
            del d[v]
    return tuple(sorted(d.items()))


def _mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def mono_sort_key(m: Monomial):
    """Graded-lex key: higher degree first, then alpha_0 > alpha_1 > ... > f_0 > ..."""
    return (-_mono_degree(m), tuple((v, -e) for v, e in m) + ((VarId(99, 0), 0),))


class Polynomial:
    """Sparse multivariate polynomial with Fraction coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        # trusted constructor: callers guarantee no zero coefficients
        self.terms: dict = terms if terms is not None else {}

    # -- constructors -------------------------------------------------
    @classmethod
    def from_terms(cls, terms: Mapping) -> "Polynomial":
        out = {}
        for m, c in terms.items():
            if c:
                m = tuple(sorted((v, e) for v, e in m if e))
                out[m] = out.get(m, 0) + Fraction(c)
                if not out[m]:
                    del out[m]
        return cls(out)

    @classmethod
    def const(cls, c: Scalar) -> "Polynomial":
        c = Fraction(c)
        return cls({(): c} if c else {})

    @classmethod
    def var(cls, v: VarId, exp: int = 1) -> "Polynomial":
        return cls({((v, exp),) if exp else (): _ONE})

    @classmethod
    def monomial(cls, m: Iterable[tuple[VarId, int]], c: Scalar = 1) -> "Polynomial":
        c = Fraction(c)
        if not c:
            return cls()
        return cls({tuple(sorted((v, e) for v, e in m if e)): c})

    # -- queries ------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def constant_value(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def variables(self) -> set:
        out = set()
        for m in self.terms:
            out.update(v for v, _ in m)
        return out

    def degree(self, v: VarId | None = None) -> int:
        if not self.terms:
            return -1
        if v is None:
            return max(_mono_degree(m) for m in self.terms)
        return max((e for m in self.terms for w, e in m if w == v), default=0)

    def degree_in(self, kinds: Iterable[Kind]) -> int:
        kinds = set(kinds)
        if not self.terms:
            return -1
        return max(sum(e for v, e in m if v.kind in kinds) for m in self.terms)

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda t: mono_sort_key(t[0]))

    def leading_term(self) -> tuple:
        return min(self.terms.items(), key=lambda t: mono_sort_key(t[0]))

    def leading_coefficient(self) -> Fraction:
        return self.leading_term()[1]

    def monomial_content(self) -> Monomial:
        """Largest monomial dividing every term."""
        it = iter(self.terms)
        first = next(it, None)
        if first is None:
            return ()
        common = dict(first)
        for m in it:
            if not common:
                break
            md = dict(m)
            for v in list(common):
                e = md.get(v, 0)
                if e < common[v]:
                    if e:
                        common[v] = e
                    else:
                        del common[v]
        return tuple(sorted(common.items()))

    # -- arithmetic ---------------------------------------------------
    def __neg__(self) -> "Polynomial":
        return Polynomial({m: -c for m, c in self.terms.items()})

    def __pos__(self) -> "Polynomial":
        return self

    def __add__(self, other):
        other = _coerce_poly(other)
        if other is NotImplemented:
            return NotImplemented
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s = s + c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return Polynomial(out)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return Polynomial()
            return Polynomial({m: c * other for m, c in self.terms.items()})
        other = _coerce_poly(other)
        if other is NotImplemented:
            return NotImplemented
        if not self.terms or not other.terms:
            return Polynomial()
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            (mb, cb), = b.items()
            if not mb:
                return Polynomial({m: c * cb for m, c in a.items()})
            return Polynomial({_mono_mul(m, mb): c * cb for m, c in a.items()})
        out: dict = {}
        bd = [(dict(m), c) for m, c in b.items()]
        for ma, ca in a.items():
            for md, cb in bd:
                if ma:
                    d = dict(md)
                    for v, e in ma:
                        d[v] = d.get(v, 0) + e
                    m = tuple(sorted(d.items()))
                else:
                    m = tuple(sorted(md.items()))
                s = out.get(m)
                out[m] = ca * cb if s is None else s + ca * cb
        return Polynomial({m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Polynomial":
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers need a nonnegative integer exponent")
        result = Polynomial.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDenominatorError("zero denominator")
            inv = 1 / Fraction(other)
            return Polynomial({m: c * inv for m, c in self.terms.items()})
        return RationalExpr(self) / other

    def __rtruediv__(self, other):
        return RationalExpr(_coerce_poly(other)) / self

    def __eq__(self, other) -> bool:
        if isinstance(other, RationalExpr):
            return equals(self, other)
        other = _coerce_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        from .render import render_text

        return f"Polynomial({render_text(self)})"

    # -- calculus and maps --------------------------------------------
    def partial(self, v: VarId) -> "Polynomial":
        out = {}
        for m, c in self.terms.items():
            for i, (w, e) in enumerate(m):
                if w == v:
                    nm = m[:i] + (((w, e - 1),) if e > 1 else ()) + m[i + 1:]
                    out[nm] = out.get(nm, 0) + c * e
                    break
        return Polynomial({m: c for m, c in out.items() if c})

    def rename(self, mapping: Mapping[VarId, VarId]) -> "Polynomial":
        """Apply a variable relabelling (must be injective on the support)."""
        out = {}
        for m, c in self.terms.items():
            nm = tuple(sorted((mapping.get(v, v), e) for v, e in m))
            out[nm] = out.get(nm, 0) + c
        return Polynomial({m: c for m, c in out.items() if c})

    def evaluate(self, values: Mapping[VarId, object]):
        total = 0
        for m, c in self.terms.items():
            t = c
            for v, e in m:
                t = t * values[v] ** e
            total = total + t
        return total

    def partial_evaluate(self, values: Mapping[VarId, Scalar]) -> "Polynomial":
        """Substitute exact scalars for some variables."""
        out: dict = {}
        for m, c in self.terms.items():
            keep = []
            for v, e in m:
                if v in values:
                    c = c * Fraction(values[v]) ** e
                else:
                    keep.append((v, e))
            if c:
                km = tuple(keep)
                out[km] = out.get(km, 0) + c
        return Polynomial({m: c for m, c in out.items() if c})

    def collect(self, kinds: Iterable[Kind]) -> dict:
        """Split into {monomial in variables of `kinds`: coefficient polynomial in the rest}."""
        kinds = set(kinds)
        out: dict = {}
        for m, c in self.terms.items():
            main = tuple((v, e) for v, e in m if v.kind in kinds)
            rest = tuple((v, e) for v, e in m if v.kind not in kinds)
            out.setdefault(main, {})[rest] = c
        return {k: Polynomial(v) for k, v in out.items()}

    def as_univariate(self, v: VarId) -> dict:
        """{exponent of v: coefficient polynomial free of v}."""
        out: dict = {}
        for m, c in self.terms.items():
            e = 0
            rest = m
            for i, (w, ew) in enumerate(m):
                if w == v:
                    e = ew
                    rest = m[:i] + m[i + 1:]
                    break
            out.setdefault(e, {})[rest] = c
        return {k: Polynomial(t) for k, t in out.items()}

    def rational_content(self) -> Fraction:
        """Positive rational r such that self/r has coprime integer coefficients."""
        if not self.terms:
            return Fraction(0)
        num = 0
        den = 1
        for c in self.terms.values():
            num = _igcd(num, c.numerator)
            den = den * c.denominator // _igcd(den, c.denominator)
        return Fraction(num, den)


def _coerce_poly(x):
    if isinstance(x, Polynomial):
        return x
    if isinstance(x, (int, Fraction)):
        return Polynomial.const(x)
    return NotImplemented


def _from_univariate(parts: Mapping[int, Polynomial], v: VarId) -> Polynomial:
    out = Polynomial()
    for e, c in parts.items():
        out = out + c * Polynomial.var(v, e)
    return out


# -- division and gcd -------------------------------------------------------

def exact_div(a: Polynomial, b: Polynomial) -> Polynomial | None:
    """Return a/b when b divides a exactly, else None."""
    if not b.terms:
        raise ZeroDenominatorError("zero denominator")
    if not a.terms:
        return Polynomial()
    if len(b.terms) == 1:
        (mb, cb), = b.terms.items()
        out = {}
        for m, c in a.terms.items():
            q = _mono_div(m, mb)
            if q is None:
                return None
            out[q] = c / cb
        return Polynomial(out)
    for v in b.variables():
        if a.degree(v) < b.degree(v):
            return None
    keys_b = sorted(b.terms, key=mono_sort_key)
    lm_b, tm_b = keys_b[0], keys_b[-1]
    keys_a = sorted(a.terms, key=mono_sort_key)
    # leading and trailing monomials of a product are products of those of the factors
    if _mono_div(keys_a[0], lm_b) is None or _mono_div(keys_a[-1], tm_b) is None:
        return None
    lc_b = b.terms[lm_b]
    rem = dict(a.terms)
    heap = [(mono_sort_key(m), m) for m in keys_a]
    quot: dict = {}
    while rem:
        while True:
            _, lm = heapq.heappop(heap)
            if lm in rem:
                break
        lc = rem[lm]
        qm = _mono_div(lm, lm_b)
        if qm is None:
            return None
        qc = lc / lc_b
        quot[qm] = quot.get(qm, 0) + qc
        for m, c in b.terms.items():
            pm = _mono_mul(m, qm)
            old = rem.get(pm)
            s = (old or 0) - qc * c
            if s:
                rem[pm] = s
                if old is None:
                    heapq.heappush(heap, (mono_sort_key(pm), pm))
            else:
                rem.pop(pm, None)
    return Polynomial({m: c for m, c in quot.items() if c})


def _monic(p: Polynomial) -> Polynomial:
    if not p.terms:
        return p
    lc = p.leading_coefficient()
    return p if lc == 1 else p / lc


def _univariate_content(parts: dict, seed: Polynomial | None = None) -> Polynomial:
    """gcd of the coefficients; a nonzero seed is folded in first so g only shrinks."""
    g = seed if seed is not None else Polynomial()
    if g.terms and g.is_constant():
        return Polynomial.const(1)
    for c in sorted(parts.values(), key=lambda p: len(p.terms)):
        g = poly_gcd(g, c)
        if g.is_constant() and g.terms:
            return Polynomial.const(1)
    return g


def _prem(a: dict, b: dict) -> dict:
    """Pseudo-remainder of univariate views (coefficients are polynomials)."""
    db = max(b)
    lcb = b[db]
    r = {e: c for e, c in a.items() if c}
    while r and max(r) >= db:
        dr = max(r)
        lcr = r[dr]
        shift = dr - db
        nr = {e: c * lcb for e, c in r.items()}
        for e, c in b.items():
            key = e + shift
            nr[key] = nr.get(key, Polynomial()) - lcr * c
        r = {e: c for e, c in nr.items() if c}
    return r


def _subresultant_gcd(a: dict, b: dict, v: VarId) -> Polynomial:
    """Primitive gcd of two primitive univariate views via the subresultant PRS."""
    if max(a) < max(b):
        a, b = b, a
    if max(b) == 0:
        return Polynomial.const(1)
    g = h = Polynomial.const(1)
    while True:
        delta = max(a) - max(b)
        r = _prem(a, b)
        if not r:
            break
        if max(r) == 0:
            return Polynomial.const(1)
        divisor = g * h**delta
        a, b = b, {e: exact_div(x, divisor) for e, x in r.items()}
        g = a[max(a)]
        if delta == 1:
            h = g
        elif delta > 1:
            h = exact_div(g**delta, h ** (delta - 1))
    cb = _univariate_content(b)
    out = _from_univariate(b, v)
    return out if cb.is_constant() else exact_div(out, cb)


def _univariate_values(p: Polynomial, v: VarId, point: Mapping) -> list:
    """Dense coefficient list (low degree first) of p with all but v specialized."""
    coeffs = [Fraction(0)] * (p.degree(v) + 1)
    for m, c in p.terms.items():
        e = 0
        val = 1
        for w, x in m:
            if w == v:
                e = x
            else:
                val *= point[w] ** x
        coeffs[e] += c * val
    return coeffs


def _univariate_gcd_degree(a: list, b: list) -> int:
    def trim(p):
        while p and p[-1] == 0:
            p.pop()
        return p

    a, b = trim(list(a)), trim(list(b))
    while b:
        r = list(a)
        while len(r) >= len(b) and r:
            q = r[-1] / b[-1]
            shift = len(r) - len(b)
            for i, c in enumerate(b):
                r[i + shift] -= q * c
            trim(r)
        a, b = b, r
    return len(a) - 1


def _coprime_by_specialization(a: Polynomial, b: Polynomial, shared) -> bool:
    """Sufficient test for gcd(a, b) = 1.

    For each shared variable v, specialize the others at a point where both
    leading coefficients in v survive; the univariate gcd degree then bounds
    deg_v of the true gcd from above.  A nonconstant gcd involves some shared
    variable, so degree 0 for every v proves coprimality.
    """
    names = sorted(a.variables() | b.variables())
    rng = _random.Random(len(a.terms) * 1009 + len(b.terms))
    for v in sorted(shared):
        da, db = a.degree(v), b.degree(v)
        for _attempt in range(3):
            point = {w: rng.randint(2, 101) for w in names if w != v}
            ua = _univariate_values(a, v, point)
            ub = _univariate_values(b, v, point)
            if ua[da] != 0 and ub[db] != 0:
                break
        else:
            return False
        if _univariate_gcd_degree(ua, ub) > 0:
            return False
    return True


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Greatest common divisor over Q, normalized to leading coefficient 1.

    A specialization test settles the common coprime case; otherwise the
    subresultant PRS runs in the variable of least degree.
    """
    if not a.terms:
        return _monic(b)
    if not b.terms:
        return _monic(a)
    if a.is_constant() or b.is_constant():
        return Polynomial.const(1)
    if a.is_monomial() or b.is_monomial():
        ma = a.monomial_content()
        mb = b.monomial_content()
        common = dict(ma)
        mbd = dict(mb)
        out = tuple(sorted((v, min(e, mbd[v])) for v, e in common.items() if v in mbd))
        return Polynomial({out: _ONE})
    shared = a.variables() & b.variables()
    if not shared:
        return Polynomial.const(1)
    if _coprime_by_specialization(a, b, shared):
        return Polynomial.const(1)
    v = min(shared, key=lambda w: (min(a.degree(w), b.degree(w)), max(a.degree(w), b.degree(w)), w))
    ua = a.as_univariate(v)
    ub = b.as_univariate(v)
    if len(b.terms) > len(a.terms):
        ua, ub = ub, ua
    cb = _univariate_content(ub)
    c = _univariate_content(ua, seed=cb)
    # pp of the last PRS remainder is pp(gcd) even for non-primitive inputs,
    # so only the smaller operand is made primitive
    pb = {e: exact_div(x, cb) for e, x in ub.items()} if not cb.is_constant() else ub
    g = _subresultant_gcd(ua, pb, v)
    return _monic(c * g)


_GCD_THRESHOLD = [48]


def set_gcd_threshold(n: int) -> int:
    """Set the term count above which fractions get gcd-reduced; returns the old value."""
    old = _GCD_THRESHOLD[0]
    _GCD_THRESHOLD[0] = n
    return old


# -- rational expressions ---------------------------------------------------

class RationalExpr:
    """num/den with den != 0 and den's leading coefficient equal to 1."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, *, reduce: bool | None = None):
        num = _coerce_poly(num) if not isinstance(num, Polynomial) else num
        if den is None:
            self.num, self.den = num, Polynomial.const(1)
            return
        den = _coerce_poly(den) if not isinstance(den, Polynomial) else den
        if not den.terms:
            raise ZeroDenominatorError("zero denominator")
        if not num.terms:
            self.num, self.den = num, Polynomial.const(1)
            return
        if den.is_constant():
            self.num, self.den = num / den.constant_value(), Polynomial.const(1)
            return
        mc = den.monomial_content()
        if mc:
            nc = dict(num.monomial_content())
            common = tuple(sorted((v, min(e, nc[v])) for v, e in mc if v in nc))
            if common:
                num = Polynomial({_mono_div(m, common): c for m, c in num.terms.items()})
                den = Polynomial({_mono_div(m, common): c for m, c in den.terms.items()})
        if reduce is None:
            reduce = (
                not den.is_monomial()
                and len(num.terms) + len(den.terms) > _GCD_THRESHOLD[0]
            )
        if reduce and not den.is_constant():
            g = poly_gcd(num, den)
            if not g.is_constant():
                num = exact_div(num, g)
                den = exact_div(den, g)
        lc = den.leading_coefficient()
        if lc != 1:
            num, den = num / lc, den / lc
        self.num, self.den = num, den

    @classmethod
    def _raw(cls, num: Polynomial, den: Polynomial) -> "RationalExpr":
        obj = cls.__new__(cls)
        obj.num, obj.den = num, den
        return obj

    def is_zero(self) -> bool:
        return not self.num.terms

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def as_polynomial(self) -> Polynomial:
        if not self.den.is_constant():
            q = exact_div(self.num, self.den)
            if q is None:
                raise ValueError("expression is not a polynomial")
            return q
        return self.num / self.den.constant_value()

    def reduced(self) -> "RationalExpr":
        return RationalExpr(self.num, self.den, reduce=True)

    def variables(self) -> set:
        return self.num.variables() | self.den.variables()

    def size(self) -> int:
        return len(self.num.terms) + len(self.den.terms)

    # arithmetic
    def __neg__(self) -> "RationalExpr":
        return RationalExpr._raw(-self.num, self.den)

    def __pos__(self):
        return self

    def __add__(self, other):
        other = _coerce_rat(other)
        if other is NotImplemented:
            return NotImplemented
        if other.den == self.den:
            return RationalExpr(self.num + other.num, self.den)
        if other.den.is_constant():
            return RationalExpr(self.num + other.num * self.den, self.den)
        if self.den.is_constant():
            return RationalExpr(self.num * other.den + other.num, other.den)
        if self.den.is_monomial() and other.den.is_monomial():
            (ma, _), = self.den.terms.items()
            (mb, _), = other.den.terms.items()
            da, db = dict(ma), dict(mb)
            lcm = tuple(sorted((v, max(da.get(v, 0), db.get(v, 0))) for v in set(da) | set(db)))
            fa = Polynomial({_mono_div(lcm, ma): _ONE})
            fb = Polynomial({_mono_div(lcm, mb): _ONE})
            return RationalExpr(self.num * fa + other.num * fb, Polynomial({lcm: _ONE}))
        # Henrici: only gcd(t, g) with g = gcd(b, d) can be left to cancel
        g = poly_gcd(self.den, other.den)
        if g.is_constant():
            return RationalExpr(self.num * other.den + other.num * self.den, self.den * other.den, reduce=False)
        b, d = exact_div(self.den, g), exact_div(other.den, g)
        t = self.num * d + other.num * b
        den = self.den * d
        g2 = poly_gcd(t, g) if t.terms else Polynomial.const(1)
        if not g2.is_constant():
            t, den = exact_div(t, g2), exact_div(den, g2)
        return RationalExpr(t, den, reduce=False)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce_rat(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce_rat(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RationalExpr._raw(self.num * other, self.den) if other else RationalExpr(0)
        other = _coerce_rat(other)
        if other is NotImplemented:
            return NotImplemented
        return _cross_cancel(self.num, self.den, other.num, other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce_rat(other)
        if other is NotImplemented:
            return NotImplemented
        if not other.num.terms:
            raise ZeroDenominatorError("zero denominator")
        return _cross_cancel(self.num, self.den, other.den, other.num)

    def __rtruediv__(self, other):
        other = _coerce_rat(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, n: int) -> "RationalExpr":
        if n >= 0:
            return RationalExpr._raw(self.num ** n, self.den ** n)
        return RationalExpr(1) / (self ** (-n))

    def __eq__(self, other) -> bool:
        other = _coerce_rat(other)
        if other is NotImplemented:
            return NotImplemented
        return equals(self, other)

    __hash__ = None  # equality is semantic, not structural

    def __repr__(self) -> str:
        from .render import render_text

        return f"RationalExpr({render_text(self)})"

    def partial(self, v: VarId) -> "RationalExpr":
        dn = self.num.partial(v)
        dd = self.den.partial(v)
        if not dd.terms:
            return RationalExpr(dn, self.den)
        return RationalExpr(dn * self.den - self.num * dd, self.den * self.den)

    def evaluate(self, values: Mapping[VarId, object]):
        d = self.den.evaluate(values)
        if d == 0:
            raise ZeroDenominatorError("zero denominator")
        return self.num.evaluate(values) / d


Expr = Union[Polynomial, RationalExpr]


def _cross_cancel(a: Polynomial, b: Polynomial, c: Polynomial, d: Polynomial) -> RationalExpr:
    """(a/b)*(c/d), cancelling gcd(a, d) and gcd(c, b) instead of the full gcd."""
    if not a.terms or not c.terms:
        return RationalExpr(0)
    if not d.is_constant():
        g = poly_gcd(a, d)
        if not g.is_constant():
            a, d = exact_div(a, g), exact_div(d, g)
    if not b.is_constant():
        g = poly_gcd(c, b)
        if not g.is_constant():
            c, b = exact_div(c, g), exact_div(b, g)
    return RationalExpr(a * c, b * d, reduce=False)


def _coerce_rat(x):
    if isinstance(x, RationalExpr):
        return x
    if isinstance(x, Polynomial):
        return RationalExpr._raw(x, Polynomial.const(1))
    if isinstance(x, (int, Fraction)):
        return RationalExpr._raw(Polynomial.const(x), Polynomial.const(1))
    return NotImplemented


def as_rational(x) -> RationalExpr:
    r = _coerce_rat(x)
    if r is NotImplemented:
        raise TypeError(f"cannot interpret {type(x).__name__} as a rational expression")
    return r


def equals(a, b) -> bool:
    """Exact field equality via num_a*den_b == num_b*den_a."""
    a = as_rational(a)
    b = as_rational(b)
    if a.den.terms == b.den.terms:
        return a.num.terms == b.num.terms
    return (a.num * b.den).terms == (b.num * a.den).terms


# -- maps -------------------------------------------------------------------

class MapKind(Enum):
    AUTOMORPHISM = "automorphism"
    DERIVATION = "derivation"


class FieldMap:
    """An automorphism or derivation given by its values on generators.

    Automorphisms default to the identity on absent generators, derivations
    to zero.
    """

    __slots__ = ("images", "kind", "name")

    def __init__(self, images: Mapping[VarId, object], kind: MapKind = MapKind.AUTOMORPHISM, name: str = ""):
        clean = {}
        for v, img in images.items():
            if isinstance(img, (int, Fraction)):
                img = Polynomial.const(img)
            if kind is MapKind.AUTOMORPHISM:
                if isinstance(img, Polynomial) and img.terms == {((v, 1),): _ONE}:
                    continue
            elif isinstance(img, Polynomial) and not img.terms:
                continue
            clean[v] = img
        self.images = clean
        self.kind = kind
        self.name = name

    def __call__(self, e):
        if self.kind is MapKind.AUTOMORPHISM:
            return substitute(e, self)
        return derive(e, self)

    def image(self, v: VarId):
        if v in self.images:
            return self.images[v]
        if self.kind is MapKind.AUTOMORPHISM:
            return Polynomial.var(v)
        return Polynomial()

    def __repr__(self) -> str:
        return f"FieldMap({self.name or self.kind.value}, {len(self.images)} images)"


def _split_image(img) -> tuple[Polynomial, Polynomial]:
    if isinstance(img, Polynomial):
        return img, Polynomial.const(1)
    r = as_rational(img)
    return r.num, r.den


def _subst_numerator(p: Polynomial, imgs: dict, maxdeg: dict, cache: dict) -> Polynomial:
    """Numerator of p(images) over the common denominator prod d_v^maxdeg_v."""

    def power(v, which, e):
        key = (v, which, e)
        r = cache.get(key)
        if r is None:
            base = imgs[v][which]
            r = base ** e
            cache[key] = r
        return r

    groups: dict = {}
    for m, c in p.terms.items():
        kept = []
        sub = []
        for v, e in m:
            if v in imgs:
                sub.append((v, e))
            else:
                kept.append((v, e))
        groups.setdefault(tuple(sub), {})[tuple(kept)] = c
    out = Polynomial()
    for sub, kept_terms in groups.items():
        factor = Polynomial.const(1)
        present = dict(sub)
        for v, (n, d) in imgs.items():
            md = maxdeg.get(v, 0)
            if not md:
                continue
            e = present.get(v, 0)
            if e:
                factor = factor * power(v, 0, e)
            if not d.is_constant() and md - e:
                factor = factor * power(v, 1, md - e)
        out = out + Polynomial(kept_terms) * factor
    return out


def substitute(e, m) -> RationalExpr | Polynomial:
    """Apply the ring homomorphism defined by the generator images in ``m``.

    Polynomial input with polynomial images stays a Polynomial.
    """
    images = m.images if isinstance(m, FieldMap) else dict(m)
    if isinstance(e, (int, Fraction)):
        return Polynomial.const(e)
    if isinstance(e, Polynomial):
        num, den = e, None
    else:
        num, den = e.num, (None if e.den.is_constant() else e.den)
        if den is None:
            num = e.num / e.den.constant_value()
    vars_present = num.variables() | (den.variables() if den is not None else set())
    imgs = {v: _split_image(images[v]) for v in vars_present if v in images}
    if not imgs:
        return e
    maxdeg = {v: max(num.degree(v), den.degree(v) if den is not None else 0) for v in imgs}
    poly_images = all(d.is_constant() for _, d in imgs.values())
    # normalize constant denominators into the numerators
    for v, (n, d) in list(imgs.items()):
        if d.is_constant() and d.constant_value() != 1:
            imgs[v] = (n / d.constant_value(), Polynomial.const(1))
    cache: dict = {}
    nn = _subst_numerator(num, imgs, maxdeg, cache)
    if den is None:
        if poly_images:
            return nn
        factors = {}
        for v, (n, d) in imgs.items():
            if not d.is_constant():
                if not d.terms:
                    raise SingularSubstitutionError("singular substitution")
                factors[d] = factors.get(d, 0) + maxdeg[v]
        nn, dn = _cancel_known_factors(nn, None, factors)
        return RationalExpr(nn, dn, reduce=False)
    dn = _subst_numerator(den, imgs, maxdeg, cache)
    if not dn.terms:
        raise SingularSubstitutionError("singular substitution")
    factors = {d: maxdeg[v] for v, (n, d) in imgs.items() if not d.is_constant() and not d.is_monomial()}
    nn, dn = _cancel_known_factors(nn, dn, factors)
    return RationalExpr(nn, dn)


def _cancel_known_factors(num: Polynomial, den: Polynomial | None, factors: dict):
    """Divide out the image denominators that the substitution introduced.

    With ``den`` None the denominator is the product of ``factors`` (with
    multiplicity); otherwise each factor is tried against both sides.
    """
    out_den = Polynomial.const(1) if den is None else den
    for d, mult in factors.items():
        if d.is_monomial() and den is not None:
            continue
        left = mult
        while left and num.terms:
            if den is not None:
                qd = exact_div(out_den, d)
                if qd is None:
                    break
            q = exact_div(num, d)
            if q is None:
                break
            num = q
            if den is not None:
                out_den = qd
            left -= 1
        if den is None and left:
            out_den = out_den * d ** left
    return num, out_den


def partial(e, v: VarId):
    if isinstance(e, (int, Fraction)):
        return Polynomial()
    return e.partial(v)


def derive(e, d: FieldMap | Mapping[VarId, object]):
    """Extend a derivation from generators by the Leibniz and quotient rules."""
    images = d.images if isinstance(d, FieldMap) else dict(d)
    if isinstance(e, (int, Fraction)):
        return Polynomial()
    if isinstance(e, Polynomial):
        return _derive_poly(e, images)
    dn = _derive_poly(e.num, images)
    if e.den.is_constant():
        return dn / e.den.constant_value()
    dd = _derive_poly(e.den, images)
    if isinstance(dd, Polynomial):
        # (n/d)' = (n' (d/g) - n (d'/g)) / (d (d/g)) with g = gcd(d, d')
        g = poly_gcd(e.den, dd) if dd.terms else e.den
        dg = exact_div(e.den, g)
        return (dn * dg - e.num * exact_div(dd, g)) / (e.den * dg)
    return (dn * e.den - e.num * dd) / (e.den * e.den)


def _derive_poly(p: Polynomial, images: Mapping):
    acc_poly = Polynomial()
    acc_rat: RationalExpr | None = None
    for v in p.variables():
        img = images.get(v)
        if img is None:
            continue
        dp = p.partial(v)
        if isinstance(img, Polynomial):
            acc_poly = acc_poly + dp * img
        else:
            term = dp * img
            acc_rat = term if acc_rat is None else acc_rat + term
    if acc_rat is None:
        return acc_poly
    return acc_rat + acc_poly


def map_compose(*maps: Callable) -> Callable:
    """Composite callable: map_compose(a, b)(e) == a(b(e))."""

    def apply(e):
        for m in reversed(maps):
            e = m(e)
        return e

    return apply
