"""Canonical coordinates (q; p; x) and the polynomial Hamiltonians H.

Even l = 2n uses a single auxiliary coordinate ``x`` (stored as ``xvar(0)``
and printed as ``x``); odd l = 2n+1 uses ``x0, x1`` and H is Laurent in x0.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache

from .dynamics import SystemModel, a_poly, build_model, f_poly, k_poly, odd_constant_weight, poisson, random_polynomial
from .exprfield import (
    FieldMap,
    Kind,
    Polynomial,
    RationalExpr,
    equals,
    fvar,
    partial,
    pvar,
    qvar,
    substitute,
    xvar,
)
from .report import CheckResult, timed
from .rootdata import SystemSpec, fundamental_weight

__all__ = [
    "CoordinateMap",
    "CanonicalHamiltonian",
    "build_coordinate_map",
    "build_H",
    "canonical_names",
    "canonical_variables",
    "canonical_bracket",
    "canonical_brackets_check",
    "verify_coordinate_roundtrip",
    "verify_H_equals_h0",
    "verify_hamilton_equations",
    "verify_canonical_bracket_formula",
    "verify_rescaled_variables",
]


class CoordinateMapError(ValueError):
    pass


def canonical_names(spec: SystemSpec) -> dict:
    return {xvar(0): "x"} if spec.is_even else {}


def canonical_variables(spec: SystemSpec) -> list:
    n = spec.n
    xs = [xvar(0)] if spec.is_even else [xvar(0), xvar(1)]
    return [qvar(i) for i in range(1, n + 1)] + [pvar(i) for i in range(1, n + 1)] + xs


@dataclass(frozen=True)
class CoordinateMap:
    """forward: (q, p, x) in terms of f; backward: f in terms of (q, p, x)."""

    spec: SystemSpec
    forward: FieldMap
    backward: FieldMap

    def to_canonical(self, e):
        return substitute(e, self.backward)

    def to_f(self, e):
        return substitute(e, self.forward)

    def roundtrip_failures(self) -> list[str]:
        bad = []
        for j in self.spec.nodes():
            v = Polynomial.var(fvar(j))
            if not equals(self.to_f(self.to_canonical(v)), v):
                bad.append(f"f{j}")
        for u in canonical_variables(self.spec):
            v = Polynomial.var(u)
            if not equals(self.to_canonical(self.to_f(v)), v):
                bad.append(repr(u))
        return bad


@lru_cache(maxsize=None)
def build_coordinate_map(spec: SystemSpec) -> CoordinateMap:
    n = spec.n
    f = lambda i: f_poly(spec, i)  # noqa: E731
    q = lambda i: Polynomial.var(qvar(i))  # noqa: E731
    p = lambda i: Polynomial.var(pvar(i))  # noqa: E731
    fwd, bwd = {}, {}
    if spec.is_even:
        partial_sum = Polynomial()
        for i in range(1, n + 1):
            partial_sum = partial_sum + f(2 * i - 1)
            fwd[qvar(i)] = f(2 * i)
            fwd[pvar(i)] = partial_sum
        fwd[xvar(0)] = sum((f(j) for j in spec.nodes()), Polynomial())
        x = Polynomial.var(xvar(0))
        bwd[fvar(0)] = x - sum((q(i) for i in range(1, n + 1)), Polynomial()) - p(n)
        for i in range(1, n + 1):
            bwd[fvar(2 * i)] = q(i)
            bwd[fvar(2 * i - 1)] = p(i) - p(i - 1) if i > 1 else p(1)
    else:
        g0 = sum((f(j) for j in spec.nodes() if j % 2 == 0), Polynomial())
        g1 = sum((f(j) for j in spec.nodes() if j % 2 == 1), Polynomial())
        partial_sum = Polynomial()
        for i in range(1, n + 1):
            partial_sum = partial_sum + f(2 * i - 1)
            fwd[qvar(i)] = g0 * f(2 * i)
            fwd[pvar(i)] = RationalExpr(partial_sum, g0)
        fwd[xvar(0)] = g0
        fwd[xvar(1)] = g1
        x0, x1 = Polynomial.var(xvar(0)), Polynomial.var(xvar(1))
        qsum = sum((q(i) for i in range(1, n + 1)), Polynomial())
        bwd[fvar(0)] = RationalExpr(x0 * x0 - qsum, x0)
        for i in range(1, n + 1):
            bwd[fvar(2 * i)] = RationalExpr(q(i), x0)
            bwd[fvar(2 * i - 1)] = x0 * (p(i) - p(i - 1)) if i > 1 else x0 * p(1)
        bwd[fvar(2 * n + 1)] = x1 - x0 * p(n)
    cmap = CoordinateMap(spec, FieldMap(fwd, name="forward"), FieldMap(bwd, name="backward"))
    bad = cmap.roundtrip_failures()
    if bad:
        raise CoordinateMapError(f"coordinate round trip fails on {bad}")
    return cmap


@dataclass(frozen=True)
class CanonicalHamiltonian:
    spec: SystemSpec
    H: object
    constants: dict = field(default_factory=dict)


def _alt_weight_sum(spec: SystemSpec) -> Polynomial:
    return odd_constant_weight(spec).to_polynomial()


@lru_cache(maxsize=None)
def build_H(spec: SystemSpec) -> CanonicalHamiltonian:
    n = spec.n
    a = lambda i: a_poly(spec, i)  # noqa: E731
    q = [None] + [Polynomial.var(qvar(i)) for i in range(1, n + 1)]
    p = [None] + [Polynomial.var(pvar(i)) for i in range(1, n + 1)]
    rng = range(1, n + 1)
    qsum = sum((q[i] for i in rng), Polynomial())
    betas = [None]
    acc = Polynomial()
    for i in rng:
        acc = acc + a(2 * i - 1)
        betas.append(acc)
    if spec.is_even:
        x = Polynomial.var(xvar(0))
        beta = _alt_weight_sum(spec)
        beta_closed = sum(((n + 1 - r) * a(2 * r - 1) - r * a(2 * r) for r in rng), Polynomial()) / (2 * n + 1)
        if beta != beta_closed:
            raise ArithmeticError("two expressions for beta disagree")
        H = (x - qsum) * sum((q[i] * p[i] for i in rng), Polynomial())
        H = H - sum((q[i] * p[i] ** 2 for i in rng), Polynomial())
        for i in rng:
            for j in range(i + 1, n + 1):
                H = H - q[i] * (p[i] - p[j]) * q[j]
        H = H - sum((betas[i] * q[i] for i in rng), Polynomial())
        H = H + sum((a(2 * i) * p[i] for i in rng), Polynomial())
        H = H + beta * x
        consts = {"beta": beta, **{f"beta{i}": betas[i] for i in rng}}
        return CanonicalHamiltonian(spec, H, consts)
    x0, x1 = Polynomial.var(xvar(0)), Polynomial.var(xvar(1))
    r = RationalExpr(x1, x0)
    gamma = _alt_weight_sum(spec)
    gamma_closed = sum((a(2 * i + 1) for i in range(0, n + 1)), Polynomial()) / 2
    if gamma != gamma_closed:
        raise ArithmeticError("two expressions for gamma disagree")
    top = fundamental_weight(spec, 2 * n + 1).to_polynomial()
    H = (x0 * x0 - qsum) * sum((q[i] * p[i] * (r - p[i]) for i in rng), RationalExpr(0))
    for i in rng:
        for j in range(i + 1, n + 1):
            H = H - q[i] * q[j] * (p[i] - p[j]) * (r + p[i] - p[j])
    H = H + 2 * gamma * sum((q[i] * p[i] for i in rng), Polynomial())
    H = H - r * sum((betas[i] * q[i] for i in rng), Polynomial())
    # x0^2 factor on the alpha_{2i} p_i terms; see the worked small-l cases
    H = H + x0 * x0 * sum((a(2 * i) * p[i] for i in rng), Polynomial())
    H = H + (gamma - top) * x0 * x1 + gamma * gamma
    consts = {"gamma": gamma, **{f"beta{i}": betas[i] for i in rng}}
    return CanonicalHamiltonian(spec, H, consts)


def canonical_bracket(spec: SystemSpec, a, b):
    """sum_i (da/dp_i db/dq_i - da/dq_i db/dp_i) in (q; p; x)."""
    total = Polynomial()
    for i in range(1, spec.n + 1):
        total = total + partial(a, pvar(i)) * partial(b, qvar(i)) - partial(a, qvar(i)) * partial(b, pvar(i))
    return total


def canonical_brackets_check(spec: SystemSpec) -> CheckResult:
    res = CheckResult("canonical_brackets", spec.l)
    cmap = build_coordinate_map(spec)
    names = canonical_variables(spec)
    with timed(res):
        images = {u: cmap.forward.image(u) for u in names}
        for u in names:
            for v in names:
                got = poisson(spec, images[u], images[v])
                want = 0
                if u.index == v.index and {u.kind, v.kind} == {Kind.P, Kind.Q}:
                    want = 1 if u.kind == Kind.P else -1
                res.record(equals(got, want), f"{{{u!r},{v!r}}}", repr(got))
    return res


def verify_coordinate_roundtrip(spec: SystemSpec) -> CheckResult:
    res = CheckResult("coordinate_roundtrip", spec.l)
    with timed(res):
        cmap = build_coordinate_map(spec)
        bad = cmap.roundtrip_failures()
        res.record(not bad, "round trip", ", ".join(bad))
    return res


def verify_H_equals_h0(spec: SystemSpec, model: SystemModel | None = None) -> CheckResult:
    """H(backward) = h_0 in (alpha; f) and h_0(backward) = H in (alpha; q; p; x)."""
    model = model or build_model(spec)
    res = CheckResult("H_equals_h0", spec.l)
    with timed(res):
        cmap = build_coordinate_map(spec)
        H = build_H(spec).H
        h0 = model.h[0]
        res.record(equals(cmap.to_f(H), h0), "H in f-coordinates = h0")
        res.record(equals(cmap.to_canonical(h0), H), "h0 in canonical coordinates = H")
    return res


def verify_hamilton_equations(spec: SystemSpec, model: SystemModel | None = None) -> CheckResult:
    model = model or build_model(spec)
    res = CheckResult("hamilton_equations", spec.l)
    with timed(res):
        cmap = build_coordinate_map(spec)
        H = build_H(spec).H
        k = k_poly(spec)
        for i in range(1, spec.n + 1):
            dq = model.derive(cmap.forward.image(qvar(i)))
            dp = model.derive(cmap.forward.image(pvar(i)))
            res.record(equals(dq, cmap.to_f(partial(H, pvar(i)))), f"q{i}' = dH/dp{i}")
            res.record(equals(dp, -cmap.to_f(partial(H, qvar(i)))), f"p{i}' = -dH/dq{i}")
        if spec.is_even:
            res.record(equals(model.derive(cmap.forward.image(xvar(0))), k), "x' = k")
        else:
            for i in (0, 1):
                xi = cmap.forward.image(xvar(i))
                res.record(equals(model.derive(xi), (k / 2) * xi), f"x{i}' = (k/2) x{i}")
    return res


def verify_canonical_bracket_formula(spec: SystemSpec, samples: int = 20, seed: int = 0) -> CheckResult:
    """{phi, psi} agrees with the Darboux form after changing coordinates."""
    res = CheckResult("canonical_bracket_formula", spec.l)
    rng = random.Random(seed * 31337 + spec.l)
    cmap = build_coordinate_map(spec)
    with timed(res):
        for t in range(samples):
            a = random_polynomial(spec, rng, max_degree=2, n_terms=3)
            b = random_polynomial(spec, rng, max_degree=2, n_terms=3)
            lhs = poisson(spec, a, b)
            rhs = cmap.to_f(canonical_bracket(spec, cmap.to_canonical(a), cmap.to_canonical(b)))
            res.record(equals(lhs, rhs), f"pair #{t}", f"{a!r}, {b!r}")
    return res


def verify_rescaled_variables(spec: SystemSpec, model: SystemModel | None = None) -> CheckResult:
    """Odd l: the rescaled f~_j satisfy f~_j' = {h_0, f~_j} + delta_j0 k g_0^2."""
    model = model or build_model(spec)
    res = CheckResult("rescaled_variables", spec.l)
    if spec.is_even:
        res.notes.append("only defined for odd l")
        return res
    with timed(res):
        g0 = model.radical[0]
        k = k_poly(spec)
        for j in spec.nodes():
            fj = f_poly(spec, j)
            ft = g0 * fj if j % 2 == 0 else RationalExpr(fj, g0)
            rhs = poisson(spec, model.h[0], ft)
            if j == 0:
                rhs = rhs + k * g0 * g0
            res.record(equals(model.derive(ft), rhs), f"f~{j}'")
    return res
