"""Vector fields, Poisson bracket, Hamiltonians and radical of the A(1)_l systems."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exprfield import (
    FieldMap,
    Kind,
    MapKind,
    Polynomial,
    alpha,
    derive,
    equals,
    fvar,
)
from .report import CheckResult, timed
from .rootdata import (
    SystemSpec,
    complement_chi,
    even_chain_subsets,
    fundamental_weight,
    orientation,
)

__all__ = [
    "SystemModel",
    "build_F",
    "build_h0",
    "build_all_h",
    "build_model",
    "poisson",
    "radical_generators",
    "radical_basis",
    "derivation_from_F",
    "derivation_from_h",
    "k_poly",
    "f_poly",
    "a_poly",
    "rotate",
    "odd_constant_weight",
    "random_polynomial",
    "verify_hamiltonian_form",
    "verify_adjacent_differences",
    "verify_radical",
    "verify_poisson_structure",
    "verify_model_shape",
]


def f_poly(spec: SystemSpec, i: int) -> Polynomial:
    return Polynomial.var(fvar(spec.mod(i)))


def a_poly(spec: SystemSpec, i: int) -> Polynomial:
    return Polynomial.var(alpha(spec.mod(i)))


def k_poly(spec: SystemSpec) -> Polynomial:
    """k = alpha_0 + ... + alpha_l, always expanded."""
    return Polynomial.from_terms({((alpha(i), 1),): 1 for i in spec.nodes()})


def f_product(spec: SystemSpec, K) -> Polynomial:
    return Polynomial.monomial([(fvar(spec.mod(i)), 1) for i in K])


def rotate(spec: SystemSpec, p: Polynomial, shift: int = 1) -> Polynomial:
    """pi**shift on a polynomial in alpha and f."""
    mapping = {}
    for v in p.variables():
        if v.kind in (Kind.ALPHA, Kind.F, Kind.TAU):
            mapping[v] = type(v)(v.kind, spec.mod(v.index + shift))
    return p.rename(mapping)


def build_F(spec: SystemSpec) -> list[Polynomial]:
    """Right-hand sides F_j of f_j' = F_j."""
    n = spec.n
    f = lambda i: f_poly(spec, i)  # noqa: E731
    a = lambda i: a_poly(spec, i)  # noqa: E731
    out = []
    if spec.is_even:
        for j in spec.nodes():
            bracket = Polynomial()
            for r in range(1, n + 1):
                bracket = bracket + f(j + 2 * r - 1) - f(j + 2 * r)
            out.append(f(j) * bracket + a(j))
        return out
    half_k = k_poly(spec) / 2
    for j in spec.nodes():
        quad = Polynomial()
        for r in range(1, n + 1):
            for s in range(r, n + 1):
                quad = quad + f(j + 2 * r - 1) * f(j + 2 * s) - f(j + 2 * r) * f(j + 2 * s + 1)
        lin = half_k
        even_f = Polynomial()
        for r in range(1, n + 1):
            lin = lin - a(j + 2 * r)
            even_f = even_f + f(j + 2 * r)
        out.append(f(j) * quad + lin * f(j) + a(j) * even_f)
    return out


def odd_constant_weight(spec: SystemSpec):
    """sum_{i=1}^{l} (-1)^(i-1) varpi_i (the Weight whose square is h_0's constant)."""
    w = fundamental_weight(spec, 0)
    for i in range(1, spec.l + 1):
        term = fundamental_weight(spec, i)
        w = w + term if i % 2 == 1 else w - term
    return w


def build_h0(spec: SystemSpec) -> Polynomial:
    top, low = (3, 1) if spec.is_even else (4, 2)
    h = Polynomial()
    for K in even_chain_subsets(spec, top):
        h = h + f_product(spec, K)
    for K in even_chain_subsets(spec, low):
        h = h + complement_chi(spec, K).to_polynomial() * f_product(spec, K)
    if not spec.is_even:
        g = odd_constant_weight(spec).to_polynomial()
        h = h + g * g
    return h


def build_all_h(spec: SystemSpec, h0: Polynomial | None = None) -> list[Polynomial]:
    hs = [build_h0(spec) if h0 is None else h0]
    for _ in range(spec.l):
        hs.append(rotate(spec, hs[-1]))
    return hs


def poisson(spec: SystemSpec, a, b):
    """{a, b} = sum_{i,j} da/df_i u_ij db/df_j."""
    a_vars = a.variables() if not isinstance(a, (int, Fraction)) else set()
    b_vars = b.variables() if not isinstance(b, (int, Fraction)) else set()
    total = Polynomial()
    for i in spec.nodes():
        fi = fvar(i)
        if fi not in a_vars:
            continue
        up, down = fvar(spec.mod(i + 1)), fvar(spec.mod(i - 1))
        if up not in b_vars and down not in b_vars:
            continue
        db = Polynomial()
        if up in b_vars:
            db = db + b.partial(up)
        if down in b_vars:
            db = db - b.partial(down)
        total = total + a.partial(fi) * db
    return total


def radical_generators(spec: SystemSpec) -> list[Polynomial]:
    if spec.is_even:
        return [sum((f_poly(spec, i) for i in spec.nodes()), Polynomial())]
    g0 = sum((f_poly(spec, i) for i in spec.nodes() if i % 2 == 0), Polynomial())
    g1 = sum((f_poly(spec, i) for i in spec.nodes() if i % 2 == 1), Polynomial())
    return [g0, g1]


def radical_basis(spec: SystemSpec) -> list[list[Fraction]]:
    """Basis of {c : U c = 0} by exact Gaussian elimination."""
    U = [[Fraction(x) for x in row] for row in orientation(spec)]
    N = spec.size
    rows = [r[:] for r in U]
    pivots = []
    r = 0
    for c in range(N):
        p = next((i for i in range(r, N) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(N):
            if i != r and rows[i][c] != 0:
                m = rows[i][c]
                rows[i] = [x - m * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(N) if c not in pivots]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * N
        v[fcol] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][fcol]
        basis.append(v)
    return basis


def derivation_from_F(spec: SystemSpec, F) -> FieldMap:
    return FieldMap({fvar(j): F[j] for j in spec.nodes()}, MapKind.DERIVATION, "d/dt")


def derivation_from_h(spec: SystemSpec, h0: Polynomial) -> FieldMap:
    """Derivation rebuilt from {h_0, .} plus the parity-dependent correction."""
    k = k_poly(spec)
    images = {}
    if spec.is_even:
        for j in spec.nodes():
            img = poisson(spec, h0, f_poly(spec, j))
            if j == 0:
                img = img + k
            images[fvar(j)] = img
    else:
        g0 = radical_generators(spec)[0]
        for j in spec.nodes():
            img = poisson(spec, h0, f_poly(spec, j))
            sign = 1 if j % 2 == 0 else -1
            img = img - sign * (k / 2) * f_poly(spec, j)
            if j == 0:
                img = img + k * g0
            images[fvar(j)] = img
    return FieldMap(images, MapKind.DERIVATION, "d/dt from h0")


@dataclass(frozen=True)
class SystemModel:
    spec: SystemSpec
    F: tuple
    h: tuple
    radical: tuple
    derivation: FieldMap

    @classmethod
    def from_parts(cls, spec: SystemSpec, F, h0: Polynomial) -> "SystemModel":
        return cls(
            spec,
            tuple(F),
            tuple(build_all_h(spec, h0)),
            tuple(radical_generators(spec)),
            derivation_from_F(spec, F),
        )

    def derive(self, e):
        return derive(e, self.derivation)


@lru_cache(maxsize=None)
def build_model(spec: SystemSpec) -> SystemModel:
    return SystemModel.from_parts(spec, build_F(spec), build_h0(spec))


def random_polynomial(spec: SystemSpec, rng: random.Random, max_degree: int = 2, n_terms: int = 3, with_alpha: bool = True) -> Polynomial:
    p = Polynomial()
    for _ in range(n_terms):
        deg = rng.randint(0, max_degree)
        mono = {}
        for _ in range(deg):
            v = fvar(rng.randrange(spec.size))
            mono[v] = mono.get(v, 0) + 1
        if with_alpha and rng.random() < 0.5:
            v = alpha(rng.randrange(spec.size))
            mono[v] = mono.get(v, 0) + 1
        c = rng.choice([-3, -2, -1, 1, 2, 3, Fraction(1, 2), Fraction(-2, 3)])
        p = p + Polynomial.monomial(mono.items(), c)
    return p


# -- verifiers -----------------------------------------------------------------

def verify_model_shape(spec: SystemSpec, model: SystemModel | None = None) -> CheckResult:
    """Rotation covariance, degrees, and the shared top-degree part of the h_j."""
    model = model or build_model(spec)
    res = CheckResult("model_shape", spec.l)
    with timed(res):
        deg = 2 if spec.is_even else 3
        top = 3 if spec.is_even else 4
        for j in spec.nodes():
            res.record(rotate(spec, model.F[j]) == model.F[spec.mod(j + 1)], f"pi(F_{j}) = F_{j + 1}")
            res.record(model.F[j].degree_in([Kind.F]) == deg, f"deg F_{j}")
        tops = []
        for hj in model.h:
            tops.append(Polynomial({m: c for m, c in hj.terms.items() if sum(e for v, e in m if v.kind == Kind.F) == top}))
        for j in spec.nodes():
            res.record(tops[j] == tops[0], f"top part of h_{j}")
            res.record(rotate(spec, model.h[j]) == model.h[spec.mod(j + 1)], f"pi(h_{j}) = h_{j + 1}")
    return res


def verify_hamiltonian_form(spec: SystemSpec, model: SystemModel | None = None) -> CheckResult:
    """The derivation rebuilt from {h_0, .} agrees with f_j' = F_j on every generator."""
    model = model or build_model(spec)
    res = CheckResult("hamiltonian_form", spec.l)
    with timed(res):
        dh = derivation_from_h(spec, model.h[0])
        for j in spec.nodes():
            got = dh.image(fvar(j))
            res.record(equals(got, model.F[j]), f"f_{j}' from h_0", repr(got - model.F[j]))
        k = k_poly(spec)
        if spec.is_even:
            g = model.radical[0]
            res.record(equals(model.derive(g), k), "g' = k")
        else:
            for i, g in enumerate(model.radical):
                res.record(equals(model.derive(g), (k / 2) * g), f"g_{i}' = (k/2) g_{i}")
    return res


def verify_adjacent_differences(spec: SystemSpec, model: SystemModel | None = None) -> CheckResult:
    """First and second differences of the rotated Hamiltonians."""
    model = model or build_model(spec)
    res = CheckResult("adjacent_differences", spec.l)
    h = model.h
    k = k_poly(spec)
    n = spec.n
    f = lambda i: f_poly(spec, i)  # noqa: E731
    a = lambda i: a_poly(spec, i)  # noqa: E731
    H = lambda i: h[spec.mod(i)]  # noqa: E731
    with timed(res):
        if spec.is_even:
            x = sum((f(i) for i in spec.nodes()), Polynomial())
            for j in spec.nodes():
                want = k * sum((f(j + 2 * r) for r in range(1, n + 1)), Polynomial()) - k * x * Fraction(n, 2 * n + 1)
                res.record(H(j + 1) - H(j) == want, f"h_{j + 1} - h_{j}")
                want = k * sum((f(j + 2 * r - 1) - f(j + 2 * r) for r in range(1, n + 1)), Polynomial())
                res.record(-H(j - 1) + 2 * H(j) - H(j + 1) == want, f"second difference at {j}")
                want = k * (f(j) - x / (2 * n + 1))
                res.record(H(j - 1) - H(j + 1) == want, f"h_{j - 1} - h_{j + 1}")
        else:
            s2 = sum((f(K[0]) * f(K[1]) for K in even_chain_subsets(spec, 2)), Polynomial())
            alt = sum((a(i) * (1 if i % 2 == 0 else -1) for i in spec.nodes()), Polynomial())
            xs = radical_generators(spec)
            for j in spec.nodes():
                sign = 1 if j % 2 == 0 else -1
                quad = sum(
                    (f(j + 2 * r) * f(j + 2 * s + 1) for r in range(1, n + 1) for s in range(r, n + 1)),
                    Polynomial(),
                )
                want = k * quad - k * s2 * Fraction(n, 2 * n + 2) + sign * (k / 4) * alt
                res.record(H(j + 1) - H(j) == want, f"h_{j + 1} - h_{j}")
                quad2 = sum(
                    (
                        f(j + 2 * r - 1) * f(j + 2 * s) - f(j + 2 * r) * f(j + 2 * s + 1)
                        for r in range(1, n + 1)
                        for s in range(r, n + 1)
                    ),
                    Polynomial(),
                )
                lin = k / 2 - sum((a(j + 2 * r) for r in range(0, n + 1)), Polynomial())
                want = k * quad2 + k * lin
                res.record(-H(j - 1) + 2 * H(j) - H(j + 1) == want, f"second difference at {j}")
                want = k * xs[(j + 1) % 2] * (f(j) - xs[j % 2] / (n + 1))
                res.record(H(j - 1) - H(j + 1) == want, f"h_{j - 1} - h_{j + 1}")
    return res


def verify_radical(spec: SystemSpec, model: SystemModel | None = None) -> CheckResult:
    model = model or build_model(spec)
    res = CheckResult("radical", spec.l)
    with timed(res):
        basis = radical_basis(spec)
        gens = list(model.radical)
        want_dim = 1 if spec.is_even else 2
        res.record(len(basis) == want_dim, "radical dimension", f"{len(basis)} != {want_dim}")
        res.record(len(gens) == len(basis), "generator count")
        U = orientation(spec)
        for g in gens:
            c = [g.terms.get(((fvar(j), 1),), Fraction(0)) for j in spec.nodes()]
            res.record(
                all(sum(U[i][j] * c[j] for j in spec.nodes()) == 0 for i in spec.nodes()),
                f"U c = 0 for {g!r}",
            )
            for j in spec.nodes():
                res.record(poisson(spec, g, f_poly(spec, j)).is_zero(), f"{{g, f_{j}}} = 0")
        # span equality: generators are independent and as many as the nullspace dimension
        vecs = [[g.terms.get(((fvar(j), 1),), Fraction(0)) for j in spec.nodes()] for g in gens]
        res.record(_rank(vecs) == len(basis) == _rank(vecs + basis), "span(generators) = radical")
    return res


def _rank(vectors) -> int:
    rows = [list(map(Fraction, v)) for v in vectors]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        p = next((i for i in range(rank, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[rank], rows[p] = rows[p], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][c] != 0:
                m = rows[i][c] / rows[rank][c]
                rows[i] = [x - m * y for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def verify_poisson_structure(spec: SystemSpec, samples: int = 100, seed: int = 0) -> CheckResult:
    """Leibniz, Jacobi and W-tilde invariance of the bracket on random inputs."""
    from .weylaction import generator_maps

    res = CheckResult("poisson_structure", spec.l)
    rng = random.Random(seed * 1009 + spec.l)
    P = lambda a, b: poisson(spec, a, b)  # noqa: E731
    with timed(res):
        for i in spec.nodes():
            for j in spec.nodes():
                want = orientation(spec)[i][j]
                res.record(P(f_poly(spec, i), f_poly(spec, j)) == want, f"{{f_{i}, f_{j}}}")
        for t in range(samples):
            a, b, c = (random_polynomial(spec, rng) for _ in range(3))
            res.record(P(a, b * c) == b * P(a, c) + P(a, b) * c, f"Leibniz right #{t}")
            res.record(P(a * b, c) == a * P(b, c) + P(a, c) * b, f"Leibniz left #{t}")
            res.record(P(a, b) == -P(b, a), f"skew #{t}")
            jac = P(a, P(b, c)) + P(b, P(c, a)) + P(c, P(a, b))
            res.record(jac.is_zero(), f"Jacobi #{t}", repr(jac))
        act = generator_maps(spec, with_tau=False)
        for w_name, w in act.named():
            for t in range(max(3, samples // 20)):
                a, b = random_polynomial(spec, rng), random_polynomial(spec, rng)
                lhs = w(P(a, b))
                rhs = P(w(a), w(b))
                res.record(equals(lhs, rhs), f"{w_name} invariance #{t}")
    return res
