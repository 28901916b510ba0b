"""The extended affine Weyl group acting on Q(alpha; f) and its tau extension."""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .dynamics import SystemModel, build_model, f_poly, random_polynomial, rotate
from .exprfield import (
    FieldMap,
    Kind,
    Polynomial,
    RationalExpr,
    VarId,
    alpha,
    equals,
    fvar,
    substitute,
    tau,
)
from .report import CheckResult, timed
from .rootdata import SystemSpec, cartan, orientation

__all__ = [
    "Letter",
    "GeneratorAction",
    "generator_maps",
    "parse_word",
    "format_word",
    "apply_word",
    "demazure",
    "generator_variables",
    "verify_group_relations",
    "verify_backlund_commutes",
    "verify_demazure_nilcoxeter",
    "verify_action_tables",
    "verify_random_words",
    "random_equal_words",
]


@dataclass(frozen=True)
class Letter:
    """s_i (kind 's') or pi**power (kind 'pi', power = +1 or -1)."""

    kind: str
    index: int = 0

    def __str__(self) -> str:
        if self.kind == "s":
            return f"s{self.index}"
        return "pi" if self.index == 1 else "pi^-1"


def s(i: int) -> Letter:
    return Letter("s", i)


PI = Letter("pi", 1)
PI_INV = Letter("pi", -1)

_TOKEN = re.compile(r"^(?:s(\d+)|pi(\^-1|-1|inv)?)$")


def parse_word(text: str, spec: SystemSpec | None = None) -> tuple:
    """Parse e.g. ``"s0 pi s1"``; letters separated by spaces or commas."""
    letters = []
    for tok in re.split(r"[\s,]+", text.strip()):
        if not tok:
            continue
        m = _TOKEN.match(tok)
        if not m:
            raise ValueError(f"bad word letter {tok!r}")
        if m.group(1) is not None:
            i = int(m.group(1))
            if spec is not None and i > spec.l:
                raise ValueError(f"letter {tok!r} out of range for l={spec.l}")
            letters.append(s(i))
        else:
            letters.append(PI_INV if m.group(2) else PI)
    return tuple(letters)


def format_word(word) -> str:
    return " ".join(str(x) for x in word)


def generator_variables(spec: SystemSpec, with_tau: bool = False) -> list[VarId]:
    out = [alpha(i) for i in spec.nodes()] + [fvar(i) for i in spec.nodes()]
    if with_tau:
        out += [tau(i) for i in spec.nodes()]
    return out


@dataclass(frozen=True)
class GeneratorAction:
    spec: SystemSpec
    with_tau: bool
    s: tuple
    pi: FieldMap
    pi_inv: FieldMap

    def letter(self, x: Letter) -> FieldMap:
        if x.kind == "s":
            return self.s[self.spec.mod(x.index)]
        return self.pi if x.index == 1 else self.pi_inv

    def named(self):
        for i, m in enumerate(self.s):
            yield f"s{i}", m
        yield "pi", self.pi


@lru_cache(maxsize=None)
def generator_maps(spec: SystemSpec, with_tau: bool = False) -> GeneratorAction:
    N = spec.size
    A = cartan(spec)
    U = orientation(spec)
    smaps = []
    for i in spec.nodes():
        imgs = {}
        ai = Polynomial.var(alpha(i))
        fi = Polynomial.var(fvar(i))
        for j in spec.nodes():
            if A[i][j]:
                imgs[alpha(j)] = Polynomial.var(alpha(j)) - A[i][j] * ai
            if U[i][j]:
                imgs[fvar(j)] = RationalExpr(Polynomial.var(fvar(j)) * fi + U[i][j] * ai, fi)
        if with_tau:
            imgs[tau(i)] = RationalExpr(
                Polynomial.var(tau(spec.mod(i - 1))) * Polynomial.var(tau(spec.mod(i + 1))) * fi,
                Polynomial.var(tau(i)),
            )
        smaps.append(FieldMap(imgs, name=f"s{i}"))
    kinds = (Kind.ALPHA, Kind.F, Kind.TAU) if with_tau else (Kind.ALPHA, Kind.F)
    pi = FieldMap(
        {VarId(kd, j): Polynomial.var(VarId(kd, (j + 1) % N)) for kd in kinds for j in spec.nodes()},
        name="pi",
    )
    pi_inv = FieldMap(
        {VarId(kd, j): Polynomial.var(VarId(kd, (j - 1) % N)) for kd in kinds for j in spec.nodes()},
        name="pi^-1",
    )
    return GeneratorAction(spec, with_tau, tuple(smaps), pi, pi_inv)


def apply_word(spec: SystemSpec, word, e, with_tau: bool = False):
    """w(e) for w = w_1 w_2 ... w_r, i.e. w_1(w_2(...w_r(e)))."""
    act = generator_maps(spec, with_tau)
    for x in reversed(tuple(word)):
        e = substitute(e, act.letter(x))
    return e


def demazure(spec: SystemSpec, i: int, e, with_tau: bool = False):
    """(s_i(e) - e) / alpha_i."""
    act = generator_maps(spec, with_tau)
    return (substitute(e, act.s[spec.mod(i)]) - e) / Polynomial.var(alpha(spec.mod(i)))


def _cyclic_distance(spec: SystemSpec, i: int, j: int) -> int:
    d = (i - j) % spec.size
    return min(d, spec.size - d)


def _relation_words(spec: SystemSpec):
    """(name, lhs, rhs) for every defining relation of the extended group."""
    N = spec.size
    for i in spec.nodes():
        yield f"s{i}^2 = 1", (s(i), s(i)), ()
    for i in spec.nodes():
        for j in spec.nodes():
            if j <= i:
                continue
            if _cyclic_distance(spec, i, j) >= 2:
                yield f"s{i}s{j} = s{j}s{i}", (s(i), s(j)), (s(j), s(i))
            else:
                yield f"s{i}s{j}s{i} = s{j}s{i}s{j}", (s(i), s(j), s(i)), (s(j), s(i), s(j))
    yield f"pi^{N} = 1", (PI,) * N, ()
    yield "pi pi^-1 = 1", (PI, PI_INV), ()
    for i in spec.nodes():
        yield f"pi s{i} = s{i + 1 if i < spec.l else 0} pi", (PI, s(i)), (s((i + 1) % N), PI)


def verify_group_relations(spec: SystemSpec, with_tau: bool = False) -> CheckResult:
    name = "weyl_relations_tau" if with_tau else "weyl_relations"
    res = CheckResult(name, spec.l)
    gens = generator_variables(spec, with_tau)
    with timed(res):
        for rel, lhs, rhs in _relation_words(spec):
            for v in gens:
                x = Polynomial.var(v)
                a = apply_word(spec, lhs, x, with_tau)
                b = apply_word(spec, rhs, x, with_tau)
                res.record(equals(a, b), f"{rel} on {v!r}", f"{a!r} vs {b!r}")
    return res


def verify_action_tables(spec: SystemSpec) -> CheckResult:
    """s_i(alpha_j) = alpha_j - a_ij alpha_i, s_i(f_j) = f_j + u_ij alpha_i/f_i, Demazure values."""
    res = CheckResult("action_tables", spec.l)
    A, U = cartan(spec), orientation(spec)
    act = generator_maps(spec)
    with timed(res):
        for i in spec.nodes():
            ai = Polynomial.var(alpha(i))
            fi = Polynomial.var(fvar(i))
            for j in spec.nodes():
                aj = Polynomial.var(alpha(j))
                fj = Polynomial.var(fvar(j))
                res.record(equals(act.s[i](aj), aj - A[i][j] * ai), f"s{i}(a{j})")
                res.record(equals(act.s[i](fj), fj + U[i][j] * ai / fi), f"s{i}(f{j})")
                res.record(equals(demazure(spec, i, aj), -A[i][j]), f"D{i}(a{j})")
                res.record(equals(demazure(spec, i, fj), Polynomial.const(U[i][j]) / fi), f"D{i}(f{j})")
    return res


def verify_backlund_commutes(spec: SystemSpec, model: SystemModel | None = None) -> CheckResult:
    """Delta_i(F_j) = -u_ij F_i / f_i^2 for all i, j, and pi(F_j) = F_{j+1}."""
    model = model or build_model(spec)
    res = CheckResult("backlund_commutes", spec.l)
    U = orientation(spec)
    act = generator_maps(spec)
    with timed(res):
        for i in spec.nodes():
            fi = Polynomial.var(fvar(i))
            for j in spec.nodes():
                lhs = demazure(spec, i, model.F[j])
                rhs = RationalExpr(-U[i][j] * model.F[i], fi * fi)
                res.record(equals(lhs, rhs), f"Delta_{i}(F_{j})", f"{lhs!r} vs {rhs!r}")
                # direct form: s_i(f_j)' = s_i(f_j')
                sfj = act.s[i](Polynomial.var(fvar(j)))
                res.record(equals(model.derive(sfj), act.s[i](model.F[j])), f"s{i}(f{j})' = s{i}(f{j}')")
        for j in spec.nodes():
            res.record(rotate(spec, model.F[j]) == model.F[spec.mod(j + 1)], f"pi(F_{j}) = F_{j + 1}")
    return res


def verify_demazure_nilcoxeter(spec: SystemSpec, samples: int = 3, seed: int = 0) -> CheckResult:
    res = CheckResult("demazure_nilcoxeter", spec.l)
    rng = random.Random(seed * 7919 + spec.l)
    D = lambda i, e: demazure(spec, i, e)  # noqa: E731
    with timed(res):
        tests = [Polynomial.var(v) for v in generator_variables(spec)]
        tests += [random_polynomial(spec, rng, max_degree=2, n_terms=3) for _ in range(samples)]
        for t, e in enumerate(tests):
            for i in spec.nodes():
                res.record(equals(D(i, D(i, e)), 0), f"Delta_{i}^2 on #{t}")
                for j in spec.nodes():
                    if j <= i:
                        continue
                    if _cyclic_distance(spec, i, j) >= 2:
                        res.record(equals(D(i, D(j, e)), D(j, D(i, e))), f"Delta_{i}Delta_{j} on #{t}")
                    else:
                        lhs = D(i, D(j, D(i, e)))
                        rhs = D(j, D(i, D(j, e)))
                        res.record(equals(lhs, rhs), f"braid Delta_{i},Delta_{j} on #{t}")
            # twisted Leibniz with a second random factor
            g = random_polynomial(spec, rng, max_degree=1, n_terms=2)
            act = generator_maps(spec)
            for i in spec.nodes():
                lhs = D(i, e * g)
                rhs = D(i, e) * g + act.s[i](e) * D(i, g)
                res.record(equals(lhs, rhs), f"twisted Leibniz Delta_{i} on #{t}")
    return res


# -- random words equal in the extended affine Weyl group ----------------------

def _rewrite_once(spec: SystemSpec, word: list, rng: random.Random) -> list:
    N = spec.size
    w = list(word)
    moves = ["insert_ss", "insert_pipiinv", "insert_piN"]
    pos = rng.randrange(len(w) + 1)
    # collect applicable local rewrites
    local = []
    for p in range(len(w) - 1):
        a, b = w[p], w[p + 1]
        if a.kind == "s" and b.kind == "s" and a.index == b.index:
            local.append(("cancel_ss", p))
        if a.kind == "s" and b.kind == "s" and a.index != b.index and _cyclic_distance(spec, a.index, b.index) >= 2:
            local.append(("commute", p))
        if a == PI and b.kind == "s":
            local.append(("pi_s", p))
        if a.kind == "s" and b == PI:
            local.append(("s_pi", p))
        if {a, b} == {PI, PI_INV}:
            local.append(("cancel_pi", p))
    for p in range(len(w) - 2):
        a, b, c = w[p : p + 3]
        if a.kind == b.kind == c.kind == "s" and a == c and a.index != b.index and _cyclic_distance(spec, a.index, b.index) == 1:
            local.append(("braid", p))
    if local and rng.random() < 0.7:
        move, p = rng.choice(local)
        a = w[p]
        if move in ("cancel_ss", "cancel_pi"):
            del w[p : p + 2]
        elif move == "commute":
            w[p], w[p + 1] = w[p + 1], w[p]
        elif move == "pi_s":
            w[p : p + 2] = [s((w[p + 1].index + 1) % N), PI]
        elif move == "s_pi":
            w[p : p + 2] = [PI, s((a.index - 1) % N)]
        elif move == "braid":
            b = w[p + 1]
            w[p : p + 3] = [b, a, b]
        return w
    move = rng.choice(moves)
    if move == "insert_ss":
        i = rng.randrange(N)
        w[pos:pos] = [s(i), s(i)]
    elif move == "insert_pipiinv":
        w[pos:pos] = rng.choice([[PI, PI_INV], [PI_INV, PI]])
    else:
        w[pos:pos] = [PI] * N
    return w


def random_equal_words(spec: SystemSpec, rng: random.Random, length: int = 5, rewrites: int = 6):
    letters = [s(i) for i in spec.nodes()] + [PI, PI_INV]
    w1 = [rng.choice(letters) for _ in range(length)]
    w2 = list(w1)
    for _ in range(rewrites):
        w2 = _rewrite_once(spec, w2, rng)
    return tuple(w1), tuple(w2)


def verify_random_words(spec: SystemSpec, pairs: int = 200, seed: int = 0, length: int = 4, rewrites: int = 5) -> CheckResult:
    res = CheckResult("random_words", spec.l)
    rng = random.Random(seed * 104729 + spec.l)
    gens = generator_variables(spec)
    with timed(res):
        for t in range(pairs):
            w1, w2 = random_equal_words(spec, rng, length, rewrites)
            for v in gens:
                x = Polynomial.var(v)
                a = apply_word(spec, w1, x)
                b = apply_word(spec, w2, x)
                if not res.record(equals(a, b), f"{format_word(w1)} vs {format_word(w2)} on {v!r}"):
                    break
    return res
