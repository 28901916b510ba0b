"""Root data of the affine root system A(1)_l on the cyclic diagram Z/(l+1)Z.

Weights live in the span of alpha_0..alpha_l, stored as coordinates in the
basis alpha_1..alpha_l plus a separate multiple of the null root
k = alpha_0 + ... + alpha_l.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache

from .exprfield import Polynomial, alpha

__all__ = [
    "Parity",
    "SystemSpec",
    "Weight",
    "Chain",
    "InvalidSubdiagramError",
    "OddComponentError",
    "cartan",
    "orientation",
    "fundamental_weight",
    "chi",
    "components",
    "even_chain_subsets",
    "complement_chi",
    "is_even_chain_union",
    "contains_evenly",
    "null_root",
    "simple_root",
    "reflect",
    "chain_chi",
    "subdiagram_chi",
    "pairing",
    "verify_chi_lemmas",
]


class InvalidSubdiagramError(ValueError):
    pass


class OddComponentError(ValueError):
    pass


class Parity(Enum):
    EVEN = "even"
    ODD = "odd"


@dataclass(frozen=True)
class SystemSpec:
    l: int

    def __post_init__(self):
        if not isinstance(self.l, int) or self.l < 2:
            raise ValueError(f"need l >= 2, got {self.l!r}")

    @property
    def size(self) -> int:
        return self.l + 1

    @property
    def n(self) -> int:
        return self.l // 2

    @property
    def parity(self) -> Parity:
        return Parity.EVEN if self.l % 2 == 0 else Parity.ODD

    @property
    def is_even(self) -> bool:
        return self.l % 2 == 0

    def mod(self, i: int) -> int:
        return i % (self.l + 1)

    def nodes(self) -> range:
        return range(self.l + 1)


@dataclass(frozen=True)
class Weight:
    """sum_r coeffs[r-1]*alpha_r + kcoef*k."""

    coeffs: tuple
    kcoef: Fraction = Fraction(0)

    @classmethod
    def zero(cls, l: int) -> "Weight":
        return cls((Fraction(0),) * l)

    @property
    def l(self) -> int:
        return len(self.coeffs)

    def __add__(self, other: "Weight") -> "Weight":
        return Weight(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)), self.kcoef + other.kcoef)

    def __sub__(self, other: "Weight") -> "Weight":
        return self + (-other)

    def __neg__(self) -> "Weight":
        return Weight(tuple(-a for a in self.coeffs), -self.kcoef)

    def __mul__(self, c) -> "Weight":
        c = Fraction(c)
        return Weight(tuple(a * c for a in self.coeffs), self.kcoef * c)

    __rmul__ = __mul__

    def flatten(self) -> tuple:
        """Coefficients of alpha_0..alpha_l after expanding k."""
        return (self.kcoef,) + tuple(a + self.kcoef for a in self.coeffs)

    def to_polynomial(self) -> Polynomial:
        return Polynomial.from_terms({((alpha(i), 1),): c for i, c in enumerate(self.flatten())})

    def rotate(self, shift: int = 1) -> "Weight":
        """Image under pi**shift (alpha_j -> alpha_{j+shift})."""
        N = self.l + 1
        flat = self.flatten()
        out = [Fraction(0)] * N
        for j, c in enumerate(flat):
            out[(j + shift) % N] += c
        return _weight_from_flat(out)

    def is_multiple_of_k(self) -> bool:
        return all(a == 0 for a in self.coeffs)


def _weight_from_flat(flat) -> Weight:
    k = Fraction(flat[0])
    return Weight(tuple(Fraction(c) - k for c in flat[1:]), k)


def null_root(spec: SystemSpec) -> Weight:
    return Weight.zero(spec.l) + Weight((Fraction(0),) * spec.l, Fraction(1))


def simple_root(spec: SystemSpec, j: int) -> Weight:
    flat = [Fraction(0)] * spec.size
    flat[spec.mod(j)] = Fraction(1)
    return _weight_from_flat(flat)


@dataclass(frozen=True)
class Chain:
    start: int
    length: int

    def nodes(self, spec: SystemSpec) -> list[int]:
        return [spec.mod(self.start + t) for t in range(self.length)]


def cartan(spec: SystemSpec) -> list[list[int]]:
    N = spec.size
    A = [[0] * N for _ in range(N)]
    for i in range(N):
        A[i][i] = 2
        A[i][(i + 1) % N] = -1
        A[i][(i - 1) % N] = -1
    return A


def orientation(spec: SystemSpec) -> list[list[int]]:
    N = spec.size
    U = [[0] * N for _ in range(N)]
    for i in range(N):
        U[i][(i + 1) % N] = 1
        U[i][(i - 1) % N] = -1
    return U


@lru_cache(maxsize=None)
def _fundamental_weight(l: int, i: int) -> Weight:
    N = l + 1
    i %= N
    if i == 0:
        return Weight.zero(l)
    return Weight(tuple(Fraction(min(i, r)) - Fraction(i * r, N) for r in range(1, N)))


def fundamental_weight(spec: SystemSpec, i: int) -> Weight:
    return _fundamental_weight(spec.l, i)


def _chain_chi(spec: SystemSpec, c: Chain) -> Weight:
    w = Weight.zero(spec.l)
    for t in range(c.length):
        term = fundamental_weight(spec, c.start + t)
        w = w + term if t % 2 == 0 else w - term
    return w


def chi(spec: SystemSpec, comps) -> Weight:
    """Alternating fundamental-weight sums over disjoint chains."""
    seen: set = set()
    total = Weight.zero(spec.l)
    for c in comps:
        if not 1 <= c.length <= spec.l:
            raise InvalidSubdiagramError("invalid subdiagram")
        nodes = c.nodes(spec)
        if seen.intersection(nodes):
            raise InvalidSubdiagramError("invalid subdiagram")
        seen.update(nodes)
        total = total + _chain_chi(spec, c)
    return total


def components(spec: SystemSpec, nodes) -> list[Chain]:
    """Connected components of a proper subdiagram, as chains."""
    s = {spec.mod(i) for i in nodes}
    if len(s) == spec.size:
        raise InvalidSubdiagramError("invalid subdiagram")
    out = []
    for i in sorted(s):
        if spec.mod(i - 1) in s:
            continue
        m = 1
        while spec.mod(i + m) in s:
            m += 1
        out.append(Chain(i, m))
    return out


def is_even_chain_union(spec: SystemSpec, nodes) -> bool:
    """True if the nodes form a proper subdiagram whose components all have even size."""
    s = {spec.mod(i) for i in nodes}
    if len(s) == spec.size:
        return False
    return all(c.length % 2 == 0 for c in components(spec, s))


def _in_S(spec: SystemSpec, K) -> bool:
    K = set(K)
    if not K:
        return False
    rest = [i for i in spec.nodes() if i not in K]
    return is_even_chain_union(spec, rest) if rest else True


def _parity_pattern_ok(K) -> bool:
    return all((b - a) % 2 == 1 for a, b in zip(K, K[1:]))


def _even_chain_subsets_filter(spec: SystemSpec, d: int) -> list[tuple]:
    return [K for K in itertools.combinations(spec.nodes(), d) if _in_S(spec, K)]


def _even_chain_subsets_constructive(spec: SystemSpec, d: int) -> list[tuple]:
    if (spec.size - d) % 2:
        return []
    out = []

    def extend(prefix):
        if len(prefix) == d:
            out.append(tuple(prefix))
            return
        for nxt in range(prefix[-1] + 1, spec.size, 2):
            extend(prefix + [nxt])

    for first in spec.nodes():
        extend([first])
    return out


@lru_cache(maxsize=None)
def _S(l: int, d: int, method: str) -> tuple:
    spec = SystemSpec(l)
    if method == "filter":
        return tuple(_even_chain_subsets_filter(spec, d))
    return tuple(_even_chain_subsets_constructive(spec, d))


def even_chain_subsets(spec: SystemSpec, d: int, method: str | None = None) -> list[tuple]:
    """The family S_d: d-subsets whose complement splits into even chains."""
    if not 1 <= d <= spec.size:
        raise ValueError(f"d must be in [1, {spec.size}], got {d}")
    if method is None:
        method = "filter" if spec.l <= 12 else "constructive"
    return list(_S(spec.l, d, method))


def complement_chi(spec: SystemSpec, K) -> Weight:
    """chi(Gamma minus K) from the gap formula with k_0 = k_d - l - 1."""
    ks = sorted(spec.mod(i) for i in K)
    if not ks or len(set(ks)) != len(ks) or not _in_S(spec, ks):
        raise OddComponentError("odd component")
    ks = [ks[-1] - spec.size] + ks
    w = Weight.zero(spec.l)
    for i in range(len(ks) - 1):
        for r in range(1, ks[i + 1] - ks[i]):
            term = fundamental_weight(spec, ks[i] + r)
            w = w + term if r % 2 == 1 else w - term
    return w


def contains_evenly(spec: SystemSpec, L, i: int) -> bool:
    """[i, i+1] lies in L and what is left of L still splits into even chains."""
    s = {spec.mod(x) for x in L}
    pair = {spec.mod(i), spec.mod(i + 1)}
    if not pair <= s:
        return False
    rest = s - pair
    return not rest or is_even_chain_union(spec, rest)


def pairing(spec: SystemSpec, w: Weight, j: int) -> Fraction:
    """<w, alpha_j> for 1 <= j <= l, using <alpha_i, alpha_j> = a_ij."""
    A = cartan(spec)
    return sum((w.coeffs[r - 1] * A[r][j] for r in range(1, spec.size)), Fraction(0))


def reflect(spec: SystemSpec, w: Weight, i: int) -> Weight:
    """Image of w under s_i, where s_i(alpha_j) = alpha_j - a_ij alpha_i."""
    A = cartan(spec)
    i = spec.mod(i)
    flat = list(w.flatten())
    ci = sum(flat[j] * A[i][j] for j in spec.nodes())
    flat[i] -= ci
    return _weight_from_flat(flat)


def chain_chi(spec: SystemSpec, start: int, length: int) -> Weight:
    return chi(spec, [Chain(spec.mod(start), length)])


def subdiagram_chi(spec: SystemSpec, nodes) -> Weight:
    return chi(spec, components(spec, nodes))


def verify_chi_lemmas(spec: SystemSpec):
    """Exhaustive check of the pi-shift formulas for chi on 2-chains and even-chain unions."""
    from .report import CheckResult, timed

    res = CheckResult("chi_lemmas", spec.l)
    N = spec.size
    k = null_root(spec)
    with timed(res):
        for i in spec.nodes():
            lhs = chain_chi(spec, i - 1, 2).rotate(1) - chain_chi(spec, i, 2)
            want = k * Fraction(spec.l, N) if i == 0 else k * Fraction(-1, N)
            res.record(lhs == want, f"pi(chi([{i - 1},{i}])) - chi([{i},{i + 1}])", str(lhs))
            lhs = chain_chi(spec, i + 1, 2).rotate(-1) - chain_chi(spec, i, 2)
            want = k * Fraction(-spec.l, N) if i == spec.l else k * Fraction(1, N)
            res.record(lhs == want, f"pi^-1(chi([{i + 1},{i + 2}])) - chi([{i},{i + 1}])", str(lhs))
        for size in range(2, N, 2):
            for L in itertools.combinations(spec.nodes(), size):
                if not is_even_chain_union(spec, L):
                    continue
                m = size // 2
                shifted = [x - 1 for x in L]
                lhs = subdiagram_chi(spec, shifted).rotate(1) - subdiagram_chi(spec, L)
                if contains_evenly(spec, L, 0):
                    want = k * Fraction(spec.l - m + 1, N)
                else:
                    want = k * Fraction(-m, N)
                res.record(lhs == want, f"lem-chi1 pi, L={L}", str(lhs))
                shifted = [x + 1 for x in L]
                lhs = subdiagram_chi(spec, shifted).rotate(-1) - subdiagram_chi(spec, L)
                if contains_evenly(spec, L, spec.l):
                    want = k * Fraction(-(spec.l - m + 1), N)
                else:
                    want = k * Fraction(m, N)
                res.record(lhs == want, f"lem-chi1 pi^-1, L={L}", str(lhs))
    return res
