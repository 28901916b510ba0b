"""tau-functions as formal variables with k tau_j' = h_j tau_j.

Identities involving tau are reduced to identities in Q(alpha; f) by
log-derivatives: ``taulog(j)`` stands for tau_j'/tau_j and is eliminated by
tau_j'/tau_j -> h_j/k.  A second route differentiates directly in
Q(alpha; f; tau) with the derivation tau_j -> h_j tau_j / k.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dynamics import SystemModel, build_model, f_poly, k_poly, rotate
from .exprfield import (
    FieldMap,
    Kind,
    MapKind,
    Polynomial,
    RationalExpr,
    alpha,
    as_rational,
    derive,
    equals,
    fvar,
    substitute,
    tau,
    taulog,
)
from .report import CheckResult, timed
from .rootdata import SystemSpec, cartan
from .weylaction import demazure, generator_maps

__all__ = [
    "TauExtendedExpr",
    "NotLogReducibleError",
    "tau_derivation",
    "eliminate_taulogs",
    "log_derivative",
    "parity_sum",
    "f_from_tau",
    "hirota_backlund",
    "verify_s_on_h",
    "verify_h_motif",
    "verify_f_from_tau",
    "verify_hirota",
    "verify_tau_commutation",
    "verify_W_j_invariance",
    "verify_tau_consistency",
]


class NotLogReducibleError(ValueError):
    """The expression is not a tau-monomial times a tau-free factor."""


@dataclass(frozen=True)
class TauExtendedExpr:
    """An expression over alpha, f, tau and the log-derivative symbols."""

    spec: SystemSpec
    expr: object

    def eliminate(self, model: SystemModel | None = None):
        return eliminate_taulogs(self.spec, self.expr, model)


def _tau_poly(i: int) -> Polynomial:
    return Polynomial.var(tau(i))


def _lam(i: int) -> Polynomial:
    return Polynomial.var(taulog(i))


def parity_sum(spec: SystemSpec, parity: int) -> Polynomial:
    """g_0 or g_1: the sum of f_j over j of the given parity (odd l only)."""
    return sum((f_poly(spec, j) for j in spec.nodes() if j % 2 == parity % 2), Polynomial())


def tau_derivation(spec: SystemSpec, model: SystemModel | None = None) -> FieldMap:
    model = model or build_model(spec)
    k = k_poly(spec)
    images = {fvar(j): model.F[j] for j in spec.nodes()}
    for j in spec.nodes():
        images[tau(j)] = RationalExpr(model.h[j] * _tau_poly(j), k)
    return FieldMap(images, MapKind.DERIVATION, "d/dt on tau")


def eliminate_taulogs(spec: SystemSpec, e, model: SystemModel | None = None):
    model = model or build_model(spec)
    k = k_poly(spec)
    return substitute(e, FieldMap({taulog(j): RationalExpr(model.h[j], k) for j in spec.nodes()}, name="taulog"))


def _split_tau(p: Polynomial) -> tuple[dict, Polynomial]:
    """p = (tau monomial) * (tau-free polynomial), or raise."""
    tau_part = None
    rest = {}
    for m, c in p.terms.items():
        tp = tuple((v, x) for v, x in m if v.kind == Kind.TAU)
        if tau_part is None:
            tau_part = tp
        elif tp != tau_part:
            raise NotLogReducibleError("mixed tau monomials")
        rest[tuple((v, x) for v, x in m if v.kind != Kind.TAU)] = c
    return dict(tau_part or ()), Polynomial.from_terms(rest)


def log_derivative(spec: SystemSpec, e, model: SystemModel | None = None):
    """e'/e with tau_j'/tau_j left as the symbols taulog(j)."""
    model = model or build_model(spec)
    r = as_rational(e)
    tn, pn = _split_tau(r.num)
    td, pd = _split_tau(r.den)
    out = Polynomial()
    for v, x in tn.items():
        out = out + x * _lam(v.index)
    for v, x in td.items():
        out = out - x * _lam(v.index)
    rest = RationalExpr(pn, pd)
    return out + model.derive(rest) / rest


def _tau_hat(spec: SystemSpec, j: int):
    """Coefficient pair (A, B) with f_j = A*(lam_{j-1} - lam_{j+1}) + B."""
    n = spec.n
    if spec.is_even:
        x = sum((f_poly(spec, i) for i in spec.nodes()), Polynomial())
        return Polynomial.const(1), x / (2 * n + 1)
    xj = parity_sum(spec, j)
    xj1 = parity_sum(spec, j + 1)
    return RationalExpr(1, xj1), xj / (n + 1)


def f_from_tau(spec: SystemSpec, j: int, model: SystemModel | None = None) -> TauExtendedExpr:
    """Log-derivative form of f_j; ``.eliminate()`` gives the h-form."""
    if not 0 <= j <= spec.l:
        raise ValueError(f"index {j} out of range for l={spec.l}")
    A, B = _tau_hat(spec, j)
    expr = A * (_lam(spec.mod(j - 1)) - _lam(spec.mod(j + 1))) + B
    return TauExtendedExpr(spec, expr)


def hirota_backlund(spec: SystemSpec, j: int) -> TauExtendedExpr:
    """(1/tau_j)(A D_t + B) tau_{j-1}.tau_{j+1} with tau_i' = taulog(i) tau_i."""
    if not 0 <= j <= spec.l:
        raise ValueError(f"index {j} out of range for l={spec.l}")
    A, B = _tau_hat(spec, j)
    tm, tp = _tau_poly(spec.mod(j - 1)), _tau_poly(spec.mod(j + 1))
    dm, dp = _lam(spec.mod(j - 1)) * tm, _lam(spec.mod(j + 1)) * tp
    bilinear = A * (dm * tp - tm * dp) + B * tm * tp
    return TauExtendedExpr(spec, bilinear / _tau_poly(j))


def verify_s_on_h(spec: SystemSpec, model: SystemModel | None = None) -> CheckResult:
    model = model or build_model(spec)
    res = CheckResult("s_on_h", spec.l)
    act = generator_maps(spec)
    k = k_poly(spec)
    with timed(res):
        for i in spec.nodes():
            for j in spec.nodes():
                got = act.s[i](model.h[j]) - model.h[j]
                want = Polynomial()
                if i == j:
                    want = k * Polynomial.var(alpha(j)) / f_poly(spec, j)
                    if not spec.is_even:
                        want = want * parity_sum(spec, j)
                res.record(equals(got, want), f"s{i}(h{j}) - h{j}", repr(got))
                if i != j:
                    res.record(equals(demazure(spec, i, model.h[j]), 0), f"Delta_{i}(h{j}) = 0")
    return res


def verify_h_motif(spec: SystemSpec, model: SystemModel | None = None) -> CheckResult:
    model = model or build_model(spec)
    res = CheckResult("h_motif", spec.l)
    act = generator_maps(spec)
    k = k_poly(spec)
    A = cartan(spec)
    h = model.h
    with timed(res):
        for j in spec.nodes():
            lhs = k * model.F[j] / f_poly(spec, j)
            sjhj = act.s[j](h[j])
            rhs1 = sjhj + h[j] - h[spec.mod(j - 1)] - h[spec.mod(j + 1)]
            rhs2 = sjhj - h[j] + sum((A[i][j] * h[i] for i in spec.nodes()), Polynomial())
            res.record(equals(lhs, rhs1), f"motif j={j}")
            res.record(equals(lhs, rhs2), f"Cartan form j={j}")
    return res


def verify_f_from_tau(spec: SystemSpec, model: SystemModel | None = None) -> CheckResult:
    model = model or build_model(spec)
    res = CheckResult("f_from_tau", spec.l)
    with timed(res):
        total = Polynomial()
        for j in spec.nodes():
            val = f_from_tau(spec, j).eliminate(model)
            total = total + val
            res.record(equals(val, f_poly(spec, j)), f"f{j} from tau", repr(val))
        if spec.is_even:
            x = sum((f_poly(spec, i) for i in spec.nodes()), Polynomial())
            res.record(equals(total, x), "sum of f_j from tau = x")
    return res


def verify_hirota(spec: SystemSpec, model: SystemModel | None = None) -> CheckResult:
    model = model or build_model(spec)
    res = CheckResult("hirota", spec.l)
    act = generator_maps(spec, with_tau=True)
    with timed(res):
        for j in spec.nodes():
            sjtj = act.s[j](_tau_poly(j))
            bil = hirota_backlund(spec, j).eliminate(model)
            res.record(equals(bil, sjtj), f"bilinear form of s{j}(tau{j})")
            tm, tp = _tau_poly(spec.mod(j - 1)), _tau_poly(spec.mod(j + 1))
            ratio = f_poly(spec, j) * tm * tp / (_tau_poly(j) * sjtj)
            res.record(equals(ratio, 1), f"multiplicative formula f{j}")
    return res


def verify_tau_commutation(spec: SystemSpec, model: SystemModel | None = None) -> CheckResult:
    """s_j(tau_j)'/s_j(tau_j) = s_j(h_j)/k, both by log-derivatives and directly."""
    model = model or build_model(spec)
    res = CheckResult("tau_commutation", spec.l)
    act = generator_maps(spec, with_tau=True)
    D = tau_derivation(spec, model)
    k = k_poly(spec)
    with timed(res):
        for j in spec.nodes():
            sjtj = act.s[j](_tau_poly(j))
            lhs = eliminate_taulogs(spec, log_derivative(spec, sjtj, model), model)
            res.record(equals(lhs, act.s[j](model.h[j]) / k), f"log-derivative of s{j}(tau{j})")
            for i in spec.nodes():
                a = derive(act.s[i](_tau_poly(j)), D)
                b = act.s[i](derive(_tau_poly(j), D))
                res.record(equals(a, b), f"s{i}(tau{j})' = s{i}(tau{j}')")
            a = derive(act.pi(_tau_poly(j)), D)
            b = act.pi(derive(_tau_poly(j), D))
            res.record(equals(a, b), f"pi(tau{j})' = pi(tau{j}')")
            res.record(rotate(spec, model.h[j]) == model.h[spec.mod(j + 1)], f"pi(h{j}) = h{j + 1}")
    return res


def verify_W_j_invariance(spec: SystemSpec) -> CheckResult:
    res = CheckResult("W_j_invariance", spec.l)
    act = generator_maps(spec, with_tau=True)
    with timed(res):
        for j in spec.nodes():
            t = _tau_poly(j)
            for i in spec.nodes():
                if i != j:
                    res.record(act.s[i](t) == t, f"s{i}(tau{j}) = tau{j}")
            res.record(not equals(act.s[j](t), t), f"s{j}(tau{j}) moves tau{j}")
    return res


def verify_tau_consistency(spec: SystemSpec, model: SystemModel | None = None) -> CheckResult:
    """s_on_h and h_motif passing must force tau_commutation to pass."""
    model = model or build_model(spec)
    res = CheckResult("tau_consistency", spec.l)
    with timed(res):
        a = verify_s_on_h(spec, model)
        b = verify_h_motif(spec, model)
        c = verify_tau_commutation(spec, model)
        res.record(not (a.passed and b.passed) or c.passed, "premises imply conclusion")
        res.notes.append(f"s_on_h={a.status} h_motif={b.status} tau_commutation={c.status}")
    return res
