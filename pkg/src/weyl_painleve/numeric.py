"""Floating-point evaluation and integration of the f-system and the canonical system.

Real arithmetic only.  Right-hand sides are compiled from the exact
polynomials into an exponent matrix plus a coefficient matrix, so a single
evaluation is ``C @ prod(y ** E)``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .canonical import build_coordinate_map, build_H, canonical_variables
from .dynamics import build_model
from .exprfield import VarId, alpha, as_rational, fvar, partial, pvar, qvar, xvar
from .rootdata import SystemSpec, cartan, orientation
from .weylaction import parse_word

__all__ = [
    "NumericInstance",
    "Trajectory",
    "CompiledPolys",
    "BlowUpError",
    "SingularBacklundError",
    "ChartBreakdownError",
    "compile_rhs",
    "compile_laurent",
    "rk4",
    "integrate",
    "residual",
    "residual_bound",
    "growth_law_deviation",
    "apply_word_numeric",
    "backlund_transport",
    "hamiltonian_consistency",
    "HamiltonianComparison",
    "generic_data",
    "to_csv",
    "to_json",
]

DEFAULT_RESIDUAL_TOL = 1e-8
DEFAULT_POLE_EPS = 1e-6
DEFAULT_BOUND = 1e8


class BlowUpError(ArithmeticError):
    pass


class SingularBacklundError(ArithmeticError):
    """An s_i was applied where |f_i| < eps; ``t`` is the offending time."""

    def __init__(self, t: float, index: int):
        super().__init__(f"singular Backlund point at t={t!r} (f{index} ~ 0)")
        self.t = t
        self.index = index


class ChartBreakdownError(ArithmeticError):
    pass


@dataclass(frozen=True)
class NumericInstance:
    spec: SystemSpec
    alpha: tuple
    k: float = field(init=False)

    def __post_init__(self):
        a = tuple(float(x) for x in self.alpha)
        if len(a) != self.spec.size:
            raise ValueError(f"expected {self.spec.size} alpha values, got {len(a)}")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "k", math.fsum(a))

    def alpha_values(self) -> dict:
        return {alpha(i): a for i, a in enumerate(self.alpha)}


@dataclass
class Trajectory:
    t: np.ndarray
    f: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def blow_up(self) -> bool:
        return bool(self.meta.get("blow_up", False))


# -- compilation ------------------------------------------------------------------

def _laurent(e) -> dict:
    """Monomial -> coefficient with negative exponents for a monomial denominator."""
    r = as_rational(e)
    if r.den.is_constant():
        c = r.den.constant_value()
        return {m: v / c for m, v in r.num.terms.items()}
    if not r.den.is_monomial():
        raise ValueError("only monomial denominators can be compiled")
    (dm, dc), = r.den.terms.items()
    out = {}
    for m, c in r.num.terms.items():
        d = dict(m)
        for v, x in dm:
            d[v] = d.get(v, 0) - x
        out[tuple(sorted((v, x) for v, x in d.items() if x))] = c / dc
    return out


@dataclass(frozen=True)
class CompiledPolys:
    """Vector of Laurent polynomials in ``variables`` with float coefficients."""

    variables: tuple
    exponents: np.ndarray  # (monomials, variables)
    coeffs: np.ndarray  # (outputs, monomials)

    def __call__(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if y.ndim == 1:
            mono = np.prod(y[None, :] ** self.exponents, axis=1)
            return self.coeffs @ mono
        mono = np.prod(y[:, None, :] ** self.exponents[None, :, :], axis=2)
        return mono @ self.coeffs.T


def compile_laurent(exprs: Sequence, variables: Sequence[VarId], params: dict | None = None) -> CompiledPolys:
    """Compile expressions after substituting numeric values for ``params``."""
    params = params or {}
    index = {v: i for i, v in enumerate(variables)}
    monos: dict = {}
    rows = []
    for e in exprs:
        row: dict = {}
        for m, c in _laurent(e).items():
            coef = float(c)
            key = []
            for v, x in m:
                if v in params:
                    coef *= params[v] ** x
                elif v in index:
                    key.append((index[v], x))
                else:
                    raise ValueError(f"unbound variable {v!r}")
            key = tuple(key)
            row[key] = row.get(key, 0.0) + coef
        rows.append(row)
        for key in row:
            monos.setdefault(key, len(monos))
    E = np.zeros((max(len(monos), 1), len(variables)))
    C = np.zeros((len(exprs), max(len(monos), 1)))
    for key, j in monos.items():
        for i, x in key:
            E[j, i] = x
    for r, row in enumerate(rows):
        for key, c in row.items():
            C[r, monos[key]] += c
    return CompiledPolys(tuple(variables), E, C)


def compile_rhs(instance: NumericInstance, F: Sequence | None = None) -> CompiledPolys:
    spec = instance.spec
    F = build_model(spec).F if F is None else F
    return compile_laurent(F, [fvar(j) for j in spec.nodes()], instance.alpha_values())


def exact_rhs(spec: SystemSpec, alpha_values: Sequence, f_values: Sequence) -> list[Fraction]:
    """Oracle: exact rational evaluation of F at rational inputs."""
    vals = {alpha(i): Fraction(a) for i, a in enumerate(alpha_values)}
    vals.update({fvar(i): Fraction(x) for i, x in enumerate(f_values)})
    return [Fj.evaluate(vals) for Fj in build_model(spec).F]


# -- integration ------------------------------------------------------------------

def _grid(t_span, step: float) -> np.ndarray:
    t0, t1 = (float(x) for x in t_span)
    if not step > 0:
        raise ValueError("step must be positive")
    if not t1 > t0:
        raise ValueError("t_span must be increasing")
    n = max(1, int(round((t1 - t0) / step)))
    return np.linspace(t0, t1, n + 1)


def rk4(rhs: Callable, y0, grid: np.ndarray, bound: float = DEFAULT_BOUND):
    """Classical RK4 on a fixed grid; returns (states, blown_up)."""
    y = np.array(y0, dtype=float)
    out = np.empty((len(grid), len(y)))
    out[0] = y
    for i in range(len(grid) - 1):
        t, h = grid[i], grid[i + 1] - grid[i]
        k1 = rhs(t, y)
        k2 = rhs(t + h / 2, y + h / 2 * k1)
        k3 = rhs(t + h / 2, y + h / 2 * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > bound:
            return out[: i + 1], True
        out[i + 1] = y
    return out, False


def _rk45(rhs: Callable, y0, grid: np.ndarray, bound: float, rtol: float, atol: float):
    try:
        from scipy.integrate import solve_ivp
    except ImportError as exc:  # optional dependency
        raise ImportError("method 'rk45' needs scipy: pip install 'artifact[rk45]'") from exc

    def escape(t, y):
        return bound - np.max(np.abs(y))

    escape.terminal = True
    sol = solve_ivp(rhs, (grid[0], grid[-1]), np.asarray(y0, float), method="RK45", t_eval=grid,
                    rtol=rtol, atol=atol, events=escape)
    states = sol.y.T
    blown = sol.status == 1 or len(states) < len(grid) or not sol.success
    return states, blown


@lru_cache(maxsize=None)
def _fd_weights(offsets: tuple, at: int) -> tuple:
    """Exact weights w with sum w_k y(offsets_k) ~ y'(at), from Lagrange basis derivatives."""
    out = []
    for k, xk in enumerate(offsets):
        others = [x for i, x in enumerate(offsets) if i != k]
        denom = Fraction(1)
        for x in others:
            denom *= xk - x
        # d/dx prod (x - x_i) at x = at
        total = Fraction(0)
        for skip in range(len(others)):
            prod = Fraction(1)
            for i, x in enumerate(others):
                if i != skip:
                    prod *= at - x
            total += prod
        out.append(float(total / denom))
    return tuple(out)


def _fd_derivative(y: np.ndarray, h: float, width: int = 7) -> np.ndarray:
    """Finite-difference derivative along axis 0 (order width-1) on a uniform grid."""
    n = len(y)
    half = width // 2
    d = np.empty_like(y)
    w = np.array(_fd_weights(tuple(range(-half, half + 1)), 0))
    d[half : n - half] = sum(w[k] * y[k : n - width + 1 + k] for k in range(width)) / h
    for i in range(half):
        wi = np.array(_fd_weights(tuple(range(width)), i))
        d[i] = np.tensordot(wi, y[:width], axes=1) / h
        d[n - 1 - i] = -np.tensordot(wi, y[::-1][:width], axes=1) / h
    return d


def residual(rhs: CompiledPolys, t: np.ndarray, f: np.ndarray) -> float:
    """max |df/dt - F(f)| with df/dt from sixth-order finite differences."""
    if len(t) < 7:
        return float("nan")
    h = (t[-1] - t[0]) / (len(t) - 1)
    return float(np.max(np.abs(_fd_derivative(f, h) - rhs(f))))


def residual_bound(spec: SystemSpec, step: float, f: np.ndarray) -> float:
    """10 h^4 times the natural scale M^(5(d-1)+1) of a degree-d field at amplitude M."""
    d = 2 if spec.is_even else 3
    M = max(1.0, float(np.max(np.abs(f))))
    return 10 * step**4 * M ** (5 * (d - 1) + 1)


def integrate(
    instance: NumericInstance,
    f0,
    t_span=(0.0, 1.0),
    step: float = 1e-3,
    method: str = "rk4",
    bound: float = DEFAULT_BOUND,
    residual_tol: float = DEFAULT_RESIDUAL_TOL,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> Trajectory:
    f0 = np.asarray(f0, dtype=float)
    if f0.shape != (instance.spec.size,):
        raise ValueError(f"expected {instance.spec.size} initial values")
    if not np.all(np.isfinite(f0)):
        raise ValueError("initial values must be finite")
    grid = _grid(t_span, step)
    F = compile_rhs(instance)
    rhs = lambda t, y: F(y)  # noqa: E731
    if method == "rk4":
        states, blown = rk4(rhs, f0, grid, bound)
    elif method == "rk45":
        states, blown = _rk45(rhs, f0, grid, bound, rtol, atol)
    else:
        raise ValueError(f"unknown method {method!r}")
    t = grid[: len(states)]
    res = residual(F, t, states)
    meta = {
        "integrator": method,
        "step": float(grid[1] - grid[0]),
        "max_residual": res,
        "blow_up": bool(blown),
        "residual_tol": residual_tol,
        "flagged": bool(blown or not res <= residual_tol),
    }
    return Trajectory(t, states, meta)


def growth_law_deviation(instance: NumericInstance, traj: Trajectory) -> float:
    """Deviation from g = g(0) + k t (even l) or g_i = g_i(0) e^{k t/2} (odd l).

    Measured as |g - expected| / max(|expected|, 1): relative for |g| >= 1.
    """
    spec = instance.spec
    dt = traj.t - traj.t[0]
    if spec.is_even:
        sums = [traj.f.sum(axis=1)]
        expected = [sums[0][0] + instance.k * dt]
    else:
        sums = [traj.f[:, p::2].sum(axis=1) for p in (0, 1)]
        expected = [g[0] * np.exp(instance.k * dt / 2) for g in sums]
    return max(float(np.max(np.abs(g - e) / np.maximum(np.abs(e), 1.0))) for g, e in zip(sums, expected))


# -- Backlund transport -----------------------------------------------------------

def apply_word_numeric(spec: SystemSpec, word, a: np.ndarray, f: np.ndarray, t=None, eps: float = DEFAULT_POLE_EPS):
    """Evaluate (w(alpha), w(f)) at the point (a, f); ``f`` may be (steps, l+1).

    For w = w_1 ... w_r the value of w(phi) at P is phi at R_r(...R_1(P)),
    where R_i are the generator images, so letters are applied left to right.
    """
    A = np.array(cartan(spec), dtype=float)
    U = np.array(orientation(spec), dtype=float)
    a = np.array(a, dtype=float)
    f = np.array(f, dtype=float)
    single = f.ndim == 1
    if single:
        f = f[None, :]
    for letter in word:
        if letter.kind == "pi":
            shift = letter.index
            a = np.roll(a, -shift)
            f = np.roll(f, -shift, axis=1)
            continue
        i = spec.mod(letter.index)
        fi = f[:, i]
        bad = np.flatnonzero(np.abs(fi) < eps)
        if bad.size:
            when = float(t[bad[0]]) if t is not None else float("nan")
            raise SingularBacklundError(when, i)
        f = f + np.outer(a[i] / fi, U[i])
        a = a - A[i] * a[i]
    return a, (f[0] if single else f)


def backlund_transport(
    instance: NumericInstance,
    traj: Trajectory,
    word,
    eps: float = DEFAULT_POLE_EPS,
    residual_tol: float = 100 * DEFAULT_RESIDUAL_TOL,
) -> tuple[NumericInstance, Trajectory]:
    spec = instance.spec
    if isinstance(word, str):
        word = parse_word(word, spec)
    a2, f2 = apply_word_numeric(spec, word, np.array(instance.alpha), traj.f, traj.t, eps)
    inst2 = NumericInstance(spec, tuple(a2))
    res = residual(compile_rhs(inst2), traj.t, f2)
    meta = dict(traj.meta)
    meta.update(
        {
            "word": " ".join(str(x) for x in word),
            "max_residual": res,
            "residual_tol": residual_tol,
            "flagged": bool(not res <= residual_tol),
        }
    )
    return inst2, Trajectory(traj.t.copy(), f2, meta)


# -- canonical system -------------------------------------------------------------

@dataclass
class HamiltonianComparison:
    max_deviation: float
    linear_channel_deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "max_deviation": self.max_deviation,
            "linear_channel_deviation": self.linear_channel_deviation,
            "tolerance": self.tolerance,
            "status": "pass" if self.passed else "fail",
        }


def hamiltonian_consistency(
    instance: NumericInstance,
    f0,
    t_span=(0.0, 1.0),
    step: float = 1e-3,
    tolerance: float = 1e-7,
    eps: float = DEFAULT_POLE_EPS,
) -> HamiltonianComparison:
    """Integrate (q, p) with closed-form x and compare to the f-system."""
    spec = instance.spec
    n = spec.n
    f0 = np.asarray(f0, dtype=float)
    cmap = build_coordinate_map(spec)
    H = build_H(spec).H
    params = instance.alpha_values()
    fvals = {fvar(j): float(x) for j, x in enumerate(f0)}
    if not spec.is_even and abs(f0[0::2].sum()) < eps:
        raise ChartBreakdownError("chart breakdown: g0 vanishes at the initial point")
    canon0 = {u: float(as_rational(cmap.forward.image(u)).evaluate(fvals)) for u in canonical_variables(spec)}
    qp = [qvar(i) for i in range(1, n + 1)] + [pvar(i) for i in range(1, n + 1)]
    xs = [xvar(0)] if spec.is_even else [xvar(0), xvar(1)]
    flow = [partial(H, pvar(i)) for i in range(1, n + 1)] + [-partial(H, qvar(i)) for i in range(1, n + 1)]
    G = compile_laurent(flow, qp + xs, params)
    x0 = np.array([canon0[v] for v in xs])
    t0 = float(t_span[0])
    k = instance.k

    def xt(t):
        if spec.is_even:
            return x0 + k * (t - t0)
        return x0 * math.exp(k * (t - t0) / 2)

    def rhs(t, y):
        return G(np.concatenate([y, xt(t)]))

    grid = _grid(t_span, step)
    y, blown = rk4(rhs, [canon0[v] for v in qp], grid)
    if blown:
        raise BlowUpError("canonical system blew up")
    xgrid = np.array([xt(t) for t in grid])
    if not spec.is_even and np.min(np.abs(xgrid[:, 0])) < eps:
        raise ChartBreakdownError("chart breakdown: x0 vanishes along the path")
    back = compile_laurent([cmap.backward.image(fvar(j)) for j in spec.nodes()], qp + xs, params)
    f_canon = back(np.hstack([y, xgrid]))
    direct = integrate(instance, f0, t_span, step)
    if direct.blow_up:
        raise BlowUpError("f-system blew up")
    dev = float(np.max(np.abs(f_canon - direct.f)))
    if spec.is_even:
        lin = float(np.max(np.abs(direct.f.sum(axis=1) - direct.f[0].sum() - k * (grid - t0))))
    else:
        lin = growth_law_deviation(instance, direct)
    return HamiltonianComparison(dev, lin, tolerance)


# -- data --------------------------------------------------------------------------

def generic_data(spec: SystemSpec, seed: int = 0):
    """Positive rational alpha summing to 1 and f(0) drawn from [1/2, 2]."""
    rng = np.random.default_rng(seed)
    w = rng.integers(1, 10, size=spec.size)
    alphas = [Fraction(int(x), int(w.sum())) for x in w]
    f0 = rng.uniform(0.5, 2.0, size=spec.size)
    return NumericInstance(spec, tuple(float(a) for a in alphas)), f0, alphas


def _fmt(x: float) -> str:
    return repr(float(x))


def to_csv(traj: Trajectory, fh=None) -> str:
    out = fh if fh is not None else io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["t"] + [f"f{j}" for j in range(traj.f.shape[1])])
    for t, row in zip(traj.t, traj.f):
        w.writerow([_fmt(t)] + [_fmt(x) for x in row])
    return out.getvalue() if fh is None else ""


def to_json(instance: NumericInstance, traj: Trajectory) -> str:
    doc = {
        "spec": {"l": instance.spec.l},
        "alpha": list(instance.alpha),
        "t": [float(x) for x in traj.t],
        "f": [[float(x) for x in row] for row in traj.f],
        "meta": traj.meta,
    }
    return json.dumps(doc)
