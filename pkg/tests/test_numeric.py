from __future__ import annotations

import json
import math
from fractions import Fraction

import numpy as np
import pytest

from weyl_painleve.numeric import (
    ChartBreakdownError,
    NumericInstance,
    SingularBacklundError,
    backlund_transport,
    compile_rhs,
    exact_rhs,
    generic_data,
    growth_law_deviation,
    hamiltonian_consistency,
    integrate,
    residual_bound,
    to_csv,
    to_json,
)
from weyl_painleve.rootdata import SystemSpec
from weyl_painleve.weylaction import PI, s


def test_compile_rhs_examples():
    inst = NumericInstance(SystemSpec(2), (1 / 3, 1 / 3, 1 / 3))
    np.testing.assert_allclose(compile_rhs(inst)(np.ones(3)), [1 / 3] * 3, rtol=0, atol=1e-15)
    inst = NumericInstance(SystemSpec(2), (1.0, 0.0, 0.0))
    assert compile_rhs(inst)(np.array([1.0, 2.0, 3.0]))[0] == 0.0


@pytest.mark.parametrize("l", [2, 3, 4, 5])
def test_compile_rhs_matches_exact_oracle(l):
    spec = SystemSpec(l)
    rng = np.random.default_rng(l)
    for _ in range(5):
        a = [Fraction(int(x), 7) for x in rng.integers(-9, 10, spec.size)]
        f = [Fraction(int(x), 5) for x in rng.integers(-9, 10, spec.size)]
        want = np.array([float(v) for v in exact_rhs(spec, a, f)])
        got = compile_rhs(NumericInstance(spec, tuple(float(x) for x in a)))(np.array([float(x) for x in f]))
        np.testing.assert_allclose(got, want, rtol=1e-14, atol=1e-14)


def test_instance_k():
    inst = NumericInstance(SystemSpec(3), (0.1, 0.2, 0.3, 0.4))
    assert inst.k == math.fsum(inst.alpha)


def test_growth_law_even():
    inst = NumericInstance(SystemSpec(2), (0.4, 0.3, 0.3))
    tr = integrate(inst, [1.0, 1.0, 1.0], (0, 1), 1e-3)
    g = tr.f.sum(axis=1)
    assert np.max(np.abs(g - g[0] - tr.t)) < 1e-8
    assert len(tr.t) == 1001


def test_growth_law_odd():
    inst, f0, _ = generic_data(SystemSpec(3), 0)
    tr = integrate(inst, f0, (0, 1), 1e-3)
    g0 = tr.f[:, 0::2].sum(axis=1)
    rel = np.abs(g0 - g0[0] * np.exp(inst.k * tr.t / 2)) / np.abs(g0)
    assert np.max(rel) < 1e-7
    assert growth_law_deviation(inst, tr) < 1e-7


def test_halving_step_reduces_residual_about_16x():
    inst, f0, _ = generic_data(SystemSpec(2), 0)
    r1 = integrate(inst, f0, (0, 1), 0.01).meta["max_residual"]
    r2 = integrate(inst, f0, (0, 1), 0.005).meta["max_residual"]
    assert 12 <= r1 / r2 <= 20


@pytest.mark.parametrize("l", [2, 3, 4, 5])
@pytest.mark.parametrize("seed", [0, 1])
def test_residual_invariant(l, seed):
    spec = SystemSpec(l)
    inst, f0, _ = generic_data(spec, seed)
    tr = integrate(inst, f0, (0, 1), 1e-3)
    assert tr.meta["max_residual"] <= residual_bound(spec, 1e-3, tr.f)


def test_rk45_agrees_with_rk4():
    inst, f0, _ = generic_data(SystemSpec(2), 3)
    a = integrate(inst, f0, (0, 1), 1e-3)
    b = integrate(inst, f0, (0, 1), 1e-3, method="rk45")
    assert b.meta["integrator"] == "rk45"
    assert np.max(np.abs(a.f - b.f)) < 1e-8


def test_blow_up_truncates():
    inst = NumericInstance(SystemSpec(2), (0.4, 0.3, 0.3))
    tr = integrate(inst, [2.0, -2.0, 1.0], (0, 5), 1e-3)
    assert tr.blow_up
    assert len(tr.t) < 5001
    assert np.all(np.isfinite(tr.f))


def test_integrate_rejects_bad_input():
    inst = NumericInstance(SystemSpec(2), (0.4, 0.3, 0.3))
    with pytest.raises(ValueError):
        integrate(inst, [1.0, 1.0], (0, 1))
    with pytest.raises(ValueError):
        integrate(inst, [1.0, float("nan"), 1.0], (0, 1))


def test_backlund_pi_is_relabeling():
    inst, f0, _ = generic_data(SystemSpec(2), 0)
    tr = integrate(inst, f0, (0, 1), 1e-3)
    inst2, tr2 = backlund_transport(inst, tr, [PI])
    np.testing.assert_array_equal(tr2.f, np.roll(tr.f, -1, axis=1))
    assert inst2.alpha == tuple(np.roll(inst.alpha, -1))


def test_backlund_s0_l2():
    inst, f0, _ = generic_data(SystemSpec(2), 0)
    tr = integrate(inst, f0, (0, 1), 1e-3)
    inst2, tr2 = backlund_transport(inst, tr, [s(0)])
    a0, a1, a2 = inst.alpha
    np.testing.assert_allclose(inst2.alpha, (-a0, a1 + a0, a2 + a0), rtol=0, atol=1e-15)
    assert tr2.meta["max_residual"] < 1e-6
    assert not tr2.meta["flagged"]


def test_backlund_involution():
    inst, f0, _ = generic_data(SystemSpec(3), 1)
    tr = integrate(inst, f0, (0, 1), 1e-3)
    _, tr2 = backlund_transport(inst, tr, [s(1), s(1)])
    assert np.max(np.abs(tr2.f - tr.f)) < 1e-12


def test_backlund_pole_guard():
    inst = NumericInstance(SystemSpec(2), (0.4, 0.3, 0.3))
    tr = integrate(inst, [1.0, 0.0, 1.0], (0, 1), 1e-3)
    with pytest.raises(SingularBacklundError) as info:
        backlund_transport(inst, tr, "s1")
    assert info.value.t == pytest.approx(0.0)


@pytest.mark.parametrize("l", [2, 3])
def test_hamiltonian_consistency(l):
    inst, f0, _ = generic_data(SystemSpec(l), 0)
    cmp = hamiltonian_consistency(inst, f0, (0, 1), 1e-3)
    assert cmp.max_deviation < 1e-7 and cmp.passed
    if l == 2:
        assert cmp.linear_channel_deviation < 1e-10


def test_chart_breakdown():
    inst = NumericInstance(SystemSpec(3), (0.25, 0.25, 0.25, 0.25))
    with pytest.raises(ChartBreakdownError, match="chart breakdown"):
        hamiltonian_consistency(inst, [0.0, 1.0, 0.0, 1.0], (0, 1), 1e-3)


def test_generic_data_properties():
    for l in (2, 3, 6):
        inst, f0, alphas = generic_data(SystemSpec(l), 5)
        assert sum(alphas) == 1 and all(a > 0 for a in alphas)
        assert np.all((0.5 <= f0) & (f0 <= 2.0))
    a1, f1, _ = generic_data(SystemSpec(3), 9)
    a2, f2, _ = generic_data(SystemSpec(3), 9)
    assert a1 == a2 and np.array_equal(f1, f2)


def test_export_roundtrip():
    inst, f0, _ = generic_data(SystemSpec(2), 0)
    tr = integrate(inst, f0, (0, 0.01), 1e-3)
    text = to_csv(tr)
    lines = text.strip().split("\n")
    assert lines[0] == "t,f0,f1,f2"
    assert len(lines) == len(tr.t) + 1
    row = [float(x) for x in lines[5].split(",")]
    assert row[0] == tr.t[4] and row[1:] == list(tr.f[4])
    doc = json.loads(to_json(inst, tr))
    assert set(doc) >= {"spec", "alpha", "t", "f", "meta"}
    assert doc["f"][3] == list(tr.f[3])
