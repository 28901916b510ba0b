from __future__ import annotations

import pytest

from weyl_painleve.dynamics import build_model
from weyl_painleve.rootdata import SystemSpec
from weyl_painleve.suite import CHECKS, Mutation, max_l_from_env, mutated_model, run_check, run_suite


def test_mutation_changes_exactly_one_term():
    spec = SystemSpec(2)
    base = build_model(spec)
    m = mutated_model(spec, Mutation("F", 0))
    diff = [k for k in base.F[0].terms if base.F[0].terms[k] != m.F[0].terms.get(k)]
    assert len(diff) == 1
    m = mutated_model(spec, Mutation("h", 2))
    assert sum(base.h[0].terms[k] != m.h[0].terms[k] for k in base.h[0].terms) == 1
    assert "F_0" in Mutation("F", 1).describe()


def test_mutation_bad_index():
    with pytest.raises(IndexError):
        mutated_model(SystemSpec(2), Mutation("F", 99))
    with pytest.raises(ValueError):
        mutated_model(SystemSpec(2), Mutation("G", 0))


def test_mutated_backlund_fails():
    res = run_check("backlund_commutes", 2, mutation=Mutation("F", 0))
    assert not res.passed and res.failures


def test_crash_is_a_failure():
    res = run_check("model_shape", 2, mutation=Mutation("F", 99))
    assert res.status == "fail"
    assert any("IndexError" in f for f in res.failures)


def test_parallel_matches_serial():
    names = ["model_shape", "weyl_relations", "chi_lemmas"]
    a = run_suite([2, 3], names, jobs=1)
    b = run_suite([2, 3], names, jobs=2)
    assert [(r.check, r.l, r.status) for r in a] == [(r.check, r.l, r.status) for r in b]


def test_unknown_check():
    with pytest.raises(KeyError):
        run_suite([2], ["nope"])


def test_env(monkeypatch):
    monkeypatch.delenv("WEYL_PAINLEVE_MAX_L", raising=False)
    assert max_l_from_env() is None and max_l_from_env(6) == 6
    monkeypatch.setenv("WEYL_PAINLEVE_MAX_L", "4")
    assert max_l_from_env() == 4


def test_registry_covers_every_verifier():
    assert len(CHECKS) == 25


@pytest.mark.slow
def test_full_suite_l2_to_6():
    results = run_suite(range(2, 7))
    assert len(results) == 25 * 5
    assert [f"{r.check}(l={r.l})" for r in results if not r.passed] == []
