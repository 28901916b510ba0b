"""Registry of symbolic checks and a runner that fans them out over l."""

from __future__ import annotations

import os
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable

from . import canonical, dynamics, taulayer, weylaction
from .dynamics import SystemModel, build_model, rotate
from .exprfield import Polynomial
from .report import CheckResult
from .rootdata import SystemSpec, verify_chi_lemmas

__all__ = ["CHECKS", "Mutation", "mutated_model", "run_check", "run_suite", "max_l_from_env"]

MAX_L_ENV = "WEYL_PAINLEVE_MAX_L"


@dataclass(frozen=True)
class Mutation:
    """Flip the sign of one term of F_0 (target "F") or h_0 (target "h")."""

    target: str
    term: int

    def describe(self) -> str:
        return f"sign flip of term {self.term} in {'F_0' if self.target == 'F' else 'h_0'}"


def _flip(p: Polynomial, index: int) -> Polynomial:
    terms = p.sorted_terms()
    if not 0 <= index < len(terms):
        raise IndexError(f"term index {index} out of range (0..{len(terms) - 1})")
    m, _ = terms[index]
    d = dict(p.terms)
    d[m] = -d[m]
    return Polynomial(d)


def mutated_model(spec: SystemSpec, mutation: Mutation) -> SystemModel:
    base = build_model(spec)
    F, h0 = list(base.F), base.h[0]
    if mutation.target == "F":
        F0 = _flip(F[0], mutation.term)
        F = [rotate(spec, F0, j) for j in spec.nodes()]
    elif mutation.target == "h":
        h0 = _flip(h0, mutation.term)
    else:
        raise ValueError(f"unknown mutation target {mutation.target!r}")
    return SystemModel.from_parts(spec, F, h0)


# name -> callable(spec, model, seed)
CHECKS: dict[str, Callable[[SystemSpec, SystemModel, int], CheckResult]] = {
    "model_shape": lambda s, m, seed: dynamics.verify_model_shape(s, m),
    "hamiltonian_form": lambda s, m, seed: dynamics.verify_hamiltonian_form(s, m),
    "adjacent_differences": lambda s, m, seed: dynamics.verify_adjacent_differences(s, m),
    "radical": lambda s, m, seed: dynamics.verify_radical(s, m),
    "poisson_structure": lambda s, m, seed: dynamics.verify_poisson_structure(s, 100, seed),
    "chi_lemmas": lambda s, m, seed: verify_chi_lemmas(s),
    "weyl_relations": lambda s, m, seed: weylaction.verify_group_relations(s, False),
    "weyl_relations_tau": lambda s, m, seed: weylaction.verify_group_relations(s, True),
    "action_tables": lambda s, m, seed: weylaction.verify_action_tables(s),
    "backlund_commutes": lambda s, m, seed: weylaction.verify_backlund_commutes(s, m),
    "demazure_nilcoxeter": lambda s, m, seed: weylaction.verify_demazure_nilcoxeter(s, 3, seed),
    "random_words": lambda s, m, seed: weylaction.verify_random_words(s, 200, seed),
    "coordinate_roundtrip": lambda s, m, seed: canonical.verify_coordinate_roundtrip(s),
    "canonical_brackets": lambda s, m, seed: canonical.canonical_brackets_check(s),
    "H_equals_h0": lambda s, m, seed: canonical.verify_H_equals_h0(s, m),
    "hamilton_equations": lambda s, m, seed: canonical.verify_hamilton_equations(s, m),
    "canonical_bracket_formula": lambda s, m, seed: canonical.verify_canonical_bracket_formula(s, 20, seed),
    "rescaled_variables": lambda s, m, seed: canonical.verify_rescaled_variables(s, m),
    "s_on_h": lambda s, m, seed: taulayer.verify_s_on_h(s, m),
    "h_motif": lambda s, m, seed: taulayer.verify_h_motif(s, m),
    "f_from_tau": lambda s, m, seed: taulayer.verify_f_from_tau(s, m),
    "hirota": lambda s, m, seed: taulayer.verify_hirota(s, m),
    "tau_commutation": lambda s, m, seed: taulayer.verify_tau_commutation(s, m),
    "W_j_invariance": lambda s, m, seed: taulayer.verify_W_j_invariance(s),
    "tau_consistency": lambda s, m, seed: taulayer.verify_tau_consistency(s, m),
}


def max_l_from_env(default: int | None = None) -> int | None:
    raw = os.environ.get(MAX_L_ENV)
    if raw is None or raw.strip() == "":
        return default
    return int(raw)


def run_check(name: str, l: int, seed: int = 0, mutation: Mutation | None = None) -> CheckResult:
    spec = SystemSpec(l)
    try:
        model = mutated_model(spec, mutation) if mutation else build_model(spec)
        return CHECKS[name](spec, model, seed)
    except Exception as exc:  # a crash inside a check counts as a failure
        res = CheckResult(name, l)
        res.record(False, f"exception {type(exc).__name__}", str(exc))
        res.notes.append(traceback.format_exc(limit=3))
        return res


def run_suite(l_values, names=None, seed: int = 0, jobs: int = 1, mutation: Mutation | None = None) -> list[CheckResult]:
    names = list(CHECKS) if names is None else list(names)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise KeyError(f"unknown checks: {', '.join(unknown)}")
    tasks = [(n, l) for l in l_values for n in names]
    if jobs <= 1:
        return [run_check(n, l, seed, mutation) for n, l in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(run_check, n, l, seed, mutation) for n, l in tasks]
        return [f.result() for f in futures]
