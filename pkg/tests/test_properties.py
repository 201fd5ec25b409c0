import random

import pytest

from polyenc.analysis import compute_U, types_of
from polyenc.encode import guards_feather, guards_light, tags_feather, tags_light
from polyenc.logic import GUARD, Level, Pred, TyVar, VarKind, alpha_equivalent, binders, formula_type_vars, literals, subst_type, type_vars
from polyenc.monomorph import MonoConfig, monomorphise
from polyenc.pipeline import analyze
from polyenc.tptp import TptpLevel, parse, print_problem
from polyenc.typecheck import check_well_typed
from polyenc.unify import is_instance
from polyenc.variables import naked_vars

from generators import GROUND, list_of, random_problem
from generators import corpus as generated

PROBLEMS = generated(500)

STAGES = {
    "t_q": lambda p, ctx, level: tags_light(p, ctx.verdicts, ctx.V, level),
    "t_qq": lambda p, ctx, level: tags_feather(p, ctx.verdicts, ctx.V, level, ctx.witness_policy),
    "g_q": lambda p, ctx, level: guards_light(p, ctx.verdicts, ctx.V, level, ctx.witness_policy),
    "g_qq": lambda p, ctx, level: guards_feather(p, ctx.verdicts, ctx.V, level, ctx.witness_policy),
}


def _prepared(problem, mono):
    if mono:
        problem = monomorphise(problem, MonoConfig(K=2, Delta=20)).problem
        return problem, analyze(problem), Level.MONOMORPHIC
    return problem, analyze(problem), Level.POLYMORPHIC


def _guarded(phi):
    return {
        lit.args[0]
        for lit in literals(phi)
        if isinstance(lit, Pred) and lit.sym.startswith(GUARD) and not lit.positive
    }


def _universals(phi):
    return [v for v in binders(phi) if v.kind is VarKind.UNIVERSAL]


@pytest.mark.parametrize("mono", [False, True], ids=["poly", "mono"])
@pytest.mark.parametrize("seed, problem", PROBLEMS)
def test_tags_leave_only_monotonic_naked_variables(seed, problem, mono):
    problem, ctx, level = _prepared(problem, mono)
    for stage in ("t_q", "t_qq"):
        encoded = STAGES[stage](problem, ctx, level)
        assert check_well_typed(encoded.problem) == [], (seed, stage)
        for nf in encoded.translations:
            exposed = [v for v in naked_vars(nf.formula) if not ctx.verdicts(v.ty)]
            assert exposed == [], (seed, stage, nf.name)


@pytest.mark.parametrize("mono", [False, True], ids=["poly", "mono"])
@pytest.mark.parametrize("seed, problem", PROBLEMS)
def test_guards_cover_nonmonotonic_variables(seed, problem, mono):
    problem, ctx, level = _prepared(problem, mono)

    encoded = STAGES["g_q"](problem, ctx, level)
    assert check_well_typed(encoded.problem) == [], seed
    for nf in encoded.translations:
        guarded = _guarded(nf.formula)
        for v in _universals(nf.formula):
            assert ctx.verdicts(v.ty) or v in guarded, (seed, nf.name, v)

    encoded = STAGES["g_qq"](problem, ctx, level)
    assert check_well_typed(encoded.problem) == [], seed
    for nf in encoded.translations:
        guarded = _guarded(nf.formula)
        for v in naked_vars(nf.formula):
            assert ctx.verdicts(v.ty) or v in guarded, (seed, nf.name, v)


@pytest.mark.parametrize("seed, problem", PROBLEMS)
def test_verdict_is_closed_under_instances(seed, problem):
    ctx = analyze(problem)
    rng = random.Random(seed)
    pool = list(types_of(problem)) + [TyVar("A"), list_of(TyVar("A")), list_of(list_of(TyVar("A")))]
    fillers = GROUND + [list_of(t) for t in GROUND] + [TyVar("B"), list_of(TyVar("B"))]
    for _ in range(20):
        sigma = rng.choice(pool)
        instance = subst_type(sigma, {a: rng.choice(fillers) for a in type_vars(sigma)})
        assert is_instance(instance, sigma)
        if ctx.verdicts(sigma):
            assert ctx.verdicts(instance), (seed, sigma, instance)
        if ctx.verdicts.quick(sigma):
            assert ctx.verdicts(sigma), (seed, sigma)


@pytest.mark.parametrize("seed, problem", PROBLEMS)
def test_monotonic_instance_cap(seed, problem):
    ctx = analyze(problem)
    U = compute_U(problem, ctx.verdicts, ctx.inf)
    assert U == ctx.V
    nonmonotonic = [s for s in types_of(problem) if not ctx.verdicts(s)]
    for u in U:
        assert ctx.verdicts(u), (seed, u)
        assert any(is_instance(u, s) for s in nonmonotonic), (seed, u)
    for i, u in enumerate(U):
        for other in U[i + 1:]:
            assert not is_instance(u, other) and not is_instance(other, u), (seed, u, other)


@pytest.mark.parametrize("K, Delta", [(1, 50), (2, 500), (3, 200)])
def test_monomorphisation_budget_on_a_large_problem(K, Delta):
    problem = random_problem(2024, 500)
    polymorphic = [nf.name for nf in problem.formulas if formula_type_vars(nf.formula)]
    monomorphic = len(problem.formulas) - len(polymorphic)

    result = monomorphise(problem, MonoConfig(K=K, Delta=Delta))

    assert result.rounds <= K
    assert result.added <= Delta
    assert len(result.problem.formulas) == monomorphic + result.added
    assert set(result.dropped) <= set(polymorphic)
    sources = {nf.source for nf in result.problem.formulas}
    assert all(name in sources or name in result.dropped for name in polymorphic)
    assert result.problem.is_monomorphic()
    assert check_well_typed(result.problem) == []


@pytest.mark.parametrize("seed", range(250))
def test_printed_problems_read_back(seed):
    problem = random_problem(seed, 4)
    again, _ = parse(print_problem(problem, TptpLevel.TFF1), TptpLevel.TFF1)
    assert [nf.name for nf in again.formulas] == [nf.name for nf in problem.formulas]
    for a, b in zip(again.formulas, problem.formulas):
        assert alpha_equivalent(a.formula, b.formula), (seed, a.name)
