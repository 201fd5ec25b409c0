import pytest

from polyenc.cli import load_problem
from polyenc.errors import LevelMismatch
from polyenc.logic import Level, TyApp, TyVar
from polyenc.monomorph import MonoConfig, mangle_symbol, mangle_type, monomorphise
from polyenc.typecheck import check_well_typed
from polyenc.tptp import parse

from generators import corpus as generated


def test_mangle_names():
    assert mangle_type(TyApp("list", (TyApp("w"),))) == "list·w"
    assert mangle_type(TyApp("pair", (TyApp("w"), TyApp("list", (TyApp("nat"),))))) == "pair·w·list·nat"
    assert mangle_type(TyVar("A")) == "A"
    assert mangle_symbol("cons", [TyApp("w")]) == "cons·w"
    assert mangle_symbol("zero", []) == "zero"


def test_lists(lists):
    result = monomorphise(lists)
    assert result.rounds == 2
    assert result.added == 3
    assert result.dropped == ()
    assert [nf.name for nf in result.problem.formulas] == ["inj", "nil_cons·w", "exhaust·w", "sel·w"]
    assert result.problem.is_monomorphic()
    assert check_well_typed(result.problem) == []


def test_lists_signature_and_types(lists):
    result = monomorphise(lists)
    sig = result.problem.signature
    assert sig.level is Level.MONOMORPHIC
    assert {"nil·w", "cons·w", "hd·w", "tl·w"} <= set(sig.funs)
    assert result.type_origin["list·w"] == TyApp("list", (TyApp("w"),))
    assert result.problem.infinite == (TyApp("list·w"),)


def test_instances_keep_their_source(lists):
    result = monomorphise(lists)
    sources = {nf.name: nf.source for nf in result.problem.formulas}
    assert sources["sel·w"] == "sel"


def test_budget_drops_formulas(lists):
    result = monomorphise(lists, MonoConfig(K=3, Delta=1))
    assert result.added == 1
    assert set(result.dropped) == {"exhaust", "sel"}


def test_no_rounds_drops_everything_polymorphic(lists):
    result = monomorphise(lists, MonoConfig(K=0, Delta=200))
    assert result.rounds == 0
    assert set(result.dropped) == {"nil_cons", "exhaust", "sel"}
    assert [nf.name for nf in result.problem.formulas] == ["inj"]


def test_unconstrained_type_variable_takes_every_ground_type():
    problem = load_problem(
        """
        tff(w_type, type, w: $tType).
        tff(c_decl, type, c: w).
        tff(p_decl, type, p: w > $o).
        tff(pc, axiom, ![X: w]: (p(X) | X = c)).
        tff(refl, axiom, ![A: $tType, X: A]: X = X).
        """
    )
    result = monomorphise(problem)
    assert [nf.name for nf in result.problem.formulas] == ["pc", "refl·w"]


def test_untyped_input_is_rejected():
    problem, _ = parse("fof(a, axiom, p(c)).")
    with pytest.raises(LevelMismatch):
        monomorphise(problem)


@pytest.mark.parametrize("seed, problem", generated(12))
def test_generated_problems(seed, problem):
    cfg = MonoConfig(K=3, Delta=20)
    result = monomorphise(problem, cfg)
    assert result.added <= cfg.Delta
    assert result.rounds <= cfg.K
    assert result.problem.is_monomorphic()
    assert check_well_typed(result.problem) == [], seed
