import pytest

from polyenc import config
from polyenc.cli import load_problem
from polyenc.clausify import Clause, clausify
from polyenc.logic import Eq, Fn, Pred, Var
from polyenc.pipeline import SchemeId, all_schemes, encode_problem, run_pipeline
from polyenc.refute import (
    AXIOM_RULES,
    EqualityMode,
    Outcome,
    equality_axioms,
    greater,
    has_equality,
    positions,
    refute,
    replace_at,
    subsumes,
    term_weight,
)

X, Y = Var("X"), Var("Y")
A, B, C = Fn("a"), Fn("b"), Fn("c")


def f(*args):
    return Fn("f", (), args)


def g(*args):
    return Fn("g", (), args)


def p(*args, positive=True):
    return Pred("p", (), args, positive)


def _cnf(text):
    return clausify(load_problem(text))


def test_propositional():
    result = refute(_cnf("fof(a, axiom, p).\nfof(b, axiom, p => q).\nfof(c, axiom, ~q)."))
    assert result.outcome is Outcome.REFUTED
    assert result.refuted
    assert result.proof[-1].clause.is_empty
    assert str(result.proof[-1]).endswith("]")


def test_first_order_chain():
    result = refute(_cnf("fof(step, axiom, ![X]: (p(X) => p(f(X)))).\nfof(base, axiom, p(a)).\nfof(goal, axiom, ~p(f(f(a))))."))
    assert result.refuted
    assert result.steps > 0


def test_saturation_is_reported():
    result = refute(_cnf("fof(a, axiom, p(a))."))
    assert result.outcome is Outcome.GAVE_UP
    assert result.saturated
    assert result.proof == ()


@pytest.mark.parametrize("mode", [EqualityMode.AXIOMS, EqualityMode.PARAMODULATION, EqualityMode.AUTO])
def test_equality_modes(mode):
    cnf = _cnf("fof(e, axiom, a = b).\nfof(d, axiom, f(a) != f(b)).")
    assert has_equality(cnf)
    assert refute(cnf, equality=mode).refuted


def test_erased_unit_card_is_refutable(corpus):
    erased = run_pipeline(corpus("unit_card.p"), SchemeId.parse("e")).problem
    assert refute(clausify(erased), step_limit=2000).refuted


def test_typed_unit_card_is_not_refuted(corpus):
    result = refute(clausify(corpus("unit_card.p")), step_limit=500)
    assert not result.refuted


def test_step_limit():
    cnf = _cnf("fof(step, axiom, ![X]: (p(X) => p(f(X)))).\nfof(base, axiom, p(a)).\nfof(goal, axiom, ~q).")
    result = refute(cnf, step_limit=20)
    assert result.outcome is Outcome.GAVE_UP
    assert not result.saturated


def test_equality_axioms_cover_symbols():
    clauses = [Clause((p(f(X)), Pred("q", (), ()))), Clause((Eq(A, B),))]
    rules = [c.source for c in equality_axioms(clauses, lambda t: X.ty)]
    assert rules.count("reflexivity") == 1
    assert rules.count("congruence") == 2


def test_subsumption():
    assert subsumes(Clause((p(X),)), Clause((p(A), Pred("q", (), ()))))
    assert not subsumes(Clause((p(A), Pred("q", (), ()))), Clause((p(X),)))
    assert not subsumes(Clause((p(X, X),)), Clause((p(A, B),)))
    assert subsumes(Clause((p(X, X),)), Clause((p(A, A),)))


def test_term_ordering():
    assert term_weight(f(A, X)) == 3
    assert greater(f(X), X)
    assert not greater(X, f(X))
    assert not greater(f(X), g(Y))
    assert not greater(f(f(X)), g(Y))
    assert greater(f(g(X)), X)


def test_positions_and_replacement():
    t = f(A, g(B))
    assert [path for path, _ in positions(f(X, A))] == [(), (1,)]
    assert replace_at(t, (1, 0), C) == f(A, g(C))
    assert replace_at(t, (), C) == C


@pytest.mark.parametrize("scheme", [s for s in all_schemes() if s.sound], ids=lambda s: s.name)
def test_sound_encodings_of_lists_are_refuted(lists, scheme):
    encoded = encode_problem(lists, scheme).encoded.problem
    result = refute(clausify(encoded))
    assert result.outcome is Outcome.REFUTED
    assert result.proof[-1].clause.is_empty


@pytest.mark.parametrize("ratio", [0, 1, 4])
def test_pick_given_ratio(monkeypatch, ratio):
    monkeypatch.setattr(config, "PICK_GIVEN_RATIO", ratio)
    cnf = _cnf("fof(step, axiom, ![X]: (p(X) => p(f(X)))).\nfof(base, axiom, p(a)).\nfof(goal, axiom, ~p(f(f(a)))).")
    assert refute(cnf).refuted


def test_auto_mode_paramodulates_before_adding_axioms():
    cnf = _cnf("fof(e, axiom, a = b).\nfof(d, axiom, f(a) != f(b)).")
    result = refute(cnf, equality=EqualityMode.AUTO)
    assert result.refuted
    assert not any(step.rule in AXIOM_RULES for step in result.proof)
