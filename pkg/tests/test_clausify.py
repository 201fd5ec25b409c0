import pytest

from polyenc.cli import load_problem
from polyenc.clausify import Clause, clausify, is_clausifiable, normalize_clause
from polyenc.errors import LevelMismatch
from polyenc.logic import Eq, Fn, Pred, TyApp, Var

W = TyApp("w")


def test_monkey(monkey):
    cnf = clausify(monkey)
    assert len(cnf) == 4
    assert [c.source for c in cnf] == ["ax1", "ax1", "ax2", "ax3"]
    assert [len(c) for c in cnf] == [1, 1, 1, 3]


def test_skolem_functions_take_enclosing_universals(lists_mono):
    cnf = clausify(lists_mono)
    sk1 = cnf.signature.funs["$$sk1"]
    assert sk1.arg_types == (TyApp("list_w"),)
    assert sk1.result == W
    # the negated conjecture has no universals around its existentials
    constants = [s for s, d in cnf.signature.funs.items() if s.startswith("$$sk") and not d.arg_types]
    assert len(constants) == 4
    assert "$$sk1" not in lists_mono.signature.funs


def test_polymorphic_problem_is_rejected(lists):
    assert not is_clausifiable(lists)
    with pytest.raises(LevelMismatch):
        clausify(lists)


def test_normalize_clause_renames_in_order():
    y, z = Var("Y", W), Var("Z", W)
    clause = normalize_clause([Pred("p", (), (z, y)), Pred("p", (), (z, y)), Eq(y, Fn("c"))], "src")
    assert clause.literals == (Pred("p", (), (Var("X0", W), Var("X1", W))), Eq(Var("X1", W), Fn("c")))
    assert clause.source == "src"


def test_tautologies():
    x = Var("X", W)
    assert Clause((Eq(x, x),)).is_tautology()
    assert Clause((Pred("p", (), (x,)), Pred("p", (), (x,), False))).is_tautology()
    assert not Clause((Eq(x, x, False),)).is_tautology()
    assert Clause().is_empty


def test_tautologies_are_dropped():
    problem = load_problem("fof(t, axiom, ![X]: (p(X) | ~p(X))).\nfof(u, axiom, q).")
    cnf = clausify(problem)
    assert [c.source for c in cnf] == ["u"]
