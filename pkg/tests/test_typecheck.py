from polyenc.logic import Eq, Fn, Forall, FunDecl, Level, NamedFormula, Problem, Signature, TyApp, Var, VarKind
from polyenc.typecheck import check_well_typed, is_well_typed

NAT = TyApp("nat")
W = TyApp("w")
SIG = Signature(Level.MONOMORPHIC, {"nat": 0, "w": 0}, {"z": FunDecl((), (), NAT), "c": FunDecl((), (), W)})


def problem(*formulas):
    return Problem(SIG, tuple(NamedFormula(f"f{i}", phi) for i, phi in enumerate(formulas)))


def test_corpus_is_well_typed(corpus):
    for name in ("monkey_village.p", "lists.p", "inl_inr.p"):
        assert is_well_typed(corpus(name))


def test_equation_between_types():
    errors = check_well_typed(problem(Eq(Fn("z"), Fn("c"))))
    assert errors == ["f0: equation between types nat and w"]


def test_free_variable():
    x = Var("X", NAT)
    assert check_well_typed(problem(Eq(x, Fn("z")))) == ["f0: free variable X"]


def test_variable_kind_must_match_binder():
    x = Var("X", NAT)
    bad = Forall(x, Eq(Var("X", NAT, VarKind.EXISTENTIAL), Fn("z")))
    assert not is_well_typed(problem(bad))
    assert is_well_typed(problem(Forall(x, Eq(x, Fn("z")))))


def test_undeclared_symbol():
    assert check_well_typed(problem(Eq(Fn("q"), Fn("z")))) == ["f0: undeclared function symbol q"]
