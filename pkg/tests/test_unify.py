from polyenc.logic import Fn, TyApp, TyVar, Var
from polyenc.unify import (
    equivalent,
    is_instance,
    match_terms,
    match_type,
    mgi,
    normalize_type_vars,
    unifiable,
    unify_terms,
    unify_types,
)

A, B, C = TyVar("A"), TyVar("B"), TyVar("C")
NAT = TyApp("nat")
W = TyApp("w")


def list_of(ty):
    return TyApp("list", (ty,))


def pair(a, b):
    return TyApp("pair", (a, b))


def test_unify_types():
    rho = unify_types(pair(A, list_of(B)), pair(NAT, C))
    assert rho == {"A": NAT, "C": list_of(B)}
    assert unify_types(list_of(A), NAT) is None
    assert unify_types(A, list_of(A)) is None


def test_unifier_is_fully_resolved():
    rho = unify_types(pair(A, B), pair(B, NAT))
    assert rho["A"] == NAT
    assert rho["B"] == NAT


def test_match_is_one_sided():
    assert match_type(list_of(A), list_of(NAT)) == {"A": NAT}
    assert match_type(list_of(NAT), list_of(A)) is None
    assert match_type(pair(A, A), pair(NAT, W)) is None


def test_mgi_renames_apart():
    assert mgi(pair(A, NAT), pair(W, A)) == pair(W, NAT)
    assert mgi(list_of(A), A) == list_of(A)
    assert mgi(NAT, W) is None


def test_instances():
    assert is_instance(list_of(NAT), list_of(A))
    assert not is_instance(list_of(A), list_of(NAT))
    assert is_instance(W, A)
    assert unifiable(A, list_of(A))
    assert equivalent(list_of(A), list_of(B))
    assert not equivalent(list_of(A), A)


def test_normalize_type_vars():
    assert normalize_type_vars(pair(TyVar("K0"), list_of(TyVar("B0")))) == pair(A, list_of(B))


def test_unify_terms_respects_sorts():
    x = Var("X", NAT)
    y = Var("Y", W)
    assert unify_terms(Fn("f", (), (x,)), Fn("f", (), (Fn("z"),))) == {"X": Fn("z")}
    sort_of = lambda t: t.ty if isinstance(t, Var) else NAT
    assert unify_terms(x, y, sort_of=sort_of) is None
    assert unify_terms(x, Fn("f", (), (x,))) is None
    # type arguments are part of the symbol
    assert unify_terms(Fn("nil", (NAT,)), Fn("nil", (W,))) is None


def test_match_terms():
    x = Var("X")
    target = Fn("f", (), (Fn("a"), Fn("a")))
    assert match_terms(Fn("f", (), (x, x)), target) == {"X": Fn("a")}
    assert match_terms(Fn("f", (), (x, x)), Fn("f", (), (Fn("a"), Fn("b")))) is None
