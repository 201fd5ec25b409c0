import pytest

from polyenc.analysis import InfRegistry, choose_covers, infer_mono_polymorphic
from polyenc.encode import (
    ArgFilter,
    add_type_args,
    all_nonmonotonic,
    ctor_symbols,
    erase,
    guards_feather,
    guards_traditional,
    tags_cover,
    tags_light,
    tags_traditional,
)
from polyenc.errors import LevelMismatch
from polyenc.logic import (
    GUARD,
    IOTA,
    TAG,
    TY_SORT,
    Fn,
    ForallType,
    FunDecl,
    Level,
    Signature,
    TyApp,
    TyVar,
    Var,
    binders,
    formula_terms,
)
from polyenc.typecheck import check_well_typed

from helpers import guards, tags


def arities(sig):
    return {sym: decl.arity for sym, decl in sig.funs.items()}


def test_erase(lists):
    encoded = erase(lists)
    out = encoded.problem
    assert out.level is Level.UNTYPED
    assert encoded.added_axioms == ()
    assert len(out.formulas) == 4
    for nf in out.formulas:
        assert not isinstance(nf.formula, ForallType)
        assert all(v.ty == IOTA for v in binders(nf.formula))
        assert all(not t.ty_args for t in formula_terms(nf.formula) if isinstance(t, Fn))
        assert nf.source == nf.name
    with pytest.raises(LevelMismatch):
        erase(out)


def test_full_type_arguments(lists):
    out = add_type_args(lists, ArgFilter.FULL).problem
    assert arities(out.signature) == {"nil": 1, "cons": 3, "hd": 2, "tl": 2, "list": 1, "w": 0}
    assert out.signature.funs["list"] == FunDecl((), (TY_SORT,), TY_SORT)
    assert check_well_typed(out) == []


def test_filtered_type_arguments(corpus):
    lists = corpus("lists.p")
    assert arities(add_type_args(lists, ArgFilter.PHAN).problem.signature)["nil"] == 0
    assert arities(add_type_args(lists, ArgFilter.NINF).problem.signature)["nil"] == 1
    assert arities(add_type_args(lists, ArgFilter.NINF).problem.signature)["cons"] == 2
    linorder = add_type_args(corpus("linorder.p"), ArgFilter.PHAN).problem
    assert linorder.signature.preds["linorder"].arity == 1
    assert linorder.signature.preds["less_eq"].arity == 2


def test_constructor_symbols_avoid_clashes():
    nat = TyApp("nat")
    sig = Signature(Level.POLYMORPHIC, {"nat": 0, "$i": 0, "list": 1}, {"nat": FunDecl((), (), nat)})
    assert ctor_symbols(sig) == {"nat": "$$ty·nat", "$i": "$$ty·i", "list": "list"}


def test_traditional_tags(lists):
    encoded = tags_traditional(lists)
    assert encoded.added_axioms == ()
    assert TAG in encoded.problem.signature.funs
    assert [tags(nf.formula) for nf in encoded.translations] == [4, 6, 10, 10]
    assert check_well_typed(encoded.problem) == []


def test_traditional_guards(lists):
    encoded = guards_traditional(lists)
    names = [nf.name for nf in encoded.added_axioms]
    assert names == ["ax_guard_fun_nil", "ax_guard_fun_cons", "ax_guard_fun_hd", "ax_guard_fun_tl",
                     "ax_guard_inhabit_inhabit"]
    assert [guards(nf.formula) for nf in encoded.added_axioms] == [1, 3, 2, 2, 1]
    assert [guards(nf.formula) for nf in encoded.translations] == [2, 3, 2, 4]
    # added axioms come first
    assert encoded.problem.formulas[: len(names)] == encoded.added_axioms


def test_monomorphic_guards_need_monomorphic_problem(lists, lists_mono):
    with pytest.raises(LevelMismatch):
        guards_traditional(lists, Level.MONOMORPHIC)
    encoded = guards_traditional(lists_mono, Level.MONOMORPHIC)
    preds = encoded.problem.signature.preds
    assert GUARD + "·w" in preds
    assert GUARD + "·list_w" in preds
    assert GUARD not in preds
    inhabit = [nf.name for nf in encoded.added_axioms if nf.schema == "guard_inhabit"]
    assert inhabit == ["ax_guard_inhabit_w", "ax_guard_inhabit_list_w"]


def test_cover_tags_keep_the_problem_well_typed(lists):
    encoded = tags_cover(lists, choose_covers(lists.signature))
    assert check_well_typed(encoded.problem) == []
    assert [tags(nf.formula) for nf in encoded.translations] == [1, 4, 4, 4]


def test_cover_tags_reach_variables_inside_covered_terms(lists):
    encoded = tags_cover(lists, choose_covers(lists.signature))
    sel = next(nf.formula for nf in encoded.translations if nf.source == "sel")
    conses = [t for t in formula_terms(sel) if isinstance(t, Fn) and t.sym == "cons"]
    assert len(conses) == 2
    for cons in conses:
        head = cons.args[0]
        assert isinstance(head, Fn) and head.sym == TAG
        assert head.ty_args == (TyVar("A"),)
        assert head.args == (Var("X", TyVar("A")),)


def test_all_nonmonotonic_tags_every_term(lists_mono):
    light = tags_light(lists_mono, all_nonmonotonic, (), Level.MONOMORPHIC)
    full = tags_traditional(lists_mono, Level.MONOMORPHIC)
    assert [tags(nf.formula) for nf in light.translations] == [tags(nf.formula) for nf in full.translations]


def test_featherweight_guards_only_guard_naked_variables(lists):
    verdicts = infer_mono_polymorphic(lists, InfRegistry(lists.infinite))
    encoded = guards_feather(lists, verdicts, (TyApp("list", (TyApp("w"),)),))
    assert [guards(nf.formula) for nf in encoded.translations] == [0, 1, 1, 2]
    assert encoded.added_axioms[-1].name == "ax_guard_mono_list·w"
