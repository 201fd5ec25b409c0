import pytest

from polyenc.errors import InputError, LevelMismatch, TptpSyntaxError, TypingError, UnsupportedInput
from polyenc.cli import load_problem
from polyenc.encode import erase
from polyenc.logic import MANGLE_SEP, Level, TyApp, TyVar, alpha_equivalent
from polyenc.tptp import TptpLevel, detect_level, parse, parse_type, print_problem

CORPUS = ["monkey_village.p", "lists.p", "lists_mono.p", "qf.p", "unit_card.p", "linorder.p", "inl_inr.p"]


def test_parse_type():
    assert parse_type("list(A)") == TyApp("list", (TyVar("A"),))
    assert parse_type("pair(nat, w)") == TyApp("pair", (TyApp("nat"), TyApp("w")))


def test_detect_level(corpus):
    assert detect_level("fof(a, axiom, p).") is TptpLevel.FOF
    assert detect_level("tff(t, type, nat: $tType).\ntff(a, axiom, $true).") is TptpLevel.TFF0
    assert detect_level("tff(t, type, list: $tType > $tType).") is TptpLevel.TFF1
    assert corpus("monkey_village.p").level is Level.MONOMORPHIC
    assert corpus("lists.p").level is Level.POLYMORPHIC


def test_infinite_annotation(lists, lists_mono):
    assert lists.infinite == (TyApp("list", (TyVar("A"),)),)
    assert lists_mono.infinite == (TyApp("list_w"),)


def test_conjecture_is_negated(monkey, lists):
    assert [nf.role for nf in monkey.formulas] == ["axiom", "axiom", "axiom"]
    assert [nf.name for nf in lists.formulas] == ["nil_cons", "exhaust", "sel", "inj"]
    assert lists.formulas[-1].role == "negated_conjecture"


@pytest.mark.parametrize("name", CORPUS)
def test_typed_round_trip(corpus, name):
    problem = corpus(name)
    level = TptpLevel.TFF0 if problem.is_monomorphic() else TptpLevel.TFF1
    again, _ = parse(print_problem(problem, level), level)
    assert again.signature.funs == problem.signature.funs
    assert again.signature.preds == problem.signature.preds
    assert again.infinite == problem.infinite
    assert [nf.name for nf in again.formulas] == [nf.name for nf in problem.formulas]
    for a, b in zip(again.formulas, problem.formulas):
        assert alpha_equivalent(a.formula, b.formula)


def test_untyped_round_trip(lists):
    erased = erase(lists).problem
    text = print_problem(erased, TptpLevel.FOF)
    assert text.count("fof(") == len(erased.formulas)
    again = load_problem(text)
    assert again.level is Level.UNTYPED
    for a, b in zip(again.formulas, erased.formulas):
        assert alpha_equivalent(a.formula, b.formula)


def test_print_level_checks(lists, monkey):
    with pytest.raises(LevelMismatch):
        print_problem(lists, TptpLevel.FOF)
    with pytest.raises(LevelMismatch):
        print_problem(lists, TptpLevel.TFF0)
    with pytest.raises(LevelMismatch):
        print_problem(erase(monkey).problem, TptpLevel.TFF1)


def test_syntax_error_position():
    with pytest.raises(TptpSyntaxError) as err:
        parse("fof(a, axiom, p).\nfof(b, axiom, q(X)).", TptpLevel.FOF)
    assert err.value.line == 2
    assert "unbound variable X" in str(err.value)


def test_undeclared_type_constructor():
    with pytest.raises(TptpSyntaxError):
        parse("tff(c_decl, type, c: foo).", TptpLevel.TFF0)


def test_reserved_names_rejected():
    with pytest.raises(InputError):
        parse("fof(a, axiom, $$guard(c)).", TptpLevel.FOF)
    problem, _ = parse("fof(a, axiom, $$guard(c)).", TptpLevel.FOF, allow_reserved=True)
    assert "$$guard" in problem.signature.preds


@pytest.mark.parametrize(
    "text, construct",
    [
        ("tff(a, axiom, $less(1, 2)).", "arithmetic"),
        ("cnf(a, axiom, p).", "cnf"),
        ("thf(a, axiom, p).", "higher-order formula"),
        ("fof(a, axiom, p(\"x\")).", "distinct object"),
    ],
)
def test_unsupported_constructs(text, construct):
    with pytest.raises(UnsupportedInput) as err:
        parse(text)
    assert err.value.construct == construct


def test_typed_formula_in_untyped_problem():
    with pytest.raises(LevelMismatch):
        parse("tff(a, axiom, p).", TptpLevel.FOF)


def test_polymorphic_declaration_in_monomorphic_problem():
    with pytest.raises(LevelMismatch):
        parse("tff(id_decl, type, id: !>[A: $tType]: A > A).", TptpLevel.TFF0)


def test_ill_typed_problem_is_rejected_on_load():
    text = """
    tff(a_type, type, a: $tType).
    tff(b_type, type, b: $tType).
    tff(c_decl, type, c: a).
    tff(p_decl, type, p: b > $o).
    tff(ax, axiom, p(c)).
    """
    with pytest.raises(TypingError) as err:
        load_problem(text)
    assert "argument 1 of p" in str(err.value)


def test_include(tmp_path):
    (tmp_path / "decls.ax").write_text("tff(nat_type, type, nat: $tType).\ntff(z_decl, type, z: nat).\n")
    main = tmp_path / "main.p"
    main.write_text("include('decls.ax').\ntff(ax, axiom, ![X: nat]: X = z).\n")
    problem = load_problem(main.read_text(), include_dir=tmp_path)
    assert "z" in problem.signature.funs
    assert [nf.name for nf in problem.formulas] == ["ax"]


def test_syntax_error_column():
    with pytest.raises(TptpSyntaxError) as err:
        parse("fof(a, axiom, p & ).", TptpLevel.FOF)
    assert (err.value.line, err.value.column) == (1, 19)


def test_unexpected_end_of_input():
    with pytest.raises(TptpSyntaxError) as err:
        parse("fof(a, axiom, p(", TptpLevel.FOF)
    assert "end of input" in str(err.value)


def test_mixed_connectives_need_parentheses():
    with pytest.raises(TptpSyntaxError):
        parse("fof(a, axiom, p | q & r).", TptpLevel.FOF)
    problem, _ = parse("fof(a, axiom, p | (q & r)).", TptpLevel.FOF)
    assert len(problem.formulas) == 1


def test_comments_and_annotations_are_skipped():
    text = """
    % a line comment
    /* a block
       comment */
    fof(a, axiom, p(c), file('a.p', a), [status(thm), inference(r, [], [b])]).
    fof('quoted name', axiom, ~ p(d)).
    """
    problem, _ = parse(text, TptpLevel.FOF)
    assert [nf.name for nf in problem.formulas] == ["a", "quoted name"]


def test_higher_order_body_is_rejected_before_parsing_it():
    with pytest.raises(UnsupportedInput) as err:
        parse("thf(a, axiom, ^[X: $i]: (p @ X)).")
    assert err.value.construct == "higher-order formula"


def test_include_selection_is_unsupported(tmp_path):
    with pytest.raises(UnsupportedInput):
        parse("include('decls.ax', [a, b]).", TptpLevel.FOF, include_dir=tmp_path)


def test_double_underscore_names_round_trip():
    problem, _ = parse("fof(a, axiom, ('p__q'(c) & r__s(c))).", TptpLevel.FOF)
    assert set(problem.signature.preds) == {"p__q", "r" + MANGLE_SEP + "s"}
    text = print_problem(problem, TptpLevel.FOF)
    assert "'p__q'(c)" in text
    assert "r__s(c)" in text
    again, _ = parse(text, TptpLevel.FOF)
    assert again.signature.preds == problem.signature.preds
    assert alpha_equivalent(again.formulas[0].formula, problem.formulas[0].formula)
