import pytest

from polyenc import config
from polyenc.cli import load_problem
from polyenc.errors import InputError
from polyenc.logic import Level
from polyenc.oracle import (
    Budget,
    Expectation,
    Status,
    Verdict,
    check_status,
    check_with_prover,
    oracle_problem,
    run_prover,
    status_of_szs,
    szs_status,
)
from polyenc.pipeline import SchemeId, encode_problem, run_pipeline

BUDGET = Budget(step_limit=2000, time_limit=20)


def _erased(problem):
    return run_pipeline(problem, SchemeId.parse("e")).problem


def test_expectation_parsing(monkeypatch):
    monkeypatch.setattr(config, "MODEL_BOUND", 4)
    assert Expectation.parse("unsat") == Expectation(Status.UNSAT)
    assert Expectation.parse("sat:3") == Expectation(Status.SAT, 3)
    assert Expectation.parse("SAT") == Expectation(Status.SAT, 4)
    assert str(Expectation.parse("sat:2")) == "sat:2"


@pytest.mark.parametrize("text", ["sat:0", "sat:x", "maybe", "unsat:3", ""])
def test_bad_expectations(text):
    with pytest.raises(InputError):
        Expectation.parse(text)


def test_szs_status():
    assert szs_status("% SZS status Theorem for lists\n") == "Theorem"
    assert szs_status("nothing here") is None
    assert status_of_szs("Unsatisfiable") is Status.UNSAT
    assert status_of_szs("CounterSatisfiable") is Status.SAT
    assert status_of_szs("Timeout") is None
    assert status_of_szs(None) is None


SOME_Q = """
tff(q_decl, type, q: !>[A: $tType]: A > $o).
tff(some_q, axiom, ![A: $tType]: ?[X: A]: q(A, X)).
"""


def test_polymorphic_problems_are_encoded_for_the_oracle(corpus, lists):
    target = oracle_problem(lists)
    assert target is not lists
    assert target.level is Level.UNTYPED
    qf = corpus("qf.p")
    assert oracle_problem(qf) is qf
    monkey = corpus("monkey_village.p")
    assert oracle_problem(monkey) is monkey


def test_satisfiable_problem_passes(corpus):
    result = check_status(corpus("qf.p"), Expectation.parse("sat:2"), BUDGET)
    assert result.verdict is Verdict.PASS
    assert not result.encoded_for_oracle
    assert "model" in result.to_dict()


def test_satisfiable_polymorphic_problem_passes():
    result = check_status(load_problem(SOME_Q), Expectation.parse("sat:2"), BUDGET)
    assert result.verdict is Verdict.PASS
    assert result.encoded_for_oracle
    assert result.to_dict()["encoded_for_oracle"] is True


def test_erased_qf_is_unsound(corpus):
    result = check_status(_erased(corpus("qf.p")), Expectation.parse("sat:2"), BUDGET)
    assert result.verdict is Verdict.FAIL
    assert result.to_dict()["refutation"]["outcome"] == "refutation-found"


def test_erased_unit_card_is_refuted(corpus):
    result = check_status(_erased(corpus("unit_card.p")), Expectation.parse("unsat"), BUDGET)
    assert result.verdict is Verdict.PASS


def test_unsat_claim_against_satisfiable_problem(corpus):
    result = check_status(corpus("unit_card.p"), Expectation.parse("unsat"), Budget(step_limit=300, time_limit=20, model_bound=3))
    assert result.verdict is Verdict.FAIL
    assert result.model is not None


def test_monkey_needs_bound_three(monkey):
    assert check_status(monkey, Expectation.parse("sat:3"), BUDGET).verdict is Verdict.PASS
    assert check_status(monkey, Expectation.parse("sat:2"), Budget(step_limit=200, time_limit=20)).verdict is not Verdict.PASS


def test_feather_guards_keep_monkey_satisfiable(monkey):
    encoded = encode_problem(monkey, SchemeId.parse("g_qq")).encoded.problem
    result = check_status(encoded, Expectation.parse("sat:4"), BUDGET)
    assert result.verdict is Verdict.PASS
    assert result.model.size <= 4


@pytest.mark.parametrize("scheme", ["g", "g_at", "t_qq", "g_qq"])
def test_sound_encodings_of_lists_are_refuted(lists, scheme):
    encoded = encode_problem(lists, SchemeId.parse(scheme)).encoded.problem
    result = check_status(encoded, Expectation.parse("unsat"), Budget(model_bound=2))
    assert result.verdict is Verdict.PASS
    assert result.to_dict()["refutation"]["outcome"] == "refutation-found"


def test_run_prover_without_command(monkeypatch):
    monkeypatch.setattr(config, "PROVER", "")
    assert run_prover("fof(a, axiom, p).") is None


def test_run_prover_reads_szs_status():
    assert run_prover("fof(a, axiom, p).", "echo '% SZS status Unsatisfiable'") == "Unsatisfiable"


def test_check_with_prover(corpus):
    erased = _erased(corpus("unit_card.p"))
    result = check_with_prover(erased, Expectation.parse("unsat"), "echo 'SZS status Unsatisfiable'")
    assert result.verdict is Verdict.PASS
    assert result.prover_status == "Unsatisfiable"
    result = check_with_prover(erased, Expectation.parse("sat:2"), "echo 'SZS status Unsatisfiable'")
    assert result.verdict is Verdict.FAIL


def test_check_with_prover_needs_untyped_input(monkey):
    with pytest.raises(InputError):
        check_with_prover(monkey, Expectation.parse("unsat"), "true")
