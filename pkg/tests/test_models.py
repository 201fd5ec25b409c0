import pytest

from polyenc.errors import LevelMismatch
from polyenc.logic import TyApp
from polyenc.models import FiniteModel, evaluate, find_model
from polyenc.pipeline import SchemeId, run_pipeline

UNIT = TyApp("unit")
THING = TyApp("thing")


def _unit_card_model(c2: int) -> FiniteModel:
    return FiniteModel(
        {UNIT: (0,), THING: (0, 1)},
        {("unity", ()): {(): 0}, ("c1", ()): {(): 0}, ("c2", ()): {(): c2}},
    )


def test_hand_built_model(corpus):
    problem = corpus("unit_card.p")
    assert _unit_card_model(1).satisfies(problem)
    assert not _unit_card_model(0).satisfies(problem)
    distinct = next(nf for nf in problem.formulas if nf.name == "distinct")
    assert evaluate(_unit_card_model(1), distinct.formula)


def test_monkey_needs_three_elements(monkey):
    assert find_model(monkey, 2) is None
    model = find_model(monkey, 3)
    assert model is not None
    assert model.size == 3
    assert model.to_dict()["domains"] == {"monkey": 1, "banana": 2}
    assert model.satisfies(monkey)


def test_erased_monkey_has_no_small_model(monkey):
    erased = run_pipeline(monkey, SchemeId.parse("e")).problem
    assert find_model(erased, 4) is None


def test_unit_card(corpus):
    problem = corpus("unit_card.p")
    model = find_model(problem, 3)
    assert model is not None
    assert model.to_dict()["domains"] == {"unit": 1, "thing": 2}
    erased = run_pipeline(problem, SchemeId.parse("e")).problem
    assert find_model(erased, 3) is None


def test_polymorphic_problem_is_rejected(lists):
    with pytest.raises(LevelMismatch):
        find_model(lists, 2)


def test_to_dict_lists_tables():
    data = _unit_card_model(1).to_dict()
    assert data["functions"]["c2"] == {"": 1}
    assert data["predicates"] == {}
