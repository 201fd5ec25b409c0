"""Counting helpers for encoded problems."""

from typing import Dict, Iterable

from polyenc.logic import GUARD, TAG, Fn, Formula, NamedFormula, Pred, formula_terms, literals


def guards(phi: Formula) -> int:
    return sum(1 for lit in literals(phi) if isinstance(lit, Pred) and lit.sym.startswith(GUARD))


def tags(phi: Formula) -> int:
    return sum(1 for t in formula_terms(phi) if isinstance(t, Fn) and t.sym.startswith(TAG))


def by_source(formulas: Iterable[NamedFormula]) -> Dict[str, Formula]:
    return {nf.source: nf.formula for nf in formulas}
