"""Size metrics for (optionally clausified) problems."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Iterable, List, Sequence

from polyenc.clausify import clausify
from polyenc.logic import Eq, Fn, Literal, Pred, Problem, Term, literals

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProblemStats:
    clauses: int
    literals_per_clause: float
    symbols_per_atom: float
    symbols: int

    def to_dict(self) -> dict:
        return asdict(self)

    def __str__(self) -> str:
        return (
            f"clauses: {self.clauses}\n"
            f"literals per clause: {self.literals_per_clause:.2f}\n"
            f"symbols per atom: {self.symbols_per_atom:.2f}\n"
            f"symbols: {self.symbols}"
        )


def term_symbols(t: Term) -> int:
    """Symbol occurrences in ``t``, variables included."""
    if isinstance(t, Fn):
        return 1 + sum(term_symbols(a) for a in t.args)
    return 1


def atom_symbols(lit: Literal) -> int:
    # the predicate or the equality sign counts as one symbol
    if isinstance(lit, Pred):
        return 1 + sum(term_symbols(a) for a in lit.args)
    if isinstance(lit, Eq):
        return 1 + term_symbols(lit.lhs) + term_symbols(lit.rhs)
    raise TypeError(f"not a literal: {lit!r}")


def _measure(units: Sequence[List[Literal]]) -> ProblemStats:
    n_units = len(units)
    n_lits = sum(len(u) for u in units)
    n_syms = sum(atom_symbols(lit) for u in units for lit in u)
    return ProblemStats(
        clauses=n_units,
        literals_per_clause=n_lits / n_units if n_units else 0.0,
        symbols_per_atom=n_syms / n_lits if n_lits else 0.0,
        symbols=n_syms,
    )


def problem_stats(problem: Problem, clausified: bool = True) -> ProblemStats:
    """Clause count, literals per clause, symbols per atom and total symbols.

    Without clausification every formula counts as one clause and its
    literals are the atoms it contains.
    """
    if clausified:
        units: Iterable[List[Literal]] = [list(c.literals) for c in clausify(problem)]
    else:
        units = [list(literals(nf.formula)) for nf in problem.formulas]
    stats = _measure(list(units))
    logger.debug("Stats: %s", stats.to_dict())
    return stats
