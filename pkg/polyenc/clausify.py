"""Skolemization and conjunctive normal form."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, replace
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from polyenc.errors import LevelMismatch
from polyenc.logic import (
    SKOLEM_PREFIX,
    And,
    Eq,
    Fn,
    Forall,
    ForallType,
    Formula,
    FunDecl,
    Level,
    Literal,
    Or,
    Pred,
    Problem,
    Signature,
    Term,
    Type,
    Var,
    formula_type_vars,
    free_vars,
    literal_terms,
    negate_literal,
    rename_term_vars,
    term_vars,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Clause:
    """A disjunction of literals; every variable is implicitly universal."""

    literals: Tuple[Literal, ...] = ()
    source: Optional[str] = None

    def __len__(self) -> int:
        return len(self.literals)

    def __iter__(self) -> Iterator[Literal]:
        return iter(self.literals)

    @property
    def is_empty(self) -> bool:
        return not self.literals

    def variables(self) -> List[Var]:
        seen: Dict[str, Var] = {}
        for lit in self.literals:
            for t in literal_terms(lit):
                for v in term_vars(t):
                    seen.setdefault(v.name, v)
        return list(seen.values())

    def is_tautology(self) -> bool:
        for lit in self.literals:
            if isinstance(lit, Eq) and lit.positive and lit.lhs == lit.rhs:
                return True
            if negate_literal(lit) in self.literals:
                return True
        return False

    def __str__(self) -> str:
        if not self.literals:
            return "$false"
        return " | ".join(str(lit) for lit in self.literals)


@dataclass(frozen=True)
class CNF:
    """Clauses plus the signature extended with the Skolem symbols."""

    clauses: Tuple[Clause, ...]
    signature: Signature

    def __len__(self) -> int:
        return len(self.clauses)

    def __iter__(self) -> Iterator[Clause]:
        return iter(self.clauses)

    def __getitem__(self, index: int) -> Clause:
        return self.clauses[index]


def is_clausifiable(problem: Problem) -> bool:
    return all(not formula_type_vars(nf.formula) for nf in problem.formulas)


class _Skolemizer:
    def __init__(self, sig: Signature) -> None:
        self.sig = sig
        self.counter = itertools.count(1)

    def fresh(self, universals: Sequence[Var], result: Type) -> Fn:
        while True:
            name = f"{SKOLEM_PREFIX}{next(self.counter)}"
            if name not in self.sig.funs:
                break
        self.sig = self.sig.add_fun(name, FunDecl((), tuple(v.ty for v in universals), result))
        return Fn(name, (), tuple(universals))

    def run(self, phi: Formula, universals: Tuple[Var, ...], env: Dict[str, Term]) -> Formula:
        if isinstance(phi, (Pred, Eq)):
            if isinstance(phi, Pred):
                return replace(phi, args=tuple(rename_term_vars(a, env) for a in phi.args))
            return replace(phi, lhs=rename_term_vars(phi.lhs, env), rhs=rename_term_vars(phi.rhs, env))
        if isinstance(phi, And):
            return And(tuple(self.run(a, universals, env) for a in phi.args))
        if isinstance(phi, Or):
            return Or(tuple(self.run(a, universals, env) for a in phi.args))
        if isinstance(phi, ForallType):
            return self.run(phi.body, universals, env)
        if isinstance(phi, Forall):
            env = {k: v for k, v in env.items() if k != phi.var.name}
            return self.run(phi.body, universals + (phi.var,), env)
        # Only universals free in the body parameterize the Skolem term.
        free = free_vars(phi)
        visible = tuple(v for v in universals if v.name in free)
        sk = self.fresh(visible, phi.var.ty)
        return self.run(phi.body, universals, {**env, phi.var.name: sk})


def _cnf(phi: Formula) -> List[List[Literal]]:
    if isinstance(phi, (Pred, Eq)):
        return [[phi]]
    if isinstance(phi, And):
        out: List[List[Literal]] = []
        for a in phi.args:
            out.extend(_cnf(a))
        return out
    if isinstance(phi, Or):
        result: List[List[Literal]] = [[]]
        for a in phi.args:
            part = _cnf(a)
            result = [left + right for left in result for right in part]
        return result
    raise LevelMismatch(f"quantifier left after Skolemization: {type(phi).__name__}")


def normalize_clause(literals: Sequence[Literal], source: Optional[str] = None) -> Clause:
    """Drop duplicate literals and rename variables to X0, X1, ... in order of occurrence."""
    unique: List[Literal] = []
    for lit in literals:
        if lit not in unique:
            unique.append(lit)
    mapping: Dict[str, Var] = {}
    for lit in unique:
        for t in literal_terms(lit):
            for v in term_vars(t):
                if v.name not in mapping:
                    mapping[v.name] = Var(f"X{len(mapping)}", v.ty)
    renamed = []
    for lit in unique:
        if isinstance(lit, Pred):
            renamed.append(replace(lit, args=tuple(rename_term_vars(a, mapping) for a in lit.args)))
        else:
            renamed.append(replace(lit, lhs=rename_term_vars(lit.lhs, mapping), rhs=rename_term_vars(lit.rhs, mapping)))
    return Clause(tuple(renamed), source)


def _strip_binders(phi: Formula) -> Formula:
    if isinstance(phi, Forall):
        return _strip_binders(phi.body)
    if isinstance(phi, And):
        return And(tuple(_strip_binders(a) for a in phi.args))
    if isinstance(phi, Or):
        return Or(tuple(_strip_binders(a) for a in phi.args))
    return phi


def clausify(problem: Problem) -> CNF:
    """Skolemize every sentence and distribute it into clauses."""
    if problem.level is not Level.UNTYPED and not is_clausifiable(problem):
        raise LevelMismatch("clausification needs an untyped or ground-typed problem")
    skolem = _Skolemizer(problem.signature)
    clauses: List[Clause] = []
    for nf in problem.formulas:
        body = _strip_binders(skolem.run(nf.formula, (), {}))
        for lits in _cnf(body):
            clause = normalize_clause(lits, nf.name)
            if not clause.is_tautology():
                clauses.append(clause)
    logger.debug("Clausified %d formulas into %d clauses", len(problem.formulas), len(clauses))
    return CNF(tuple(clauses), skolem.sig)
