"""Surface connectives and their normalisation into NNF with a type-quantifier prefix."""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Dict, List, Set, Tuple, Union

from polyenc.errors import UnsupportedInput
from polyenc.logic import (
    And,
    Eq,
    Exists,
    Fn,
    Forall,
    ForallType,
    Formula,
    Or,
    Pred,
    Term,
    TyVar,
    Type,
    Var,
    VarKind,
    conj,
    disj,
    forall_types,
    subst_type,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Not:
    body: "Surface"


@dataclass(frozen=True)
class Implies:
    lhs: "Surface"
    rhs: "Surface"


@dataclass(frozen=True)
class Iff:
    lhs: "Surface"
    rhs: "Surface"


@dataclass(frozen=True)
class ExistsType:
    tyvar: str
    body: "Surface"


Surface = Union[Formula, Not, Implies, Iff, ExistsType]


class _Normalizer:
    def __init__(self) -> None:
        self.used_vars: Set[str] = set()
        self.used_tyvars: Set[str] = set()

    def _fresh(self, name: str, used: Set[str]) -> str:
        if name not in used:
            used.add(name)
            return name
        i = 1
        while f"{name}_{i}" in used:
            i += 1
        fresh = f"{name}_{i}"
        used.add(fresh)
        return fresh

    def term(self, t: Term, env: Dict[str, Var], tenv: Dict[str, Type]) -> Term:
        if isinstance(t, Var):
            bound = env.get(t.name)
            if bound is not None:
                return bound
            return replace(t, ty=subst_type(t.ty, tenv))
        return Fn(
            t.sym,
            tuple(subst_type(a, tenv) for a in t.ty_args),
            tuple(self.term(a, env, tenv) for a in t.args),
        )

    def run(
        self, phi: Surface, positive: bool, env: Dict[str, Var], tenv: Dict[str, Type]
    ) -> Tuple[List[str], Formula]:
        if isinstance(phi, Pred):
            lit = replace(
                phi,
                ty_args=tuple(subst_type(a, tenv) for a in phi.ty_args),
                args=tuple(self.term(a, env, tenv) for a in phi.args),
                positive=phi.positive == positive,
            )
            return [], lit
        if isinstance(phi, Eq):
            lit = Eq(self.term(phi.lhs, env, tenv), self.term(phi.rhs, env, tenv), phi.positive == positive)
            return [], lit
        if isinstance(phi, Not):
            return self.run(phi.body, not positive, env, tenv)
        if isinstance(phi, Implies):
            return self._junction([Not(phi.lhs), phi.rhs], disjunctive=True, positive=positive, env=env, tenv=tenv)
        if isinstance(phi, Iff):
            # The second copy of each side is renamed apart by the fresh-name bookkeeping.
            left = Implies(phi.lhs, phi.rhs)
            right = Implies(phi.rhs, phi.lhs)
            return self._junction([left, right], disjunctive=False, positive=positive, env=env, tenv=tenv)
        if isinstance(phi, And):
            return self._junction(list(phi.args), disjunctive=False, positive=positive, env=env, tenv=tenv)
        if isinstance(phi, Or):
            return self._junction(list(phi.args), disjunctive=True, positive=positive, env=env, tenv=tenv)
        if isinstance(phi, (Forall, Exists)):
            universal = isinstance(phi, Forall) == positive
            name = self._fresh(phi.var.name, self.used_vars)
            kind = VarKind.UNIVERSAL if universal else VarKind.EXISTENTIAL
            var = Var(name, subst_type(phi.var.ty, tenv), kind)
            tyvars, body = self.run(phi.body, positive, {**env, phi.var.name: var}, tenv)
            if tyvars and not universal:
                raise UnsupportedInput("type quantifier below an existential quantifier")
            return tyvars, (Forall(var, body) if universal else Exists(var, body))
        if isinstance(phi, (ForallType, ExistsType)):
            if isinstance(phi, ForallType) != positive:
                raise UnsupportedInput("existential type quantifier")
            name = self._fresh(phi.tyvar, self.used_tyvars)
            tyvars, body = self.run(phi.body, positive, env, {**tenv, phi.tyvar: TyVar(name)})
            return [name] + tyvars, body
        raise TypeError(f"not a formula: {phi!r}")

    def _junction(self, parts, disjunctive: bool, positive: bool, env, tenv) -> Tuple[List[str], Formula]:
        tyvars: List[str] = []
        out: List[Formula] = []
        for p in parts:
            tv, f = self.run(p, positive, env, tenv)
            tyvars.extend(tv)
            out.append(f)
        if disjunctive == positive:
            return tyvars, disj(*out) if out else Or(())
        return tyvars, conj(*out) if out else And(())


def normalize(phi: Surface) -> Formula:
    """Negation normal form with all type quantifiers hoisted to the front.

    Variable kinds are taken from the binder after polarity is pushed through,
    and a name already bound elsewhere in the formula is given a suffix.
    """
    norm = _Normalizer()
    tyvars, body = norm.run(phi, True, {}, {})
    return forall_types(tyvars, body)
