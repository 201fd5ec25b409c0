"""Well-typedness of problems with respect to their signature."""

from __future__ import annotations

from typing import Dict, List, Optional, Set

from polyenc.errors import TypingError
from polyenc.logic import (
    IOTA,
    And,
    Eq,
    Exists,
    Forall,
    ForallType,
    Formula,
    Level,
    Or,
    Pred,
    Problem,
    Signature,
    Term,
    Type,
    Var,
    type_vars,
)


class _Checker:
    def __init__(self, sig: Signature, where: str) -> None:
        self.sig = sig
        self.where = where
        self.errors: List[str] = []

    def fail(self, msg: str) -> None:
        self.errors.append(f"{self.where}: {msg}")

    def check_type(self, ty: Type, tyvars: Set[str]) -> None:
        if self.sig.level is Level.UNTYPED:
            if ty != IOTA:
                self.fail(f"typed variable of type {ty} in an untyped problem")
            return
        for name in type_vars(ty):
            if name not in tyvars:
                self.fail(f"type variable {name} is not bound")
        for msg in self.sig._check_type(ty, set(type_vars(ty)), self.where):
            self.fail(msg)

    def term(self, t: Term, env: Dict[str, Var], tyvars: Set[str]) -> Optional[Type]:
        if isinstance(t, Var):
            bound = env.get(t.name)
            if bound is None:
                self.fail(f"free variable {t.name}")
                return None
            if bound.ty != t.ty or bound.kind != t.kind:
                self.fail(f"variable {t.name} used with type {t.ty} but bound with type {bound.ty}")
            return t.ty
        decl = self.sig.funs.get(t.sym)
        if decl is None:
            self.fail(f"undeclared function symbol {t.sym}")
            return None
        if len(t.ty_args) != len(decl.tyvars):
            self.fail(f"{t.sym} expects {len(decl.tyvars)} type arguments, got {len(t.ty_args)}")
            return None
        if len(t.args) != decl.arity:
            self.fail(f"{t.sym} expects {decl.arity} arguments, got {len(t.args)}")
            return None
        for ty in t.ty_args:
            self.check_type(ty, tyvars)
        arg_types, result = decl.instantiate(t.ty_args)
        self._args(t.sym, t.args, arg_types, env, tyvars)
        return result

    def _args(self, sym, args, expected, env, tyvars) -> None:
        for i, (a, ty) in enumerate(zip(args, expected)):
            got = self.term(a, env, tyvars)
            if got is not None and self.sig.level is not Level.UNTYPED and got != ty:
                self.fail(f"argument {i + 1} of {sym} has type {got}, expected {ty}")

    def formula(self, phi: Formula, env: Dict[str, Var], tyvars: Set[str], top: bool) -> None:
        if isinstance(phi, ForallType):
            if not top:
                self.fail("type quantifier below the formula prefix")
            self.formula(phi.body, env, tyvars | {phi.tyvar}, top)
        elif isinstance(phi, Pred):
            decl = self.sig.preds.get(phi.sym)
            if decl is None:
                self.fail(f"undeclared predicate symbol {phi.sym}")
                return
            if len(phi.ty_args) != len(decl.tyvars) or len(phi.args) != decl.arity:
                self.fail(f"wrong number of arguments for {phi.sym}")
                return
            for ty in phi.ty_args:
                self.check_type(ty, tyvars)
            self._args(phi.sym, phi.args, decl.instantiate(phi.ty_args), env, tyvars)
        elif isinstance(phi, Eq):
            lt = self.term(phi.lhs, env, tyvars)
            rt = self.term(phi.rhs, env, tyvars)
            if lt is not None and rt is not None and lt != rt:
                self.fail(f"equation between types {lt} and {rt}")
        elif isinstance(phi, (And, Or)):
            for a in phi.args:
                self.formula(a, env, tyvars, False)
        elif isinstance(phi, (Forall, Exists)):
            if phi.var.name in env:
                self.fail(f"variable {phi.var.name} bound twice")
            self.check_type(phi.var.ty, tyvars)
            self.formula(phi.body, {**env, phi.var.name: phi.var}, tyvars, False)
        else:
            self.fail(f"not a formula: {phi!r}")


def check_well_typed(problem: Problem) -> List[str]:
    """Every typing violation in ``problem``; empty when it is well typed."""
    sig = problem.signature
    errors = list(sig.validate())
    for nf in problem.formulas:
        checker = _Checker(sig, nf.name)
        checker.formula(nf.formula, {}, set(), True)
        errors.extend(checker.errors)
    return errors


def ensure_well_typed(problem: Problem) -> None:
    errors = check_well_typed(problem)
    if errors:
        raise TypingError(errors)


def is_well_typed(problem: Problem) -> bool:
    return not check_well_typed(problem)

