"""Heuristic monomorphisation.

The polymorphic formulas are instantiated by matching the symbols that occur
in the monomorphic formulas (the mono-symbols) against their polymorphic
occurrences, for at most ``K`` rounds and ``Delta`` new formulas. The kept
ground instances are then mangled into a monomorphic signature.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Set, Tuple

from polyenc import config
from polyenc.errors import InternalError, LevelMismatch
from polyenc.logic import (
    MANGLE_SEP,
    And,
    Eq,
    Fn,
    ForallType,
    Formula,
    FunDecl,
    Level,
    NamedFormula,
    Or,
    Pred,
    PredDecl,
    Problem,
    Signature,
    Term,
    TyApp,
    TyVar,
    Type,
    Var,
    apply_type_subst,
    formula_type_vars,
    is_ground,
    literal_terms,
    literals,
    subterms,
    types_in_formula,
)
from polyenc.unify import is_instance, match_type

logger = logging.getLogger(__name__)

Occurrence = Tuple[str, Tuple[Type, ...]]
Subst = FrozenSet[Tuple[str, Type]]


@dataclass(frozen=True)
class MonoConfig:
    K: int = config.MONO_ITERATIONS
    Delta: int = config.MONO_BUDGET


@dataclass(frozen=True)
class MonoResult:
    problem: Problem
    dropped: Tuple[str, ...] = ()
    rounds: int = 0
    added: int = 0
    # Nullary constructor produced by mangling -> the ground type it stands for.
    type_origin: Mapping[str, Type] = field(default_factory=dict)


def mangle_type(ty: Type) -> str:
    if isinstance(ty, TyVar):
        return ty.name
    return MANGLE_SEP.join([ty.ctor] + [mangle_type(a) for a in ty.args])


def mangle_symbol(sym: str, ty_args: Iterable[Type]) -> str:
    return MANGLE_SEP.join([sym] + [mangle_type(a) for a in ty_args])


def occurrences(phi: Formula) -> List[Occurrence]:
    """Symbol applications with type arguments, in order of first occurrence."""
    seen: Dict[Occurrence, None] = {}
    for lit in literals(phi):
        if isinstance(lit, Pred) and lit.ty_args:
            seen.setdefault((lit.sym, lit.ty_args), None)
        for t in literal_terms(lit):
            for s in subterms(t):
                if isinstance(s, Fn) and s.ty_args:
                    seen.setdefault((s.sym, s.ty_args), None)
    return list(seen)


def _strip_prefix(phi: Formula) -> Formula:
    while isinstance(phi, ForallType):
        phi = phi.body
    return phi


def _freeze(rho: Mapping[str, Type]) -> Subst:
    return frozenset(rho.items())


def _subst_label(tyvars: Iterable[str], rho: Mapping[str, Type]) -> str:
    return MANGLE_SEP.join(mangle_type(rho[a]) for a in tyvars)


class _AxiomInstances:
    """The refined substitution set of one polymorphic formula."""

    def __init__(self, nf: NamedFormula, cap: int) -> None:
        self.nf = nf
        self.body = _strip_prefix(nf.formula)
        self.tyvars = tuple(sorted(formula_type_vars(nf.formula)))
        self.occurrences = occurrences(self.body)
        constrained = {a for _, args in self.occurrences for ty in args for a in _tyvar_names(ty)}
        self.unconstrained = tuple(a for a in self.tyvars if a not in constrained)
        self.substs: Dict[Subst, None] = {frozenset(): None}
        self.cap = cap
        self.truncated = False

    def complete(self, rho: Subst) -> bool:
        bound = {a for a, _ in rho}
        return all(a in bound for a in self.tyvars if a not in self.unconstrained)

    def refine(self, pool: Mapping[str, List[Tuple[Type, ...]]]) -> bool:
        """Match pool symbols against occurrences until the set is stable."""
        grew = False
        frontier = list(self.substs)
        while frontier:
            nxt: List[Subst] = []
            for rho in frontier:
                base = dict(rho)
                for sym, args in self.occurrences:
                    for ground in pool.get(sym, ()):
                        ext: Optional[Dict[str, Type]] = dict(base)
                        for p, g in zip(args, ground):
                            ext = match_type(p, g, ext)
                            if ext is None:
                                break
                        if ext is None:
                            continue
                        key = _freeze(ext)
                        if key in self.substs:
                            continue
                        # the empty seed substitution is not counted
                        if len(self.substs) > self.cap:
                            self.truncated = True
                            return grew
                        self.substs[key] = None
                        nxt.append(key)
                        grew = True
            frontier = nxt
        return grew

    def ground_substs(self, ground_types: List[Type]) -> List[Dict[str, Type]]:
        out: List[Dict[str, Type]] = []
        for rho in self.substs:
            if not self.complete(rho):
                continue
            base = dict(rho)
            missing = [a for a in self.unconstrained if a not in base]
            fillers = itertools.product(ground_types, repeat=len(missing)) if missing else [()]
            for choice in fillers:
                full = {**base, **dict(zip(missing, choice))}
                if all(is_ground(full[a]) for a in self.tyvars) and full not in out:
                    out.append(full)
        return out

    def instance(self, rho: Mapping[str, Type]) -> NamedFormula:
        phi = apply_type_subst(self.body, rho)
        name = self.nf.name + MANGLE_SEP + _subst_label(self.tyvars, rho)
        return NamedFormula(name, phi, self.nf.role, self.nf.source or self.nf.name, self.nf.schema)


def _tyvar_names(ty: Type) -> Set[str]:
    if isinstance(ty, TyVar):
        return {ty.name}
    out: Set[str] = set()
    for a in ty.args:
        out |= _tyvar_names(a)
    return out


def _ground_types_of(formulas: Iterable[NamedFormula]) -> List[Type]:
    seen: Dict[Type, None] = {}
    for nf in formulas:
        for ty in types_in_formula(nf.formula):
            if is_ground(ty):
                seen.setdefault(ty, None)
    return list(seen)


def _pool_of(formulas: Iterable[NamedFormula]) -> Dict[str, List[Tuple[Type, ...]]]:
    pool: Dict[str, List[Tuple[Type, ...]]] = {}
    for nf in formulas:
        for sym, args in occurrences(nf.formula):
            if all(is_ground(a) for a in args) and args not in pool.setdefault(sym, []):
                pool[sym].append(args)
    return pool


def _round_robin(per_axiom: List[List[NamedFormula]], budget: int) -> List[NamedFormula]:
    kept: List[NamedFormula] = []
    for batch in itertools.zip_longest(*per_axiom):
        for nf in batch:
            if nf is None:
                continue
            if len(kept) >= budget:
                return kept
            kept.append(nf)
    return kept


def instantiate(problem: Problem, cfg: Optional[MonoConfig] = None) -> Tuple[List[NamedFormula], List[str], int, int]:
    """Ground instances of the problem's formulas, before mangling."""
    cfg = cfg or MonoConfig()
    mono = [nf for nf in problem.formulas if not formula_type_vars(nf.formula)]
    poly = [nf for nf in problem.formulas if formula_type_vars(nf.formula)]
    logger.info("Monomorphising: %d monomorphic and %d polymorphic formulas", len(mono), len(poly))
    axioms = [_AxiomInstances(nf, max(cfg.Delta, 1)) for nf in poly]
    pool = _pool_of(mono)
    ground_types = _ground_types_of(mono)

    rounds = 0
    while axioms and rounds < cfg.K:
        rounds += 1
        for ax in axioms:
            ax.refine(pool)
        instances = [ax.instance(rho) for ax in axioms for rho in ax.ground_substs(ground_types)]
        fresh = 0
        for sym, args in (o for nf in instances for o in occurrences(nf.formula)):
            if args not in pool.setdefault(sym, []):
                pool[sym].append(args)
                fresh += 1
        for ty in _ground_types_of(instances):
            if ty not in ground_types:
                ground_types.append(ty)
        logger.debug("Round %d: %d new mono-symbols", rounds, fresh)
        if not fresh:
            break

    per_axiom = [[ax.instance(rho) for rho in ax.ground_substs(ground_types)] for ax in axioms]
    total = sum(len(b) for b in per_axiom)
    kept = _round_robin(per_axiom, cfg.Delta)
    if total > len(kept) or any(ax.truncated for ax in axioms):
        logger.warning("Monomorphisation budget reached: kept %d of %d instances", len(kept), total)
    kept_sources = {nf.source for nf in kept}
    dropped = [nf.name for nf in poly if (nf.source or nf.name) not in kept_sources]
    for name in dropped:
        logger.warning("Formula %s has no monomorphic instance and was dropped", name)
    kept_ids = {id(nf) for nf in kept}
    ordered = mono + [nf for batch in per_axiom for nf in batch if id(nf) in kept_ids]
    return ordered, dropped, rounds, len(kept)


class _Mangler:
    def __init__(self, sig: Signature) -> None:
        self.sig = sig
        self.type_origin: Dict[str, Type] = {}
        self.funs: Dict[str, FunDecl] = {}
        self.preds: Dict[str, PredDecl] = {}

    def type(self, ty: Type) -> TyApp:
        if not is_ground(ty):
            raise InternalError(f"type variable left in {ty} after instantiation")
        name = mangle_type(ty)
        self.type_origin.setdefault(name, ty)
        return TyApp(name)

    def term(self, t: Term) -> Term:
        if isinstance(t, Var):
            return Var(t.name, self.type(t.ty), t.kind)
        name = self._fun(t.sym, t.ty_args)
        return Fn(name, (), tuple(self.term(a) for a in t.args))

    def _fun(self, sym: str, ty_args: Tuple[Type, ...]) -> str:
        name = mangle_symbol(sym, ty_args)
        if name not in self.funs:
            args, result = self.sig.funs[sym].instantiate(ty_args)
            self.funs[name] = FunDecl((), tuple(self.type(a) for a in args), self.type(result))
        return name

    def _pred(self, sym: str, ty_args: Tuple[Type, ...]) -> str:
        name = mangle_symbol(sym, ty_args)
        if name not in self.preds:
            args = self.sig.preds[sym].instantiate(ty_args)
            self.preds[name] = PredDecl((), tuple(self.type(a) for a in args))
        return name

    def formula(self, phi: Formula) -> Formula:
        if isinstance(phi, Pred):
            return Pred(self._pred(phi.sym, phi.ty_args), (), tuple(self.term(a) for a in phi.args), phi.positive)
        if isinstance(phi, Eq):
            return Eq(self.term(phi.lhs), self.term(phi.rhs), phi.positive)
        if isinstance(phi, And):
            return And(tuple(self.formula(a) for a in phi.args))
        if isinstance(phi, Or):
            return Or(tuple(self.formula(a) for a in phi.args))
        if isinstance(phi, ForallType):
            raise InternalError("type quantifier left after instantiation")
        return type(phi)(Var(phi.var.name, self.type(phi.var.ty), phi.var.kind), self.formula(phi.body))

    def signature(self) -> Signature:
        for sym, decl in self.sig.funs.items():
            if not decl.tyvars:
                self._fun(sym, ())
        for sym, decl in self.sig.preds.items():
            if not decl.tyvars:
                self._pred(sym, ())
        for ctor, arity in self.sig.type_ctors.items():
            if arity == 0:
                self.type(TyApp(ctor))
        ctors = {name: 0 for name in self.type_origin}
        return Signature(Level.MONOMORPHIC, ctors, dict(self.funs), dict(self.preds))


def mangle(problem: Problem) -> Tuple[Problem, Dict[str, Type]]:
    """Map every ground symbol instance and ground type to a fresh monomorphic name."""
    mangler = _Mangler(problem.signature)
    formulas = [NamedFormula(nf.name, mangler.formula(nf.formula), nf.role, nf.source, nf.schema) for nf in problem.formulas]
    sig = mangler.signature()
    infinite = tuple(
        TyApp(name) for name, ty in mangler.type_origin.items() if any(is_instance(ty, inf) for inf in problem.infinite)
    )
    return Problem(sig, tuple(formulas), infinite), dict(mangler.type_origin)


def monomorphise(problem: Problem, cfg: Optional[MonoConfig] = None) -> MonoResult:
    cfg = cfg or MonoConfig()
    if problem.level is Level.UNTYPED:
        raise LevelMismatch("cannot monomorphise an untyped problem")
    formulas, dropped, rounds, added = instantiate(problem, cfg)
    mono, type_origin = mangle(problem.with_formulas(formulas))
    logger.info(
        "Monomorphised into %d formulas (%d new, %d dropped) after %d rounds",
        len(mono.formulas), added, len(dropped), rounds,
    )
    return MonoResult(mono, tuple(dropped), rounds, added, type_origin)
