"""Variable analyses (naked and undercover variables) and the term encoding of types."""

from __future__ import annotations

from typing import FrozenSet, Mapping, Optional, Set

from polyenc.logic import (
    TY_SORT,
    TYVAR_TERM_PREFIX,
    And,
    Eq,
    Exists,
    Fn,
    Formula,
    Or,
    Pred,
    Term,
    TyVar,
    Type,
    Var,
)

CoverAssignment = Mapping[str, FrozenSet[int]]


def naked_vars(phi: Formula) -> FrozenSet[Var]:
    """Variables occurring as a whole side of a positive equation and not bound existentially above it."""
    if isinstance(phi, Eq):
        if not phi.positive:
            return frozenset()
        return frozenset(t for t in (phi.lhs, phi.rhs) if isinstance(t, Var))
    if isinstance(phi, Pred):
        return frozenset()
    if isinstance(phi, (And, Or)):
        out: Set[Var] = set()
        for a in phi.args:
            out |= naked_vars(a)
        return frozenset(out)
    if isinstance(phi, Exists):
        return frozenset(v for v in naked_vars(phi.body) if v.name != phi.var.name)
    return naked_vars(phi.body)


def _covered(sym: str, args, covers: CoverAssignment) -> Set[Var]:
    cover = covers.get(sym)
    if cover is None:
        cover = range(len(args))
    return {args[j] for j in cover if j < len(args) and isinstance(args[j], Var)}


def _uv_terms(terms, covers: CoverAssignment) -> Set[Var]:
    out: Set[Var] = set()
    for t in terms:
        if isinstance(t, Fn):
            out |= _covered(t.sym, t.args, covers)
            out |= _uv_terms(t.args, covers)
    return out


def undercover_vars(phi: Formula, covers: CoverAssignment) -> FrozenSet[Var]:
    """Variables at a cover position of some symbol, or naked in a positive equation."""
    if isinstance(phi, Pred):
        return frozenset(_covered(phi.sym, phi.args, covers) | _uv_terms(phi.args, covers))
    if isinstance(phi, Eq):
        out = _uv_terms((phi.lhs, phi.rhs), covers)
        if phi.positive:
            out |= {t for t in (phi.lhs, phi.rhs) if isinstance(t, Var)}
        return frozenset(out)
    if isinstance(phi, (And, Or)):
        acc: Set[Var] = set()
        for a in phi.args:
            acc |= undercover_vars(a, covers)
        return frozenset(acc)
    if isinstance(phi, Exists):
        return frozenset(v for v in undercover_vars(phi.body, covers) if v.name != phi.var.name)
    return undercover_vars(phi.body, covers)


def covered_args(sym: str, args, covers: CoverAssignment) -> FrozenSet[int]:
    cover = covers.get(sym)
    return frozenset(range(len(args))) if cover is None else frozenset(cover)


def tyvar_term(name: str) -> Var:
    """The reserved universal term variable standing for type variable ``name``."""
    return Var(TYVAR_TERM_PREFIX + name, TY_SORT)


def type_to_term(ty: Type, ctor_symbols: Optional[Mapping[str, str]] = None) -> Term:
    """Encode a type as a term of sort ``$$ty``."""
    if isinstance(ty, TyVar):
        return tyvar_term(ty.name)
    sym = ctor_symbols.get(ty.ctor, ty.ctor) if ctor_symbols else ty.ctor
    return Fn(sym, (), tuple(type_to_term(a, ctor_symbols) for a in ty.args))

