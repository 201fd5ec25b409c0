"""Core syntax: types, terms, NNF formulas, signatures and problems.

Everything here is immutable. Formulas are in negation normal form: negation
lives only on literals (the ``positive`` flag), and type quantifiers appear
only as a prefix of the whole formula.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Set, Tuple, Union

# Reserved names. "·" separates mangled components and prints as "__".
MANGLE_SEP = "·"
RESERVED_PREFIX = "$$"
TYVAR_TERM_PREFIX = "A" + MANGLE_SEP
TAG = "$$tag"
GUARD = "$$guard"
SKOLEM_PREFIX = "$$sk"
TY_SORT_NAME = "$$ty"
IOTA_NAME = "$i"


class Level(str, Enum):
    POLYMORPHIC = "polymorphic"
    MONOMORPHIC = "monomorphic"
    UNTYPED = "untyped"


class VarKind(str, Enum):
    UNIVERSAL = "universal"
    EXISTENTIAL = "existential"


# --- types -------------------------------------------------------------------


@dataclass(frozen=True)
class TyVar:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class TyApp:
    ctor: str
    args: Tuple["Type", ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.ctor
        return f"{self.ctor}({', '.join(str(a) for a in self.args)})"


Type = Union[TyVar, TyApp]
TypeSubst = Mapping[str, Type]

IOTA = TyApp(IOTA_NAME)
TY_SORT = TyApp(TY_SORT_NAME)


def type_vars(ty: Type) -> Tuple[str, ...]:
    """Type variables of ``ty`` in order of first occurrence."""
    seen: Dict[str, None] = {}

    def walk(t: Type) -> None:
        if isinstance(t, TyVar):
            seen.setdefault(t.name, None)
        else:
            for a in t.args:
                walk(a)

    walk(ty)
    return tuple(seen)


def is_ground(ty: Type) -> bool:
    if isinstance(ty, TyVar):
        return False
    return all(is_ground(a) for a in ty.args)


def subst_type(ty: Type, rho: TypeSubst) -> Type:
    if not rho:
        return ty
    if isinstance(ty, TyVar):
        return rho.get(ty.name, ty)
    if not ty.args:
        return ty
    return TyApp(ty.ctor, tuple(subst_type(a, rho) for a in ty.args))


def type_size(ty: Type) -> int:
    if isinstance(ty, TyVar):
        return 1
    return 1 + sum(type_size(a) for a in ty.args)


# --- terms -------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str
    ty: Type = IOTA
    kind: VarKind = VarKind.UNIVERSAL

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Fn:
    sym: str
    ty_args: Tuple[Type, ...] = ()
    args: Tuple["Term", ...] = ()

    def __str__(self) -> str:
        parts = [str(t) for t in self.ty_args] + [str(a) for a in self.args]
        if not parts:
            return self.sym
        return f"{self.sym}({', '.join(parts)})"


Term = Union[Var, Fn]


def subterms(term: Term) -> Iterator[Term]:
    yield term
    if isinstance(term, Fn):
        for a in term.args:
            yield from subterms(a)


def term_vars(term: Term) -> Iterator[Var]:
    for t in subterms(term):
        if isinstance(t, Var):
            yield t


# --- formulas ----------------------------------------------------------------


@dataclass(frozen=True)
class Pred:
    sym: str
    ty_args: Tuple[Type, ...] = ()
    args: Tuple[Term, ...] = ()
    positive: bool = True

    def __str__(self) -> str:
        parts = [str(t) for t in self.ty_args] + [str(a) for a in self.args]
        atom = self.sym if not parts else f"{self.sym}({', '.join(parts)})"
        return atom if self.positive else f"~{atom}"


@dataclass(frozen=True)
class Eq:
    lhs: Term
    rhs: Term
    positive: bool = True

    def __str__(self) -> str:
        op = "=" if self.positive else "!="
        return f"{self.lhs} {op} {self.rhs}"


@dataclass(frozen=True)
class And:
    args: Tuple["Formula", ...] = ()


@dataclass(frozen=True)
class Or:
    args: Tuple["Formula", ...] = ()


@dataclass(frozen=True)
class Forall:
    var: Var
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: Var
    body: "Formula"


@dataclass(frozen=True)
class ForallType:
    tyvar: str
    body: "Formula"


Literal = Union[Pred, Eq]
Formula = Union[Pred, Eq, And, Or, Forall, Exists, ForallType]

TRUE = And(())
FALSE = Or(())


def negate_literal(lit: Literal) -> Literal:
    return replace(lit, positive=not lit.positive)


def conj(*parts: Formula) -> Formula:
    """Flattening conjunction; a single conjunct is returned as is."""
    flat: List[Formula] = []
    for p in parts:
        if isinstance(p, And):
            flat.extend(p.args)
        else:
            flat.append(p)
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disj(*parts: Formula) -> Formula:
    flat: List[Formula] = []
    for p in parts:
        if isinstance(p, Or):
            flat.extend(p.args)
        else:
            flat.append(p)
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


def forall(variables: Sequence[Var], body: Formula) -> Formula:
    for v in reversed(variables):
        body = Forall(replace(v, kind=VarKind.UNIVERSAL), body)
    return body


def exists(variables: Sequence[Var], body: Formula) -> Formula:
    for v in reversed(variables):
        body = Exists(replace(v, kind=VarKind.EXISTENTIAL), body)
    return body


def forall_types(tyvars: Sequence[str], body: Formula) -> Formula:
    for a in reversed(tyvars):
        body = ForallType(a, body)
    return body


def split_type_prefix(phi: Formula) -> Tuple[Tuple[str, ...], Formula]:
    tyvars: List[str] = []
    while isinstance(phi, ForallType):
        tyvars.append(phi.tyvar)
        phi = phi.body
    return tuple(tyvars), phi


def literals(phi: Formula) -> Iterator[Literal]:
    if isinstance(phi, (Pred, Eq)):
        yield phi
    elif isinstance(phi, (And, Or)):
        for a in phi.args:
            yield from literals(a)
    else:
        yield from literals(phi.body)


def literal_terms(lit: Literal) -> Tuple[Term, ...]:
    if isinstance(lit, Eq):
        return (lit.lhs, lit.rhs)
    return lit.args


def formula_terms(phi: Formula) -> Iterator[Term]:
    """All subterm occurrences, including bound variable occurrences."""
    for lit in literals(phi):
        for t in literal_terms(lit):
            yield from subterms(t)


def binders(phi: Formula) -> Iterator[Var]:
    if isinstance(phi, (Forall, Exists)):
        yield phi.var
        yield from binders(phi.body)
    elif isinstance(phi, (And, Or)):
        for a in phi.args:
            yield from binders(a)
    elif isinstance(phi, ForallType):
        yield from binders(phi.body)


def free_vars(phi: Formula) -> Set[str]:
    if isinstance(phi, (Pred, Eq)):
        return {v.name for t in literal_terms(phi) for v in term_vars(t)}
    if isinstance(phi, (And, Or)):
        out: Set[str] = set()
        for a in phi.args:
            out |= free_vars(a)
        return out
    if isinstance(phi, (Forall, Exists)):
        return free_vars(phi.body) - {phi.var.name}
    return free_vars(phi.body)


def types_in_formula(phi: Formula) -> Iterator[Type]:
    if isinstance(phi, (Pred, Eq)):
        if isinstance(phi, Pred):
            yield from phi.ty_args
        for t in literal_terms(phi):
            for s in subterms(t):
                if isinstance(s, Var):
                    yield s.ty
                else:
                    yield from s.ty_args
    elif isinstance(phi, (And, Or)):
        for a in phi.args:
            yield from types_in_formula(a)
    elif isinstance(phi, (Forall, Exists)):
        yield phi.var.ty
        yield from types_in_formula(phi.body)
    else:
        yield from types_in_formula(phi.body)


def formula_type_vars(phi: Formula) -> Set[str]:
    out: Set[str] = set()
    tyvars, _ = split_type_prefix(phi)
    out.update(tyvars)
    for ty in types_in_formula(phi):
        out.update(type_vars(ty))
    return out


# --- substitution ------------------------------------------------------------


def subst_term_types(term: Term, rho: TypeSubst) -> Term:
    if isinstance(term, Var):
        return replace(term, ty=subst_type(term.ty, rho))
    return Fn(
        term.sym,
        tuple(subst_type(t, rho) for t in term.ty_args),
        tuple(subst_term_types(a, rho) for a in term.args),
    )


def apply_type_subst(phi: Formula, rho: TypeSubst) -> Formula:
    """Instantiate type variables; bound type variables in the domain of rho are dropped."""
    if not rho:
        return phi
    if isinstance(phi, Pred):
        return replace(
            phi,
            ty_args=tuple(subst_type(t, rho) for t in phi.ty_args),
            args=tuple(subst_term_types(a, rho) for a in phi.args),
        )
    if isinstance(phi, Eq):
        return replace(phi, lhs=subst_term_types(phi.lhs, rho), rhs=subst_term_types(phi.rhs, rho))
    if isinstance(phi, And):
        return And(tuple(apply_type_subst(a, rho) for a in phi.args))
    if isinstance(phi, Or):
        return Or(tuple(apply_type_subst(a, rho) for a in phi.args))
    if isinstance(phi, (Forall, Exists)):
        return type(phi)(replace(phi.var, ty=subst_type(phi.var.ty, rho)), apply_type_subst(phi.body, rho))
    body = apply_type_subst(phi.body, rho)
    if phi.tyvar in rho:
        return body
    return ForallType(phi.tyvar, body)


def map_terms(phi: Formula, fn) -> Formula:
    """Rebuild ``phi`` with ``fn`` applied to every top-level literal argument."""
    if isinstance(phi, Pred):
        return replace(phi, args=tuple(fn(a) for a in phi.args))
    if isinstance(phi, Eq):
        return replace(phi, lhs=fn(phi.lhs), rhs=fn(phi.rhs))
    if isinstance(phi, And):
        return And(tuple(map_terms(a, fn) for a in phi.args))
    if isinstance(phi, Or):
        return Or(tuple(map_terms(a, fn) for a in phi.args))
    return replace(phi, body=map_terms(phi.body, fn))


def rename_term_vars(term: Term, mapping: Mapping[str, Var]) -> Term:
    if isinstance(term, Var):
        return mapping.get(term.name, term)
    if not term.args:
        return term
    return Fn(term.sym, term.ty_args, tuple(rename_term_vars(a, mapping) for a in term.args))


def canonical(phi: Formula) -> Formula:
    """Alpha-normal form: bound names become V0, V1, ... and T0, T1, ... in binding order."""
    counter = {"v": 0, "t": 0}

    def go(f: Formula, env: Dict[str, Var], tenv: Dict[str, Type]) -> Formula:
        if isinstance(f, ForallType):
            name = f"T{counter['t']}"
            counter["t"] += 1
            return ForallType(name, go(f.body, env, {**tenv, f.tyvar: TyVar(name)}))
        if isinstance(f, (Forall, Exists)):
            name = f"V{counter['v']}"
            counter["v"] += 1
            var = Var(name, subst_type(f.var.ty, tenv), f.var.kind)
            return type(f)(var, go(f.body, {**env, f.var.name: var}, tenv))
        if isinstance(f, And):
            return And(tuple(go(a, env, tenv) for a in f.args))
        if isinstance(f, Or):
            return Or(tuple(go(a, env, tenv) for a in f.args))
        lit = apply_type_subst(f, tenv) if tenv else f
        return map_terms(lit, lambda t: rename_term_vars(t, env))

    return go(phi, {}, {})


def alpha_equivalent(a: Formula, b: Formula) -> bool:
    return canonical(a) == canonical(b)


# --- signatures --------------------------------------------------------------


@dataclass(frozen=True)
class FunDecl:
    tyvars: Tuple[str, ...]
    arg_types: Tuple[Type, ...]
    result: Type

    @property
    def arity(self) -> int:
        return len(self.arg_types)

    def instantiate(self, ty_args: Sequence[Type]) -> Tuple[Tuple[Type, ...], Type]:
        rho = dict(zip(self.tyvars, ty_args))
        return tuple(subst_type(t, rho) for t in self.arg_types), subst_type(self.result, rho)


@dataclass(frozen=True)
class PredDecl:
    tyvars: Tuple[str, ...]
    arg_types: Tuple[Type, ...]

    @property
    def arity(self) -> int:
        return len(self.arg_types)

    def instantiate(self, ty_args: Sequence[Type]) -> Tuple[Type, ...]:
        rho = dict(zip(self.tyvars, ty_args))
        return tuple(subst_type(t, rho) for t in self.arg_types)


@dataclass(frozen=True)
class Signature:
    level: Level = Level.POLYMORPHIC
    type_ctors: Mapping[str, int] = field(default_factory=dict)
    funs: Mapping[str, FunDecl] = field(default_factory=dict)
    preds: Mapping[str, PredDecl] = field(default_factory=dict)

    def decl(self, sym: str) -> Optional[Union[FunDecl, PredDecl]]:
        return self.funs.get(sym) or self.preds.get(sym)

    def with_level(self, level: Level) -> "Signature":
        return replace(self, level=level)

    def add_type_ctor(self, name: str, arity: int) -> "Signature":
        return replace(self, type_ctors={**self.type_ctors, name: arity})

    def add_fun(self, name: str, decl: FunDecl) -> "Signature":
        return replace(self, funs={**self.funs, name: decl})

    def add_pred(self, name: str, decl: PredDecl) -> "Signature":
        return replace(self, preds={**self.preds, name: decl})

    def has_nullary_ctor(self) -> bool:
        return any(arity == 0 for arity in self.type_ctors.values())

    def ensure_inhabited(self) -> "Signature":
        """Typed signatures always carry at least one nullary constructor."""
        if self.level is Level.UNTYPED or self.has_nullary_ctor():
            return self
        return self.add_type_ctor(IOTA_NAME, 0)

    def validate(self) -> List[str]:
        errors: List[str] = []
        for sym in set(self.funs) & set(self.preds):
            errors.append(f"symbol {sym} declared both as function and predicate")
        for sym, decl in list(self.funs.items()) + list(self.preds.items()):
            types: List[Type] = list(decl.arg_types)
            if isinstance(decl, FunDecl):
                types.append(decl.result)
            if self.level is Level.UNTYPED:
                continue
            for ty in types:
                errors.extend(self._check_type(ty, set(decl.tyvars), sym))
            if self.level is not Level.POLYMORPHIC and decl.tyvars:
                errors.append(f"symbol {sym} has type variables in a {self.level.value} signature")
        if self.level is not Level.UNTYPED and not self.has_nullary_ctor():
            errors.append("signature has no nullary type constructor")
        return errors

    def _check_type(self, ty: Type, bound: Set[str], where: str) -> List[str]:
        if isinstance(ty, TyVar):
            if ty.name not in bound:
                return [f"type variable {ty.name} of {where} is not bound"]
            return []
        errors: List[str] = []
        arity = self.type_ctors.get(ty.ctor)
        if arity is None:
            errors.append(f"unknown type constructor {ty.ctor} in {where}")
        elif arity != len(ty.args):
            errors.append(f"type constructor {ty.ctor} expects {arity} arguments in {where}")
        for a in ty.args:
            errors.extend(self._check_type(a, bound, where))
        return errors

    def term_type(self, term: Term) -> Type:
        if isinstance(term, Var):
            return term.ty
        decl = self.funs.get(term.sym)
        if decl is None:
            if self.level is Level.UNTYPED:
                return IOTA
            raise KeyError(term.sym)
        return decl.instantiate(term.ty_args)[1]


# --- problems ----------------------------------------------------------------


@dataclass(frozen=True)
class NamedFormula:
    name: str
    formula: Formula
    role: str = "axiom"
    # Provenance for encoded output: the input formula a translation came
    # from, or the axiom schema that produced an added axiom.
    source: Optional[str] = None
    schema: Optional[str] = None

    @property
    def is_added_axiom(self) -> bool:
        return self.schema is not None


@dataclass(frozen=True)
class Problem:
    signature: Signature
    formulas: Tuple[NamedFormula, ...] = ()
    infinite: Tuple[Type, ...] = ()

    @property
    def level(self) -> Level:
        return self.signature.level

    def sentences(self) -> Tuple[Formula, ...]:
        return tuple(nf.formula for nf in self.formulas)

    def with_formulas(self, formulas: Iterable[NamedFormula]) -> "Problem":
        return replace(self, formulas=tuple(formulas))

    def with_signature(self, signature: Signature) -> "Problem":
        return replace(self, signature=signature)

    def is_monomorphic(self) -> bool:
        """Structural check: no type variables and only nullary constructors in use."""
        sig = self.signature
        if any(d.tyvars for d in list(sig.funs.values()) + list(sig.preds.values())):
            return False
        if any(arity for arity in sig.type_ctors.values()):
            return False
        for nf in self.formulas:
            if isinstance(nf.formula, ForallType) or formula_type_vars(nf.formula):
                return False
        return True

    def is_ground_typed(self) -> bool:
        """No type variables anywhere, possibly with compound ground types."""
        sig = self.signature
        if any(d.tyvars for d in list(sig.funs.values()) + list(sig.preds.values())):
            return False
        return not any(formula_type_vars(nf.formula) for nf in self.formulas)


def symbols_used(problem: Problem) -> FrozenSet[str]:
    out: Set[str] = set()
    for nf in problem.formulas:
        for lit in literals(nf.formula):
            if isinstance(lit, Pred):
                out.add(lit.sym)
            for t in literal_terms(lit):
                for s in subterms(t):
                    if isinstance(s, Fn):
                        out.add(s.sym)
    return frozenset(out)
