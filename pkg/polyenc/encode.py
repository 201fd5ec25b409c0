"""Encoding stages: erasure, type arguments, and the tag and guard translations.

Every stage maps a Problem to an EncodedProblem whose problem carries the
stage's target signature. Added axioms come first in the output, followed by
the translations of the input formulas in input order.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from polyenc.analysis import ArgClass, cap_minimize, classify_symbol, is_result_instance, types_of
from polyenc.errors import LevelMismatch
from polyenc.logic import (
    GUARD,
    IOTA,
    MANGLE_SEP,
    TAG,
    TY_SORT,
    TY_SORT_NAME,
    And,
    Eq,
    Exists,
    Fn,
    Forall,
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
    VarKind,
    conj,
    disj,
    exists,
    forall,
    forall_types,
    type_vars,
)
from polyenc.monomorph import mangle_type
from polyenc.unify import normalize_type_vars
from polyenc.variables import CoverAssignment, covered_args, naked_vars, tyvar_term, type_to_term, undercover_vars

logger = logging.getLogger(__name__)

Verdict = Callable[[Type], bool]


@dataclass(frozen=True)
class EncodedProblem:
    problem: Problem
    added_axioms: Tuple[NamedFormula, ...] = ()

    @property
    def target_sig(self) -> Signature:
        return self.problem.signature

    @property
    def translations(self) -> Tuple[NamedFormula, ...]:
        return tuple(nf for nf in self.problem.formulas if nf not in self.added_axioms)


def _translated(nf: NamedFormula, formula: Formula) -> NamedFormula:
    source = nf.source if nf.schema is not None else (nf.source or nf.name)
    return replace(nf, formula=formula, source=source)


def _axiom(schema: str, label: str, formula: Formula) -> NamedFormula:
    return NamedFormula(f"ax_{schema}_{label}", formula, "axiom", None, schema)


def _assemble(problem: Problem, sig: Signature, axioms: Sequence[NamedFormula], formulas: Iterable[NamedFormula]) -> EncodedProblem:
    out = problem.with_signature(sig).with_formulas(list(axioms) + list(formulas))
    return EncodedProblem(out, tuple(axioms))


def _type_label(ty: Type) -> str:
    return mangle_type(normalize_type_vars(ty)) if not isinstance(ty, TyVar) else "var"


# --- erasure -----------------------------------------------------------------


def _erase_term(t: Term) -> Term:
    if isinstance(t, Var):
        return Var(t.name, IOTA, t.kind)
    return Fn(t.sym, (), tuple(_erase_term(a) for a in t.args))


def _erase_formula(phi: Formula) -> Formula:
    if isinstance(phi, Pred):
        return Pred(phi.sym, (), tuple(_erase_term(a) for a in phi.args), phi.positive)
    if isinstance(phi, Eq):
        return Eq(_erase_term(phi.lhs), _erase_term(phi.rhs), phi.positive)
    if isinstance(phi, And):
        return And(tuple(_erase_formula(a) for a in phi.args))
    if isinstance(phi, Or):
        return Or(tuple(_erase_formula(a) for a in phi.args))
    if isinstance(phi, ForallType):
        return _erase_formula(phi.body)
    return type(phi)(Var(phi.var.name, IOTA, phi.var.kind), _erase_formula(phi.body))


def erase(problem: Problem) -> EncodedProblem:
    """Drop type arguments, type quantifiers and variable types."""
    if problem.level is Level.UNTYPED:
        raise LevelMismatch("problem is already untyped")
    sig = problem.signature
    funs = {s: FunDecl((), tuple(IOTA for _ in d.arg_types), IOTA) for s, d in sig.funs.items()}
    preds = {s: PredDecl((), tuple(IOTA for _ in d.arg_types)) for s, d in sig.preds.items()}
    target = Signature(Level.UNTYPED, {}, funs, preds)
    formulas = [_translated(nf, _erase_formula(nf.formula)) for nf in problem.formulas]
    return _assemble(problem, target, (), formulas)


# --- type arguments ----------------------------------------------------------


class ArgFilter(str, Enum):
    FULL = "full"
    PHAN = "phan"
    NINF = "ninf"
    NONE = "none"

    def indices(self, cls: ArgClass, n: int) -> Tuple[int, ...]:
        if self is ArgFilter.FULL:
            return tuple(range(n))
        if self is ArgFilter.PHAN:
            return tuple(sorted(cls.phantom))
        if self is ArgFilter.NINF:
            return tuple(sorted(cls.noninferable))
        return ()


def ctor_symbols(sig: Signature) -> Dict[str, str]:
    """Term symbol standing for each type constructor."""
    out: Dict[str, str] = {}
    for ctor in sig.type_ctors:
        if ctor == TY_SORT_NAME:
            continue
        if ctor.startswith("$"):
            out[ctor] = TY_SORT_NAME + MANGLE_SEP + ctor.lstrip("$")
        elif ctor in sig.funs or ctor in sig.preds:
            out[ctor] = TY_SORT_NAME + MANGLE_SEP + ctor
        else:
            out[ctor] = ctor
    return out


def add_type_args(problem: Problem, filter: Union[ArgFilter, str] = ArgFilter.FULL) -> EncodedProblem:
    """Pass the filtered type arguments of every symbol as leading term arguments."""
    filter = ArgFilter(filter)
    sig = problem.signature
    if sig.level is Level.UNTYPED:
        raise LevelMismatch("type arguments need a typed problem")
    khat = ctor_symbols(sig)
    selected: Dict[str, Tuple[int, ...]] = {}
    funs: Dict[str, FunDecl] = {}
    preds: Dict[str, PredDecl] = {}
    for sym, decl in sig.funs.items():
        idx = (0,) if sym == TAG else filter.indices(classify_symbol(decl), len(decl.tyvars))
        selected[sym] = idx
        funs[sym] = FunDecl(decl.tyvars, (TY_SORT,) * len(idx) + decl.arg_types, decl.result)
    for sym, decl in sig.preds.items():
        idx = (0,) if sym == GUARD else filter.indices(classify_symbol(decl), len(decl.tyvars))
        selected[sym] = idx
        preds[sym] = PredDecl(decl.tyvars, (TY_SORT,) * len(idx) + decl.arg_types)
    for ctor, sym in khat.items():
        funs[sym] = FunDecl((), (TY_SORT,) * sig.type_ctors[ctor], TY_SORT)
    target = Signature(sig.level, {**sig.type_ctors, TY_SORT_NAME: 0}, funs, preds)

    def term(t: Term) -> Term:
        if isinstance(t, Var):
            return t
        extra = tuple(type_to_term(t.ty_args[i], khat) for i in selected.get(t.sym, ()))
        return Fn(t.sym, t.ty_args, extra + tuple(term(a) for a in t.args))

    def formula(phi: Formula) -> Formula:
        if isinstance(phi, Pred):
            extra = tuple(type_to_term(phi.ty_args[i], khat) for i in selected.get(phi.sym, ()))
            return Pred(phi.sym, phi.ty_args, extra + tuple(term(a) for a in phi.args), phi.positive)
        if isinstance(phi, Eq):
            return Eq(term(phi.lhs), term(phi.rhs), phi.positive)
        if isinstance(phi, And):
            return And(tuple(formula(a) for a in phi.args))
        if isinstance(phi, Or):
            return Or(tuple(formula(a) for a in phi.args))
        return type(phi)(phi.var, formula(phi.body))

    def sentence(phi: Formula) -> Formula:
        tyvars = []
        while isinstance(phi, ForallType):
            tyvars.append(phi.tyvar)
            phi = phi.body
        body = forall([tyvar_term(a) for a in tyvars], formula(phi))
        return forall_types(tyvars, body)

    formulas = [_translated(nf, sentence(nf.formula)) for nf in problem.formulas]
    logger.debug("Type arguments (%s) added to %d formulas", filter.value, len(formulas))
    return _assemble(problem, target, (), formulas)


# --- tag and guard symbols ---------------------------------------------------


class _Marks:
    """Builds tag terms and guard atoms, polymorphic or one symbol per type."""

    def __init__(self, sig: Signature, mono: bool) -> None:
        self.sig = sig
        self.mono = mono
        self.tag_types: List[Type] = []
        self.guard_types: List[Type] = []

    def tag(self, ty: Type, t: Term) -> Fn:
        if self.mono:
            if ty not in self.tag_types:
                self.tag_types.append(ty)
            return Fn(TAG + MANGLE_SEP + mangle_type(ty), (), (t,))
        return Fn(TAG, (ty,), (t,))

    def guard(self, ty: Type, t: Term, positive: bool = True) -> Pred:
        if self.mono:
            if ty not in self.guard_types:
                self.guard_types.append(ty)
            return Pred(GUARD + MANGLE_SEP + mangle_type(ty), (), (t,), positive)
        return Pred(GUARD, (ty,), (t,), positive)

    def identity(self, v: Var) -> Eq:
        return Eq(self.tag(v.ty, v), v)

    def signature(self, tags: bool = False, guards: bool = False) -> Signature:
        sig = self.sig
        alpha = TyVar("A")
        if not self.mono:
            if (tags or guards) and sig.level is Level.MONOMORPHIC:
                sig = sig.with_level(Level.POLYMORPHIC)
            if tags:
                sig = sig.add_fun(TAG, FunDecl(("A",), (alpha,), alpha))
            if guards:
                sig = sig.add_pred(GUARD, PredDecl(("A",), (alpha,)))
            return sig
        for ty in self.tag_types:
            sig = sig.add_fun(TAG + MANGLE_SEP + mangle_type(ty), FunDecl((), (ty,), ty))
        for ty in self.guard_types:
            sig = sig.add_pred(GUARD + MANGLE_SEP + mangle_type(ty), PredDecl((), (ty,)))
        return sig


def _fun_vars(decl: FunDecl) -> List[Var]:
    return [Var(f"X{j + 1}", ty) for j, ty in enumerate(decl.arg_types)]


def _fun_app(sym: str, decl: FunDecl, args: Sequence[Term]) -> Fn:
    return Fn(sym, tuple(TyVar(a) for a in decl.tyvars), tuple(args))


def _fun_axiom(tyvars: Sequence[str], variables: Sequence[Var], body: Formula) -> Formula:
    return forall_types(tyvars, forall(variables, body))


def _user_funs(sig: Signature) -> List[Tuple[str, FunDecl]]:
    return [(s, d) for s, d in sig.funs.items() if not s.startswith(TAG)]


def _ground_types(sig: Signature) -> List[Type]:
    return [TyApp(c) for c, arity in sig.type_ctors.items() if arity == 0 and c != TY_SORT_NAME]


# --- generic translation walker ----------------------------------------------


class _Walker:
    """Formula walker with hooks for terms, literals and quantifier blocks."""

    def term(self, t: Term) -> Term:
        return t

    def literal(self, lit: Union[Pred, Eq]) -> Formula:
        if isinstance(lit, Pred):
            return replace(lit, args=tuple(self.term(a) for a in lit.args))
        return replace(lit, lhs=self.term(lit.lhs), rhs=self.term(lit.rhs))

    def forall_guard(self, var: Var, inner: Formula) -> Optional[Formula]:
        return None

    def exists_extra(self, var: Var) -> Optional[Formula]:
        return None

    def formula(self, phi: Formula) -> Formula:
        if isinstance(phi, (Pred, Eq)):
            return self.literal(phi)
        if isinstance(phi, And):
            return And(tuple(self.formula(a) for a in phi.args))
        if isinstance(phi, Or):
            return Or(tuple(self.formula(a) for a in phi.args))
        if isinstance(phi, ForallType):
            return ForallType(phi.tyvar, self.formula(phi.body))
        kind = type(phi)
        block: List[Var] = []
        while isinstance(phi, kind):
            block.append(phi.var)
            phi = phi.body
        body = self.formula(phi)
        if kind is Forall:
            guards = [g for g in (self.forall_guard(v, phi) for v in block) if g is not None]
            return forall(block, disj(*guards, body) if guards else body)
        extras = [e for e in (self.exists_extra(v) for v in block) if e is not None]
        return exists(block, conj(*extras, body) if extras else body)

    def run(self, problem: Problem) -> List[NamedFormula]:
        return [_translated(nf, self.formula(nf.formula)) for nf in problem.formulas]


def _is_mono_level(problem: Problem, level: Optional[Level]) -> bool:
    if level is None:
        return False
    if level is Level.MONOMORPHIC and not problem.is_monomorphic():
        raise LevelMismatch("monomorphic encodings need a monomorphic problem; monomorphise it first")
    return level is Level.MONOMORPHIC


# --- traditional tags and guards ---------------------------------------------


def tags_traditional(problem: Problem, level: Optional[Level] = None) -> EncodedProblem:
    """Wrap every function term and every variable occurrence in a tag."""
    marks = _Marks(problem.signature, _is_mono_level(problem, level))
    sig = problem.signature

    class Tagger(_Walker):
        def term(self, t: Term) -> Term:
            if isinstance(t, Var):
                return marks.tag(t.ty, t)
            return marks.tag(sig.term_type(t), Fn(t.sym, t.ty_args, tuple(self.term(a) for a in t.args)))

    formulas = Tagger().run(problem)
    return _assemble(problem, marks.signature(tags=True), (), formulas)


def _guard_typing_axioms(
    sig: Signature, marks: _Marks, schema: str, guarded: Callable[[str, FunDecl], Iterable[int]]
) -> List[NamedFormula]:
    axioms = []
    for sym, decl in _user_funs(sig):
        xs = _fun_vars(decl)
        premises = [marks.guard(xs[j].ty, xs[j], positive=False) for j in sorted(guarded(sym, decl))]
        head = marks.guard(decl.result, _fun_app(sym, decl, xs))
        axioms.append(_axiom(schema, sym, _fun_axiom(decl.tyvars, xs, disj(*premises, head) if premises else head)))
    return axioms


def _inhabitation_axioms(sig: Signature, marks: _Marks, schema: str, make) -> List[NamedFormula]:
    """``∀α. ∃X:α. make(X)``, or one axiom per ground type at the monomorphic level."""
    if marks.mono:
        return [
            _axiom(schema, mangle_type(ty), exists([Var("X", ty, VarKind.EXISTENTIAL)], make(Var("X", ty, VarKind.EXISTENTIAL))))
            for ty in _ground_types(sig)
        ]
    x = Var("X", TyVar("A"), VarKind.EXISTENTIAL)
    return [_axiom(schema, "inhabit", ForallType("A", Exists(x, make(x))))]


def guards_traditional(problem: Problem, level: Optional[Level] = None) -> EncodedProblem:
    """Guard every quantified variable; add typing and inhabitation axioms."""
    sig = problem.signature
    marks = _Marks(sig, _is_mono_level(problem, level))

    class Guarder(_Walker):
        def forall_guard(self, var: Var, inner: Formula) -> Optional[Formula]:
            return marks.guard(var.ty, var, positive=False)

        def exists_extra(self, var: Var) -> Optional[Formula]:
            return marks.guard(var.ty, var)

    axioms = _guard_typing_axioms(sig, marks, "guard_fun", lambda s, d: range(d.arity))
    axioms += _inhabitation_axioms(sig, marks, "guard_inhabit", lambda x: marks.guard(x.ty, x))
    formulas = Guarder().run(problem)
    return _assemble(problem, marks.signature(guards=True), axioms, formulas)


# --- cover-based tags and guards ---------------------------------------------


def tags_cover(problem: Problem, covers: CoverAssignment) -> EncodedProblem:
    """Tag universal variables only where a cover position or an equation side exposes them."""
    sig = problem.signature
    marks = _Marks(sig, False)

    def protect(t: Term) -> Term:
        if isinstance(t, Var) and t.kind is VarKind.UNIVERSAL:
            return marks.tag(t.ty, t)
        return t

    def args(sym: str, items: Sequence[Term], walk) -> Tuple[Term, ...]:
        cover = covered_args(sym, items, covers)
        # a covered compound argument still has its own covered variables tagged
        return tuple(protect(a) if j in cover and isinstance(a, Var) else walk(a) for j, a in enumerate(items))

    class CoverTagger(_Walker):
        def term(self, t: Term) -> Term:
            if isinstance(t, Var):
                return t
            return Fn(t.sym, t.ty_args, args(t.sym, t.args, self.term))

        def literal(self, lit):
            if isinstance(lit, Pred):
                return replace(lit, args=args(lit.sym, lit.args, self.term))
            lhs = protect(lit.lhs) if isinstance(lit.lhs, Var) else self.term(lit.lhs)
            rhs = protect(lit.rhs) if isinstance(lit.rhs, Var) else self.term(lit.rhs)
            return replace(lit, lhs=lhs, rhs=rhs)

        def exists_extra(self, var: Var) -> Optional[Formula]:
            return marks.identity(var)

    axioms = []
    for sym, decl in _user_funs(sig):
        xs = _fun_vars(decl)
        cover = covers.get(sym, frozenset(range(decl.arity)))
        tagged = [marks.tag(x.ty, x) if j in cover else x for j, x in enumerate(xs)]
        app = _fun_app(sym, decl, tagged)
        axioms.append(_axiom("tag_fun", sym, _fun_axiom(decl.tyvars, xs, Eq(marks.tag(decl.result, app), app))))
    axioms += _inhabitation_axioms(sig, marks, "tag_inhabit", marks.identity)
    formulas = CoverTagger().run(problem)
    return _assemble(problem, marks.signature(tags=True), axioms, formulas)


def guards_cover(problem: Problem, covers: CoverAssignment) -> EncodedProblem:
    """Guard a universal variable only when it is undercover in its scope."""
    sig = problem.signature
    marks = _Marks(sig, False)

    class CoverGuarder(_Walker):
        def forall_guard(self, var: Var, inner: Formula) -> Optional[Formula]:
            if var in undercover_vars(inner, covers):
                return marks.guard(var.ty, var, positive=False)
            return None

        def exists_extra(self, var: Var) -> Optional[Formula]:
            return marks.guard(var.ty, var)

    axioms = _guard_typing_axioms(
        sig, marks, "guard_fun", lambda s, d: covers.get(s, frozenset(range(d.arity)))
    )
    axioms += _inhabitation_axioms(sig, marks, "guard_inhabit", lambda x: marks.guard(x.ty, x))
    formulas = CoverGuarder().run(problem)
    return _assemble(problem, marks.signature(guards=True), axioms, formulas)


# --- monotonicity-based tags and guards --------------------------------------


class WitnessPolicy(str, Enum):
    UNCOVERED = "uncovered"
    ALL = "all"


def _witness_types(
    problem: Problem, verdicts: Verdict, mono: bool, policy: WitnessPolicy
) -> List[Type]:
    """Nonmonotonic types that need an explicit inhabitation axiom."""
    sig = problem.signature
    if mono:
        candidates = [ty for ty in _ground_types(sig) if not verdicts(ty)]
    else:
        candidates = list(cap_minimize(normalize_type_vars(ty) for ty in types_of(problem) if not verdicts(ty)))
    if policy is WitnessPolicy.ALL:
        return candidates
    return [ty for ty in candidates if not is_result_instance(ty, sig)]


def _light_axioms(
    problem: Problem,
    marks: _Marks,
    verdicts: Verdict,
    V: Sequence[Type],
    make: Callable[[Var], Formula],
    fun_schema: str,
    family: str,
    include_funs: bool,
    policy: WitnessPolicy,
    app_formula: Callable[[Type, Fn], Formula],
) -> List[NamedFormula]:
    sig = problem.signature
    axioms: List[NamedFormula] = []
    if include_funs:
        for sym, decl in _user_funs(sig):
            if verdicts(decl.result):
                continue
            xs = _fun_vars(decl)
            app = _fun_app(sym, decl, xs)
            axioms.append(_axiom(fun_schema, sym, _fun_axiom(decl.tyvars, xs, app_formula(decl.result, app))))
    if not marks.mono:
        for ty in V:
            x = Var("X", ty)
            axioms.append(_axiom(f"{family}_mono", _type_label(ty), forall_types(type_vars(ty), Forall(x, make(x)))))
    if include_funs:
        for ty in _witness_types(problem, verdicts, marks.mono, policy):
            x = Var("X", ty, VarKind.EXISTENTIAL)
            axioms.append(_axiom(f"{family}_inhabit", _type_label(ty), forall_types(type_vars(ty), Exists(x, make(x)))))
    return axioms


def tags_light(
    problem: Problem, verdicts: Verdict, V: Sequence[Type] = (), level: Level = Level.POLYMORPHIC
) -> EncodedProblem:
    """Tag every term whose type is not inferred monotonic."""
    sig = problem.signature
    marks = _Marks(sig, _is_mono_level(problem, level))

    class LightTagger(_Walker):
        def term(self, t: Term) -> Term:
            if isinstance(t, Fn):
                t = Fn(t.sym, t.ty_args, tuple(self.term(a) for a in t.args))
            ty = sig.term_type(t)
            return t if verdicts(ty) else marks.tag(ty, t)

    formulas = LightTagger().run(problem)
    axioms = _light_axioms(
        problem, marks, verdicts, V, marks.identity, "tag_fun", "tag", False, WitnessPolicy.UNCOVERED,
        lambda ty, app: Eq(marks.tag(ty, app), app),
    )
    return _assemble(problem, marks.signature(tags=True), axioms, formulas)


def tags_feather(
    problem: Problem,
    verdicts: Verdict,
    V: Sequence[Type] = (),
    level: Level = Level.POLYMORPHIC,
    witness_policy: Union[WitnessPolicy, str] = WitnessPolicy.UNCOVERED,
) -> EncodedProblem:
    """Tag only universal variables standing as a whole side of an equation."""
    sig = problem.signature
    marks = _Marks(sig, _is_mono_level(problem, level))

    def side(t: Term) -> Term:
        if isinstance(t, Var) and t.kind is VarKind.UNIVERSAL and not verdicts(t.ty):
            return marks.tag(t.ty, t)
        return t

    class FeatherTagger(_Walker):
        def literal(self, lit):
            if isinstance(lit, Eq):
                return replace(lit, lhs=side(lit.lhs), rhs=side(lit.rhs))
            return lit

        def exists_extra(self, var: Var) -> Optional[Formula]:
            return None if verdicts(var.ty) else marks.identity(var)

    formulas = FeatherTagger().run(problem)
    axioms = _light_axioms(
        problem, marks, verdicts, V, marks.identity, "tag_fun", "tag", True, WitnessPolicy(witness_policy),
        lambda ty, app: Eq(marks.tag(ty, app), app),
    )
    return _assemble(problem, marks.signature(tags=True), axioms, formulas)


def _guards_monotonic(
    problem: Problem,
    verdicts: Verdict,
    V: Sequence[Type],
    level: Level,
    witness_policy: WitnessPolicy,
    feather: bool,
) -> EncodedProblem:
    sig = problem.signature
    marks = _Marks(sig, _is_mono_level(problem, level))

    class MonoGuarder(_Walker):
        def forall_guard(self, var: Var, inner: Formula) -> Optional[Formula]:
            if verdicts(var.ty):
                return None
            if feather and var not in naked_vars(inner):
                return None
            return marks.guard(var.ty, var, positive=False)

        def exists_extra(self, var: Var) -> Optional[Formula]:
            return None if verdicts(var.ty) else marks.guard(var.ty, var)

    formulas = MonoGuarder().run(problem)
    make = lambda x: marks.guard(x.ty, x)
    axioms = _light_axioms(
        problem, marks, verdicts, V, make, "guard_fun", "guard", True, WitnessPolicy(witness_policy),
        lambda ty, app: marks.guard(ty, app),
    )
    return _assemble(problem, marks.signature(guards=True), axioms, formulas)


def guards_light(
    problem: Problem,
    verdicts: Verdict,
    V: Sequence[Type] = (),
    level: Level = Level.POLYMORPHIC,
    witness_policy: Union[WitnessPolicy, str] = WitnessPolicy.UNCOVERED,
) -> EncodedProblem:
    """Guard every variable whose type is not inferred monotonic."""
    return _guards_monotonic(problem, verdicts, V, level, WitnessPolicy(witness_policy), feather=False)


def guards_feather(
    problem: Problem,
    verdicts: Verdict,
    V: Sequence[Type] = (),
    level: Level = Level.POLYMORPHIC,
    witness_policy: Union[WitnessPolicy, str] = WitnessPolicy.UNCOVERED,
) -> EncodedProblem:
    """As guards_light, but a universal guard is dropped when the variable is not naked."""
    return _guards_monotonic(problem, verdicts, V, level, WitnessPolicy(witness_policy), feather=True)


def all_nonmonotonic(_: Type) -> bool:
    return False
