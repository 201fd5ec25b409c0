"""Type-argument classification, covers, monotonicity inference and cap computation."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Mapping, Sequence, Set, Tuple, Union

from polyenc.logic import (
    TY_SORT_NAME,
    FunDecl,
    PredDecl,
    Problem,
    Signature,
    TyApp,
    TyVar,
    Type,
    Var,
    binders,
    formula_terms,
    subst_type,
    type_size,
    type_vars,
)
from polyenc.unify import fresh_type_vars, is_instance, mgi, normalize_type_vars, unifiable
from polyenc.variables import CoverAssignment, naked_vars

logger = logging.getLogger(__name__)

# Exhaustive minimal-cover search is used up to this many term arguments.
EXHAUSTIVE_COVER_ARITY = 12


@dataclass(frozen=True)
class ArgClass:
    phantom: FrozenSet[int]
    inferable: FrozenSet[int]
    noninferable: FrozenSet[int]


ArgClassification = Dict[str, ArgClass]


def classify_symbol(decl: Union[FunDecl, PredDecl]) -> ArgClass:
    in_args = {v for t in decl.arg_types for v in type_vars(t)}
    in_result = set(type_vars(decl.result)) if isinstance(decl, FunDecl) else set()
    phantom, inferable, noninferable = set(), set(), set()
    for i, alpha in enumerate(decl.tyvars):
        if alpha in in_args:
            inferable.add(i)
        else:
            noninferable.add(i)
            if alpha not in in_result:
                phantom.add(i)
    return ArgClass(frozenset(phantom), frozenset(inferable), frozenset(noninferable))


def classify_args(sig: Signature) -> ArgClassification:
    out: ArgClassification = {}
    for sym in sorted(sig.funs):
        out[sym] = classify_symbol(sig.funs[sym])
    for sym in sorted(sig.preds):
        out[sym] = classify_symbol(sig.preds[sym])
    return out


class CoverPolicy(str, Enum):
    MINIMAL_EARLIEST = "minimal-earliest"
    MAXIMAL = "maximal"


def is_cover(decl: Union[FunDecl, PredDecl], indices: Iterable[int]) -> bool:
    cls = classify_symbol(decl)
    needed = {decl.tyvars[i] for i in cls.inferable}
    seen = {v for j in indices for v in type_vars(decl.arg_types[j])}
    return needed <= seen


def _minimal_earliest(decl: Union[FunDecl, PredDecl]) -> FrozenSet[int]:
    n = decl.arity
    if n <= EXHAUSTIVE_COVER_ARITY:
        minimal = []
        for size in range(n + 1):
            for combo in itertools.combinations(range(n), size):
                if not is_cover(decl, combo):
                    continue
                if any(set(m) < set(combo) for m in minimal):
                    continue
                minimal.append(combo)
        return frozenset(min(minimal))
    chosen = list(range(n))
    for j in reversed(range(n)):
        trial = [i for i in chosen if i != j]
        if is_cover(decl, trial):
            chosen = trial
    return frozenset(chosen)


def choose_covers(sig: Signature, policy: Union[CoverPolicy, str] = CoverPolicy.MINIMAL_EARLIEST) -> CoverAssignment:
    policy = CoverPolicy(policy)
    covers: Dict[str, FrozenSet[int]] = {}
    for sym, decl in sorted(list(sig.funs.items()) + list(sig.preds.items())):
        if policy is CoverPolicy.MAXIMAL:
            covers[sym] = frozenset(range(decl.arity))
        else:
            covers[sym] = _minimal_earliest(decl)
    return covers


# --- infinite types ----------------------------------------------------------


@dataclass(frozen=True)
class InfRegistry:
    declared: Tuple[Type, ...] = ()

    def is_infinite(self, ty: Type) -> bool:
        return any(is_instance(ty, d) for d in self.declared)

    def merged(self, more: Iterable[Type]) -> "InfRegistry":
        out = list(self.declared)
        for ty in more:
            if ty not in out:
                out.append(ty)
        return InfRegistry(tuple(out))

    def for_monomorphised(self, type_origin: Mapping[str, Type]) -> "InfRegistry":
        """Carry the registry over to the nullary constructors produced by mangling."""
        extra = [TyApp(name) for name, ground in sorted(type_origin.items()) if self.is_infinite(ground)]
        return self.merged(extra)

    @classmethod
    def from_text(cls, text: str) -> "InfRegistry":
        from polyenc.tptp import parse_type

        types = []
        for line in text.splitlines():
            line = line.split("%", 1)[0].strip()
            if line:
                types.append(parse_type(line))
        return cls(tuple(types))

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "InfRegistry":
        return cls.from_text(Path(path).read_text())


# --- monotonicity ------------------------------------------------------------


@dataclass(frozen=True)
class NakedOccurrence:
    var: Var
    formula: str


def naked_occurrences(problem: Problem) -> Tuple[NakedOccurrence, ...]:
    out: List[NakedOccurrence] = []
    for nf in problem.formulas:
        for v in sorted(naked_vars(nf.formula), key=lambda v: (v.name, str(v.ty))):
            out.append(NakedOccurrence(v, nf.name))
    return tuple(out)


def cap_minimize(types: Iterable[Type]) -> Tuple[Type, ...]:
    """Drop every type that is an instance of another kept type."""
    kept: List[Type] = []
    for ty in types:
        if any(is_instance(ty, k) for k in kept):
            continue
        kept = [k for k in kept if not is_instance(k, ty)]
        kept.append(ty)
    return tuple(sorted(kept, key=lambda t: (type_size(t), str(t))))


@dataclass(frozen=True)
class MonoVerdicts:
    """Monotonicity verdicts; calling the object on a type answers the calculus."""

    polymorphic: bool
    naked: Tuple[NakedOccurrence, ...]
    inf: InfRegistry
    forced: Tuple[Type, ...] = ()
    J: Tuple[Type, ...] = ()
    N: Tuple[Type, ...] = ()

    @property
    def naked_types(self) -> Tuple[Type, ...]:
        seen: List[Type] = []
        for occ in self.naked:
            if occ.var.ty not in seen:
                seen.append(occ.var.ty)
        return tuple(seen)

    def __call__(self, sigma: Type) -> bool:
        return self.verdict(sigma)

    def _forced(self, sigma: Type) -> bool:
        return any(unifiable(sigma, f) for f in self.forced)

    def verdict(self, sigma: Type) -> bool:
        if self._forced(sigma):
            return False
        if not self.polymorphic:
            return self.inf.is_infinite(sigma) or sigma not in self.naked_types
        for tau in self.naked_types:
            common = mgi(sigma, tau)
            if common is not None and not self.inf.is_infinite(common):
                return False
        return True

    def quick(self, sigma: Type) -> bool:
        """The two-set approximation; whenever it holds, ``verdict`` holds too.

        ``sigma`` is unified with each member of N after renaming their type
        variables apart, so a variable shared between ``sigma`` and a naked
        type does not constrain the check. This can only report
        nonmonotonic more often than a check that keeps the variables shared.
        """
        if self._forced(sigma):
            return False
        if any(is_instance(sigma, j) for j in self.J):
            return True
        return not any(unifiable(sigma, n) for n in self.N)

    def reason(self, sigma: Type) -> str:
        if self._forced(sigma):
            return "forced nonmonotonic"
        if self.inf.is_infinite(sigma):
            return "infinite"
        touching = [
            occ for occ in self.naked
            if (unifiable(sigma, occ.var.ty) if self.polymorphic else sigma == occ.var.ty)
        ]
        for occ in touching:
            common = mgi(sigma, occ.var.ty)
            if common is not None and not self.inf.is_infinite(common):
                return f"naked {occ.var.name}:{occ.var.ty} in {occ.formula}"
        if touching:
            return "naked variables only at infinite instances"
        return "no naked variable"


def _caps(naked_types: Sequence[Type], inf: InfRegistry) -> Tuple[Tuple[Type, ...], Tuple[Type, ...]]:
    infinite = [t for t in naked_types if inf.is_infinite(t)]
    other = [t for t in naked_types if not inf.is_infinite(t)]
    return cap_minimize(infinite), cap_minimize(other)


def infer_mono_monomorphic(problem: Problem, inf: InfRegistry, forced: Sequence[Type] = ()) -> MonoVerdicts:
    naked = naked_occurrences(problem)
    verdicts = MonoVerdicts(False, naked, inf, tuple(forced))
    J, N = _caps(verdicts.naked_types, inf)
    verdicts = MonoVerdicts(False, naked, inf, tuple(forced), J, N)
    logger.debug("Monomorphic calculus: %d naked occurrences, J=%s, N=%s", len(naked), J, N)
    return verdicts


def infer_mono_polymorphic(problem: Problem, inf: InfRegistry, forced: Sequence[Type] = ()) -> MonoVerdicts:
    naked = naked_occurrences(problem)
    draft = MonoVerdicts(True, naked, inf, tuple(forced))
    J, N = _caps(draft.naked_types, inf)
    logger.debug("Polymorphic calculus: %d naked occurrences, J=%s, N=%s", len(naked), J, N)
    return MonoVerdicts(True, naked, inf, tuple(forced), J, N)


# --- caps --------------------------------------------------------------------


def types_of(problem: Problem) -> Tuple[Type, ...]:
    """Types of all subterms and bound variables, in order of first occurrence."""
    sig = problem.signature
    seen: Dict[Type, None] = {}
    for nf in problem.formulas:
        for v in binders(nf.formula):
            seen.setdefault(v.ty, None)
        for t in formula_terms(nf.formula):
            seen.setdefault(sig.term_type(t), None)
    return tuple(seen)


def _candidates(sigma: Type, sig: Signature, inf: InfRegistry) -> List[Type]:
    heads: List[Type] = list(inf.declared)
    for ctor, arity in sorted(sig.type_ctors.items()):
        if ctor == TY_SORT_NAME:
            continue
        heads.append(TyApp(ctor, tuple(TyVar(f"K{i}") for i in range(arity))))
    out = [sigma]
    for alpha in type_vars(sigma):
        for head in heads:
            avoid: Set[str] = set(type_vars(sigma))
            fresh = fresh_type_vars(head, avoid)
            cand = subst_type(sigma, {alpha: fresh})
            if cand not in out:
                out.append(cand)
    return out


def compute_U(problem: Problem, verdicts: MonoVerdicts, inf: InfRegistry) -> Tuple[Type, ...]:
    """A cap of monotonic instances of the nonmonotonic types of the problem."""
    union: List[Type] = []
    for sigma in types_of(problem):
        if verdicts(sigma):
            continue
        keep = [
            c
            for c in _candidates(sigma, problem.signature, inf)
            if verdicts(c) and (inf.is_infinite(c) or not any(unifiable(c, n) for n in verdicts.naked_types))
        ]
        union.extend(cap_minimize(keep))
    result: List[Type] = []
    for ty in cap_minimize(union):
        ty = normalize_type_vars(ty)
        if ty not in result:
            result.append(ty)
    logger.debug("U = %s", ", ".join(str(t) for t in result) or "{}")
    return tuple(result)


def result_types(sig: Signature) -> Tuple[Type, ...]:
    return tuple(sig.funs[f].result for f in sorted(sig.funs))


def is_result_instance(sigma: Type, sig: Signature) -> bool:
    """Whether ``sigma`` is an instance of the result type of some function symbol."""
    return any(is_instance(sigma, r) for r in result_types(sig))
