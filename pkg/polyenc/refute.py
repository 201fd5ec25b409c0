"""A small given-clause refuter.

Binary resolution, factoring and equality resolution over sorted clauses.
Equality is handled either by adding the equality axioms for the symbols of
the problem, or by paramodulation with demodulation by oriented unit
equations. ``auto`` runs paramodulation first and, on small signatures,
spends what is left of the budget on the equality axioms. Given clauses
are picked by weight, except every few picks take the oldest clause so
that heavy clauses are not starved.
"""

from __future__ import annotations

import heapq
import itertools
import logging
import time
from collections import deque
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple, Union

from polyenc import config
from polyenc.clausify import CNF, Clause, normalize_clause
from polyenc.logic import IOTA, Eq, Fn, Level, Literal, Pred, Signature, Term, Type, Var, literal_terms, subterms, term_vars
from polyenc.unify import apply_term_subst, match_terms, unify_terms

logger = logging.getLogger(__name__)

EQ_KEY = "="
AXIOM_RULES = ("reflexivity", "symmetry", "transitivity", "congruence")
Path = Tuple[int, ...]


class Outcome(str, Enum):
    REFUTED = "refutation-found"
    GAVE_UP = "gave-up"


class EqualityMode(str, Enum):
    AUTO = "auto"
    AXIOMS = "axioms"
    PARAMODULATION = "paramodulation"


@dataclass(frozen=True)
class ProofStep:
    index: int
    clause: Clause
    rule: str
    parents: Tuple[int, ...] = ()

    def __str__(self) -> str:
        via = f" [{self.rule} {', '.join(map(str, self.parents))}]" if self.parents else f" [{self.rule}]"
        return f"{self.index}. {self.clause}{via}"


@dataclass(frozen=True)
class RefuteResult:
    outcome: Outcome
    steps: int
    proof: Tuple[ProofStep, ...] = ()
    saturated: bool = False

    @property
    def refuted(self) -> bool:
        return self.outcome is Outcome.REFUTED


# --- term helpers ------------------------------------------------------------


def term_weight(t: Term) -> int:
    return sum(1 for _ in subterms(t))


def clause_weight(clause: Clause) -> int:
    return sum((1 if isinstance(lit, Pred) else 0) + sum(term_weight(t) for t in literal_terms(lit)) for lit in clause)


def _var_counts(t: Term) -> Dict[str, int]:
    out: Dict[str, int] = {}
    for v in term_vars(t):
        out[v.name] = out.get(v.name, 0) + 1
    return out


def greater(s: Term, t: Term) -> bool:
    """Weight ordering: heavier, and every variable of ``t`` occurs at least as often in ``s``."""
    if term_weight(s) <= term_weight(t):
        return False
    cs = _var_counts(s)
    return all(cs.get(v, 0) >= n for v, n in _var_counts(t).items())


def positions(t: Term, path: Path = ()) -> Iterator[Tuple[Path, Term]]:
    """Non-variable subterm positions."""
    if isinstance(t, Var):
        return
    yield path, t
    for i, a in enumerate(t.args):
        yield from positions(a, path + (i,))


def replace_at(t: Term, path: Path, new: Term) -> Term:
    if not path:
        return new
    assert isinstance(t, Fn)
    i = path[0]
    args = list(t.args)
    args[i] = replace_at(args[i], path[1:], new)
    return Fn(t.sym, t.ty_args, tuple(args))


def _lit_args(lit: Literal) -> Tuple[Term, ...]:
    return lit.args if isinstance(lit, Pred) else (lit.lhs, lit.rhs)


def _with_args(lit: Literal, args: Sequence[Term]) -> Literal:
    if isinstance(lit, Pred):
        return replace(lit, args=tuple(args))
    return replace(lit, lhs=args[0], rhs=args[1])


def _key(lit: Literal) -> Tuple[str, Tuple[Type, ...]]:
    return (lit.sym, lit.ty_args) if isinstance(lit, Pred) else (EQ_KEY, ())


def _subst_lit(lit: Literal, theta) -> Literal:
    return _with_args(lit, [apply_term_subst(a, theta) for a in _lit_args(lit)])


def _rename(clause: Clause, prefix: str) -> Clause:
    mapping = {v.name: Var(prefix + v.name, v.ty) for v in clause.variables()}
    return Clause(tuple(_with_args(l, [_rename_term(a, mapping) for a in _lit_args(l)]) for l in clause), clause.source)


def _rename_term(t: Term, mapping: Dict[str, Var]) -> Term:
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    return Fn(t.sym, t.ty_args, tuple(_rename_term(a, mapping) for a in t.args))


# --- subsumption -------------------------------------------------------------


def _match_lit(p: Literal, t: Literal, theta) -> Iterator[dict]:
    if type(p) is not type(t) or p.positive != t.positive or _key(p) != _key(t):
        return
    orders = [_lit_args(t)]
    if isinstance(t, Eq):
        orders.append((t.rhs, t.lhs))
    for targs in orders:
        out = dict(theta)
        for a, b in zip(_lit_args(p), targs):
            out = match_terms(a, b, out)
            if out is None:
                break
        if out is not None:
            yield out


def subsumes(c: Clause, d: Clause) -> bool:
    if len(c) > len(d):
        return False
    present = {(_key(l), l.positive) for l in d}
    if any((_key(l), l.positive) not in present for l in c):
        return False
    # Keep the subsuming side's variables apart from the target's.
    c = _rename(c, "s·")

    def go(i: int, theta) -> bool:
        if i == len(c.literals):
            return True
        return any(go(i + 1, ext) for lit in d.literals for ext in _match_lit(c.literals[i], lit, theta))

    return go(0, {})


# --- equality axioms ---------------------------------------------------------


def equality_axioms(clauses: Sequence[Clause], sort_of: Callable[[Term], Type]) -> List[Clause]:
    sorts: Dict[Type, None] = {}
    funs: Dict[Tuple[str, Tuple[Type, ...]], Tuple[Type, ...]] = {}
    preds: Dict[Tuple[str, Tuple[Type, ...]], Tuple[Type, ...]] = {}
    for clause in clauses:
        for lit in clause:
            if isinstance(lit, Eq):
                sorts.setdefault(sort_of(lit.lhs), None)
            else:
                preds.setdefault(_key(lit), tuple(sort_of(a) for a in lit.args))
            for t in literal_terms(lit):
                for s in subterms(t):
                    if isinstance(s, Fn) and s.args:
                        funs.setdefault((s.sym, s.ty_args), tuple(sort_of(a) for a in s.args))
    out: List[Clause] = []
    for ty in sorts:
        x, y, z = Var("X", ty), Var("Y", ty), Var("Z", ty)
        out.append(Clause((Eq(x, x),), "reflexivity"))
        out.append(Clause((Eq(x, y, False), Eq(y, x)), "symmetry"))
        out.append(Clause((Eq(x, y, False), Eq(y, z, False), Eq(x, z)), "transitivity"))
    for (sym, ty_args), arg_sorts in funs.items():
        for i, ty in enumerate(arg_sorts):
            if ty not in sorts:
                continue
            xs = [Var(f"X{j}", s) for j, s in enumerate(arg_sorts)]
            ys = list(xs)
            ys[i] = Var("Y", ty)
            out.append(Clause((Eq(xs[i], ys[i], False), Eq(Fn(sym, ty_args, tuple(xs)), Fn(sym, ty_args, tuple(ys)))), "congruence"))
    for (sym, ty_args), arg_sorts in preds.items():
        for i, ty in enumerate(arg_sorts):
            if ty not in sorts:
                continue
            xs = [Var(f"X{j}", s) for j, s in enumerate(arg_sorts)]
            ys = list(xs)
            ys[i] = Var("Y", ty)
            out.append(
                Clause(
                    (Eq(xs[i], ys[i], False), Pred(sym, ty_args, tuple(xs), False), Pred(sym, ty_args, tuple(ys))),
                    "congruence",
                )
            )
    return out


def symbol_count(clauses: Iterable[Clause]) -> int:
    seen: Set[Tuple[str, Tuple[Type, ...]]] = set()
    for clause in clauses:
        for lit in clause:
            if isinstance(lit, Pred):
                seen.add(_key(lit))
            for t in literal_terms(lit):
                for s in subterms(t):
                    if isinstance(s, Fn):
                        seen.add((s.sym, s.ty_args))
    return len(seen)


def has_equality(clauses: Iterable[Clause]) -> bool:
    return any(isinstance(lit, Eq) for c in clauses for lit in c)


# --- saturation --------------------------------------------------------------


@dataclass
class _Record:
    index: int
    clause: Clause
    rule: str
    parents: Tuple[int, ...]
    removed: bool = False
    selected: bool = False


class _GaveUp(Exception):
    pass


class _Saturation:
    def __init__(
        self,
        sort_of: Optional[Callable[[Term], Type]],
        paramodulation: bool,
        step_limit: int,
        deadline: Optional[float],
        pick_given_ratio: Optional[int] = None,
    ) -> None:
        self.sort_of = sort_of
        self.pick_given_ratio = config.PICK_GIVEN_RATIO if pick_given_ratio is None else pick_given_ratio
        self.paramodulation = paramodulation
        self.step_limit = step_limit
        self.deadline = deadline
        self.records: List[_Record] = []
        self.passive: List[Tuple[int, int]] = []
        self.by_age: deque = deque()
        self.picks = 0
        self.active: List[_Record] = []
        self.index: Dict[Tuple[Tuple[str, Tuple[Type, ...]], bool], List[Tuple[_Record, int]]] = {}
        self.demodulators: List[Tuple[Term, Term]] = []
        self.steps = 0
        self.empty: Optional[_Record] = None

    def unify(self, s: Term, t: Term, theta=None):
        return unify_terms(s, t, theta, self.sort_of)

    def _sort(self, t: Term) -> Type:
        return self.sort_of(t) if self.sort_of else IOTA

    # clause admission
    def add(self, clause: Clause, rule: str, parents: Tuple[int, ...] = (), inference: bool = True) -> None:
        if inference:
            self.steps += 1
            if self.steps > self.step_limit:
                raise _GaveUp
        clause = self.simplify(clause)
        if clause.is_tautology():
            return
        record = _Record(len(self.records), clause, rule, parents)
        self.records.append(record)
        if clause.is_empty:
            self.empty = record
            return
        heapq.heappush(self.passive, (clause_weight(clause), record.index))
        self.by_age.append(record.index)

    def simplify(self, clause: Clause) -> Clause:
        lits = list(clause)
        if self.demodulators:
            lits = [_with_args(l, [self.rewrite(a) for a in _lit_args(l)]) for l in lits]
        # s != s is false in every model
        lits = [l for l in lits if not (isinstance(l, Eq) and not l.positive and l.lhs == l.rhs)]
        return normalize_clause(lits, clause.source)

    def rewrite(self, t: Term) -> Term:
        for _ in range(64):
            new = self._rewrite_once(t)
            if new == t:
                return t
            t = new
        return t

    def _rewrite_once(self, t: Term) -> Term:
        if isinstance(t, Fn):
            t = Fn(t.sym, t.ty_args, tuple(self._rewrite_once(a) for a in t.args))
        for lhs, rhs in self.demodulators:
            theta = match_terms(lhs, t)
            if theta is not None:
                return apply_term_subst(rhs, theta)
        return t

    # main loop
    def run(self) -> Optional[_Record]:
        while self.empty is None:
            if self.deadline is not None and time.monotonic() > self.deadline:
                raise _GaveUp
            given = self._next_given()
            if given is None:
                return None
            simplified = self.simplify(given.clause)
            if simplified != given.clause:
                if simplified.is_tautology():
                    continue
                given = _Record(len(self.records), simplified, "demodulation", (given.index,))
                self.records.append(given)
                if simplified.is_empty:
                    self.empty = given
                    break
            if any(subsumes(a.clause, given.clause) for a in self.active if not a.removed):
                continue
            for a in self.active:
                if not a.removed and subsumes(given.clause, a.clause):
                    a.removed = True
            self.activate(given)
            self.infer(given)
        return self.empty

    def _next_given(self) -> Optional[_Record]:
        self.picks += 1
        by_age = self.pick_given_ratio > 0 and self.picks % (self.pick_given_ratio + 1) == 0
        while self.passive:
            if by_age and self.by_age:
                idx = self.by_age.popleft()
            else:
                _, idx = heapq.heappop(self.passive)
            rec = self.records[idx]
            if rec.removed or rec.selected:
                continue
            rec.selected = True
            return rec
        return None

    def activate(self, rec: _Record) -> None:
        self.active.append(rec)
        for i, lit in enumerate(rec.clause):
            self.index.setdefault((_key(lit), lit.positive), []).append((rec, i))
        if self.paramodulation and len(rec.clause) == 1:
            lit = _rename(rec.clause, "d·").literals[0]
            if isinstance(lit, Eq) and lit.positive:
                if greater(lit.lhs, lit.rhs):
                    self.demodulators.append((lit.lhs, lit.rhs))
                elif greater(lit.rhs, lit.lhs):
                    self.demodulators.append((lit.rhs, lit.lhs))

    def infer(self, given: _Record) -> None:
        clause = given.clause
        self.factor(given)
        self.equality_resolution(given)
        renamed = _rename(clause, "g·")
        for i, lit in enumerate(renamed):
            for other, j in list(self.index.get((_key(lit), not lit.positive), ())):
                if other.removed:
                    continue
                self.resolve(given, renamed, i, other, j)
                if self.empty is not None:
                    return
        if self.paramodulation:
            for other in list(self.active):
                if other.removed:
                    continue
                self.paramodulate(given, renamed, other, other.clause)
                if other is not given:
                    self.paramodulate(other, _rename(other.clause, "o·"), given, clause)
                if self.empty is not None:
                    return

    def _unify_lits(self, a: Literal, b: Literal) -> Iterator[dict]:
        pairs = [(_lit_args(a), _lit_args(b))]
        if isinstance(a, Eq):
            pairs.append(((a.lhs, a.rhs), (b.rhs, b.lhs)))
        for xs, ys in pairs:
            theta: Optional[dict] = {}
            for x, y in zip(xs, ys):
                theta = self.unify(x, y, theta)
                if theta is None:
                    break
            if theta is not None:
                yield theta

    def resolve(self, given: _Record, renamed: Clause, i: int, other: _Record, j: int) -> None:
        a, b = renamed.literals[i], other.clause.literals[j]
        for theta in self._unify_lits(a, b):
            rest = [l for k, l in enumerate(renamed) if k != i] + [l for k, l in enumerate(other.clause) if k != j]
            self.add(Clause(tuple(_subst_lit(l, theta) for l in rest), None), "resolution", (given.index, other.index))
            if self.empty is not None:
                return

    def factor(self, rec: _Record) -> None:
        lits = rec.clause.literals
        for i, j in itertools.combinations(range(len(lits)), 2):
            a, b = lits[i], lits[j]
            if a.positive != b.positive or type(a) is not type(b) or _key(a) != _key(b):
                continue
            for theta in self._unify_lits(a, b):
                rest = [l for k, l in enumerate(lits) if k != j]
                self.add(Clause(tuple(_subst_lit(l, theta) for l in rest)), "factoring", (rec.index,))

    def equality_resolution(self, rec: _Record) -> None:
        for i, lit in enumerate(rec.clause):
            if isinstance(lit, Eq) and not lit.positive:
                theta = self.unify(lit.lhs, lit.rhs)
                if theta is not None:
                    rest = [l for k, l in enumerate(rec.clause) if k != i]
                    self.add(Clause(tuple(_subst_lit(l, theta) for l in rest)), "equality resolution", (rec.index,))

    def paramodulate(self, src: _Record, src_clause: Clause, dst: _Record, dst_clause: Clause) -> None:
        """Rewrite a subterm of ``dst_clause`` with a positive equation of ``src_clause``."""
        for i, eq in enumerate(src_clause):
            if not (isinstance(eq, Eq) and eq.positive):
                continue
            for lhs, rhs in ((eq.lhs, eq.rhs), (eq.rhs, eq.lhs)):
                if greater(rhs, lhs):
                    continue
                if isinstance(lhs, Var) and any(v.name == lhs.name for v in term_vars(rhs)):
                    continue
                lhs_sort = self._sort(lhs)
                for j, lit in enumerate(dst_clause):
                    args = _lit_args(lit)
                    for k, arg in enumerate(args):
                        for path, sub in positions(arg):
                            if self.sort_of is not None and self._sort(sub) != lhs_sort:
                                continue
                            theta = self.unify(lhs, sub)
                            if theta is None:
                                continue
                            new_args = list(args)
                            new_args[k] = replace_at(arg, path, rhs)
                            rewritten = _with_args(lit, new_args)
                            rest = [l for m, l in enumerate(src_clause) if m != i]
                            others = [rewritten if m == j else l for m, l in enumerate(dst_clause)]
                            lits = tuple(_subst_lit(l, theta) for l in rest + others)
                            self.add(Clause(lits), "paramodulation", (src.index, dst.index))
                            if self.empty is not None:
                                return

    def proof(self) -> Tuple[ProofStep, ...]:
        if self.empty is None:
            return ()
        needed: Set[int] = set()
        stack = [self.empty.index]
        while stack:
            idx = stack.pop()
            if idx in needed:
                continue
            needed.add(idx)
            stack.extend(self.records[idx].parents)
        return tuple(
            ProofStep(r.index, r.clause, r.rule, r.parents) for r in self.records if r.index in needed
        )


def _run_phase(
    clauses: Sequence[Clause],
    sort_of,
    paramodulation: bool,
    step_limit: int,
    deadline: Optional[float],
) -> Tuple[Optional[_Saturation], bool]:
    sat = _Saturation(sort_of, paramodulation, step_limit, deadline)
    try:
        for clause in clauses:
            sat.add(clause, clause.source if clause.source in AXIOM_RULES else "input", inference=False)
            if sat.empty is not None:
                return sat, False
        found = sat.run()
    except _GaveUp:
        return sat, False
    return sat, found is None


def refute(
    clauses: Union[CNF, Sequence[Clause]],
    step_limit: Optional[int] = None,
    time_limit: Optional[float] = None,
    equality: Union[EqualityMode, str] = EqualityMode.AUTO,
    signature: Optional[Signature] = None,
) -> RefuteResult:
    """Search for the empty clause. ``refutation-found`` means the clauses are unsatisfiable."""
    step_limit = config.STEP_LIMIT if step_limit is None else step_limit
    time_limit = config.REFUTE_SECONDS if time_limit is None else time_limit
    equality = EqualityMode(equality)
    if isinstance(clauses, CNF):
        signature = signature or clauses.signature
        clauses = list(clauses.clauses)
    clauses = list(clauses)
    sort_of = None
    if signature is not None and signature.level is not Level.UNTYPED:
        sort_of = lambda t: t.ty if isinstance(t, Var) else signature.term_type(t)
    deadline = time.monotonic() + time_limit if time_limit else None

    phases: List[Tuple[List[Clause], bool, int]] = []
    if not has_equality(clauses):
        phases.append((clauses, False, step_limit))
    elif equality is EqualityMode.AXIOMS:
        phases.append((clauses + equality_axioms(clauses, sort_of or (lambda t: IOTA)), False, step_limit))
    elif equality is EqualityMode.PARAMODULATION:
        phases.append((clauses, True, step_limit))
    elif symbol_count(clauses) <= config.CONGRUENCE_SYMBOL_LIMIT:
        first = step_limit * 2 // 3
        axioms = equality_axioms(clauses, sort_of or (lambda t: IOTA))
        phases.append((clauses, True, first))
        phases.append((clauses + axioms, False, step_limit - first))
    else:
        phases.append((clauses, True, step_limit))

    used = 0
    saturated = False
    for phase_clauses, paramodulation, limit in phases:
        sat, saturated = _run_phase(phase_clauses, sort_of, paramodulation, limit, deadline)
        used += min(sat.steps, limit)
        if sat.empty is not None:
            logger.info("Refutation found after %d steps", used)
            return RefuteResult(Outcome.REFUTED, used, sat.proof())
        if saturated:
            break
        if deadline is not None and time.monotonic() > deadline:
            break
    logger.info("Refuter gave up after %d steps%s", used, " (saturated)" if saturated else "")
    return RefuteResult(Outcome.GAVE_UP, used, (), saturated)
