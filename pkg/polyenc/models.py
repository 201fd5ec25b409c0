"""Finite structures: evaluation and bounded model search.

The search is MACE-style: the problem is clausified, every clause is
instantiated over the candidate domains, and the function and predicate
tables are filled cell by cell. A clause instance is watched on the first
table cell that keeps it undecided; unit instances force their last cell.
"""

from __future__ import annotations

import itertools
import logging
import time
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Mapping, Optional, Sequence, Tuple

from polyenc.clausify import CNF, Clause, clausify, is_clausifiable
from polyenc.errors import InternalError, LevelMismatch
from polyenc.logic import (
    IOTA,
    SKOLEM_PREFIX,
    And,
    Eq,
    Fn,
    Forall,
    ForallType,
    Formula,
    Level,
    Literal,
    Or,
    Pred,
    Problem,
    Term,
    Type,
    Var,
    literal_terms,
    subst_type,
    subterms,
)

logger = logging.getLogger(__name__)

SymbolInstance = Tuple[str, Tuple[Type, ...]]
Cell = Tuple[str, Tuple[Type, ...], Tuple[int, ...]]


@dataclass(frozen=True)
class FiniteModel:
    domains: Mapping[Type, Tuple[int, ...]]
    fun_tables: Mapping[SymbolInstance, Mapping[Tuple[int, ...], int]] = field(default_factory=dict)
    pred_tables: Mapping[SymbolInstance, FrozenSet[Tuple[int, ...]]] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return sum(len(d) for d in self.domains.values())

    def domain(self, ty: Type) -> Tuple[int, ...]:
        try:
            return self.domains[ty]
        except KeyError:
            raise InternalError(f"model has no domain for type {ty}") from None

    def apply(self, sym: str, ty_args: Tuple[Type, ...], args: Tuple[int, ...]) -> int:
        table = self.fun_tables.get((sym, ty_args))
        if table is None or args not in table:
            raise InternalError(f"missing table entry for {sym}{list(ty_args) or ''}{args}")
        return table[args]

    def holds(self, sym: str, ty_args: Tuple[Type, ...], args: Tuple[int, ...]) -> bool:
        table = self.pred_tables.get((sym, ty_args))
        if table is None:
            raise InternalError(f"missing table for predicate {sym}")
        return args in table

    def satisfies(self, problem: Problem) -> bool:
        return all(evaluate(self, nf.formula) for nf in problem.formulas)

    def to_dict(self) -> Dict[str, object]:
        def key(sym: str, ty_args: Tuple[Type, ...]) -> str:
            return sym if not ty_args else f"{sym}<{', '.join(str(t) for t in ty_args)}>"

        return {
            "domains": {str(ty): len(d) for ty, d in self.domains.items()},
            "functions": {
                key(*k): {",".join(map(str, args)): v for args, v in sorted(table.items())}
                for k, table in self.fun_tables.items()
            },
            "predicates": {key(*k): sorted(list(t) for t in table) for k, table in self.pred_tables.items()},
        }


# --- evaluation --------------------------------------------------------------


def _term_value(model: FiniteModel, t: Term, theta: Mapping[str, Type], xi: Mapping[str, int]) -> int:
    if isinstance(t, Var):
        try:
            return xi[t.name]
        except KeyError:
            raise InternalError(f"variable {t.name} has no value") from None
    ty_args = tuple(subst_type(a, theta) for a in t.ty_args)
    args = tuple(_term_value(model, a, theta, xi) for a in t.args)
    return model.apply(t.sym, ty_args, args)


def evaluate(
    model: FiniteModel,
    phi: Formula,
    theta: Optional[Mapping[str, Type]] = None,
    xi: Optional[Mapping[str, int]] = None,
) -> bool:
    """Truth value of ``phi`` under the type valuation ``theta`` and term valuation ``xi``."""
    theta = dict(theta or {})
    xi = dict(xi or {})
    if isinstance(phi, Pred):
        ty_args = tuple(subst_type(a, theta) for a in phi.ty_args)
        args = tuple(_term_value(model, a, theta, xi) for a in phi.args)
        return model.holds(phi.sym, ty_args, args) == phi.positive
    if isinstance(phi, Eq):
        same = _term_value(model, phi.lhs, theta, xi) == _term_value(model, phi.rhs, theta, xi)
        return same == phi.positive
    if isinstance(phi, And):
        return all(evaluate(model, a, theta, xi) for a in phi.args)
    if isinstance(phi, Or):
        return any(evaluate(model, a, theta, xi) for a in phi.args)
    if isinstance(phi, ForallType):
        return all(evaluate(model, phi.body, {**theta, phi.tyvar: ty}, xi) for ty in model.domains)
    values = model.domain(subst_type(phi.var.ty, theta))
    test = all if isinstance(phi, Forall) else any
    return test(evaluate(model, phi.body, theta, {**xi, phi.var.name: v}) for v in values)


# --- search ------------------------------------------------------------------


@dataclass
class _Instance:
    clause: Clause
    env: Dict[str, int]


_SAT, _CONFLICT = "sat", "conflict"


class _Search:
    def __init__(self, cnf: CNF, sizes: Mapping[Type, int], deadline: Optional[float]) -> None:
        self.cnf = cnf
        self.sig = cnf.signature
        self.sizes = dict(sizes)
        self.deadline = deadline
        self.funs: Dict[Cell, int] = {}
        self.preds: Dict[Cell, bool] = {}
        self.watch: Dict[Cell, List[_Instance]] = {}
        self.trail: List[Tuple[str, object]] = []
        self.nodes = 0

    # three-valued evaluation; an undecided result names the blocking cell
    def term(self, t: Term, env: Mapping[str, int]):
        if isinstance(t, Var):
            return env[t.name], None
        args = []
        for a in t.args:
            v, blocked = self.term(a, env)
            if v is None:
                return None, blocked
            args.append(v)
        cell = (t.sym, t.ty_args, tuple(args))
        if cell in self.funs:
            return self.funs[cell], None
        return None, cell

    def literal(self, lit: Literal, env: Mapping[str, int]):
        """(truth or None, blocking cell, forced assignment if this literal were the last one)."""
        if isinstance(lit, Pred):
            args = []
            for a in lit.args:
                v, blocked = self.term(a, env)
                if v is None:
                    return None, blocked, None
                args.append(v)
            cell = (lit.sym, lit.ty_args, tuple(args))
            if cell in self.preds:
                return self.preds[cell] == lit.positive, None, None
            return None, cell, (cell, lit.positive)
        lv, lb = self.term(lit.lhs, env)
        rv, rb = self.term(lit.rhs, env)
        if lv is not None and rv is not None:
            return (lv == rv) == lit.positive, None, None
        blocked = lb if lv is None else rb
        forced = None
        if lit.positive:
            if lv is None and rv is not None and self._direct(lit.lhs, env):
                forced = (lb, rv)
            elif rv is None and lv is not None and self._direct(lit.rhs, env):
                forced = (rb, lv)
        return None, blocked, forced

    def _direct(self, t: Term, env: Mapping[str, int]) -> bool:
        return isinstance(t, Fn) and all(self.term(a, env)[0] is not None for a in t.args)

    def clause(self, inst: _Instance):
        blocked = None
        forced = None
        unknown = 0
        for lit in inst.clause.literals:
            value, cell, force = self.literal(lit, inst.env)
            if value is True:
                return _SAT, None
            if value is None:
                unknown += 1
                if blocked is None:
                    blocked = cell
                forced = force
        if unknown == 0:
            return _CONFLICT, None
        return blocked, (forced if unknown == 1 else None)

    # assignment with undo trail
    def _set(self, cell: Cell, value, is_pred: bool) -> None:
        (self.preds if is_pred else self.funs)[cell] = value
        self.trail.append(("pred" if is_pred else "fun", cell))

    def _watch(self, cell: Cell, inst: _Instance) -> None:
        self.watch.setdefault(cell, []).append(inst)
        self.trail.append(("watch", cell))

    def undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            kind, cell = self.trail.pop()
            if kind == "fun":
                del self.funs[cell]
            elif kind == "pred":
                del self.preds[cell]
            else:
                self.watch[cell].pop()

    def is_pred_cell(self, cell: Cell) -> bool:
        return cell[0] in self.sig.preds

    def assign(self, cell: Cell, value) -> bool:
        """Assign and propagate; False on conflict (the caller undoes)."""
        queue = [(cell, value)]
        while queue:
            cell, value = queue.pop()
            is_pred = self.is_pred_cell(cell)
            table = self.preds if is_pred else self.funs
            if cell in table:
                if table[cell] != value:
                    return False
                continue
            self._set(cell, value, is_pred)
            for inst in list(self.watch.get(cell, ())):
                status, forced = self.clause(inst)
                if status == _SAT:
                    continue
                if status == _CONFLICT:
                    return False
                if status != cell:
                    self._watch(status, inst)
                if forced is not None:
                    queue.append(forced)
        return True

    def start(self, instances: Sequence[_Instance]) -> bool:
        pending = []
        for inst in instances:
            status, forced = self.clause(inst)
            if status == _CONFLICT:
                return False
            if status != _SAT:
                self._watch(status, inst)
                if forced is not None:
                    pending.append(forced)
        return all(self.assign(c, v) for c, v in pending)

    def values(self, cell: Cell) -> Sequence:
        if self.is_pred_cell(cell):
            return (False, True)
        _, result = self.sig.funs[cell[0]].instantiate(cell[1])
        return range(self.sizes[result])

    def search(self, cells: Sequence[Cell], constants: Sequence[Tuple[Cell, Type]]) -> bool:
        self.nodes += 1
        if self.deadline is not None and self.nodes % 256 == 0 and time.monotonic() > self.deadline:
            raise TimeoutError
        # Constants are decided first, in a fixed order; each may only use one new element.
        for i, (cell, sort) in enumerate(constants):
            if cell in self.funs:
                continue
            used = [self.funs[c] for c, s in constants[:i] if s == sort]
            return self.branch(cell, range(min(self.sizes[sort], max(used) + 2 if used else 1)), cells, constants)
        for cell in cells:
            if cell in self.funs or cell in self.preds or not self.watch.get(cell):
                continue
            return self.branch(cell, self.values(cell), cells, constants)
        return True

    def branch(self, cell: Cell, values: Sequence, cells, constants) -> bool:
        for value in values:
            mark = len(self.trail)
            if self.assign(cell, value) and self.search(cells, constants):
                return True
            self.undo(mark)
        return False


def _symbol_instances(cnf: CNF) -> Tuple[List[SymbolInstance], List[SymbolInstance]]:
    funs: Dict[SymbolInstance, None] = {}
    preds: Dict[SymbolInstance, None] = {}
    for clause in cnf:
        for lit in clause:
            if isinstance(lit, Pred):
                preds.setdefault((lit.sym, lit.ty_args), None)
            for t in literal_terms(lit):
                for s in subterms(t):
                    if isinstance(s, Fn):
                        funs.setdefault((s.sym, s.ty_args), None)
    return list(funs), list(preds)


def _types_needed(cnf: CNF, funs: Sequence[SymbolInstance], preds: Sequence[SymbolInstance]) -> List[Type]:
    sig = cnf.signature
    seen: Dict[Type, None] = {}
    if sig.level is Level.UNTYPED:
        return [IOTA]
    for clause in cnf:
        for v in clause.variables():
            seen.setdefault(v.ty, None)
    for sym, ty_args in funs:
        args, result = sig.funs[sym].instantiate(ty_args)
        for ty in (*args, result):
            seen.setdefault(ty, None)
    for sym, ty_args in preds:
        for ty in sig.preds[sym].instantiate(ty_args):
            seen.setdefault(ty, None)
    return sorted(seen, key=str)


def _size_vectors(k: int, bound: int) -> Iterator[Tuple[int, ...]]:
    if k == 0:
        yield ()
        return
    for total in range(k, bound + 1):
        for cut in itertools.combinations(range(1, total), k - 1):
            bounds = (0,) + cut + (total,)
            yield tuple(bounds[i + 1] - bounds[i] for i in range(k))


def _try_sizes(
    cnf: CNF,
    funs: Sequence[SymbolInstance],
    preds: Sequence[SymbolInstance],
    sizes: Mapping[Type, int],
    deadline: Optional[float],
) -> Optional[FiniteModel]:
    sig = cnf.signature
    search = _Search(cnf, sizes, deadline)
    instances: List[_Instance] = []
    for clause in cnf:
        variables = clause.variables()
        ranges = [range(sizes[v.ty]) for v in variables]
        for values in itertools.product(*ranges):
            instances.append(_Instance(clause, {v.name: x for v, x in zip(variables, values)}))

    cells: List[Cell] = []
    constants: List[Tuple[Cell, Type]] = []
    for sym, ty_args in funs:
        args, result = sig.funs[sym].instantiate(ty_args)
        for point in itertools.product(*(range(sizes[a]) for a in args)):
            cell = (sym, ty_args, point)
            cells.append(cell)
            if not args:
                constants.append((cell, result))
    for sym, ty_args in preds:
        args = sig.preds[sym].instantiate(ty_args)
        cells.extend((sym, ty_args, point) for point in itertools.product(*(range(sizes[a]) for a in args)))
    cells.sort(key=lambda c: (bool(c[2]), max(c[2], default=0), len(c[2])))

    if not search.start(instances) or not search.search(cells, constants):
        return None
    fun_tables: Dict[SymbolInstance, Dict[Tuple[int, ...], int]] = {}
    pred_tables: Dict[SymbolInstance, FrozenSet[Tuple[int, ...]]] = {}
    for sym, ty_args in funs:
        args, _ = sig.funs[sym].instantiate(ty_args)
        fun_tables[(sym, ty_args)] = {
            p: search.funs.get((sym, ty_args, p), 0) for p in itertools.product(*(range(sizes[a]) for a in args))
        }
    for sym, ty_args in preds:
        args = sig.preds[sym].instantiate(ty_args)
        pred_tables[(sym, ty_args)] = frozenset(
            p for p in itertools.product(*(range(sizes[a]) for a in args)) if search.preds.get((sym, ty_args, p), False)
        )
    domains = {ty: tuple(range(n)) for ty, n in sizes.items()}
    return FiniteModel(domains, fun_tables, pred_tables)


def find_model(
    problem: Problem, max_total_size: int, time_limit: Optional[float] = None
) -> Optional[FiniteModel]:
    """A model of ``problem`` whose domains hold at most ``max_total_size`` elements together.

    Returns None when no model exists within the bound, or when ``time_limit``
    seconds pass first.
    """
    if problem.level is not Level.UNTYPED and not is_clausifiable(problem):
        raise LevelMismatch("model search needs a ground-typed problem; monomorphise it first")
    cnf = clausify(problem)
    funs, preds = _symbol_instances(cnf)
    types = _types_needed(cnf, funs, preds)
    deadline = time.monotonic() + time_limit if time_limit else None
    if any(c.is_empty for c in cnf):
        return None
    for vector in _size_vectors(len(types), max_total_size):
        sizes = dict(zip(types, vector))
        logger.debug("Trying domain sizes %s", {str(t): n for t, n in sizes.items()})
        try:
            found = _try_sizes(cnf, funs, preds, sizes, deadline)
        except TimeoutError:
            logger.info("Model search timed out at sizes %s", list(vector))
            return None
        if found is None:
            continue
        model = _restrict(found, problem)
        if not model.satisfies(problem):
            raise InternalError("model search produced a structure that fails the problem")
        logger.info("Found a model with domain sizes %s", {str(t): n for t, n in sizes.items()})
        return model
    return None


def _restrict(model: FiniteModel, problem: Problem) -> FiniteModel:
    """Drop the Skolem tables."""
    funs = {k: v for k, v in model.fun_tables.items() if not k[0].startswith(SKOLEM_PREFIX)}
    return FiniteModel(model.domains, funs, model.pred_tables)
