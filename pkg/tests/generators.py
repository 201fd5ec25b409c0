"""Seeded generator of small well-typed polymorphic problems over lists and naturals."""

import random
from typing import List, Optional, Tuple

from polyenc.logic import (
    Eq,
    Exists,
    Fn,
    Formula,
    FunDecl,
    Level,
    NamedFormula,
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
    forall,
    forall_types,
)

A = TyVar("A")
W = TyApp("w")
NAT = TyApp("nat")


def list_of(ty: Type) -> Type:
    return TyApp("list", (ty,))


SIGNATURE = Signature(
    Level.POLYMORPHIC,
    {"w": 0, "nat": 0, "list": 1},
    {
        "nil": FunDecl(("A",), (), list_of(A)),
        "cons": FunDecl(("A",), (A, list_of(A)), list_of(A)),
        "hd": FunDecl(("A",), (list_of(A),), A),
        "zero": FunDecl((), (), NAT),
        "suc": FunDecl((), (NAT,), NAT),
        "c": FunDecl((), (), W),
    },
    {
        "mem": PredDecl(("A",), (A, list_of(A))),
        "even": PredDecl((), (NAT,)),
    },
)

GROUND = [W, NAT, list_of(NAT)]


class _Gen:
    def __init__(self, rng: random.Random, variables: List[Var]) -> None:
        self.rng = rng
        self.variables = variables

    def term(self, ty: Type, depth: int) -> Term:
        matching = [v for v in self.variables if v.ty == ty]
        if matching and (depth == 0 or self.rng.random() < 0.4):
            return self.rng.choice(matching)
        if isinstance(ty, TyApp) and ty.ctor == "list":
            elem = ty.args[0]
            if depth == 0 or self.rng.random() < 0.3:
                return Fn("nil", (elem,), ())
            return Fn("cons", (elem,), (self.term(elem, depth - 1), self.term(ty, depth - 1)))
        if depth > 0 and self.rng.random() < 0.3:
            return Fn("hd", (ty,), (self.term(list_of(ty), depth - 1),))
        if ty == NAT:
            if depth == 0 or self.rng.random() < 0.5:
                return Fn("zero")
            return Fn("suc", (), (self.term(NAT, depth - 1),))
        if ty == W:
            return Fn("c")
        return Fn("hd", (ty,), (Fn("nil", (ty,), ()),))

    def literal(self, elem: Type) -> Formula:
        positive = self.rng.random() < 0.6
        roll = self.rng.random()
        if roll < 0.5:
            ty = self.rng.choice([elem, list_of(elem), NAT])
            return Eq(self.term(ty, 2), self.term(ty, 2), positive)
        if roll < 0.8:
            return Pred("mem", (elem,), (self.term(elem, 1), self.term(list_of(elem), 2)), positive)
        return Pred("even", (), (self.term(NAT, 2),), positive)


def random_formula(rng: random.Random, name: str, polymorphic: bool) -> NamedFormula:
    elem = A if polymorphic else rng.choice(GROUND)
    existential = rng.random() < 0.3
    x = Var("X", elem, VarKind.EXISTENTIAL if existential else VarKind.UNIVERSAL)
    xs = Var("Xs", list_of(elem))
    n = Var("N", NAT)
    gen = _Gen(rng, [x, xs, n])
    lits = [gen.literal(elem) for _ in range(rng.randint(1, 3))]
    body = disj(*lits) if rng.random() < 0.7 else conj(*lits)
    body = forall([xs, n], body)
    if existential:
        body = Exists(x, body)
    else:
        body = forall([x], body)
    if polymorphic:
        body = forall_types(["A"], body)
    return NamedFormula(name, body)


def random_problem(seed: int, size: Optional[int] = None) -> Problem:
    rng = random.Random(seed)
    size = size or rng.randint(2, 5)
    formulas = []
    for i in range(size):
        # keep at least one ground formula so monomorphisation has seeds
        polymorphic = i > 0 and rng.random() < 0.6
        formulas.append(random_formula(rng, f"f{i}", polymorphic))
    return Problem(SIGNATURE, tuple(formulas), (list_of(A),))


def corpus(count: int, start: int = 0) -> List[Tuple[int, Problem]]:
    return [(seed, random_problem(seed)) for seed in range(start, start + count)]
