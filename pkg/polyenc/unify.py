"""Syntactic unification and matching, for types and for first-order terms."""

from __future__ import annotations

from typing import Callable, Dict, Iterable, Mapping, Optional, Set, Tuple

from polyenc.logic import Fn, Term, TyApp, TyVar, Type, Var, subst_type, type_vars

# --- types -------------------------------------------------------------------


def _walk(ty: Type, rho: Mapping[str, Type]) -> Type:
    while isinstance(ty, TyVar) and ty.name in rho:
        ty = rho[ty.name]
    return ty


def _occurs(name: str, ty: Type, rho: Mapping[str, Type]) -> bool:
    ty = _walk(ty, rho)
    if isinstance(ty, TyVar):
        return ty.name == name
    return any(_occurs(name, a, rho) for a in ty.args)


def resolve_type(ty: Type, rho: Mapping[str, Type]) -> Type:
    ty = _walk(ty, rho)
    if isinstance(ty, TyVar) or not ty.args:
        return ty
    return TyApp(ty.ctor, tuple(resolve_type(a, rho) for a in ty.args))


def unify_types(s: Type, t: Type, rho: Optional[Dict[str, Type]] = None) -> Optional[Dict[str, Type]]:
    """Most general unifier of ``s`` and ``t`` extending ``rho``, fully resolved."""
    rho = dict(rho or {})
    stack = [(s, t)]
    while stack:
        a, b = stack.pop()
        a, b = _walk(a, rho), _walk(b, rho)
        if a == b:
            continue
        if isinstance(a, TyVar):
            if _occurs(a.name, b, rho):
                return None
            rho[a.name] = b
        elif isinstance(b, TyVar):
            if _occurs(b.name, a, rho):
                return None
            rho[b.name] = a
        else:
            if a.ctor != b.ctor or len(a.args) != len(b.args):
                return None
            stack.extend(zip(a.args, b.args))
    return {k: resolve_type(v, rho) for k, v in rho.items()}


def match_type(pattern: Type, target: Type, rho: Optional[Dict[str, Type]] = None) -> Optional[Dict[str, Type]]:
    """One-sided matching: find rho with pattern·rho == target. Target variables are rigid."""
    rho = dict(rho or {})
    stack = [(pattern, target)]
    while stack:
        p, t = stack.pop()
        if isinstance(p, TyVar):
            bound = rho.get(p.name)
            if bound is None:
                rho[p.name] = t
            elif bound != t:
                return None
        elif isinstance(t, TyVar) or p.ctor != t.ctor or len(p.args) != len(t.args):
            return None
        else:
            stack.extend(zip(p.args, t.args))
    return rho


def rename_apart(ty: Type, avoid: Iterable[str], suffix: str = "'") -> Tuple[Type, Dict[str, Type]]:
    avoid = set(avoid)
    mapping: Dict[str, Type] = {}
    for name in type_vars(ty):
        fresh = name
        while fresh in avoid:
            fresh += suffix
        avoid.add(fresh)
        mapping[name] = TyVar(fresh)
    return subst_type(ty, mapping), mapping


def mgi(sigma: Type, tau: Type) -> Optional[Type]:
    """Most general common instance; the type variables of the two sides are independent."""
    tau2, _ = rename_apart(tau, type_vars(sigma))
    rho = unify_types(sigma, tau2)
    if rho is None:
        return None
    return subst_type(sigma, rho)


def unifiable(sigma: Type, tau: Type) -> bool:
    return mgi(sigma, tau) is not None


def is_instance(sigma: Type, tau: Type) -> bool:
    """sigma ≤ tau: sigma is an instance of tau."""
    return match_type(tau, sigma) is not None


def equivalent(sigma: Type, tau: Type) -> bool:
    return is_instance(sigma, tau) and is_instance(tau, sigma)


def fresh_type_vars(ty: Type, avoid: Set[str], prefix: str = "B") -> Type:
    mapping: Dict[str, Type] = {}
    for name in type_vars(ty):
        i = 0
        while f"{prefix}{i}" in avoid:
            i += 1
        fresh = f"{prefix}{i}"
        avoid.add(fresh)
        mapping[name] = TyVar(fresh)
    return subst_type(ty, mapping)


def normalize_type_vars(ty: Type, names: str = "ABCDEFGHIJKLMNOPQRSTUVWXYZ") -> Type:
    """Rename variables to A, B, ... in order of occurrence."""
    mapping = {}
    for i, v in enumerate(type_vars(ty)):
        mapping[v] = TyVar(names[i] if i < len(names) else f"A{i}")
    return subst_type(ty, mapping)


# --- terms -------------------------------------------------------------------

TermSubst = Dict[str, Term]
SortOf = Callable[[Term], Type]


def walk_term(t: Term, theta: Mapping[str, Term]) -> Term:
    while isinstance(t, Var) and t.name in theta:
        t = theta[t.name]
    return t


def apply_term_subst(t: Term, theta: Mapping[str, Term]) -> Term:
    t = walk_term(t, theta)
    if isinstance(t, Var) or not t.args:
        return t
    return Fn(t.sym, t.ty_args, tuple(apply_term_subst(a, theta) for a in t.args))


def _occurs_term(name: str, t: Term, theta: Mapping[str, Term]) -> bool:
    t = walk_term(t, theta)
    if isinstance(t, Var):
        return t.name == name
    return any(_occurs_term(name, a, theta) for a in t.args)


def unify_terms(
    s: Term, t: Term, theta: Optional[TermSubst] = None, sort_of: Optional[SortOf] = None
) -> Optional[TermSubst]:
    """Sorted syntactic unification. Function identity is the symbol plus its type arguments."""
    theta = dict(theta or {})
    stack = [(s, t)]
    while stack:
        a, b = stack.pop()
        a, b = walk_term(a, theta), walk_term(b, theta)
        if a is b or a == b:
            continue
        if isinstance(a, Var) or isinstance(b, Var):
            if not isinstance(a, Var):
                a, b = b, a
            if sort_of is not None and sort_of(a) != sort_of(b):
                return None
            if _occurs_term(a.name, b, theta):
                return None
            theta[a.name] = b
            continue
        if a.sym != b.sym or a.ty_args != b.ty_args or len(a.args) != len(b.args):
            return None
        stack.extend(zip(a.args, b.args))
    return theta


def match_terms(pattern: Term, target: Term, theta: Optional[TermSubst] = None) -> Optional[TermSubst]:
    """One-sided term matching; variables of ``target`` are treated as constants."""
    theta = dict(theta or {})
    stack = [(pattern, target)]
    while stack:
        p, t = stack.pop()
        if isinstance(p, Var):
            bound = theta.get(p.name)
            if bound is None:
                if p.ty != _static_sort(t, p.ty):
                    return None
                theta[p.name] = t
            elif bound != t:
                return None
            continue
        if isinstance(t, Var) or p.sym != t.sym or p.ty_args != t.ty_args or len(p.args) != len(t.args):
            return None
        stack.extend(zip(p.args, t.args))
    return theta


def _static_sort(t: Term, default: Type) -> Type:
    # Matching only checks sorts when both sides are variables; function
    # terms reached through a well-sorted pattern position already agree.
    return t.ty if isinstance(t, Var) else default
