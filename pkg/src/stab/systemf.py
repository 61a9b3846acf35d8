"""Forgetful translation into System F and a checker for step-by-step simulation.

F types reuse the type constructors without bangs or the ground type; F terms
are pure lambda terms (no constants, no conditionals).
"""
from __future__ import annotations

from collections import deque

from .terms import (App, Bool, DEFAULT_FUEL, If, Lam, Term, Var, alpha_eq, apps, normalize,
                    redexes, step, subterm_at)
from .types import Arrow, Bang, Forall, TBool, TVar, Type

CHURCH_TRUE = Lam("a", Lam("b", Var("a")))
CHURCH_FALSE = Lam("a", Lam("b", Var("b")))


class SimulationFailure(Exception):
    pass


def church_bool_type(var="a") -> Type:
    return Forall(var, Arrow(TVar(var), Arrow(TVar(var), TVar(var))))


def translate_type(t: Type) -> Type:
    if isinstance(t, TBool):
        return church_bool_type()
    if isinstance(t, TVar):
        return t
    if isinstance(t, Bang):
        return translate_type(t.inner)
    if isinstance(t, Arrow):
        return Arrow(translate_type(t.dom), translate_type(t.cod))
    return Forall(t.var, translate_type(t.body))


def translate_term(t: Term) -> Term:
    if isinstance(t, Var):
        return t
    if isinstance(t, Bool):
        return CHURCH_TRUE if t.bit == 0 else CHURCH_FALSE
    if isinstance(t, Lam):
        return Lam(t.binder, translate_term(t.body))
    if isinstance(t, App):
        return App(translate_term(t.fun), translate_term(t.arg))
    return apps(translate_term(t.test), translate_term(t.then0), translate_term(t.else1))


def is_pure(t: Term) -> bool:
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, (Bool, If)):
            return False
        if isinstance(u, Lam):
            stack.append(u.body)
        elif isinstance(u, App):
            stack += [u.fun, u.arg]
    return True


def translate_position(t: Term, at) -> tuple:
    """The position in translate_term(t) of the subterm at `at` in t."""
    out = []
    for sel in at:
        if sel == "test":
            out += ["fun", "fun"]
        elif sel == "then":
            out += ["fun", "arg"]
        elif sel == "else":
            out += ["arg"]
        else:
            out.append(sel)
    return tuple(out)


def f_normalize(t: Term, fuel: int = DEFAULT_FUEL) -> Term:
    if not is_pure(t):
        raise ValueError("not a pure lambda term")
    return normalize(t, fuel)


def check_simulation(t: Term, at=(), fuel: int = 4) -> int:
    """Number k of beta steps taking the translation of t to the translation of its reduct."""
    at = tuple(at)
    target = translate_term(step(t, at))
    u = translate_term(t)
    p = translate_position(t, at)
    r = subterm_at(t, at)
    try:
        if isinstance(r, App):
            v = step(u, p)
            if alpha_eq(v, target):
                return 1
        else:
            v = step(step(u, p + ("fun",)), p)
            if alpha_eq(v, target):
                return 2
    except Exception:
        pass
    # fall back to a breadth-first search over all reduction paths
    seen = deque([(u, 0)])
    while seen:
        v, k = seen.popleft()
        if k and alpha_eq(v, target):
            return k
        if k < fuel:
            for q in redexes(v):
                seen.append((step(v, q), k + 1))
    raise SimulationFailure(f"no reduction of length <= {fuel} reaches the translated reduct")
