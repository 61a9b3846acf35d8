"""Derivation transformations: renaming, strengthening, generation-lemma normal
forms, substitution of derivations, and subject reduction.

Every function here returns a fresh derivation tree built with the node
builders of `derivation`, so conclusions are always recomputed from premises.
"""
from __future__ import annotations

import re

from . import derivation as D
from .derivation import Derivation
from .terms import App, Bool, If, Lam, NotARedex, Term, Var, show, subterm_at, is_redex
from .types import Bang, TVar, ftv, subst_type


class ShapeMismatch(Exception):
    pass


# ---------------------------------------------------------------- names

def term_names(t: Term, out: set):
    stack = [t]
    while stack:
        t = stack.pop()
        if isinstance(t, Var):
            out.add(t.name)
        elif isinstance(t, Lam):
            out.add(t.binder)
            stack.append(t.body)
        elif isinstance(t, App):
            stack += [t.fun, t.arg]
        elif isinstance(t, If):
            stack += [t.test, t.then0, t.else1]
    return out


def derivation_names(d: Derivation) -> set:
    out = set()
    for _, n in d.nodes():
        out |= n.ctx.keys()
        if n.rule in ("Ax", "LollyI"):
            term_names(n.term, out)
        if n.rule == "w":
            out.add(n.payload["var"])
        if n.rule == "m":
            out |= set(n.payload["vars"])
            out.add(n.payload["target"])
    return out


def derivation_tvars(d: Derivation) -> set:
    from .types import all_tvars
    out = set()
    for _, n in d.nodes():
        for t in n.ctx.values():
            out |= all_tvars(t)
        out |= all_tvars(n.type)
        if "type" in n.payload:
            out |= all_tvars(n.payload["type"])
    return out


_SUFFIX = re.compile(r"#(\d+)$")


class NameSupply:
    """Fresh names guaranteed not to clash with anything seen so far."""

    def __init__(self, *derivations, names=()):
        n = 0
        seen = set(names)
        for d in derivations:
            seen |= derivation_names(d)
            seen |= derivation_tvars(d)
        for x in seen:
            m = _SUFFIX.search(x)
            if m:
                n = max(n, int(m.group(1)))
        self.n = n
        self.seen = seen

    def __call__(self, x: str) -> str:
        base = x.split("#", 1)[0]
        while True:
            self.n += 1
            name = f"{base}#{self.n}"
            if name not in self.seen:
                self.seen.add(name)
                return name


def rename_term_all(t: Term, mapping: dict) -> Term:
    """Rename every occurrence (free or bound) of the mapped names."""
    if not mapping:
        return t
    if isinstance(t, Var):
        return Var(mapping.get(t.name, t.name)) if t.name in mapping else t
    if isinstance(t, Bool):
        return t
    if isinstance(t, Lam):
        return Lam(mapping.get(t.binder, t.binder), rename_term_all(t.body, mapping))
    if isinstance(t, App):
        return App(rename_term_all(t.fun, mapping), rename_term_all(t.arg, mapping))
    return If(rename_term_all(t.test, mapping), rename_term_all(t.then0, mapping),
              rename_term_all(t.else1, mapping))


def remake(d: Derivation, premises, ty=lambda t: t, names=None) -> Derivation:
    """Rebuild node d over new premises, mapping payload/axiom types with ty and names with names."""
    nm = (lambda x: names.get(x, x)) if names else (lambda x: x)
    r = d.rule
    if r == "Ax":
        x = d.term.name
        return D.ax(nm(x), ty(d.ctx[x]))
    if r in ("B0I", "B1I"):
        return D.bool_intro(d.term.bit)
    p = premises
    if r == "w":
        return D.weak(p[0], nm(d.payload["var"]), ty(d.payload["type"]))
    if r == "LollyI":
        return D.lolly_i(p[0], nm(d.term.binder))
    if r == "LollyE":
        return D.lolly_e(p[0], p[1])
    if r == "m":
        return D.mux(p[0], [nm(x) for x in d.payload["vars"]], nm(d.payload["target"]))
    if r == "sp":
        return D.sp(p[0])
    if r == "ForallI":
        return D.forall_i(p[0], d.type.var)
    if r == "ForallE":
        return D.forall_e(p[0], ty(d.payload["type"]))
    return D.bool_e(*p)


def rename_names(d: Derivation, mapping: dict) -> Derivation:
    """Consistently rename term variables everywhere in d (new names must be unused)."""
    if not mapping:
        return d
    return remake(d, [rename_names(p, mapping) for p in d.premises], names=mapping)


def freshen(d: Derivation, supply: NameSupply, keep=()) -> Derivation:
    """Rename every name that is not in the root context (or keep) to a fresh one."""
    keep = set(keep) | d.ctx.keys()
    mapping = {x: supply(x) for x in sorted(derivation_names(d) - keep)}
    return rename_names(d, mapping)


def tsubst(d: Derivation, a: str, s, supply: NameSupply) -> Derivation:
    """Substitute the free type variable a by s throughout d."""
    if d.rule == "ForallI":
        v = d.type.var
        if v == a:
            return d
        p = d.premises[0]
        if v in ftv(s):
            v2 = supply(v)
            p = tsubst(p, v, TVar(v2), supply)
            return D.forall_i(tsubst(p, a, s, supply), v2)
        return D.forall_i(tsubst(p, a, s, supply), v)
    ps = [tsubst(p, a, s, supply) for p in d.premises]
    return remake(d, ps, ty=lambda t: subst_type(t, a, s))


# ---------------------------------------------------------------- strengthening

def strengthen(d: Derivation, x: str) -> Derivation:
    """Remove the unused assumption x (x must not be free in the subject)."""
    if x not in d.ctx:
        return d
    if x in d.term.fv:
        raise ValueError(f"cannot drop {x}: it is free in {show(d.term)}")
    r = d.rule
    if r == "w" and d.payload["var"] == x:
        return d.premises[0]
    if r == "m" and d.payload["target"] == x:
        p = d.premises[0]
        for c in d.payload["vars"]:
            p = strengthen(p, c)
        return p
    if r in ("LollyE",):
        ps = [strengthen(p, x) if x in p.ctx else p for p in d.premises]
        return remake(d, ps)
    ps = [strengthen(p, x) for p in d.premises]
    return remake(d, ps)


def strengthen_to(d: Derivation, keep) -> Derivation:
    for x in sorted(d.ctx.keys() - set(keep)):
        d = strengthen(d, x)
    return d


# ---------------------------------------------------------------- generation lemma

def promoted_core(d: Derivation) -> Derivation:
    """For d concluding a banged type, an (sp)-ended derivation of the same subject
    whose context is exactly the free variables of the subject.

    The original derivation is recovered from the result by weakenings only.
    """
    if not isinstance(d.type, Bang):
        raise ShapeMismatch(f"expected a banged type, got {d.type}")
    d = strengthen_to(d, d.term.fv)
    if d.rule == "sp":
        return d
    if d.rule == "m":
        y = d.payload["target"]
        core = promoted_core(d.premises[0])
        q = core.premises[0]
        free = [c for c in d.payload["vars"] if c in q.ctx]
        q = D.mux(q, free, y)
        return D.sp(q)
    raise ShapeMismatch(f"derivation of a banged type ends with {d.rule}")


def lambda_normal(d: Derivation, supply: NameSupply) -> Derivation:
    """For a derivation of an abstraction at an arrow type, an equivalent one ending with LollyI."""
    r = d.rule
    if r == "LollyI":
        return d
    if r in ("w", "m"):
        core = lambda_normal(d.premises[0], supply)
        q = core.premises[0]
        b = core.term.binder
        clash = d.payload["var"] if r == "w" else d.payload["target"]
        if clash == b:
            b2 = supply(b)
            q = rename_names(q, {b: b2})
            b = b2
        inner = remake(d, [q])
        return D.lolly_i(inner, b)
    if r == "ForallE":
        core = forall_normal(d.premises[0], supply)
        q = tsubst(core.premises[0], core.type.var, d.payload["type"], supply)
        return lambda_normal(q, supply)
    raise ShapeMismatch(f"abstraction derivation ends with {r}")


def forall_normal(d: Derivation, supply: NameSupply) -> Derivation:
    """For a derivation of an abstraction at a quantified type, one ending with ForallI."""
    r = d.rule
    if r == "ForallI":
        return d
    if r in ("w", "m"):
        core = forall_normal(d.premises[0], supply)
        v = core.type.var
        q = core.premises[0]
        if r == "w" and v in ftv(d.payload["type"]):
            v2 = supply(v)
            q = tsubst(q, v, TVar(v2), supply)
            v = v2
        return D.forall_i(remake(d, [q]), v)
    if r == "ForallE":
        core = forall_normal(d.premises[0], supply)
        q = tsubst(core.premises[0], core.type.var, d.payload["type"], supply)
        return forall_normal(q, supply)
    raise ShapeMismatch(f"abstraction derivation at a quantified type ends with {r}")


# ---------------------------------------------------------------- substitution

def subst_derivation(main: Derivation, x: str, arg: Derivation, supply: NameSupply | None = None) -> Derivation:
    """From main : G, x:mu |- M : s and arg : Delta |- N : mu build G, Delta |- M[N/x] : s."""
    if x not in main.ctx:
        raise ValueError(f"{x} is not in the context of the main derivation")
    clash = (main.ctx.keys() - {x}) & arg.ctx.keys()
    if clash:
        raise ValueError(f"contexts are not disjoint: {sorted(clash)}")
    from .types import type_eq
    if not type_eq(main.ctx[x], arg.type):
        raise ShapeMismatch(f"argument type {arg.type} does not match assumption {x}:{main.ctx[x]}")
    if supply is None:
        supply = NameSupply(main, arg)
    main = freshen(main, supply)
    arg = freshen(arg, supply)
    return _sub(main, x, arg, supply)


def _weaken_all(d, ctx, supply):
    for y in sorted(ctx):
        if y not in d.ctx:
            d = D.weaken(d, y, ctx[y], supply)
    return d


def _copy(arg: Derivation, supply: NameSupply):
    """A copy of arg with its context renamed apart; returns (copy, renaming of the context)."""
    ren = {y: supply(y) for y in sorted(arg.ctx)}
    inner = derivation_names(arg) - arg.ctx.keys()
    ren.update({y: supply(y) for y in sorted(inner)})
    c = rename_names(arg, ren)
    return c, {y: ren[y] for y in arg.ctx}


def _sub(P: Derivation, x: str, S: Derivation, supply) -> Derivation:
    r = P.rule
    if r == "Ax":
        return S
    if r == "w":
        if P.payload["var"] == x:
            return _weaken_all(P.premises[0], S.ctx, supply)
        return remake(P, [_sub(P.premises[0], x, S, supply)])
    if r in ("LollyI", "ForallE"):
        return remake(P, [_sub(P.premises[0], x, S, supply)])
    if r == "LollyE":
        f, a = P.premises
        if x in f.ctx:
            return D.lolly_e(_sub(f, x, S, supply), a)
        return D.lolly_e(f, _sub(a, x, S, supply))
    if r == "BE":
        return D.bool_e(*(_sub(p, x, S, supply) for p in P.premises))
    if r == "ForallI":
        v = P.type.var
        p = P.premises[0]
        bad = set()
        for t in S.ctx.values():
            bad |= ftv(t)
        if v in bad:
            v2 = supply(v)
            p = tsubst(p, v, TVar(v2), supply)
            v = v2
        return D.forall_i(_sub(p, x, S, supply), v)
    if r == "sp":
        core = promoted_core(S)
        inner = core.premises[0]
        body = _sub(P.premises[0], x, inner, supply)
        return _weaken_all(D.sp(body), S.ctx, supply)
    # (m)
    if P.payload["target"] != x:
        return remake(P, [_sub(P.premises[0], x, S, supply)])
    core = promoted_core(S)
    inner = core.premises[0]
    body = P.premises[0]
    copies = {y: [] for y in inner.ctx}
    for xi in P.payload["vars"]:
        ci, ren = _copy(inner, supply)
        body = _sub(body, xi, ci, supply)
        for y in inner.ctx:
            copies[y].append(ren[y])
    for y in sorted(copies):
        body = D.mux(body, copies[y], y)
    return _weaken_all(body, S.ctx, supply)


# ---------------------------------------------------------------- subject reduction

_CHILD = {"LollyE": {"fun": 0, "arg": 1}, "LollyI": {"body": 0}, "BE": {"test": 0, "then": 1, "else": 2}}


def subject_reduce(d: Derivation, at=(), supply: NameSupply | None = None) -> Derivation:
    """A derivation of the reduct of d's subject at the given redex position."""
    at = tuple(at)
    if not is_redex(subterm_at(d.term, at)):
        raise NotARedex(f"no redex at {at} in {show(d.term)}")
    if supply is None:
        supply = NameSupply(d)
    return _reduce(d, at, supply)


def _reduce(d, at, supply):
    r = d.rule
    if r in ("w", "m", "sp", "ForallI", "ForallE"):
        return remake(d, [_reduce(d.premises[0], at, supply)])
    if not at:
        if r == "LollyE":
            f, a = d.premises
            lam = lambda_normal(f, supply)
            q, b = lam.premises[0], lam.term.binder
            if b in a.ctx:
                b2 = supply(b)
                q = rename_names(q, {b: b2})
                b = b2
            return subst_derivation(q, b, a, supply)
        if r == "BE":
            bit = d.term.test.bit
            return d.premises[1 + bit]
        raise NotARedex(f"node {r} does not conclude a redex")
    sel, rest = at[0], at[1:]
    idx = _CHILD.get(r, {}).get(sel)
    if idx is None:
        raise NotARedex(f"selector {sel} does not match rule {r}")
    ps = list(d.premises)
    ps[idx] = _reduce(ps[idx], rest, supply)
    return remake(d, ps)
