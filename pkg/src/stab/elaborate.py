"""Building derivations from lightly annotated terms.

The type system is not syntax directed, so derivations are constructed
rather than inferred.  This module does the routine part of that
construction: given a term with enough annotations (binder types where the
expected type does not determine them, ascriptions on non-variable heads)
and a target type, it produces an explicit derivation.

The placement decisions are fixed:
  * (sp) is used exactly where the expected type is banged;
  * a banged variable with k >= 2 sliced occurrences is split into k copies
    by one (m) node at the top of the first linear judgement in its scope;
    the parts of a conditional share copies, so k is the sliced count;
  * a banged variable used once at a linear position is derelicted by a
    chain of one-copy (m) nodes;
  * instances of quantifiers are found by first-order unification.

Annotated text syntax extends the term grammar with `\\x:T. M`,
`\\(x:T) (y:U). M` and ascriptions `(M : T)`.  Types in annotations may use
names from an alias table (for instance N1 for the numeral type).
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import derivation as D
from .derivation import Derivation
from .terms import App, Bool, If, Lam, Term, Var
from .types import (B, Arrow, Bang, Forall, TBool, TMeta, TVar, Type, ftv, is_linear,
                    parse_type, show_type, subst_type, unbang)


class ElabError(Exception):
    pass


# ---------------------------------------------------------------- annotated terms

@dataclass(frozen=True, eq=False)
class ETerm:
    fv: frozenset = field(init=False, repr=False)


@dataclass(frozen=True, eq=False)
class EVar(ETerm):
    name: str

    def __post_init__(self):
        object.__setattr__(self, "fv", frozenset((self.name,)))


@dataclass(frozen=True, eq=False)
class EBool(ETerm):
    bit: int

    def __post_init__(self):
        object.__setattr__(self, "fv", frozenset())


@dataclass(frozen=True, eq=False)
class ELam(ETerm):
    binder: str
    ann: Type | None
    body: ETerm

    def __post_init__(self):
        object.__setattr__(self, "fv", self.body.fv - {self.binder})


@dataclass(frozen=True, eq=False)
class EApp(ETerm):
    fun: ETerm
    arg: ETerm

    def __post_init__(self):
        object.__setattr__(self, "fv", self.fun.fv | self.arg.fv)


@dataclass(frozen=True, eq=False)
class EIf(ETerm):
    test: ETerm
    then0: ETerm
    else1: ETerm

    def __post_init__(self):
        object.__setattr__(self, "fv", self.test.fv | self.then0.fv | self.else1.fv)


@dataclass(frozen=True, eq=False)
class EAnn(ETerm):
    term: ETerm
    type: Type

    def __post_init__(self):
        object.__setattr__(self, "fv", self.term.fv)


def from_term(t: Term) -> ETerm:
    if isinstance(t, Var):
        return EVar(t.name)
    if isinstance(t, Bool):
        return EBool(t.bit)
    if isinstance(t, Lam):
        return ELam(t.binder, None, from_term(t.body))
    if isinstance(t, App):
        return EApp(from_term(t.fun), from_term(t.arg))
    return EIf(from_term(t.test), from_term(t.then0), from_term(t.else1))


def erase(e: ETerm) -> Term:
    if isinstance(e, EVar):
        return Var(e.name)
    if isinstance(e, EBool):
        return Bool(e.bit)
    if isinstance(e, ELam):
        return Lam(e.binder, erase(e.body))
    if isinstance(e, EApp):
        return App(erase(e.fun), erase(e.arg))
    if isinstance(e, EIf):
        return If(erase(e.test), erase(e.then0), erase(e.else1))
    return erase(e.term)


def eapps(h, *args):
    for a in args:
        h = EApp(h, a)
    return h


def e_rename(e: ETerm, old: str, new: str) -> ETerm:
    """Rename free occurrences of old to new; new must not be bound in e."""
    if old not in e.fv:
        return e
    if isinstance(e, EVar):
        return EVar(new)
    if isinstance(e, ELam):
        return ELam(e.binder, e.ann, e_rename(e.body, old, new))
    if isinstance(e, EApp):
        return EApp(e_rename(e.fun, old, new), e_rename(e.arg, old, new))
    if isinstance(e, EIf):
        return EIf(e_rename(e.test, old, new), e_rename(e.then0, old, new), e_rename(e.else1, old, new))
    return EAnn(e_rename(e.term, old, new), e.type)


def e_sliced(x: str, e: ETerm) -> int:
    if x not in e.fv:
        return 0
    if isinstance(e, EVar):
        return 1
    if isinstance(e, ELam):
        return e_sliced(x, e.body)
    if isinstance(e, EApp):
        return e_sliced(x, e.fun) + e_sliced(x, e.arg)
    if isinstance(e, EIf):
        return max(e_sliced(x, e.test), e_sliced(x, e.then0), e_sliced(x, e.else1))
    return e_sliced(x, e.term)


def _split(e: ETerm, x: str, copies, start: int):
    """Give each sliced occurrence of x its own copy; conditional parts share indices."""
    if x not in e.fv:
        return e, 0
    if isinstance(e, EVar):
        return EVar(copies[start]), 1
    if isinstance(e, ELam):
        b, k = _split(e.body, x, copies, start)
        return ELam(e.binder, e.ann, b), k
    if isinstance(e, EApp):
        f, k1 = _split(e.fun, x, copies, start)
        a, k2 = _split(e.arg, x, copies, start + k1)
        return EApp(f, a), k1 + k2
    if isinstance(e, EIf):
        parts = [_split(p, x, copies, start) for p in (e.test, e.then0, e.else1)]
        return EIf(*(p for p, _ in parts)), max(k for _, k in parts)
    t, k = _split(e.term, x, copies, start)
    return EAnn(t, e.type), k


# ---------------------------------------------------------------- annotated parser

class _EParser:
    def __init__(self, text, aliases):
        self.s = text
        self.i = 0
        self.aliases = aliases or {}

    def err(self, msg):
        from .terms import ParseError
        raise ParseError(msg, self.i, self.s)

    def ws(self):
        s = self.s
        while self.i < len(s):
            if s[self.i].isspace():
                self.i += 1
            elif s.startswith("--", self.i):
                nl = s.find("\n", self.i)
                self.i = len(s) if nl < 0 else nl
            else:
                break

    def peek(self):
        self.ws()
        return self.s[self.i] if self.i < len(self.s) else ""

    def ident(self):
        self.ws()
        j = self.i
        s = self.s
        if j < len(s) and (s[j].isalpha() or s[j] == "_"):
            j += 1
            while j < len(s) and (s[j].isalnum() or s[j] in "_'#"):
                j += 1
            name = s[self.i:j]
            self.i = j
            return name
        self.err("expected an identifier")

    def peek_word(self):
        self.ws()
        s = self.s
        j = self.i
        while j < len(s) and (s[j].isalnum() or s[j] in "_'#"):
            j += 1
        return s[self.i:j]

    def expect(self, c):
        if self.peek() != c:
            self.err(f"expected {c!r}")
        self.i += 1

    def type_until(self, stops):
        """Read raw type text up to a stop character at parenthesis depth 0."""
        self.ws()
        depth = 0
        j = self.i
        s = self.s
        while j < len(s):
            c = s[j]
            if depth == 0 and c in stops:
                break
            if c == "(":
                depth += 1
            elif c == ")":
                depth -= 1
            j += 1
        text = s[self.i:j]
        self.i = j
        return resolve_aliases(parse_type(text), self.aliases)

    def term(self):
        c = self.peek()
        if c in ("\\", "λ"):
            return self.lam()
        if self.peek_word() == "if":
            return self.ite()
        return self.app()

    def lam(self):
        self.i += 1
        binders = []
        while True:
            c = self.peek()
            if c == "(":
                self.i += 1
                x = self.ident()
                self.expect(":")
                binders.append((x, self.type_until(")")))
                self.expect(")")
            elif c == ".":
                break
            else:
                x = self.ident()
                if self.peek() == ":":
                    self.i += 1
                    binders.append((x, self.type_until(".")))
                    break
                binders.append((x, None))
        self.expect(".")
        body = self.term()
        for x, t in reversed(binders):
            body = ELam(x, t, body)
        return body

    def ite(self):
        self.ident()
        a = self.term()
        if self.ident() != "then":
            self.err("expected 'then'")
        b = self.term()
        if self.ident() != "else":
            self.err("expected 'else'")
        c = self.term()
        return EIf(a, b, c)

    def app(self):
        t = self.atom()
        while True:
            c = self.peek()
            w = self.peek_word()
            if c in ("\\", "λ") or w == "if":
                return EApp(t, self.term())
            if c == "(" or (c and (c.isalnum() or c == "_") and w not in ("then", "else")):
                t = EApp(t, self.atom())
            else:
                return t

    def atom(self):
        c = self.peek()
        if c == "(":
            self.i += 1
            t = self.term()
            if self.peek() == ":":
                self.i += 1
                ty = self.type_until(")")
                t = EAnn(t, ty)
            self.expect(")")
            return t
        if c in ("0", "1"):
            self.i += 1
            return EBool(int(c))
        if c and (c.isalpha() or c == "_"):
            return EVar(self.ident())
        self.err("expected a term")


def resolve_aliases(t: Type, aliases) -> Type:
    if not aliases:
        return t
    if isinstance(t, TVar):
        return aliases.get(t.name, t)
    if isinstance(t, Arrow):
        return Arrow(resolve_aliases(t.dom, aliases), resolve_aliases(t.cod, aliases))
    if isinstance(t, Bang):
        return Bang(resolve_aliases(t.inner, aliases))
    if isinstance(t, Forall):
        inner = {k: v for k, v in aliases.items() if k != t.var}
        return Forall(t.var, resolve_aliases(t.body, inner))
    return t


def parse_eterm(text: str, aliases=None) -> ETerm:
    p = _EParser(text, aliases)
    t = p.term()
    p.ws()
    if p.i != len(p.s):
        p.err("unexpected trailing input")
    return t


# ---------------------------------------------------------------- unification

class _Unifier:
    def __init__(self):
        self.sol = {}
        self.n = 0
        self.skolems = 0

    def meta(self):
        self.n += 1
        return TMeta(self.n)

    def head(self, t):
        while isinstance(t, TMeta) and t.id in self.sol:
            t = self.sol[t.id]
        return t

    def zonk(self, t):
        t = self.head(t)
        if isinstance(t, Arrow):
            return Arrow(self.zonk(t.dom), self.zonk(t.cod))
        if isinstance(t, Forall):
            return Forall(t.var, self.zonk(t.body))
        if isinstance(t, Bang):
            return Bang(self.zonk(t.inner))
        return t

    def occurs(self, i, t):
        t = self.head(t)
        if isinstance(t, TMeta):
            return t.id == i
        if isinstance(t, Arrow):
            return self.occurs(i, t.dom) or self.occurs(i, t.cod)
        if isinstance(t, Forall):
            return self.occurs(i, t.body)
        if isinstance(t, Bang):
            return self.occurs(i, t.inner)
        return False

    def unify(self, a, b):
        a, b = self.head(a), self.head(b)
        if isinstance(a, TMeta) and isinstance(b, TMeta) and a.id == b.id:
            return True
        if isinstance(a, TMeta) or isinstance(b, TMeta):
            m, t = (a, b) if isinstance(a, TMeta) else (b, a)
            if isinstance(t, Bang) or self.occurs(m.id, t):
                return False
            self.sol[m.id] = t
            return True
        if type(a) is not type(b):
            return False
        if isinstance(a, TBool):
            return True
        if isinstance(a, TVar):
            return a.name == b.name
        if isinstance(a, Arrow):
            return self.unify(a.dom, b.dom) and self.unify(a.cod, b.cod)
        if isinstance(a, Bang):
            return self.unify(a.inner, b.inner)
        self.skolems += 1
        sk = TVar(f"sk#{self.skolems}")
        return self.unify(subst_type(a.body, a.var, sk), subst_type(b.body, b.var, sk))

    def try_unify(self, a, b):
        saved = dict(self.sol)
        if self.unify(a, b):
            return True
        self.sol = saved
        return False


# ---------------------------------------------------------------- elaboration

def _node(rule, ctx, term, ty, premises=(), payload=None):
    return Derivation(rule, ctx, term, ty, tuple(premises), payload or {})


class Elaborator:
    def __init__(self, avoid=()):
        self.u = _Unifier()
        self.avoid = set(avoid)
        self.n = 0

    def fresh(self, x):
        base = x.split("#", 1)[0]
        while True:
            self.n += 1
            name = f"{base}#{self.n}"
            if name not in self.avoid:
                return name

    def fresh_tvar(self, a, taken):
        base = a.split("#", 1)[0]
        while True:
            self.n += 1
            name = f"{base}#{self.n}"
            if name not in taken:
                return name

    # -- checking

    def check(self, env: dict, e: ETerm, sigma: Type) -> Derivation:
        sigma = self.u.head(sigma)
        if isinstance(sigma, Bang):
            return self.box(env, e, sigma)
        if isinstance(sigma, Forall):
            if isinstance(e, EVar):
                n, c = unbang(self.u.zonk(env[e.name]))
                if n == 0 and self.u.try_unify(c, sigma):
                    return D.ax(e.name, env[e.name])
            ctx_vars = set()
            for y in e.fv:
                ctx_vars |= ftv(self.u.zonk(env[y]))
            a, body = sigma.var, sigma.body
            if a in ctx_vars:
                a2 = self.fresh_tvar(a, ctx_vars)
                body = subst_type(body, a, TVar(a2))
                a = a2
            d = self.check(env, e, body)
            return _node("ForallI", dict(d.ctx), d.term, Forall(a, body), [d])
        return self.check_linear(env, e, sigma)

    def box(self, env, e, sigma):
        inner = {}
        for y in sorted(e.fv):
            t = self.u.head(env[y])
            if not isinstance(t, Bang):
                raise ElabError(f"cannot promote {_show(e)}: free variable {y} has linear type {show_type(self.u.zonk(t))}")
            inner[y] = t.inner
        d = self.check(inner, e, sigma.inner)
        return _node("sp", {y: Bang(t) for y, t in d.ctx.items()}, d.term, sigma, [d])

    def check_linear(self, env, e, sigma):
        # split banged variables used several times into copies
        for y in sorted(e.fv):
            t = self.u.head(env[y])
            if isinstance(t, Bang):
                k = e_sliced(y, e)
                if k >= 2:
                    copies = [self.fresh(y) for _ in range(k)]
                    e2, _ = _split(e, y, copies, 0)
                    env2 = {z: s for z, s in env.items() if z != y}
                    for c in copies:
                        env2[c] = t.inner
                    d = self.check_linear(env2, e2, sigma)
                    return self._mux(d, copies, y)
        if isinstance(e, EAnn):
            d = self.check(env, e.term, e.type)
            return self.instantiate(d, e.type, sigma)
        if isinstance(e, ELam):
            return self.check_lam(env, e, sigma)
        if isinstance(e, EIf):
            dt = self.check(env, e.test, B)
            d0 = self.check(env, e.then0, sigma)
            d1 = self.check(env, e.else1, sigma)
            full = {y: env[y] for y in e.fv}
            dt, d0, d1 = (self.weaken_to(d, full) for d in (dt, d0, d1))
            return _node("BE", full, If(dt.term, d0.term, d1.term), sigma, [dt, d0, d1])
        if isinstance(e, EBool) and not isinstance(self.u.head(sigma), TMeta) and not isinstance(self.u.head(sigma), TBool):
            raise ElabError(f"boolean constant checked against {show_type(self.u.zonk(sigma))}")
        d, ty = self.synth(env, e)
        return self.instantiate(d, ty, sigma)

    def check_lam(self, env, e, sigma):
        s = self.u.head(sigma)
        if isinstance(s, TMeta):
            dom = e.ann if e.ann is not None else self.u.meta()
            s2 = Arrow(dom, self.u.meta())
            self.u.unify(s, s2)
            s = s2
        if not isinstance(s, Arrow):
            raise ElabError(f"abstraction {_show(e)} checked against non-arrow {show_type(self.u.zonk(s))}")
        if e.ann is not None and not self.u.try_unify(e.ann, s.dom):
            raise ElabError(f"binder annotation {show_type(e.ann)} does not match {show_type(self.u.zonk(s.dom))}")
        x, body = e.binder, e.body
        if x in env:
            x2 = self.fresh(x)
            body = e_rename(body, x, x2)
            x = x2
        self.avoid.add(x)
        env2 = {**env, x: s.dom}
        d = self.check(env2, body, s.cod)
        if x not in d.ctx:
            d = self.weaken(d, x, s.dom)
        ctx = {y: t for y, t in d.ctx.items() if y != x}
        return _node("LollyI", ctx, Lam(x, d.term), s, [d])

    # -- synthesis

    def synth(self, env, e):
        if isinstance(e, EBool):
            return D.bool_intro(e.bit), B
        if isinstance(e, EAnn):
            return self.check(env, e.term, e.type), e.type
        if isinstance(e, ELam):
            if e.ann is None:
                raise ElabError(f"cannot synthesize a type for unannotated abstraction {_show(e)}; add a binder type")
            s = Arrow(e.ann, self.u.meta())
            return self.check_lam(env, e, s), s
        if isinstance(e, EIf):
            m = self.u.meta()
            return self.check_linear(env, e, m), m
        # application spine
        head, args = e, []
        while isinstance(head, EApp):
            args.append(head.arg)
            head = head.fun
        args.reverse()
        derelict = 0
        if isinstance(head, EVar):
            if head.name not in env:
                raise ElabError(f"unbound variable {head.name}")
            n, c = unbang(self.u.head(env[head.name]))
            derelict = n
            name = head.name if n == 0 else self.fresh(head.name)
            d, ty = D.ax(name, c), c
        else:
            d, ty = self.synth(env, head)
        for a in args:
            ty = self.u.head(ty)
            while isinstance(ty, Forall):
                m = self.u.meta()
                ty2 = subst_type(ty.body, ty.var, m)
                d = _node("ForallE", dict(d.ctx), d.term, ty2, [d], {"type": m})
                ty = self.u.head(ty2)
            if isinstance(ty, TMeta):
                arr = Arrow(self.u.meta(), self.u.meta())
                self.u.unify(ty, arr)
                ty = arr
            if not isinstance(ty, Arrow):
                raise ElabError(f"{_show(head)} applied to too many arguments (type {show_type(self.u.zonk(ty))})")
            da = self.check(env, a, ty.dom)
            clash = d.ctx.keys() & da.ctx.keys()
            if clash:
                raise ElabError(f"linear variable(s) {sorted(clash)} used in both function and argument of {_show(e)}")
            d = _node("LollyE", {**d.ctx, **da.ctx}, App(d.term, da.term), ty.cod, [d, da])
            ty = ty.cod
        cur, t = (name, c) if derelict else (None, None)
        for k in range(derelict):
            target = head.name if k == derelict - 1 else self.fresh(head.name)
            t = Bang(t)
            d = self._mux_typed(d, [cur], target, t)
            cur = target
        return d, ty

    def instantiate(self, d, ty, sigma):
        """Apply (ForallE) to d until its type unifies with sigma."""
        while True:
            if self.u.try_unify(ty, sigma):
                return d
            ty = self.u.head(ty)
            if not isinstance(ty, Forall):
                raise ElabError(f"type mismatch for {_show_term(d.term)}: have {show_type(self.u.zonk(ty))}, "
                                f"want {show_type(self.u.zonk(sigma))}")
            m = self.u.meta()
            ty = subst_type(ty.body, ty.var, m)
            d = _node("ForallE", dict(d.ctx), d.term, ty, [d], {"type": m})

    # -- structural helpers

    def _mux(self, d, copies, y):
        present = [c for c in copies if c in d.ctx]
        if not present:
            return d
        return self._mux_typed(d, present, y, Bang(d.ctx[present[0]]))

    def _mux_typed(self, d, xs, x, ty):
        from .terms import subst
        ctx = {z: t for z, t in d.ctx.items() if z not in xs}
        ctx[x] = ty
        term = d.term
        for xi in xs:
            if xi != x:
                term = subst(term, Var(x), xi)
        return _node("m", ctx, term, d.type, [d], {"vars": list(xs), "target": x})

    def weaken(self, d, x, sigma):
        sigma = self.u.head(sigma)
        if is_linear(sigma):
            return _node("w", {**d.ctx, x: sigma}, d.term, d.type, [d], {"var": x, "type": sigma})
        y = self.fresh(x)
        d = self.weaken(d, y, sigma.inner)
        return self._mux_typed(d, [y], x, sigma)

    def weaken_to(self, d, ctx):
        for x in sorted(ctx):
            if x not in d.ctx:
                d = self.weaken(d, x, ctx[x])
        return d

    # -- final pass

    def rebuild(self, d: Derivation) -> Derivation:
        """Resolve metavariables and recompute every conclusion with the plain node builders."""
        z = self._ground
        ps = [self.rebuild(p) for p in d.premises]
        r = d.rule
        if r == "Ax":
            x = d.term.name
            return D.ax(x, z(d.ctx[x]))
        if r in ("B0I", "B1I"):
            return D.bool_intro(d.term.bit)
        if r == "w":
            return D.weak(ps[0], d.payload["var"], z(d.payload["type"]))
        if r == "LollyI":
            return D.lolly_i(ps[0], d.term.binder)
        if r == "LollyE":
            return D.lolly_e(*ps)
        if r == "m":
            return D.mux(ps[0], d.payload["vars"], d.payload["target"])
        if r == "sp":
            return D.sp(ps[0])
        if r == "ForallI":
            return D.forall_i(ps[0], d.type.var)
        if r == "ForallE":
            return D.forall_e(ps[0], z(d.payload["type"]))
        return D.bool_e(*ps)

    def _ground(self, t):
        t = self.u.zonk(t)
        return _ground_metas(t)


def _ground_metas(t):
    if isinstance(t, TMeta):
        return B
    if isinstance(t, Arrow):
        return Arrow(_ground_metas(t.dom), _ground_metas(t.cod))
    if isinstance(t, Forall):
        return Forall(t.var, _ground_metas(t.body))
    if isinstance(t, Bang):
        return Bang(_ground_metas(t.inner))
    return t


def _all_names(e):
    out = set(e.fv)
    stack = [e]
    while stack:
        e = stack.pop()
        if isinstance(e, ELam):
            out.add(e.binder)
            stack.append(e.body)
        elif isinstance(e, EApp):
            stack += [e.fun, e.arg]
        elif isinstance(e, EIf):
            stack += [e.test, e.then0, e.else1]
        elif isinstance(e, EAnn):
            stack.append(e.term)
    return out


def _show(e):
    return _show_term(erase(e))


def _show_term(t):
    from .terms import show
    s = show(t)
    return s if len(s) < 80 else s[:77] + "..."


def elaborate(e, sigma: Type, env: dict | None = None, validate: bool = True,
              aliases: dict | None = None) -> Derivation:
    """Build a derivation of env |- e : sigma.

    e may be a Term, an ETerm or annotated text.  The result's context is
    exactly env (unused assumptions are weakened in).
    """
    if isinstance(e, str):
        e = parse_eterm(e, aliases)
    if isinstance(sigma, str):
        sigma = resolve_aliases(parse_type(sigma), aliases)
    if isinstance(e, Term):
        e = from_term(e)
    env = dict(env or {})
    missing = e.fv - env.keys()
    if missing:
        raise ElabError(f"free variables without assumptions: {sorted(missing)}")
    el = Elaborator(avoid=_all_names(e) | env.keys())
    d = el.check(env, e, sigma)
    d = el.weaken_to(d, env)
    d = el.rebuild(d)
    if validate:
        D.validate(d)
    return d
