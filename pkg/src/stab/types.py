"""Types of the soft type assignment: B, type variables, linear arrows, quantifiers, bangs.

A type is linear when it has no top-level bang.  The codomain of an arrow
and the body of a quantifier must be linear; the constructors enforce it.
"""
from __future__ import annotations

import re
from dataclasses import dataclass


class IllFormedType(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class Type:
    def __str__(self):
        return show_type(self)


@dataclass(frozen=True, slots=True)
class TBool(Type):
    pass


@dataclass(frozen=True, slots=True)
class TVar(Type):
    name: str


@dataclass(frozen=True, slots=True)
class Arrow(Type):
    dom: Type
    cod: Type

    def __post_init__(self):
        if isinstance(self.cod, Bang):
            raise IllFormedType(f"arrow codomain must be linear: {show_type(self.cod)}")


@dataclass(frozen=True, slots=True)
class Forall(Type):
    var: str
    body: Type

    def __post_init__(self):
        if isinstance(self.body, Bang):
            raise IllFormedType(f"quantifier body must be linear: {show_type(self.body)}")


@dataclass(frozen=True, slots=True)
class Bang(Type):
    inner: Type


@dataclass(frozen=True, slots=True)
class TMeta(Type):
    """Unification variable used while building derivations; always stands for a linear type."""
    id: int


B = TBool()


def is_linear(t: Type) -> bool:
    return not isinstance(t, Bang)


def bangs(t: Type, n: int) -> Type:
    for _ in range(n):
        t = Bang(t)
    return t


def unbang(t: Type):
    """Split !^n A into (n, A)."""
    n = 0
    while isinstance(t, Bang):
        t = t.inner
        n += 1
    return n, t


def arrows(*ts):
    """arrows(a, b, c) = a -o b -o c."""
    t = ts[-1]
    for d in reversed(ts[:-1]):
        t = Arrow(d, t)
    return t


def foralls(vars, body):
    if isinstance(vars, str):
        vars = vars.split()
    for v in reversed(vars):
        body = Forall(v, body)
    return body


# ---------------------------------------------------------------- variables

def ftv(t: Type) -> frozenset:
    if isinstance(t, TVar):
        return frozenset((t.name,))
    if isinstance(t, Arrow):
        return ftv(t.dom) | ftv(t.cod)
    if isinstance(t, Forall):
        return ftv(t.body) - {t.var}
    if isinstance(t, Bang):
        return ftv(t.inner)
    return frozenset()


def all_tvars(t: Type) -> set:
    if isinstance(t, TVar):
        return {t.name}
    if isinstance(t, Arrow):
        return all_tvars(t.dom) | all_tvars(t.cod)
    if isinstance(t, Forall):
        return all_tvars(t.body) | {t.var}
    if isinstance(t, Bang):
        return all_tvars(t.inner)
    return set()


def _avoid(name, taken):
    base = name.split("#", 1)[0]
    k = 0
    cand = name
    while cand in taken:
        k += 1
        cand = f"{base}{k}"
    return cand


def subst_type(t: Type, a: str, s: Type) -> Type:
    """t[s/a], renaming quantifiers that would capture free variables of s."""
    if a not in ftv(t):
        return t
    if isinstance(t, TVar):
        return s
    if isinstance(t, Arrow):
        return Arrow(subst_type(t.dom, a, s), subst_type(t.cod, a, s))
    if isinstance(t, Bang):
        return Bang(subst_type(t.inner, a, s))
    v, body = t.var, t.body
    fs = ftv(s)
    if v in fs:
        v2 = _avoid(v, fs | all_tvars(body) | {a})
        body = subst_type(body, v, TVar(v2))
        v = v2
    return Forall(v, subst_type(body, a, s))


def type_eq(s: Type, t: Type) -> bool:
    """Equality up to renaming of quantified variables."""

    def go(s, t, es, et, depth):
        if type(s) is not type(t):
            return False
        if isinstance(s, TVar):
            i, j = es.get(s.name), et.get(t.name)
            if i is None and j is None:
                return s.name == t.name
            return i == j
        if isinstance(s, TBool):
            return True
        if isinstance(s, TMeta):
            return s.id == t.id
        if isinstance(s, Arrow):
            return go(s.dom, t.dom, es, et, depth) and go(s.cod, t.cod, es, et, depth)
        if isinstance(s, Bang):
            return go(s.inner, t.inner, es, et, depth)
        return go(s.body, t.body, {**es, s.var: depth}, {**et, t.var: depth}, depth + 1)

    return go(s, t, {}, {}, 0)


def canonical(t: Type) -> Type:
    """Rename bound variables to _0, _1, ... in binding order."""
    counter = [0]

    def go(t, env):
        if isinstance(t, TVar):
            return TVar(env.get(t.name, t.name))
        if isinstance(t, Arrow):
            return Arrow(go(t.dom, env), go(t.cod, env))
        if isinstance(t, Bang):
            return Bang(go(t.inner, env))
        if isinstance(t, Forall):
            v = f"_{counter[0]}"
            counter[0] += 1
            return Forall(v, go(t.body, {**env, t.var: v}))
        return t

    return go(t, {})


# ---------------------------------------------------------------- text format

def show_type(t: Type) -> str:
    def go(t, ctx):
        # ctx 1: left of an arrow
        if isinstance(t, TBool):
            return "B"
        if isinstance(t, TVar):
            return t.name
        if isinstance(t, TMeta):
            return f"?{t.id}"
        if isinstance(t, Bang):
            inner = go(t.inner, 2)
            return "!" + inner
        if isinstance(t, Arrow):
            s = f"{go(t.dom, 1)} -> {go(t.cod, 0)}"
            return f"({s})" if ctx else s
        s = f"forall {t.var}. {go(t.body, 0)}"
        return f"({s})" if ctx else s

    return go(t, 0)


_TTOK = re.compile(r"\s*(?:(?P<arrow>->|⊸)|(?P<sym>[!().])|(?P<id>[A-Za-z_][A-Za-z0-9_#']*))")


class TypeParseError(ValueError):
    pass


def parse_type(text: str) -> Type:
    toks = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TTOK.match(text, pos)
        if not m or m.end() == pos:
            raise TypeParseError(f"col {pos + 1}: unexpected character {text[pos]!r}")
        kind = m.lastgroup
        toks.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(("eof", "", len(text)))
    i = 0

    def peek():
        return toks[i]

    def take(kind, val=None):
        nonlocal i
        tok = toks[i]
        if tok[0] != kind or (val is not None and tok[1] != val):
            raise TypeParseError(f"col {tok[2] + 1}: expected {val or kind!r}, found {tok[1] or 'end of input'!r}")
        i += 1
        return tok

    def typ():
        kind, val, _ = peek()
        if kind == "id" and val in ("forall", "∀"):
            take("id")
            vs = [take("id")[1]]
            while peek()[0] == "id":
                vs.append(take("id")[1])
            take("sym", ".")
            return wrap(foralls, vs, typ())
        left = prefix()
        if peek()[0] == "arrow":
            take("arrow")
            right = typ()
            return wrap(Arrow, left, right)
        return left

    def wrap(f, *args):
        try:
            return f(*args)
        except IllFormedType as e:
            raise TypeParseError(str(e)) from None

    def prefix():
        kind, val, p = peek()
        if kind == "sym" and val == "!":
            take("sym", "!")
            return Bang(prefix())
        if kind == "sym" and val == "(":
            take("sym", "(")
            t = typ()
            take("sym", ")")
            return t
        if kind == "id" and val not in ("forall", "∀"):
            take("id")
            return B if val == "B" else TVar(val)
        if kind == "id":
            return typ()
        raise TypeParseError(f"col {p + 1}: expected a type, found {val or 'end of input'!r}")

    t = typ()
    take("eof")
    return t
