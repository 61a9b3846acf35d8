"""Terms of the boolean lambda calculus: syntax, parsing, substitution, reduction.

Terms are immutable dataclasses.  Each node caches its size and free
variables at construction time because the machines query both constantly.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

import sys

sys.setrecursionlimit(max(sys.getrecursionlimit(), 200_000))


@dataclass(frozen=True, slots=True, eq=False)
class Term:
    size: int = field(init=False, repr=False)
    fv: frozenset = field(init=False, repr=False)

    def __eq__(self, other):
        return isinstance(other, Term) and same_term(self, other)

    def __hash__(self):
        return hash(show(self))

    def __str__(self):
        return show(self)


@dataclass(frozen=True, slots=True, eq=False)
class Var(Term):
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("empty identifier")
        object.__setattr__(self, "size", 1)
        object.__setattr__(self, "fv", frozenset((self.name,)))


@dataclass(frozen=True, slots=True, eq=False)
class Bool(Term):
    """The constant 0 (true) when bit == 0, the constant 1 (false) when bit == 1."""
    bit: int

    def __post_init__(self):
        if self.bit not in (0, 1):
            raise ValueError(f"boolean constant must be 0 or 1, got {self.bit!r}")
        object.__setattr__(self, "size", 1)
        object.__setattr__(self, "fv", frozenset())


@dataclass(frozen=True, slots=True, eq=False)
class Lam(Term):
    binder: str
    body: Term

    def __post_init__(self):
        if not self.binder:
            raise ValueError("empty identifier")
        object.__setattr__(self, "size", self.body.size + 1)
        object.__setattr__(self, "fv", self.body.fv - {self.binder})


@dataclass(frozen=True, slots=True, eq=False)
class App(Term):
    fun: Term
    arg: Term

    def __post_init__(self):
        object.__setattr__(self, "size", self.fun.size + self.arg.size)
        object.__setattr__(self, "fv", self.fun.fv | self.arg.fv)


@dataclass(frozen=True, slots=True, eq=False)
class If(Term):
    test: Term
    then0: Term
    else1: Term

    def __post_init__(self):
        object.__setattr__(self, "size", self.test.size + self.then0.size + self.else1.size + 1)
        object.__setattr__(self, "fv", self.test.fv | self.then0.fv | self.else1.fv)


TRUE = Bool(0)
FALSE = Bool(1)


class NotARedex(Exception):
    pass


class FuelExhausted(Exception):
    def __init__(self, last, message="fuel exhausted"):
        super().__init__(message)
        self.last = last


class ParseError(Exception):
    def __init__(self, message, pos, text=""):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{line}:{col}: {message}")
        self.pos = pos
        self.line = line
        self.col = col


# ---------------------------------------------------------------- builders

def apps(head, *args):
    t = head
    for a in args:
        t = App(t, a)
    return t


def lams(names, body):
    if isinstance(names, str):
        names = names.split()
    for x in reversed(names):
        body = Lam(x, body)
    return body


def spine(t):
    """Split t into its head and the list of arguments it is applied to."""
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


# ---------------------------------------------------------------- fresh names

def base_name(x: str) -> str:
    return x.split("#", 1)[0]


class Fresh:
    """Deterministic fresh-name supply: x -> x#1, y -> y#2, ...

    One instance per evaluation; two runs started from equal counters
    produce identical names.
    """

    def __init__(self, start=0):
        self.n = start

    def __call__(self, x: str) -> str:
        self.n += 1
        return f"{base_name(x)}#{self.n}"


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:(?P<id>[A-Za-z_][A-Za-z0-9_'#]*)|(?P<lit>[01])(?![0-9])|(?P<sym>\\|λ|\.|\(|\)))")
_KEYWORDS = {"if", "then", "else"}


def _tokenize(text):
    pos = 0
    toks = []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        if text.startswith("--", pos):
            nl = text.find("\n", pos)
            pos = len(text) if nl < 0 else nl
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        start = m.start(m.lastgroup)
        kind = m.lastgroup
        val = m.group(kind)
        if kind == "id" and val in _KEYWORDS:
            kind = "kw"
        if kind == "sym" and val == "λ":
            val = "\\"
        toks.append((kind, val, start))
        pos = m.end()
    toks.append(("eof", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, val=None):
        tok = self.toks[self.i]
        if (kind and tok[0] != kind) or (val is not None and tok[1] != val):
            want = val or kind
            got = tok[1] or "end of input"
            raise ParseError(f"expected {want!r}, found {got!r}", tok[2], self.text)
        self.i += 1
        return tok

    def term(self):
        kind, val, pos = self.peek()
        if kind == "sym" and val == "\\":
            return self.lam()
        if kind == "kw" and val == "if":
            return self.ite()
        return self.app()

    def lam(self):
        self.take("sym", "\\")
        names = [self.take("id")[1]]
        while self.peek()[0] == "id":
            names.append(self.take("id")[1])
        self.take("sym", ".")
        return lams(names, self.term())

    def ite(self):
        self.take("kw", "if")
        a = self.term()
        self.take("kw", "then")
        b = self.term()
        self.take("kw", "else")
        c = self.term()
        return If(a, b, c)

    def app(self):
        t = self.atom()
        while True:
            kind, val, _ = self.peek()
            if kind in ("id", "lit") or (kind == "sym" and val == "("):
                t = App(t, self.atom())
            elif (kind == "sym" and val == "\\") or (kind == "kw" and val == "if"):
                t = App(t, self.term())
                return t
            else:
                return t

    def atom(self):
        kind, val, pos = self.peek()
        if kind == "id":
            self.i += 1
            return Var(val)
        if kind == "lit":
            self.i += 1
            return Bool(int(val))
        if kind == "sym" and val == "(":
            self.i += 1
            t = self.term()
            self.take("sym", ")")
            return t
        got = val or "end of input"
        raise ParseError(f"expected a term, found {got!r}", pos, self.text)


def parse(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    p.take("eof")
    return t


# ---------------------------------------------------------------- printing

def show(t: Term) -> str:
    out = []

    def go(t, ctx):
        # ctx: 0 = top/body, 1 = function position, 2 = argument position
        if isinstance(t, Var):
            out.append(t.name)
        elif isinstance(t, Bool):
            out.append(str(t.bit))
        elif isinstance(t, Lam):
            if ctx:
                out.append("(")
            out.append("\\" + t.binder + ". ")
            go(t.body, 0)
            if ctx:
                out.append(")")
        elif isinstance(t, If):
            if ctx:
                out.append("(")
            out.append("if ")
            go(t.test, 0)
            out.append(" then ")
            go(t.then0, 0)
            out.append(" else ")
            go(t.else1, 0)
            if ctx:
                out.append(")")
        else:
            if ctx == 2:
                out.append("(")
            go(t.fun, 1)
            out.append(" ")
            go(t.arg, 2)
            if ctx == 2:
                out.append(")")

    go(t, 0)
    return "".join(out)


# ---------------------------------------------------------------- structure

def size(t: Term) -> int:
    return t.size


def free_vars(t: Term) -> frozenset:
    return t.fv


def same_term(a: Term, b: Term) -> bool:
    """Syntactic equality (no renaming); iterative to cope with deep terms."""
    stack = [(a, b)]
    while stack:
        a, b = stack.pop()
        if a is b:
            continue
        if type(a) is not type(b) or a.size != b.size:
            return False
        if isinstance(a, Var):
            if a.name != b.name:
                return False
        elif isinstance(a, Bool):
            if a.bit != b.bit:
                return False
        elif isinstance(a, Lam):
            if a.binder != b.binder:
                return False
            stack.append((a.body, b.body))
        elif isinstance(a, App):
            stack.append((a.fun, b.fun))
            stack.append((a.arg, b.arg))
        else:
            stack.append((a.test, b.test))
            stack.append((a.then0, b.then0))
            stack.append((a.else1, b.else1))
    return True


def alpha_eq(a: Term, b: Term) -> bool:
    """Equality up to renaming of bound variables; free names must agree."""

    def go(a, b, ea, eb, depth):
        if type(a) is not type(b) or a.size != b.size:
            return False
        if isinstance(a, Var):
            ia, ib = ea.get(a.name), eb.get(b.name)
            if ia is None and ib is None:
                return a.name == b.name
            return ia == ib
        if isinstance(a, Bool):
            return a.bit == b.bit
        if isinstance(a, Lam):
            return go(a.body, b.body, {**ea, a.binder: depth}, {**eb, b.binder: depth}, depth + 1)
        if isinstance(a, App):
            return go(a.fun, b.fun, ea, eb, depth) and go(a.arg, b.arg, ea, eb, depth)
        return (go(a.test, b.test, ea, eb, depth) and go(a.then0, b.then0, ea, eb, depth)
                and go(a.else1, b.else1, ea, eb, depth))

    return go(a, b, {}, {}, 0)


def count_occurrences(x: str, t: Term) -> int:
    if x not in t.fv:
        return 0
    if isinstance(t, Var):
        return 1
    if isinstance(t, Lam):
        return count_occurrences(x, t.body)
    if isinstance(t, App):
        return count_occurrences(x, t.fun) + count_occurrences(x, t.arg)
    return count_occurrences(x, t.test) + count_occurrences(x, t.then0) + count_occurrences(x, t.else1)


def sliced_occurrences(x: str, t: Term) -> int:
    """Occurrences of x where the parts of a conditional count by their maximum."""
    if x not in t.fv:
        return 0
    if isinstance(t, Var):
        return 1
    if isinstance(t, Lam):
        return sliced_occurrences(x, t.body)
    if isinstance(t, App):
        return sliced_occurrences(x, t.fun) + sliced_occurrences(x, t.arg)
    return max(sliced_occurrences(x, t.test), sliced_occurrences(x, t.then0),
               sliced_occurrences(x, t.else1))


def _avoid(name, taken):
    while name in taken:
        name += "'"
    return name


def subst(t: Term, n: Term, x: str) -> Term:
    """t[n/x]: replace the free occurrences of x in t by n, avoiding capture.

    A binder that would capture a free variable of n gets primes appended
    until it is clear of everything in sight.
    """
    if x not in t.fv:
        return t
    if isinstance(t, Var):
        return n
    if isinstance(t, App):
        return App(subst(t.fun, n, x), subst(t.arg, n, x))
    if isinstance(t, If):
        return If(subst(t.test, n, x), subst(t.then0, n, x), subst(t.else1, n, x))
    # Lam with x free in the body, so binder != x
    y, body = t.binder, t.body
    if y in n.fv:
        y2 = _avoid(y, n.fv | body.fv | {x})
        body = subst(body, Var(y2), y)
        y = y2
    return Lam(y, subst(body, n, x))


def rename_free(t: Term, old: str, new: str) -> Term:
    return subst(t, Var(new), old)


# ---------------------------------------------------------------- positions

SELECTORS = ("fun", "arg", "body", "test", "then", "else")


def _child(t, sel):
    if sel == "fun" and isinstance(t, App):
        return t.fun
    if sel == "arg" and isinstance(t, App):
        return t.arg
    if sel == "body" and isinstance(t, Lam):
        return t.body
    if isinstance(t, If):
        if sel == "test":
            return t.test
        if sel == "then":
            return t.then0
        if sel == "else":
            return t.else1
    raise NotARedex(f"position selector {sel!r} does not address a subterm of {show(t)}")


def subterm_at(t: Term, path) -> Term:
    for sel in path:
        t = _child(t, sel)
    return t


def replace_at(t: Term, path, new: Term) -> Term:
    if not path:
        return new
    sel, rest = path[0], path[1:]
    c = replace_at(_child(t, sel), rest, new)
    if sel == "fun":
        return App(c, t.arg)
    if sel == "arg":
        return App(t.fun, c)
    if sel == "body":
        return Lam(t.binder, c)
    if sel == "test":
        return If(c, t.then0, t.else1)
    if sel == "then":
        return If(t.test, c, t.else1)
    return If(t.test, t.then0, c)


def is_redex(t: Term) -> bool:
    return (isinstance(t, App) and isinstance(t.fun, Lam)) or (
        isinstance(t, If) and isinstance(t.test, Bool))


def contract(t: Term) -> Term:
    if isinstance(t, App) and isinstance(t.fun, Lam):
        return subst(t.fun.body, t.arg, t.fun.binder)
    if isinstance(t, If) and isinstance(t.test, Bool):
        return t.then0 if t.test.bit == 0 else t.else1
    raise NotARedex(f"not a redex: {show(t)}")


def step(t: Term, at=()) -> Term:
    at = tuple(at)
    return replace_at(t, at, contract(subterm_at(t, at)))


def leftmost_redex(t: Term):
    """Path of the leftmost-outermost redex, or None when t is normal."""
    # explicit stack of (subterm, path) visited in leftmost-outermost order
    stack = [(t, ())]
    while stack:
        u, p = stack.pop()
        if is_redex(u):
            return p
        if isinstance(u, App):
            stack.append((u.arg, p + ("arg",)))
            stack.append((u.fun, p + ("fun",)))
        elif isinstance(u, Lam):
            stack.append((u.body, p + ("body",)))
        elif isinstance(u, If):
            stack.append((u.else1, p + ("else",)))
            stack.append((u.then0, p + ("then",)))
            stack.append((u.test, p + ("test",)))
    return None


def redexes(t: Term):
    """All redex positions, in leftmost-outermost order."""
    out = []
    stack = [(t, ())]
    while stack:
        u, p = stack.pop()
        if is_redex(u):
            out.append(p)
        if isinstance(u, App):
            stack.append((u.arg, p + ("arg",)))
            stack.append((u.fun, p + ("fun",)))
        elif isinstance(u, Lam):
            stack.append((u.body, p + ("body",)))
        elif isinstance(u, If):
            stack.append((u.else1, p + ("else",)))
            stack.append((u.then0, p + ("then",)))
            stack.append((u.test, p + ("test",)))
    return out


DEFAULT_FUEL = 10**6


def normalize(t: Term, fuel: int = DEFAULT_FUEL) -> Term:
    """Leftmost-outermost normalization; raises FuelExhausted(last) when out of fuel."""
    for _ in range(fuel + 1):
        p = leftmost_redex(t)
        if p is None:
            return t
        if _ == fuel:
            break
        t = step(t, p)
    raise FuelExhausted(t)


def reduction_sequence(t: Term, fuel: int = DEFAULT_FUEL):
    """The leftmost-outermost sequence as (term, position) pairs, ending at the normal form."""
    seq = []
    for _ in range(fuel):
        p = leftmost_redex(t)
        if p is None:
            return seq, t
        seq.append((t, p))
        t = step(t, p)
    raise FuelExhausted(t)


def is_closed(t: Term) -> bool:
    return not t.fv
