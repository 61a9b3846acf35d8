"""Explicit typing derivations, the rule-by-rule validator, and the derivation measures.

A node stores its conclusion (context, subject, type), its premises and a
rule payload.  Contexts are plain dicts name -> Type and are never mutated
after construction.

Payloads:
    w        {"var": x, "type": A}
    m        {"vars": [x1, ..., xn], "target": x}
    ForallE  {"type": A}
    others   {}
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .terms import (App, Bool, If, Lam, Term, Var, alpha_eq, parse, show, subst)
from .types import (B, Arrow, Bang, Forall, TBool, Type, ftv, is_linear, parse_type,
                    show_type, subst_type, type_eq)

RULES = ("Ax", "B0I", "B1I", "w", "LollyI", "LollyE", "m", "sp", "ForallI", "ForallE", "BE")
ARITY = {"Ax": 0, "B0I": 0, "B1I": 0, "BE": 3, "LollyE": 2}


@dataclass(frozen=True, eq=False)
class Derivation:
    rule: str
    ctx: dict
    term: Term
    type: Type
    premises: tuple = ()
    payload: dict = field(default_factory=dict)

    def __repr__(self):
        return f"<{self.rule}: {judgement(self)}>"

    def nodes(self):
        """Pre-order walk yielding (path, node)."""
        stack = [((), self)]
        while stack:
            p, d = stack.pop()
            yield p, d
            for i in reversed(range(len(d.premises))):
                stack.append((p + (i,), d.premises[i]))


def show_ctx(ctx) -> str:
    return ", ".join(f"{x}:{show_type(t)}" for x, t in sorted(ctx.items()))


def judgement(d) -> str:
    return f"{show_ctx(d.ctx)} |- {show(d.term)} : {show_type(d.type)}"


class RuleViolation(Exception):
    def __init__(self, path, rule, condition, node=None):
        where = "root" if not path else "root." + ".".join(map(str, path))
        msg = f"{rule} at {where}: {condition}"
        if node is not None:
            msg += f"  [{judgement(node)}]"
        super().__init__(msg)
        self.path = tuple(path)
        self.rule = rule
        self.condition = condition


def ctx_eq(a: dict, b: dict) -> bool:
    return a.keys() == b.keys() and all(type_eq(a[x], b[x]) for x in a)


def ctx_ftv(ctx: dict) -> frozenset:
    out = frozenset()
    for t in ctx.values():
        out |= ftv(t)
    return out


# ---------------------------------------------------------------- node builders
#
# These construct single nodes with the conclusion computed from the premises.
# They do not check side conditions; validate() does.

def ax(x: str, a: Type) -> Derivation:
    return Derivation("Ax", {x: a}, Var(x), a)


def bool_intro(bit: int) -> Derivation:
    return Derivation("B0I" if bit == 0 else "B1I", {}, Bool(bit), B)


def weak(d: Derivation, x: str, a: Type) -> Derivation:
    return Derivation("w", {**d.ctx, x: a}, d.term, d.type, (d,), {"var": x, "type": a})


def lolly_i(d: Derivation, x: str) -> Derivation:
    sigma = d.ctx[x]
    ctx = {y: t for y, t in d.ctx.items() if y != x}
    return Derivation("LollyI", ctx, Lam(x, d.term), Arrow(sigma, d.type), (d,))


def lolly_e(f: Derivation, a: Derivation) -> Derivation:
    return Derivation("LollyE", {**f.ctx, **a.ctx}, App(f.term, a.term), f.type.cod, (f, a))


def mux(d: Derivation, xs, x: str) -> Derivation:
    xs = list(xs)
    sigma = d.ctx[xs[0]]
    ctx = {y: t for y, t in d.ctx.items() if y not in xs}
    ctx[x] = Bang(sigma)
    term = d.term
    for xi in xs:
        if xi != x:
            term = subst(term, Var(x), xi)
    return Derivation("m", ctx, term, d.type, (d,), {"vars": xs, "target": x})


def sp(d: Derivation) -> Derivation:
    return Derivation("sp", {y: Bang(t) for y, t in d.ctx.items()}, d.term, Bang(d.type), (d,))


def forall_i(d: Derivation, a: str) -> Derivation:
    return Derivation("ForallI", dict(d.ctx), d.term, Forall(a, d.type), (d,))


def forall_e(d: Derivation, a: Type) -> Derivation:
    q = d.type
    return Derivation("ForallE", dict(d.ctx), d.term, subst_type(q.body, q.var, a), (d,), {"type": a})


def bool_e(t: Derivation, d0: Derivation, d1: Derivation) -> Derivation:
    return Derivation("BE", dict(t.ctx), If(t.term, d0.term, d1.term), d0.type, (t, d0, d1))


def weaken(d: Derivation, x: str, sigma: Type, fresh) -> Derivation:
    """Add x:sigma to the context; banged types go through (w) then (m) chains."""
    if is_linear(sigma):
        return weak(d, x, sigma)
    y = fresh(x)
    return mux(weaken(d, y, sigma.inner, fresh), [y], x)


def weaken_to(d: Derivation, ctx: dict, fresh) -> Derivation:
    """Weaken d until its context is exactly ctx (which must contain d.ctx)."""
    for x in sorted(ctx):
        if x not in d.ctx:
            d = weaken(d, x, ctx[x], fresh)
    return d


# ---------------------------------------------------------------- validation

def _check_node(d: Derivation, path):
    rule = d.rule

    def fail(cond):
        raise RuleViolation(path, rule, cond, d)

    if rule not in RULES:
        fail(f"unknown rule tag {rule!r}")
    if len(d.premises) != ARITY.get(rule, 1):
        fail(f"expected {ARITY.get(rule, 1)} premises, got {len(d.premises)}")
    ps = d.premises

    if rule == "Ax":
        if not isinstance(d.term, Var):
            fail("subject is not a variable")
        x = d.term.name
        if d.ctx.keys() != {x}:
            fail("context must be exactly the axiom variable")
        if not is_linear(d.ctx[x]):
            fail("axiom type must be linear")
        if not type_eq(d.ctx[x], d.type):
            fail("assumption and conclusion types differ")
    elif rule in ("B0I", "B1I"):
        bit = 0 if rule == "B0I" else 1
        if d.ctx:
            fail("context must be empty")
        if not (isinstance(d.term, Bool) and d.term.bit == bit):
            fail(f"subject must be {bit}")
        if not isinstance(d.type, TBool):
            fail("type must be B")
    elif rule == "w":
        p = ps[0]
        x, a = d.payload.get("var"), d.payload.get("type")
        if x is None or a is None:
            fail("payload must name the added assumption")
        if not is_linear(a):
            fail("weakened assumption must be linear")
        if x in p.ctx:
            fail("weakened variable already in the premise context")
        if not ctx_eq(d.ctx, {**p.ctx, x: a}):
            fail("conclusion context is not the premise context plus the assumption")
        if not alpha_eq(d.term, p.term) or not type_eq(d.type, p.type):
            fail("subject or type changed")
    elif rule == "LollyI":
        p = ps[0]
        if not isinstance(d.term, Lam):
            fail("subject is not an abstraction")
        x = d.term.binder
        if x not in p.ctx:
            fail("binder assumption missing from the premise")
        if x in d.ctx:
            fail("binder still in the conclusion context")
        if not ctx_eq(d.ctx, {y: t for y, t in p.ctx.items() if y != x}):
            fail("contexts do not match")
        if not alpha_eq(d.term.body, p.term):
            fail("body differs from premise subject")
        if not is_linear(p.type):
            fail("premise type must be linear")
        if not type_eq(d.type, Arrow(p.ctx[x], p.type)):
            fail("type is not binder type -o premise type")
    elif rule == "LollyE":
        f, a = ps
        if not isinstance(d.term, App) or not alpha_eq(d.term.fun, f.term) or not alpha_eq(d.term.arg, a.term):
            fail("subject is not the application of the premise subjects")
        if f.ctx.keys() & a.ctx.keys():
            fail("premise contexts are not disjoint (Gamma # Delta)")
        if not isinstance(f.type, Arrow):
            fail("function premise does not have an arrow type")
        if not type_eq(f.type.dom, a.type):
            fail("argument type does not match the domain")
        if not is_linear(d.type) or not type_eq(d.type, f.type.cod):
            fail("result type must be the linear codomain")
        if not ctx_eq(d.ctx, {**f.ctx, **a.ctx}):
            fail("conclusion context is not the union of the premise contexts")
    elif rule == "m":
        p = ps[0]
        xs, x = d.payload.get("vars"), d.payload.get("target")
        if not xs or x is None:
            fail("payload must list the merged variables and the target")
        if len(set(xs)) != len(xs):
            fail("merged variables must be distinct")
        for xi in xs:
            if xi not in p.ctx:
                fail(f"merged variable {xi} missing from the premise")
        sigma = p.ctx[xs[0]]
        if not all(type_eq(p.ctx[xi], sigma) for xi in xs):
            fail("merged variables have different types")
        rest = {y: t for y, t in p.ctx.items() if y not in xs}
        if x in rest:
            fail("target variable clashes with the remaining context")
        if not ctx_eq(d.ctx, {**rest, x: Bang(sigma)}):
            fail("conclusion context must replace the copies by x:!sigma")
        expect = p.term
        for xi in xs:
            if xi != x:
                expect = subst(expect, Var(x), xi)
        if not alpha_eq(d.term, expect):
            fail("subject is not the premise subject with the copies renamed")
        if not type_eq(d.type, p.type):
            fail("type changed")
    elif rule == "sp":
        p = ps[0]
        if not ctx_eq(d.ctx, {y: Bang(t) for y, t in p.ctx.items()}):
            fail("conclusion context must be the premise context banged")
        if not alpha_eq(d.term, p.term):
            fail("subject changed")
        if not type_eq(d.type, Bang(p.type)):
            fail("type must be the premise type banged")
    elif rule == "ForallI":
        p = ps[0]
        if not isinstance(d.type, Forall):
            fail("type is not quantified")
        a = d.type.var
        if not is_linear(p.type) or not type_eq(d.type.body, p.type):
            fail("quantifier body differs from premise type")
        if a in ctx_ftv(p.ctx):
            fail(f"type variable {a} free in the context")
        if not ctx_eq(d.ctx, p.ctx) or not alpha_eq(d.term, p.term):
            fail("context or subject changed")
    elif rule == "ForallE":
        p = ps[0]
        a = d.payload.get("type")
        if a is None:
            fail("payload must carry the instantiating type")
        if not is_linear(a):
            fail("instantiating type must be linear")
        if not isinstance(p.type, Forall):
            fail("premise type is not quantified")
        if not type_eq(d.type, subst_type(p.type.body, p.type.var, a)):
            fail("conclusion type is not the instance")
        if not ctx_eq(d.ctx, p.ctx) or not alpha_eq(d.term, p.term):
            fail("context or subject changed")
    elif rule == "BE":
        t, d0, d1 = ps
        if not (ctx_eq(t.ctx, d0.ctx) and ctx_eq(t.ctx, d1.ctx) and ctx_eq(d.ctx, t.ctx)):
            fail("premise contexts differ (additive contexts)")
        if not isinstance(t.type, TBool):
            fail("test must have type B")
        if not is_linear(d0.type) or not type_eq(d0.type, d1.type) or not type_eq(d.type, d0.type):
            fail("branches must share one linear type")
        if not isinstance(d.term, If) or not (alpha_eq(d.term.test, t.term) and alpha_eq(d.term.then0, d0.term)
                                               and alpha_eq(d.term.else1, d1.term)):
            fail("subject is not the conditional of the premise subjects")


def validate(d: Derivation) -> bool:
    """Check every node; raise RuleViolation at the first offending one."""
    for path, node in d.nodes():
        _check_node(node, path)
    return True


def is_valid(d: Derivation) -> bool:
    try:
        return validate(d)
    except RuleViolation:
        return False


# ---------------------------------------------------------------- measures

def degree(d: Derivation) -> int:
    inner = max((degree(p) for p in d.premises), default=0)
    return inner + 1 if d.rule == "sp" else inner


def rank(d: Derivation) -> int:
    r = 0
    for _, node in d.nodes():
        if node.rule == "m":
            fv = node.premises[0].term.fv
            r = max(r, sum(1 for x in node.payload["vars"] if x in fv))
    return max(r, 1)


def space_weight(d: Derivation, r: int) -> int:
    rule = d.rule
    if rule in ("Ax", "B0I", "B1I"):
        return 1
    ws = [space_weight(p, r) for p in d.premises]
    if rule == "LollyI":
        return ws[0] + 1
    if rule == "sp":
        return ws[0] * r
    if rule == "LollyE":
        return ws[0] + ws[1] + 1
    if rule == "BE":
        return max(ws) + 1
    return ws[0]


def height(d: Derivation) -> int:
    return 1 + max((height(p) for p in d.premises), default=0)


# ---------------------------------------------------------------- serialization

def to_json(d: Derivation) -> dict:
    payload = {}
    if d.rule == "w":
        payload = {"var": d.payload["var"], "type": show_type(d.payload["type"])}
    elif d.rule == "m":
        payload = {"vars": list(d.payload["vars"]), "target": d.payload["target"]}
    elif d.rule == "ForallE":
        payload = {"type": show_type(d.payload["type"])}
    return {
        "rule": d.rule,
        "context": [[x, show_type(t)] for x, t in sorted(d.ctx.items())],
        "term": show(d.term),
        "type": show_type(d.type),
        "payload": payload,
        "premises": [to_json(p) for p in d.premises],
    }


def from_json(obj: dict) -> Derivation:
    payload = dict(obj.get("payload") or {})
    if "type" in payload:
        payload["type"] = parse_type(payload["type"])
    return Derivation(
        obj["rule"],
        {x: parse_type(t) for x, t in obj["context"]},
        parse(obj["term"]),
        parse_type(obj["type"]),
        tuple(from_json(p) for p in obj.get("premises", [])),
        payload,
    )


def dumps(d: Derivation) -> str:
    return json.dumps(to_json(d), indent=1)


def loads(text: str) -> Derivation:
    return from_json(json.loads(text))
