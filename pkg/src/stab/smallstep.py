"""The small-step machine: an m-stack, a B-context, the working m-context, and a subject.

Configurations are immutable tuples; `small_step` is a pure function of the
configuration and the fresh-name supply it is handed.
"""
from __future__ import annotations

from dataclasses import dataclass

from .bigstep import (Frame, Stuck, bctx_size, fresh_for, mctx_size, show_bctx, show_mctx, walk)
from .terms import Bool, If, Lam, Term, Var, apps, show, spine, subst


@dataclass(frozen=True, slots=True)
class SmallConfig:
    mstack: tuple = ()      # tuple of m-contexts, bottom first
    bctx: tuple = ()        # frames, outermost first
    mctx: tuple = ()        # ((name, term), ...)
    subject: Term = None

    @property
    def size(self) -> int:
        return self.s_size + bctx_size(self.bctx) + mctx_size(self.mctx) + self.subject.size

    @property
    def s_size(self) -> int:
        return sum(mctx_size(a) for a in self.mstack)

    def flat(self) -> tuple:
        """The m-context obtained by concatenating the stack and the working context."""
        out = ()
        for a in self.mstack:
            out += a
        return out + self.mctx

    def __str__(self):
        stack = " . ".join(show_mctx(a) for a in self.mstack) or "e"
        return f"<{stack}, {show_bctx(self.bctx)}, {show_mctx(self.mctx)} > {show(self.subject)}>"


@dataclass(frozen=True, slots=True)
class Final:
    result: int


def initial(p: Term) -> SmallConfig:
    return SmallConfig((), (), (), p)


def _lookup(c: SmallConfig, x: str):
    for y, n in reversed(c.mctx):
        if y == x:
            return n
    for a in reversed(c.mstack):
        for y, n in reversed(a):
            if y == x:
                return n
    return None


def small_step(c: SmallConfig, fresh):
    """One transition; returns (rule, next configuration) or (rule, Final(b))."""
    head, args = spine(c.subject)
    if isinstance(head, Bool) and not args:
        if not c.bctx:
            return "final", Final(head.bit)
        if not c.mstack:
            raise Stuck(str(c), "B-context without a saved m-context")
        f = c.bctx[-1]
        branch = f.then0 if head.bit == 0 else f.else1
        rule = "r0" if head.bit == 0 else "r1"
        return rule, SmallConfig(c.mstack[:-1], c.bctx[:-1], c.mstack[-1], apps(branch, *f.spine))
    if isinstance(head, Lam) and args:
        x2 = fresh(head.binder)
        body = subst(head.body, Var(x2), head.binder)
        return "beta", SmallConfig(c.mstack, c.bctx, c.mctx + ((x2, args[0]),), apps(body, *args[1:]))
    if isinstance(head, Var):
        n = _lookup(c, head.name)
        if n is None:
            raise Stuck(str(c), f"unbound head variable {head.name}")
        return "h", SmallConfig(c.mstack, c.bctx, c.mctx, apps(n, *args))
    if isinstance(head, If):
        frame = Frame(head.then0, head.else1, tuple(args))
        return "if", SmallConfig(c.mstack + (c.mctx,), c.bctx + (frame,), (), head.test)
    reason = "boolean applied to arguments" if isinstance(head, Bool) else "abstraction with no argument"
    raise Stuck(str(c), reason)


def trace_small(p: Term, fresh=None, fuel=None):
    """The configurations visited from the initial one, up to and including the final one.

    Returns (result, configurations, rules) where rules[i] leads from configuration i to i+1.
    """
    if fresh is None:
        fresh = fresh_for(p)
    c = initial(p)
    configs = [c]
    rules = []
    while True:
        if fuel is not None and len(rules) >= fuel:
            from .terms import FuelExhausted
            raise FuelExhausted(c.subject)
        rule, nxt = small_step(c, fresh)
        if isinstance(nxt, Final):
            return nxt.result, configs, rules
        rules.append(rule)
        configs.append(nxt)
        c = nxt


def run_small(p: Term, fresh=None, observer=None, fuel=None):
    """Run to the final configuration; returns (boolean, space_s) without storing the trace."""
    if fresh is None:
        fresh = fresh_for(p)
    c = initial(p)
    # sizes are maintained incrementally: component sizes change only at the touched ends
    s_size = 0
    s_sizes = []
    a_size = 0
    c_sum = 0
    top = c.subject.size
    steps = 0
    while True:
        if fuel is not None and steps >= fuel:
            from .terms import FuelExhausted
            raise FuelExhausted(c.subject)
        rule, nxt = small_step(c, fresh)
        if isinstance(nxt, Final):
            return nxt.result, top
        steps += 1
        if rule == "beta":
            a_size += nxt.mctx[-1][1].size + 1
        elif rule == "if":
            s_sizes.append(a_size)
            s_size += a_size
            a_size = 0
            c_sum += nxt.bctx[-1].size
        elif rule in ("r0", "r1"):
            a_size = s_sizes.pop()
            s_size -= a_size
            c_sum -= c.bctx[-1].size
        c = nxt
        size = s_size + (c_sum + 1 if c.bctx else 0) + a_size + c.subject.size
        if observer:
            observer(rule, c, size)
        top = max(top, size)


def trace_records(p: Term, fresh=None):
    """Comma-separated records per step: rule, |S|, |C|, |A|, |M|, total."""
    result, configs, rules = trace_small(p, fresh)
    out = ["rule,S,C,A,M,size"]
    for rule, c in zip(["start"] + rules, configs):
        out.append(f"{rule},{c.s_size},{bctx_size(c.bctx)},{mctx_size(c.mctx)},{c.subject.size},{c.size}")
    return result, out


def translate_bigstep(root) -> list:
    """Map each node of a big-step computation tree, left-depth-first, to a small-step configuration."""
    out = []
    stack = [(root, (), ())]
    while stack:
        node, mstack, work = stack.pop()
        st = node.step
        out.append(SmallConfig(mstack, st.bctx, work, st.subject))
        kids = node.children
        if not kids:
            continue
        if st.rule == "beta":
            stack.append((kids[0], mstack, work + (kids[0].step.mctx[-1],)))
        elif st.rule == "h":
            stack.append((kids[0], mstack, work))
        else:
            # if node: second premise resumes the current m-context, test premise starts an empty one
            stack.append((kids[1], mstack, work))
            stack.append((kids[0], mstack + (work,), ()))
    return out


__all__ = ["SmallConfig", "Final", "initial", "small_step", "trace_small", "run_small",
           "trace_records", "translate_bigstep", "walk"]
