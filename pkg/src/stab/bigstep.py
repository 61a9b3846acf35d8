"""The big-step machine with m-contexts and B-contexts.

The computation tree is visited left-depth-first with an explicit frame
stack, so nothing but the current configuration is held in memory.  Each
visited node is reported as a `Step` carrying its sizes and per-path rule
counters; `snapshot=True` also attaches the full configuration.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .terms import App, Bool, Fresh, If, Lam, Term, Var, apps, show, spine, subst

RULES = ("Ax", "beta", "h", "if0", "if1")


class Stuck(Exception):
    def __init__(self, config, reason):
        super().__init__(f"machine stuck: {reason}\n{config}")
        self.config = config
        self.reason = reason


@dataclass(frozen=True, slots=True)
class Frame:
    """(if [o] then then0 else else1) V1 ... Vn"""
    then0: Term
    else1: Term
    spine: tuple = ()

    @property
    def size(self) -> int:
        return 1 + self.then0.size + self.else1.size + sum(v.size for v in self.spine)

    def __str__(self):
        s = f"(if o then {show(self.then0)} else {show(self.else1)})"
        return " ".join([s] + [_arg(v) for v in self.spine])


def _arg(t):
    s = show(t)
    return s if isinstance(t, (Var, Bool)) else f"({s})"


def bctx_size(frames) -> int:
    """Size of the term obtained by filling the hole with a variable; 0 for the empty context."""
    if not frames:
        return 0
    return 1 + sum(f.size for f in frames)


def bctx_fill(frames, t: Term) -> Term:
    """Plug t into the context; frames are listed outermost first."""
    for f in reversed(frames):
        t = apps(If(t, f.then0, f.else1), *f.spine)
    return t


def mctx_size(assignments) -> int:
    return sum(n.size + 1 for _, n in assignments)


def show_bctx(frames) -> str:
    if not frames:
        return "o"
    s = "o"
    for f in reversed(frames):
        inner = f"(if {s} then {show(f.then0)} else {show(f.else1)})"
        s = " ".join([inner] + [_arg(v) for v in f.spine])
    return s


def show_mctx(assignments) -> str:
    return "[" + ", ".join(f"{x}:={show(n)}" for x, n in assignments) + "]"


def closure(t: Term, assignments) -> Term:
    """(t)^A: substitute the assignments from the last one back to the first.

    The pass is repeated while assigned variables remain free, so an
    assignment may also refer to a later one; a cyclic context is rejected.
    """
    assignments = list(assignments)
    names = {x for x, _ in assignments}
    for _ in range(len(assignments) + 1):
        if not (t.fv & names):
            return t
        for x, n in reversed(assignments):
            t = subst(t, n, x)
    raise ValueError("cyclic m-context")


@dataclass(slots=True)
class Step:
    """One configuration of the computation, in left-depth-first order."""
    index: int
    via: str             # how this configuration was reached: start, beta, h, if-test, if0, if1
    c_size: int
    a_size: int
    m_size: int
    c_card: int
    a_card: int
    beta: int            # rule applications on the path from the root
    h: int
    ifs: int
    pending: int         # if rules on the path whose test premise leads here
    bctx: tuple | None = None
    mctx: tuple | None = None
    subject: Term | None = None
    result: int | None = None   # filled only in tree mode
    rule: str = ""       # rule whose conclusion this configuration is: Ax, beta, h, if

    @property
    def size(self) -> int:
        return self.c_size + self.a_size + self.m_size

    def show(self) -> str:
        return f"{show_bctx(self.bctx)}, {show_mctx(self.mctx)} |= {show(self.subject)}"


@dataclass
class ComputationStats:
    result: int
    beta_count: int = 0      # maximum over paths
    h_count: int = 0
    if_count: int = 0
    max_config_size: int = 0
    max_c_size: int = 0
    max_a_size: int = 0
    max_m_size: int = 0
    configurations: int = 0  # nodes of the computation tree
    total_beta: int = 0      # rule applications over the whole tree
    total_h: int = 0
    total_if: int = 0

    @property
    def rule_applications(self) -> int:
        return self.total_beta + self.total_h + self.total_if


@dataclass
class Node:
    step: Step
    children: list = field(default_factory=list)

    @property
    def result(self):
        return self.step.result


def fresh_for(t: Term) -> Fresh:
    """A fresh-name supply whose names cannot clash with the names already in t."""
    top = 0
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Var):
            names = (u.name,)
        elif isinstance(u, Lam):
            names = (u.binder,)
            stack.append(u.body)
        elif isinstance(u, App):
            names = ()
            stack += [u.fun, u.arg]
        elif isinstance(u, If):
            names = ()
            stack += [u.test, u.then0, u.else1]
        else:
            names = ()
        for x in names:
            m = re.search(r"#(\d+)$", x)
            if m:
                top = max(top, int(m.group(1)))
    return Fresh(top)


def run(p: Term, bctx=(), mctx=(), fresh=None, snapshot=False, fuel=None):
    """Generate the configurations of the computation of bctx, mctx |= p, left-depth-first.

    The generator's return value is the final boolean.
    """
    if fresh is None:
        fresh = fresh_for(p)
    frames = list(bctx)
    base = len(frames)
    names = [x for x, _ in mctx]
    terms = [n for _, n in mctx]
    index = {x: i for i, x in enumerate(names)}
    a_size = mctx_size(mctx)
    c_sum = sum(f.size for f in frames)
    c_size = c_sum + 1 if frames else 0
    saved = []   # per pushed frame: (len(names), a_size, h, ifs) at the if node
    h = ifs = 0
    m = p
    via = "start"
    k = 0
    while True:
        if fuel is not None and k >= fuel:
            from .terms import FuelExhausted
            raise FuelExhausted(m)
        head, args = spine(m)
        step = Step(k, via, c_size, a_size, m.size, len(frames), len(names),
                    len(names), h, ifs, len(frames) - base)
        if snapshot:
            step.bctx = tuple(frames)
            step.mctx = tuple(zip(names, terms))
            step.subject = m
        k += 1
        if isinstance(head, Bool) and not args:
            step.rule = "Ax"
            yield step
            if len(frames) == base:
                return head.bit
            f = frames.pop()
            c_sum -= f.size
            c_size = c_sum + 1 if frames else 0
            n_keep, a_size, h, ifs = saved.pop()
            for x in names[n_keep:]:
                del index[x]
            del names[n_keep:]
            del terms[n_keep:]
            ifs += 1
            branch = f.then0 if head.bit == 0 else f.else1
            via = "if0" if head.bit == 0 else "if1"
            m = apps(branch, *f.spine)
            continue
        if isinstance(head, Lam) and args:
            step.rule = "beta"
            yield step
            x2 = fresh(head.binder)
            index[x2] = len(names)
            names.append(x2)
            terms.append(args[0])
            a_size += args[0].size + 1
            m = apps(subst(head.body, Var(x2), head.binder), *args[1:])
            via = "beta"
            continue
        if isinstance(head, Var) and head.name in index:
            step.rule = "h"
            yield step
            h += 1
            m = apps(terms[index[head.name]], *args)
            via = "h"
            continue
        if isinstance(head, If):
            step.rule = "if"
            yield step
            saved.append((len(names), a_size, h, ifs))
            f = Frame(head.then0, head.else1, tuple(args))
            frames.append(f)
            c_sum += f.size
            c_size = c_sum + 1
            ifs += 1
            m = head.test
            via = "if-test"
            continue
        if isinstance(head, Var):
            reason = f"unbound head variable {head.name}"
        elif isinstance(head, Bool):
            reason = "boolean applied to arguments"
        else:
            reason = "abstraction with no argument"
        cfg = f"{show_bctx(frames)}, {show_mctx(zip(names, terms))} |= {show(m)}"
        raise Stuck(cfg, reason)


def eval_big(p: Term, tree=False, observer=None, fresh=None, fuel=None):
    """Evaluate the program p; returns (boolean, stats, tree or None)."""
    gen = run(p, fresh=fresh, snapshot=tree, fuel=fuel)
    stats = None
    root = None
    parents = []   # stack of (node, depth-of-frames) for if nodes awaiting their second premise
    prev = None
    counts = {"beta": 0, "h": 0, "if": 0}
    mx = [0, 0, 0, 0]
    bmax = hmax = imax = 0
    n = 0
    try:
        while True:
            s = next(gen)
            n += 1
            mx[0] = max(mx[0], s.size)
            mx[1] = max(mx[1], s.c_size)
            mx[2] = max(mx[2], s.a_size)
            mx[3] = max(mx[3], s.m_size)
            bmax = max(bmax, s.beta)
            hmax = max(hmax, s.h)
            imax = max(imax, s.ifs)
            nxt = s.rule
            if nxt in ("beta", "h"):
                counts[nxt] += 1
            elif nxt == "if":
                counts["if"] += 1
            if observer:
                observer(s)
            if tree:
                node = Node(s)
                if root is None:
                    root = node
                elif prev.step.rule == "Ax":
                    parents.pop().children.append(node)
                else:
                    prev.children.append(node)
                if nxt == "if":
                    parents.append(node)
                prev = node
    except StopIteration as stop:
        result = stop.value
    stats = ComputationStats(result, bmax, hmax, imax, mx[0], mx[1], mx[2], mx[3], n,
                             counts["beta"], counts["h"], counts["if"])
    if tree:
        _fill_results(root)
    return result, stats, root


def _fill_results(root):
    # the result of a node is the boolean reached by the last leaf of its subtree
    stack = [(root, False)]
    while stack:
        node, done = stack.pop()
        if done:
            node.step.result = node.children[-1].step.result if node.children else int(
                node.step.subject.bit)
            if node.step.rule == "if":
                node.step.rule = f"if{node.children[0].step.result}"
            continue
        stack.append((node, True))
        for c in node.children:
            stack.append((c, False))


def walk(root):
    """Nodes of a computation tree in left-depth-first order."""
    stack = [root]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(n.children))


def space(p: Term, fresh=None) -> int:
    return eval_big(p, fresh=fresh)[1].max_config_size


def evaluate_in(bctx, mctx, t: Term, fresh=None):
    """Result of bctx, mctx |= t (the frames of bctx are never popped)."""
    if fresh is None:
        fresh = fresh_for(apps(bctx_fill(bctx, t), *(n for _, n in mctx), *(Var(x) for x, _ in mctx)))
    gen = run(t, bctx, mctx, fresh)
    try:
        while True:
            next(gen)
    except StopIteration as stop:
        return stop.value


def check_weakening(c1, a, t: Term, outer) -> bool:
    """Evaluation under c1 and under c1 plugged into outer give the same boolean."""
    b1 = evaluate_in(tuple(c1), tuple(a), t)
    b2 = evaluate_in(tuple(outer) + tuple(c1), tuple(a), t)
    return b1 == b2


def trace_lines(p: Term, fresh=None):
    """Comma-separated records: rule, |C|, |A|, |M|, running max."""
    out = ["rule,C,A,M,max"]
    top = 0

    def obs(s):
        nonlocal top
        top = max(top, s.size)
        out.append(f"{s.rule},{s.c_size},{s.a_size},{s.m_size},{top}")

    b, stats, _ = eval_big(p, observer=obs, fresh=fresh)
    return b, stats, out


def canonical_names(names):
    """Map fresh names x#k to x1, x2, ... per base name, in order of first appearance."""
    seen = {}
    per_base = {}
    for x in names:
        if x in seen or "#" not in x:
            continue
        base = x.split("#", 1)[0]
        per_base[base] = per_base.get(base, 0) + 1
        seen[x] = f"{base}{per_base[base]}"
    return seen


_FRESH_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_']*#\d+")


def canonical_trace(p: Term, fresh=None) -> list:
    """(rule, configuration) pairs of the computation with fresh names canonicalized."""
    steps = []
    run_gen = run(p, fresh=fresh, snapshot=True)
    try:
        while True:
            s = next(run_gen)
            steps.append((s.rule, s.show()))
    except StopIteration:
        pass
    names = []
    for _, text in steps:
        names.extend(_FRESH_NAME.findall(text))
    mapping = canonical_names(names)
    return [(rule, _FRESH_NAME.sub(lambda m: mapping[m.group()], text)) for rule, text in steps]
