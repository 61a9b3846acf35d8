"""Program corpora: randomly generated typed programs, the exponential family
M_n, and closed programs built from the data encodings.

Every entry carries a validated derivation.  Generation is type-directed and
the elaborator has the final word: candidates it cannot type are dropped.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from . import derivation as D
from .elaborate import ElabError, elaborate, erase, parse_eterm
from .encodings import (ADD, AND, LEN, MUL, NOT, OR, SUC, Names, alpha_text, bools_text, nat_text,
                        poly_text, poly_type_text, proj, str_text, tup)
from .terms import Term, parse, show


@dataclass
class Entry:
    name: str
    term: Term
    derivation: D.Derivation
    family: str = "random"


def elaborate_program(text: str, name: str, family: str, aliases=None) -> Entry:
    e = parse_eterm(text, aliases)
    return Entry(name, erase(e), elaborate(e, "B", aliases=aliases), family)


# ---------------------------------------------------------------- M_n

def m_n_text(n: int) -> str:
    body = "z"
    for _ in range(n):
        body = f"f ({body})"
    return rf"(\(f:!(B -> B)). \(z:B). {body}) (\(x:B). if x then x else x) 0"


def m_n(n: int) -> Entry:
    return elaborate_program(m_n_text(n), f"m_{n:02d}", "exponential")


# ---------------------------------------------------------------- random programs

# types are ("B",), ("->", dom, cod) or ("!", inner)
TB = ("B",)


def arrow(*ts):
    t = ts[-1]
    for d in reversed(ts[:-1]):
        t = ("->", d, t)
    return t


def bang(t):
    return ("!", t)


DOMAINS = [TB, TB, TB, arrow(TB, TB), bang(TB), bang(arrow(TB, TB)), arrow(TB, TB, TB)]


def type_text(t) -> str:
    if t[0] == "B":
        return "B"
    if t[0] == "!":
        return "!" + _atom(t[1])
    return f"{_atom(t[1])} -> {type_text(t[2])}"


def _atom(t):
    return "B" if t[0] == "B" else f"({type_text(t)})"


def _result(t):
    """Strip bangs and arrows: the argument list and final type of t."""
    while t[0] == "!":
        t = t[1]
    args = []
    while t[0] == "->":
        args.append(t[1])
        t = t[2]
    return args, t


class Generator:
    def __init__(self, rng: random.Random):
        self.rng = rng
        self.k = 0

    def fresh(self):
        self.k += 1
        return f"x{self.k}"

    def term(self, ty, env, fuel) -> str:
        if ty[0] == "!":
            # promoted arguments may only mention promoted variables
            return self.term(ty[1], [(x, t) for x, t in env if t[0] == "!"], fuel)
        if ty[0] == "->":
            if fuel > 0 and self.rng.random() < 0.2:
                v = self._var_of(ty, env)
                if v:
                    return v
            x = self.fresh()
            return rf"\({x}:{type_text(ty[1])}). {self.term(ty[2], env + [(x, ty[1])], fuel - 1)}"
        return self.boolean(env, fuel)

    def _var_of(self, ty, env):
        cands = [x for x, t in env if t == ty or (t[0] == "!" and t[1] == ty)]
        return self.rng.choice(cands) if cands else None

    def boolean(self, env, fuel) -> str:
        r = self.rng
        bvars = [x for x, t in env if t == TB or t == bang(TB)]
        heads = [(x, t) for x, t in env if _result(t)[1] == TB and _result(t)[0]]
        if fuel <= 0:
            if bvars and r.random() < 0.6:
                return r.choice(bvars)
            return r.choice("01")
        choice = r.choices(["const", "var", "if", "redex", "head", "iter", "fold"],
                           [2, 3 if bvars else 0, 4, 5, 4 if heads else 0, 1, 1])[0]
        if choice == "const":
            return r.choice("01")
        if choice == "var":
            return r.choice(bvars)
        if choice == "if":
            t, a, b = (self.boolean(env, fuel - 2) for _ in range(3))
            return f"if {t} then {a} else {b}"
        if choice == "redex":
            dom = r.choice(DOMAINS)
            x = self.fresh()
            body = self.boolean(env + [(x, dom)], fuel - 1)
            arg = self.term(dom, env, fuel - 2)
            return rf"(\({x}:{type_text(dom)}). {body}) ({arg})"
        if choice == "head":
            f, t = r.choice(heads)
            args = [self.term(a, env, fuel - 2) for a in _result(t)[0]]
            return f + "".join(f" ({a})" for a in args)
        if choice == "iter":
            k = r.randint(0, 3)
            num = r"\s z. " + "".join("s (" for _ in range(k)) + "z" + ")" * k
            step = self.term(arrow(TB, TB), [(x, t) for x, t in env if t[0] == "!"], fuel - 3)
            return f"(({num}) : {nat_text(1)}) ({step}) ({self.boolean(env, fuel - 3)})"
        bits = [r.choice("01") for _ in range(r.randint(0, 3))]
        s = r"\c z. " + "".join(f"c {b} (" for b in bits) + "z" + ")" * len(bits)
        b, y = self.fresh(), self.fresh()
        step = self.boolean([(x, t) for x, t in env if t[0] == "!"] + [(b, TB), (y, TB)], fuel - 3)
        return rf"(({s}) : {str_text(1)}) (\({b}:B) ({y}:B). {step}) ({self.boolean(env, fuel - 3)})"


def random_programs(count: int = 240, seed: int = 20240611, max_size: int = 60, min_size: int = 4):
    """`count` distinct typed programs of size in [min_size, max_size]."""
    rng = random.Random(seed)
    out, seen = [], set()
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 200 * count:
            raise RuntimeError(f"only {len(out)} programs after {attempts} attempts")
        g = Generator(rng)
        text = g.boolean([], rng.randint(3, 9))
        try:
            e = parse_eterm(text)
        except Exception:
            continue
        t = erase(e)
        key = show(t)
        if key in seen or not (min_size <= t.size <= max_size):
            continue
        try:
            d = elaborate(e, "B")
        except (ElabError, D.RuleViolation):
            continue
        seen.add(key)
        out.append(Entry(f"r{len(out):03d}", t, d, "random"))
    return out


# ---------------------------------------------------------------- encoding programs

def encoding_programs() -> list:
    """Closed boolean programs exercising numerals, strings, arithmetic,
    polynomials and the connectives."""
    out = []

    def add_prog(name, text, aliases=None):
        out.append(elaborate_program(text, name, "encoding", aliases))

    bb = "B -> B -> B"
    for a in (0, 1):
        add_prog(f"not_{a}", f"(({NOT}) : B -> B) {a}")
        for b in (0, 1):
            add_prog(f"and_{a}{b}", f"(({AND}) : {bb}) {a} {b}")
            add_prog(f"or_{a}{b}", f"(({OR}) : {bb}) {a} {b}")
    b2 = bools_text(2)
    pairs = {(a, b): tup([str(a), str(b)], Names()) for a in (0, 1) for b in (0, 1)}
    for kind in pairs:
        for m1 in ((0, 0), (0, 1)):
            for m2 in ((0, 1), (0, 0)):
                names = Names()
                alpha = f"\\k m1 m2. {alpha_text('k', 'm1', 'm2', names)}"
                body = f"(({alpha}) : {b2} -> {b2} -> {b2} -> {b2}) {pairs[kind]} {pairs[m1]} {pairs[m2]}"
                for i in (0, 1):
                    add_prog(f"alpha_{kind[0]}{kind[1]}_{m1[1]}{m2[1]}_{i}", proj(body, i, 2, Names()))
    parity = r"(\x. if x then 1 else 0)"
    n1 = nat_text(1)
    for k in range(4):
        num = r"\s z. " + "".join("s (" for _ in range(k)) + "z" + ")" * k
        add_prog(f"parity_{k}", f"(({num}) : {n1}) {parity} 0")
        add_prog(f"suc_{k}", f"((({SUC}) : {n1} -> {nat_text(2)}) ({num})) {parity} 0")
        add_prog(f"add_{k}", f"((({ADD}) : {n1} -> {n1} -> {nat_text(2)}) ({num}) (\\s z. s z)) {parity} 0")
        add_prog(f"mul_{k}", f"((({MUL}) : {n1} -> !{n1} -> {nat_text(2)}) ({num}) (\\s z. s (s z))) {parity} 1")
        add_prog(f"square_{k}", f"(({poly_text([0, 0, 1])}) : {poly_type_text([0, 0, 1])}) ({num}) {parity} 0")
    s1 = str_text(1)
    for bits in ((), (0,), (1,), (0, 1), (1, 1, 0)):
        s = r"\c z. " + "".join(f"c {b} (" for b in bits) + "z" + ")" * len(bits)
        tag = "".join(map(str, bits)) or "e"
        add_prog(f"all_{tag}", f"(({s}) : {s1}) (\\b y. if b then y else 1) 0")
        add_prog(f"len_{tag}", f"((({LEN}) : {s1} -> {n1}) ({s})) {parity} 0")
    return out


def atm_programs(max_len: int = 2) -> list:
    """Compiled sample machines applied to every input up to max_len, with P(n)=n."""
    import itertools

    from .atm import SAMPLES, apply_to_input, compile
    out = []
    for name, mk in SAMPLES.items():
        t, d = compile(mk(), [0, 1])
        for n in range(max_len + 1):
            for bits in itertools.product((0, 1), repeat=n):
                p, dp = apply_to_input(t, d, bits)
                tag = "".join(map(str, bits)) or "e"
                out.append(Entry(f"atm_{name}_{tag}", p, dp, "atm"))
    return out


def standard_corpus(count: int = 240, seed: int = 20240611) -> list:
    """Random programs, M_1..M_10 and the encoding programs."""
    return random_programs(count, seed) + [m_n(n) for n in range(1, 11)] + encoding_programs()


# ---------------------------------------------------------------- files

def write_corpus(entries, directory) -> None:
    """One NAME.lam (term text) and NAME.json (derivation) per entry."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for e in entries:
        (directory / f"{e.name}.lam").write_text(show(e.term) + "\n")
        (directory / f"{e.name}.json").write_text(D.dumps(e.derivation) + "\n")


def load_corpus(directory) -> list:
    """Entries in file-name order; a missing derivation file leaves derivation None."""
    directory = Path(directory)
    out = []
    for f in sorted(directory.glob("*.lam")):
        t = parse(f.read_text())
        j = f.with_suffix(".json")
        d = D.loads(j.read_text()) if j.exists() else None
        out.append(Entry(f.stem, t, d, "file"))
    return out


def manifest(entries) -> str:
    return json.dumps([{"name": e.name, "family": e.family, "size": e.term.size} for e in entries], indent=1)
