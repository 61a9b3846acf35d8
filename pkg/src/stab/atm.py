"""Alternating Turing machines over {0,1}: a description format, a reference
evaluator, and compilation into typed programs.

A configuration is the flat tensor <l, r, q1..qq, k1, k2> indexed by a cell
function c: l holds the cells left of the head (nearest first), r the scanned
cell and everything to its right, q the state code and k the kind pair.
Booleans follow the calculus: 0 is true, so an accepting run yields 0.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .elaborate import elaborate, erase, parse_eterm
from .encodings import (LEN, Names, alpha_text, bangs_text, bools_text, let, nat_text, poly_degree,
                        poly_eval, poly_text, proj, str_text, tensor_text, tup)
from .terms import App, Bool, FuelExhausted, Lam, Term, Var, apps
from .types import parse_type

KINDS = {"A": (1, 0), "R": (1, 1), "U": (0, 1), "E": (0, 0)}
KIND_ALIASES = {"A": "A", "R": "R", "U": "U", "E": "E", "∧": "U", "∨": "E",
                "and": "U", "or": "E", "AND": "U", "OR": "E"}
ACCEPT, REJECT = 0, 1
DEFAULT_ORACLE_FUEL = 500


class SpecError(Exception):
    pass


@dataclass(frozen=True)
class AtmSpec:
    """q_bits-wide state codes with kinds A, R, U (universal) or E (existential).

    delta1/delta2 map (code, read bit) to (write bit, next code, move 'L'|'R').
    """
    q_bits: int
    states: dict                 # code (tuple of bits) -> kind letter
    initial: tuple
    delta1: dict = field(default_factory=dict)
    delta2: dict = field(default_factory=dict)
    name: str = ""

    def kind(self, code) -> str:
        return self.states[tuple(code)]

    def validate(self) -> "AtmSpec":
        q = self.q_bits
        if not isinstance(q, int) or q < 1:
            raise SpecError(f"q_bits must be a positive integer, got {q!r}")
        for code, k in self.states.items():
            _check_code(code, q, "state")
            if k not in KINDS:
                raise SpecError(f"state {_bits(code)} has unknown kind {k!r}")
        _check_code(self.initial, q, "initial state")
        if tuple(self.initial) not in self.states:
            raise SpecError(f"initial state {_bits(self.initial)} is not declared")
        for j, delta in ((1, self.delta1), (2, self.delta2)):
            for (code, b), (w, nxt, mv) in delta.items():
                if tuple(code) not in self.states:
                    raise SpecError(f"transition {j} from undeclared state {_bits(code)}")
                if tuple(nxt) not in self.states:
                    raise SpecError(f"transition {j} to undeclared state {_bits(nxt)}")
                if b not in (0, 1) or w not in (0, 1):
                    raise SpecError(f"transition {j} for state {_bits(code)} has a non-bit symbol")
                if mv not in ("L", "R"):
                    raise SpecError(f"transition {j} for state {_bits(code)} has move {mv!r}")
        for code, k in self.states.items():
            if k in ("U", "E"):
                for j, delta in ((1, self.delta1), (2, self.delta2)):
                    for b in (0, 1):
                        if (code, b) not in delta:
                            raise SpecError(f"state {_bits(code)} of kind {k} lacks transition {j} on {b}")
        return self


def _check_code(code, q, what):
    if not isinstance(code, tuple) or len(code) != q or any(b not in (0, 1) for b in code):
        raise SpecError(f"{what} code {code!r} is not {q} bits")


def _bits(code) -> str:
    return "".join(str(b) for b in code)


def parse_bits(s: str) -> tuple:
    s = s.strip()
    if not re.fullmatch(r"[01]*", s):
        raise SpecError(f"not a bit string: {s!r}")
    return tuple(int(c) for c in s)


# ---------------------------------------------------------------- file format

def parse_atm(text: str, name: str = "") -> AtmSpec:
    """Read the line format:

        q_bits 2
        state 00 U          (kinds A, R, U or E; the symbols ∧ and ∨ are accepted)
        initial 00
        00 1 -> 1 10 R 1    (state read -> write next move component)

    Blank lines and text after '#' are ignored.
    """
    q = None
    states = {}
    initial = None
    deltas = {1: {}, 2: {}}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.replace(":", " ").split()
        try:
            if words[0] == "q_bits":
                q = int(words[1])
            elif words[0] == "state":
                kind = KIND_ALIASES.get(words[2])
                if kind is None:
                    raise SpecError(f"unknown kind {words[2]!r}")
                states[parse_bits(words[1])] = kind
            elif words[0] == "initial":
                initial = parse_bits(words[1])
            elif "->" in words:
                i = words.index("->")
                lhs, rhs = words[:i], words[i + 1:]
                if len(lhs) != 2 or len(rhs) != 4:
                    raise SpecError("transition rows read: state bit -> write next move component")
                comp = int(rhs[3])
                if comp not in (1, 2):
                    raise SpecError(f"component must be 1 or 2, got {comp}")
                key = (parse_bits(lhs[0]), int(lhs[1]))
                if key in deltas[comp]:
                    raise SpecError(f"duplicate transition {comp} for state {lhs[0]} reading {lhs[1]}")
                deltas[comp][key] = (int(rhs[0]), parse_bits(rhs[1]), rhs[2].upper())
            else:
                raise SpecError(f"unrecognised line {line!r}")
        except (IndexError, ValueError) as exc:
            raise SpecError(f"line {lineno}: {exc}") from None
        except SpecError as exc:
            raise SpecError(f"line {lineno}: {exc}") from None
    if q is None:
        raise SpecError("missing q_bits")
    if initial is None:
        raise SpecError("missing initial state")
    return AtmSpec(q, states, initial, deltas[1], deltas[2], name).validate()


def format_atm(spec: AtmSpec) -> str:
    out = [f"q_bits {spec.q_bits}"]
    for code in sorted(spec.states):
        out.append(f"state {_bits(code)} {spec.states[code]}")
    out.append(f"initial {_bits(spec.initial)}")
    for comp, delta in ((1, spec.delta1), (2, spec.delta2)):
        for (code, b) in sorted(delta):
            w, nxt, mv = delta[(code, b)]
            out.append(f"{_bits(code)} {b} -> {w} {_bits(nxt)} {mv} {comp}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- reference evaluator

def atm_oracle(spec: AtmSpec, bits, fuel: int = DEFAULT_ORACLE_FUEL, clock=None, tape="blank") -> int:
    """Accept (0) or reject (1) by direct recursion over the computation tree.

    With `clock`, a configuration at depth `clock` is judged by the second bit
    of its kind (A and E accept, R and U reject), which is how the compiled
    term treats configurations it has no time left to expand.  Without it the
    recursion must reach final states within `fuel` levels.

    tape="blank" gives an unbounded tape of 0s; tape="input" models the
    compiled representation, whose tape ends one phantom cell past the input
    (that cell reads 0, ignores writes, and moving right from it stays put).
    Moving left from the first cell stays put in both models.
    """
    spec.validate()
    bits = tuple(int(b) for b in bits)
    n = len(bits)
    if tape not in ("blank", "input"):
        raise ValueError(f"unknown tape model {tape!r}")

    def read(cells, pos):
        return cells.get(pos, 0)

    def go(code, cells, pos, depth):
        kind = spec.states[code]
        if kind == "A":
            return ACCEPT
        if kind == "R":
            return REJECT
        if clock is not None and depth >= clock:
            return KINDS[kind][1]
        if depth >= fuel:
            raise FuelExhausted((code, pos, depth))
        b = read(cells, pos)
        results = []
        for delta in (spec.delta1, spec.delta2):
            w, nxt, mv = delta[(code, b)]
            cells2 = dict(cells)
            if tape == "blank" or pos < n:
                cells2[pos] = w
            if mv == "R":
                pos2 = pos + 1 if (tape == "blank" or pos < n) else pos
            else:
                pos2 = max(pos - 1, 0)
            r = go(tuple(nxt), cells2, pos2, depth + 1)
            # universal states stop at the first rejection, existential at the first acceptance
            if (kind == "U" and r == REJECT) or (kind == "E" and r == ACCEPT):
                return r
            results.append(r)
        return results[-1]

    return go(tuple(spec.initial), dict(enumerate(bits)), 0, 0)


# ---------------------------------------------------------------- types

def atm_body_text(q: int, a: str = "a") -> str:
    return tensor_text([f"{a} -> {a}", f"{a} -> {a}"] + ["B"] * (q + 2))


def atm_text(q: int, i: int = 1) -> str:
    return f"(forall a. {bangs_text(i)}(B -> a -> a) -> {atm_body_text(q)})"


def id_text(q: int, i: int = 1) -> str:
    parts = ["a -> a", "a -> a", "B -> a -> a", "B", "B -> a -> a", "B"] + ["B"] * (q + 2)
    return f"(forall a. {bangs_text(i)}(B -> a -> a) -> {tensor_text(parts)})"


def delta_text(q: int) -> str:
    return bools_text(q + 4)


def aliases(q: int) -> dict:
    return {
        "ATM": parse_type(atm_text(q)),
        "ID": parse_type(id_text(q)),
        "B2": parse_type(bools_text(2)),
        "DELTA": parse_type(delta_text(q)),
        "S": parse_type(str_text(1)),
    }


# ---------------------------------------------------------------- combinator text

def _qs(prefix, q):
    return [f"{prefix}{i}" for i in range(1, q + 1)]


def init_text(spec: AtmSpec) -> str:
    names = Names()
    q0 = [str(b) for b in spec.initial]
    k0 = [str(b) for b in KINDS[spec.kind(spec.initial)]]
    parts = [r"\z. z", r"\z. s c z"] + q0 + k0
    return "\\s c. " + tup(parts, names)


def dec_text(spec: AtmSpec) -> str:
    q = spec.q_bits
    names = Names()
    qs = _qs("q", q)
    cell = tensor_text(["a -> a", "B -> a -> a", "B"])
    empty = "(" + tup([r"\z. z", r"\x z. z", "0"], names) + f" : {cell})"
    step = let("w", ["g", "h", "i"], tup([r"\v. h i (g v)", "c", "b"], names))
    fold = f"(\\b w. {step} : B -> {cell} -> {cell})"
    out = tup(["tl", "tr", "cl", "bl", "cr", "br"] + qs + ["k1", "k2"], names)
    body = let(f"l {empty}", ["tl", "cl", "bl"], let(f"r {empty}", ["tr", "cr", "br"], out))
    return "\\s c. " + let(f"s ({fold})", ["l", "r"] + qs + ["k1", "k2"], body)


def leaf(spec: AtmSpec, j: int, code, b) -> tuple:
    """(write, next code, next kind, move bit) chosen by component j; move bit 0 is Right."""
    delta = spec.delta1 if j == 1 else spec.delta2
    kind = spec.states.get(code)
    if kind in ("U", "E") and (code, b) in delta:
        w, nxt, mv = delta[(code, b)]
        return w, tuple(nxt), KINDS[spec.states[tuple(nxt)]], 0 if mv == "R" else 1
    # final or undeclared states are never expanded; keep the tape and state
    return b, code, KINDS.get(kind, KINDS["R"]), 0


def delta_tree_text(spec: AtmSpec, j: int, read="br", state=None) -> str:
    """Nested conditionals on the read bit then on each state bit; tests whose
    two subtrees coincide are dropped."""
    q = spec.q_bits
    state = state or _qs("q", q)
    tests = [read] + state
    names = Names()

    def build(fixed):
        if len(fixed) == len(tests):
            b, code = fixed[0], tuple(fixed[1:])
            w, nxt, k, m = leaf(spec, j, code, b)
            return tup([str(w)] + [str(x) for x in nxt] + [str(x) for x in k] + [str(m)], names)
        t0 = build(fixed + [0])
        t1 = build(fixed + [1])
        if _strip_names(t0) == _strip_names(t1):
            return t0
        return f"if {tests[len(fixed)]} then ({t0}) else ({t1})"

    return build([])


def _strip_names(s: str) -> str:
    return re.sub(r"p_\d+", "p", s)


def com_text(spec: AtmSpec, j: int) -> str:
    q = spec.q_bits
    names = Names()
    qs = _qs("q", q)
    ps = _qs("n", q)
    right = tup([r"\z. cr w (cl bl (l z))", "r"] + ps + ["j1", "j2"], names)
    left = tup(["l", r"\z. cl bl (cr w (r z))"] + ps + ["j1", "j2"], names)
    body = let(f"({delta_tree_text(spec, j)} : DELTA)", ["w"] + ps + ["j1", "j2", "m"],
               f"if m then {right} else {left}")
    return "\\s c. " + let("s c", ["l", "r", "cl", "bl", "cr", "br"] + qs + ["k1", "k2"], body)


def kind_text(spec: AtmSpec) -> str:
    q = spec.q_bits
    names = Names()
    return "\\x. " + let(r"x (\b y. y)", ["l", "r"] + _qs("q", q) + ["k1", "k2"], tup(["k1", "k2"], names))


def _ann(text: str, ty: str) -> str:
    return f"(({text}) : {ty})"


def ext_text(spec: AtmSpec) -> str:
    return "\\x. " + proj(f"{_ann(kind_text(spec), 'ATM -> B2')} x", 1, 2, Names())


def base_text(spec: AtmSpec) -> str:
    return f"\\c. {_ann(kind_text(spec), 'ATM -> B2')} c"


def tr_text(spec: AtmSpec, j: int) -> str:
    return f"\\s. {_ann(com_text(spec, j), 'ID -> ATM')} ({_ann(dec_text(spec), 'ATM -> ID')} s)"


def step_text(spec: AtmSpec) -> str:
    kind = f"({_ann(kind_text(spec), 'ATM -> B2')} c)"
    m1 = f"h ({_ann(tr_text(spec, 1), 'ATM -> ATM')} c)"
    m2 = f"h ({_ann(tr_text(spec, 2), 'ATM -> ATM')} c)"
    return f"\\h c. {alpha_text(kind, m1, m2, Names())}"


COMBINATOR_TYPES = {
    "Init": "S -> ATM",
    "Dec": "ATM -> ID",
    "Com1": "ID -> ATM",
    "Com2": "ID -> ATM",
    "Kind": "ATM -> B2",
    "Ext": "ATM -> B",
    "Base": "ATM -> B2",
    "Step": "(ATM -> B2) -> ATM -> B2",
}


def combinator_texts(spec: AtmSpec) -> dict:
    return {
        "Init": init_text(spec),
        "Dec": dec_text(spec),
        "Com1": com_text(spec, 1),
        "Com2": com_text(spec, 2),
        "Kind": kind_text(spec),
        "Ext": ext_text(spec),
        "Base": base_text(spec),
        "Step": step_text(spec),
    }


def atm_combinators(spec: AtmSpec) -> dict:
    """name -> (term, derivation) for Init, Dec, Com1, Com2, Kind, Ext, Base, Step."""
    spec.validate()
    al = aliases(spec.q_bits)
    out = {}
    for name, src in combinator_texts(spec).items():
        e = parse_eterm(src, al)
        out[name] = (erase(e), elaborate(e, COMBINATOR_TYPES[name], aliases=al))
    return out


# ---------------------------------------------------------------- compilation

def eval_bangs(coeffs) -> int:
    return max(poly_degree(coeffs), 1) + 1


def eval_type_text(coeffs) -> str:
    return f"{bangs_text(eval_bangs(coeffs))}S -> B"


def compile_text(spec: AtmSpec, coeffs) -> str:
    d = poly_degree(coeffs)
    ptype = f"{bangs_text(d)}{nat_text(1)} -> {nat_text(2 * d + 1)}"
    out = _ann("\\x. " + proj("x", 1, 2, Names()), "B2 -> B")
    step = _ann(step_text(spec), "(ATM -> B2) -> ATM -> B2")
    base = _ann(base_text(spec), "ATM -> B2")
    return (f"\\s. {out} ({_ann(poly_text(coeffs), ptype)} "
            f"({_ann(LEN, 'S -> ' + nat_text(1))} s) {step} {base} "
            f"({_ann(init_text(spec), 'S -> ATM')} s))")


def compile(spec: AtmSpec, coeffs):
    """A closed term of type !^t S -o B deciding the machine's language with
    time bound P(n) = sum c_k n^k, and its derivation."""
    spec.validate()
    coeffs = list(coeffs)
    if any((not isinstance(c, int)) or c < 0 for c in coeffs):
        raise SpecError("polynomial coefficients must be natural numbers")
    al = aliases(spec.q_bits)
    e = parse_eterm(compile_text(spec, coeffs), al)
    return erase(e), elaborate(e, eval_type_text(coeffs), aliases=al)


def time_bound(coeffs, n: int) -> int:
    return poly_eval(coeffs, n)


def apply_to_input(term: Term, d, bits):
    """The program `term s` for the string s of `bits`, with its derivation.
    The string derivation is promoted as often as the evaluator's domain demands."""
    from . import derivation as D
    from .encodings import bool_string
    s, ds = bool_string(bits, 1)
    while not D.type_eq(ds.type, d.type.dom):
        if D.degree(ds) > 64:
            raise SpecError("argument type never matches the evaluator's domain")
        ds = D.sp(ds)
    return App(term, s), D.lolly_e(d, ds)


def differential(spec: AtmSpec, coeffs, max_len: int):
    """Run the compiled machine on every input of length <= max_len.

    Returns (inputs tried, largest configuration size, inputs where the
    compiled program and the reference evaluator disagree)."""
    import itertools

    from .bigstep import eval_big
    term, d = compile(spec, coeffs)
    count, space, mismatches = 0, 0, []
    for n in range(max_len + 1):
        for bits in itertools.product((0, 1), repeat=n):
            prog, _ = apply_to_input(term, d, bits)
            b, stats, _ = eval_big(prog)
            count += 1
            space = max(space, stats.max_config_size)
            if b != atm_oracle(spec, bits, clock=time_bound(coeffs, n), tape="input"):
                mismatches.append("".join(map(str, bits)))
    return count, space, mismatches


# ---------------------------------------------------------------- configurations

def cells_term(cells, c="c") -> Term:
    body = Var("z")
    for b in reversed(list(cells)):
        body = apps(Var(c), Bool(int(b)), body)
    return Lam("z", body)


def config_term(spec: AtmSpec, left, right, code) -> Term:
    """The configuration with `left` (nearest cell first), head on right[0]."""
    code = tuple(code)
    parts = [cells_term(left), cells_term(right)] + [Bool(b) for b in code] + [Bool(b) for b in KINDS[spec.kind(code)]]
    return Lam("c", Lam("p", apps(Var("p"), *parts)))


# ---------------------------------------------------------------- sample machines

def always_accept() -> AtmSpec:
    return AtmSpec(1, {(0,): "A"}, (0,), name="always-accept")


def contains_one() -> AtmSpec:
    """Scan right for a 1.  The scanning state is universal with a trivially
    accepting second branch, so a run that never meets a 1 is rejected when
    the clock runs out."""
    scan, acc = (0,), (1,)
    d1 = {(scan, 0): (0, scan, "R"), (scan, 1): (1, acc, "R")}
    d2 = {(scan, 0): (0, acc, "R"), (scan, 1): (1, acc, "R")}
    return AtmSpec(1, {scan: "U", acc: "A"}, scan, d1, d2, name="contains-one")


def alternating() -> AtmSpec:
    """Universal and existential states alternate along the tape: with xi
    meaning "cell i holds 1", accepts iff x0 and (x1 or (x2 and (x3 or ...))),
    where the innermost clause is decided by the kind of the state reached when
    the clock runs out."""
    u, e, acc, rej = (0, 0), (0, 1), (1, 0), (1, 1)
    d1, d2 = {}, {}
    for s, other in ((u, e), (e, u)):
        for b in (0, 1):
            d1[(s, b)] = (b, acc if b == 1 else rej, "R")
            d2[(s, b)] = (b, other, "R")
    return AtmSpec(2, {u: "U", e: "E", acc: "A", rej: "R"}, u, d1, d2, name="alternating")


SAMPLES = {"always-accept": always_accept, "contains-one": contains_one, "alternating": alternating}
