"""Data encodings with their derivations: numerals, arithmetic, polynomials,
boolean strings, connectives, and n-ary tensors.

Terms are written in the annotated text syntax and turned into derivations by
the elaborator.  Tensors are macros: <a1,...,an> is \\x. x a1 ... an,
`let M be x1..xn in N` is M (\\x1 ... xn. N), and projections are lets.
"""
from __future__ import annotations

import itertools

from .elaborate import elaborate, erase, parse_eterm
from .terms import App, Bool, Lam, Term, Var, apps, lams
from .types import B, Type, parse_type


# ---------------------------------------------------------------- type text

def bangs_text(i: int) -> str:
    return "!" * i


def nat_text(i: int = 1) -> str:
    return f"(forall a. {bangs_text(i)}(a -> a) -> a -> a)"


def str_text(i: int = 1) -> str:
    return f"(forall a. {bangs_text(i)}(B -> a -> a) -> a -> a)"


def tensor_text(parts, var: str = "t") -> str:
    inner = " -> ".join([f"({p})" for p in parts] + [var])
    return f"(forall {var}. ({inner}) -> {var})"


def bools_text(k: int) -> str:
    return tensor_text(["B"] * k)


def nat_type(i: int = 1) -> Type:
    return parse_type(nat_text(i))


def str_type(i: int = 1) -> Type:
    return parse_type(str_text(i))


# ---------------------------------------------------------------- text builders

class Names:
    """Supply of binder names that cannot clash with user-level names."""

    def __init__(self):
        self.n = itertools.count(1)

    def __call__(self, base="v"):
        return f"{base}_{next(self.n)}"


def tup(items, names: Names) -> str:
    x = names("p")
    return f"(\\{x}. {x} " + " ".join(f"({a})" for a in items) + ")"


def let(m: str, xs, body: str) -> str:
    return f"({m}) (\\{' '.join(xs)}. {body})"


def proj(m: str, i: int, n: int, names: Names) -> str:
    xs = [names("y") for _ in range(n)]
    return let(m, xs, xs[i])


def and_text(m: str, n: str) -> str:
    return f"if {m} then (if {n} then 0 else 1) else 1"


def or_text(m: str, n: str) -> str:
    return f"if {m} then 0 else (if {n} then 0 else 1)"


def alpha_text(m0: str, m1: str, m2: str, names: Names) -> str:
    """Combine a kind pair with two child results; every part shares one context."""
    a1 = proj(m0, 0, 2, names)
    a2 = proj(m0, 1, 2, names)
    r1 = proj(m1, 1, 2, names)
    r2 = proj(m2, 1, 2, names)
    ex = tup(["0", or_text(r1, r2)], names)
    un = tup(["0", and_text(r1, r2)], names)
    fin = tup(["1", proj(m0, 1, 2, names)], names)
    return f"if {a1} then (if {a2} then {ex} else {un}) else {fin}"


# ---------------------------------------------------------------- numerals

def church_term(n: int) -> Term:
    body = Var("z")
    for _ in range(n):
        body = App(Var("s"), body)
    return Lam("s", Lam("z", body))


def church(n: int, i: int = 1):
    """The numeral n with a degree-0 derivation at N_i."""
    t = church_term(n)
    return t, elaborate(t, nat_type(i))


def numeral_value(t: Term):
    """Decode a normal-form numeral (up to renaming), or None."""
    if not (isinstance(t, Lam) and isinstance(t.body, Lam)):
        return None
    s, z = t.binder, t.body.binder
    if s == z:
        return None
    u = t.body.body
    k = 0
    while isinstance(u, App) and isinstance(u.fun, Var) and u.fun.name == s:
        u = u.arg
        k += 1
    return k if isinstance(u, Var) and u.name == z else None


SUC = r"\n s z. s (n s z)"
ADD = r"\n m s z. n s (m s z)"
MUL = r"\n m s. n (m s)"
COERCE = r"\m s z. m s z"


def suc(i: int = 1):
    e = parse_eterm(SUC)
    return erase(e), elaborate(e, parse_type(f"{nat_text(i)} -> {nat_text(i + 1)}"))


def add(i: int = 1, j: int = 1):
    e = parse_eterm(ADD)
    k = max(i, j) + 1
    return erase(e), elaborate(e, parse_type(f"{nat_text(i)} -> {nat_text(j)} -> {nat_text(k)}"))


def mul(i: int = 1, j: int = 1):
    e = parse_eterm(MUL)
    ty = f"{nat_text(i)} -> {bangs_text(i)}{nat_text(j)} -> {nat_text(i + j)}"
    return erase(e), elaborate(e, parse_type(ty))


def arith_combinators(i: int = 1, j: int = 1) -> dict:
    return {"suc": suc(i), "add": add(i, j), "mul": mul(i, j)}


# ---------------------------------------------------------------- polynomials

def poly_eval(coeffs, n: int) -> int:
    return sum(c * n ** k for k, c in enumerate(coeffs))


def poly_degree(coeffs) -> int:
    d = 0
    for k, c in enumerate(coeffs):
        if c:
            d = k
    return d


def _poly_text(coeffs):
    """Text of the body of P and the numeral index of its result, with n free."""
    # monomial c * n^k is mul (n^k) c ; n^k = mul (n^(k-1)) n ; sums use add
    parts = []
    for k, c in enumerate(coeffs):
        if not c:
            continue
        if k == 0:
            parts.append((f"({church_term(c)} : {nat_text(1)})", 1))
            continue
        txt, idx = "n", 1
        for _ in range(k - 1):
            txt = f"(({MUL}) : {nat_text(idx)} -> {bangs_text(idx)}{nat_text(1)} -> {nat_text(idx + 1)}) ({txt}) n"
            idx += 1
        if c != 1:
            txt = f"(({MUL}) : {nat_text(idx)} -> {bangs_text(idx)}{nat_text(1)} -> {nat_text(idx + 1)}) ({txt}) ({church_term(c)})"
            idx += 1
        parts.append((txt, idx))
    if not parts:
        parts.append((f"({church_term(0)} : {nat_text(1)})", 1))
    txt, idx = parts[0]
    for t2, i2 in parts[1:]:
        k = max(idx, i2) + 1
        txt = f"(({ADD}) : {nat_text(idx)} -> {nat_text(i2)} -> {nat_text(k)}) ({txt}) ({t2})"
        idx = k
    return txt, idx


def poly_type_text(coeffs) -> str:
    d = poly_degree(coeffs)
    return f"{bangs_text(d)}{nat_text(1)} -> {nat_text(2 * d + 1)}"


def poly_text(coeffs) -> str:
    """Annotated text of a term defining the polynomial, landing at index 2d+1."""
    coeffs = list(coeffs)
    if any(c < 0 for c in coeffs):
        raise ValueError("polynomial coefficients must be natural numbers")
    d = poly_degree(coeffs)
    txt, idx = _poly_text(coeffs)
    target = 2 * d + 1
    if idx > target:
        raise ValueError(f"polynomial body lands at index {idx} above {target}")
    if idx < target:
        # a numeral at index i also has every larger index
        txt = f"(({COERCE}) : {nat_text(idx)} -> {nat_text(target)}) ({txt})"
    return f"\\n. {txt}"


def poly_term(coeffs):
    """A term defining the polynomial sum c_k n^k, typed !^d N -o N_(2d+1)."""
    e = parse_eterm(poly_text(coeffs))
    return erase(e), elaborate(e, parse_type(poly_type_text(coeffs)))


# ---------------------------------------------------------------- strings

def string_term(bits) -> Term:
    body = Var("z")
    for b in reversed(list(bits)):
        body = apps(Var("c"), Bool(int(b)), body)
    return Lam("c", Lam("z", body))


def bool_string(bits, i: int = 1):
    t = string_term(bits)
    return t, elaborate(t, str_type(i))


LEN = r"\c s. c (\x y. s y)"


def len_term(i: int = 1):
    e = parse_eterm(LEN)
    return erase(e), elaborate(e, parse_type(f"{str_text(i)} -> {nat_text(i)}"))


def string_value(t: Term):
    """Decode a normal-form boolean string, or None."""
    if not (isinstance(t, Lam) and isinstance(t.body, Lam)):
        return None
    c, z = t.binder, t.body.binder
    u = t.body.body
    out = []
    while isinstance(u, App) and isinstance(u.fun, App) and isinstance(u.fun.fun, Var) and u.fun.fun.name == c:
        if not isinstance(u.fun.arg, Bool):
            return None
        out.append(u.fun.arg.bit)
        u = u.arg
    return out if isinstance(u, Var) and u.name == z else None


# ---------------------------------------------------------------- connectives

AND = r"\x y. if x then (if y then 0 else 1) else 1"
OR = r"\x y. if x then 0 else (if y then 0 else 1)"
NOT = r"\x. if x then 1 else 0"


def pair_term(a: int, b: int) -> Term:
    return Lam("p", apps(Var("p"), Bool(a), Bool(b)))


def pair_value(t: Term):
    """Decode a normal-form pair of booleans, or None."""
    if isinstance(t, Lam):
        u = t.body
        if (isinstance(u, App) and isinstance(u.fun, App) and isinstance(u.fun.fun, Var)
                and u.fun.fun.name == t.binder and isinstance(u.fun.arg, Bool) and isinstance(u.arg, Bool)):
            return u.fun.arg.bit, u.arg.bit
    return None


def connectives() -> dict:
    """Closed connectives with derivations; alpha3 works on pairs of booleans."""
    bb = "B -> B -> B"
    out = {}
    for name, src, ty in (("and_", AND, bb), ("or_", OR, bb), ("not_", NOT, "B -> B")):
        e = parse_eterm(src)
        out[name] = (erase(e), elaborate(e, parse_type(ty)))
    names = Names()
    src = f"\\k m1 m2. {alpha_text('k', 'm1', 'm2', names)}"
    e = parse_eterm(src)
    b2 = bools_text(2)
    out["alpha3"] = (erase(e), elaborate(e, parse_type(f"{b2} -> {b2} -> {b2} -> {b2}")))
    return out


def tensor(items, var: str = "x") -> Term:
    return Lam(var, apps(Var(var), *items))


def projection(m: Term, i: int, n: int) -> Term:
    xs = [f"y{k}" for k in range(n)]
    return App(m, lams(xs, Var(xs[i])))


def ground_program_ok(d) -> bool:
    return not d.ctx and d.type == B
