"""Quantitative checks on a program and its derivation: the static measures,
the per-configuration size and counter bounds, and machine agreement."""
from __future__ import annotations

from dataclasses import dataclass, field

from . import derivation as D
from .bigstep import eval_big
from .smallstep import run_small
from .terms import App, Bool, FuelExhausted, If, Lam, Term, alpha_eq, normalize

WEIGHT_RANKS = range(1, 9)

# flags that hold for every valid derivation; a failure is a bug
PROVEN = ("weight_rank", "weight_size_app", "weight_power_app", "space", "sizes", "card_A",
          "card_C_pending", "counts", "h_count", "space_s", "agree")
# literal readings that are known to fail on some programs (see the README)
LITERAL = ("weight_size", "weight_power", "card_C")


@dataclass
class BoundReport:
    name: str
    size: int
    degree: int | None = None
    rank: int | None = None
    weight: int | None = None          # space weight at the rank
    bound: int | None = None           # 6 |M|^(3d+3)
    result: int | None = None
    space: int | None = None
    space_s: int | None = None
    rule_applications: int | None = None
    flags: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(v for k, v in self.flags.items() if k in PROVEN)

    COLUMNS = ("name", "size", "degree", "rank", "weight", "result", "space", "space_s", "bound",
               "rules", "ok", "failed")

    def row(self) -> list:
        failed = [k for k in PROVEN if k in self.flags and not self.flags[k]]
        return [self.name, self.size, self.degree, self.rank, self.weight, self.result, self.space,
                self.space_s, self.bound, self.rule_applications, "yes" if self.ok else "no",
                "+".join(failed) or "-"]


def application_count(t: Term) -> int:
    stack, k = [t], 0
    while stack:
        u = stack.pop()
        if isinstance(u, App):
            k += 1
            stack += [u.fun, u.arg]
        elif isinstance(u, Lam):
            stack.append(u.body)
        elif isinstance(u, If):
            stack += [u.test, u.then0, u.else1]
    return k


def weight_flags(term: Term, d: D.Derivation) -> dict:
    """Space-weight inequalities, both as literally stated (size without
    application nodes) and with application nodes counted in the size."""
    m = term.size
    m_app = m + application_count(term)
    deg, rk = D.degree(d), D.rank(d)
    w1 = D.space_weight(d, 1)
    w_rk = D.space_weight(d, rk)
    return {
        "weight_size": w1 <= m,
        "weight_size_app": w1 <= m_app,
        "weight_rank": all(D.space_weight(d, r) <= w1 * r ** deg for r in WEIGHT_RANKS),
        "weight_power": w_rk <= m ** (deg + 1),
        "weight_power_app": w_rk <= m_app * m ** deg,
    }


def static_report(term: Term, d: D.Derivation | None, name: str = "") -> BoundReport:
    r = BoundReport(name, term.size)
    if d is not None:
        D.validate(d)
        if not alpha_eq(d.term, term):
            raise D.RuleViolation((), d.rule, "derivation subject differs from the program", d)
        r.degree, r.rank = D.degree(d), D.rank(d)
        r.weight = D.space_weight(d, r.rank)
        r.bound = 6 * term.size ** (3 * r.degree + 3)
        r.flags.update(weight_flags(term, d))
    return r


class ConfigChecker:
    """Observer for eval_big checking every configuration against the size and counter bounds."""

    def __init__(self, size: int, degree: int, weight: int):
        self.m, self.d, self.w = size, degree, weight
        self.flags = {"sizes": True, "card_A": True, "card_C": True, "card_C_pending": True,
                      "counts": True, "h_count": True}
        self.first_failure = {}

    def _fail(self, key, step):
        if self.flags[key]:
            self.flags[key] = False
            self.first_failure[key] = step.index

    def __call__(self, s):
        m, d = self.m, self.d
        if not (s.a_size <= 2 * m ** (d + 2) and s.m_size <= 2 * m ** (2 * d + 2)
                and s.c_size <= 2 * m ** (3 * d + 3)):
            self._fail("sizes", s)
        if s.a_card != s.beta:
            self._fail("card_A", s)
        if s.c_card != s.ifs:
            self._fail("card_C", s)
        if s.c_card != s.pending:
            self._fail("card_C_pending", s)
        if s.beta + s.ifs > self.w:
            self._fail("counts", s)
        if s.h > s.a_card * m ** d:
            self._fail("h_count", s)


def full_report(term: Term, d: D.Derivation | None, name: str = "", fuel: int | None = None,
                reference: bool = True) -> BoundReport:
    """Static measures plus a run of both machines (and leftmost normalization when `reference`)."""
    r = static_report(term, d, name)
    checker = ConfigChecker(term.size, r.degree, r.weight) if d is not None else None
    b, stats, _ = eval_big(term, observer=checker, fuel=fuel)
    b_s, space_s = run_small(term, fuel=fuel)
    r.result, r.space, r.space_s = b, stats.max_config_size, space_s
    r.rule_applications = stats.rule_applications
    agree = b == b_s
    if reference:
        try:
            nf = normalize(term)
            agree = agree and isinstance(nf, Bool) and nf.bit == b
        except FuelExhausted:
            agree = False
    r.flags["agree"] = agree
    r.flags["space_s"] = space_s <= r.space
    if d is not None:
        r.flags["space"] = r.space <= r.bound
        r.flags.update(checker.flags)
    return r
