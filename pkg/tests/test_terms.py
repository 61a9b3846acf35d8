import pytest
from hypothesis import given
from hypothesis import strategies as st

from stab.corpus import random_programs
from stab.terms import (App, Bool, FuelExhausted, If, Lam, NotARedex, ParseError, Var, alpha_eq,
                        count_occurrences, free_vars, leftmost_redex, normalize, parse, redexes, show,
                        size, sliced_occurrences, step, subst)

M2 = r"(\f. \z. f (f z)) (\x. if x then x else x) 0"

NAMES = st.sampled_from(["x", "y", "z"])


def terms(max_leaves=12):
    leaf = st.one_of(NAMES.map(Var), st.sampled_from([Bool(0), Bool(1)]))
    return st.recursive(
        leaf,
        lambda sub: st.one_of(
            st.builds(Lam, NAMES, sub),
            st.builds(App, sub, sub),
            st.builds(If, sub, sub, sub)),
        max_leaves=max_leaves)


def literal_size(t):
    if isinstance(t, (Var, Bool)):
        return 1
    if isinstance(t, Lam):
        return literal_size(t.body) + 1
    if isinstance(t, App):
        return literal_size(t.fun) + literal_size(t.arg)
    return literal_size(t.test) + literal_size(t.then0) + literal_size(t.else1) + 1


# ---------------------------------------------------------------- size, free variables, substitution

@pytest.mark.parametrize("text,expected", [("0", 1), (r"\x.x", 2), (M2, 11)])
def test_size_examples(text, expected):
    assert size(parse(text)) == expected


@pytest.mark.parametrize("text,expected", [(r"\x. x y", {"y"}), ("0", set()),
                                           ("if x then y else x", {"x", "y"})])
def test_free_vars_examples(text, expected):
    assert free_vars(parse(text)) == expected


def test_subst_examples():
    assert subst(Var("x"), Bool(0), "x") == Bool(0)
    out = subst(parse(r"\y. x"), parse("y z"), "x")
    assert isinstance(out, Lam) and out.binder != "y"
    assert alpha_eq(out, parse(r"\w. y z"))
    assert subst(parse(r"\x. x"), Bool(1), "x") == parse(r"\x. x")


@pytest.mark.parametrize("x,text,expected", [("x", "x x", 2), ("x", r"\x. x", 0),
                                             ("x", "if x then x else x", 3)])
def test_count_occurrences_examples(x, text, expected):
    assert count_occurrences(x, parse(text)) == expected


@pytest.mark.parametrize("x,text,expected", [("x", "if x then x else x", 1), ("x", "x x", 2),
                                             ("x", "(if x then x else 0) x", 2)])
def test_sliced_occurrences_examples(x, text, expected):
    assert sliced_occurrences(x, parse(text)) == expected


# ---------------------------------------------------------------- reduction

def test_step_examples():
    assert step(parse("if 0 then x else y")) == Var("x")
    assert step(parse("if 1 then x else y")) == Var("y")
    assert step(parse(r"(\x. x) 1")) == Bool(1)
    assert step(parse(r"\y. (\x. x) 0"), ("body",)) == parse(r"\y. 0")
    with pytest.raises(NotARedex):
        step(parse("x 0"))


def test_leftmost_redex_examples():
    assert leftmost_redex(Bool(0)) is None
    assert leftmost_redex(parse(r"(\x. x) 0")) == ()
    assert leftmost_redex(parse(r"if ((\x. x) 0) then 0 else 1")) == ("test",)


def test_normalize_examples():
    assert normalize(parse(r"(\x. x) 0"), 10) == Bool(0)
    assert normalize(Bool(1), 0) == Bool(1)
    assert normalize(parse(M2), 100) == Bool(0)


def test_normalize_fuel_exhausted_carries_last_term():
    omega = parse(r"(\x. x x) (\x. x x)")
    with pytest.raises(FuelExhausted) as info:
        normalize(omega, 5)
    assert alpha_eq(info.value.last, omega)


# ---------------------------------------------------------------- parsing

def test_parse_roundtrip_and_errors():
    t = parse(M2)
    assert parse(show(t)) == t
    with pytest.raises(ParseError) as info:
        parse(r"(\x. x")
    assert info.value.line == 1 and info.value.col == 7
    with pytest.raises(ParseError):
        parse("if x then y")
    assert parse(r"λx. x") == parse(r"\x. x")


# ---------------------------------------------------------------- properties

@given(terms())
def test_size_positive_and_follows_recurrence(t):
    assert t.size >= 1
    assert t.size == literal_size(t)


@given(terms(), terms(), NAMES)
def test_subst_without_free_occurrence_is_identity(t, n, x):
    if x not in t.fv:
        assert subst(t, n, x) == t


@given(terms(), NAMES)
def test_sliced_at_most_count(t, x):
    assert sliced_occurrences(x, t) <= count_occurrences(x, t)


@given(terms())
def test_step_preserves_closedness(t):
    if t.fv:
        return
    for p in redexes(t):
        assert not step(t, p).fv


@given(terms(), terms(), NAMES)
def test_subst_removes_variable(t, n, x):
    if x not in n.fv:
        assert x not in subst(t, n, x).fv


@given(terms())
def test_parse_show_roundtrip(t):
    assert parse(show(t)) == t


def all_normal_forms(t, limit=20000):
    """Normal forms reachable by any order of reduction (exhaustive search)."""
    seen, todo, out = set(), [t], []
    while todo:
        u = todo.pop()
        key = show(u)
        if key in seen:
            continue
        seen.add(key)
        assert len(seen) < limit
        rs = redexes(u)
        if not rs:
            out.append(u)
        todo += [step(u, p) for p in rs]
    return out


def test_leftmost_agrees_with_every_order_on_small_programs():
    small = [e for e in random_programs(count=240) if e.term.size <= 12]
    assert len(small) >= 20
    for e in small:
        nf = normalize(e.term)
        assert isinstance(nf, Bool)
        assert all(u == nf for u in all_normal_forms(e.term))


@given(st.integers(0, 10**6))
def test_leftmost_agrees_with_every_order_on_generated_programs(seed):
    (e,) = random_programs(count=1, seed=seed, max_size=12, min_size=2)
    nf = normalize(e.term)
    assert all(u == nf for u in all_normal_forms(e.term))
