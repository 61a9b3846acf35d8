import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from stab import derivation as D
from stab.encodings import (arith_combinators, bool_string, church, church_term, connectives, len_term,
                            nat_type, numeral_value, pair_term, pair_value, poly_eval, poly_term,
                            projection, string_value, tensor)
from stab.terms import App, Bool, alpha_eq, apps, leftmost_redex, normalize, parse, step
from stab.types import bangs, type_eq

from test_terms import terms


def value(t, *args):
    return normalize(apps(t, *args))


# ---------------------------------------------------------------- numerals

def test_church_examples():
    t, d = church(0)
    assert alpha_eq(t, parse(r"\s z. z")) and type_eq(d.type, nat_type(1))
    t, d = church(2, 3)
    assert alpha_eq(t, parse(r"\s z. s (s z)")) and D.degree(d) == 0 and type_eq(d.type, nat_type(3))
    assert church(3)[0].size == 3 + 3


@pytest.mark.parametrize("n", range(6))
def test_numeral_derivations_have_degree_zero(n):
    t, d = church(n)
    assert D.validate(d) and D.degree(d) == 0 and numeral_value(t) == n


def test_arithmetic_examples():
    a = arith_combinators()
    assert numeral_value(value(a["suc"][0], church_term(2))) == 3
    assert numeral_value(value(a["add"][0], church_term(2), church_term(3))) == 5
    assert numeral_value(value(a["mul"][0], church_term(2), church_term(3))) == 6
    for _, d in a.values():
        assert D.validate(d) and not d.ctx


@pytest.mark.parametrize("i,j", [(1, 1), (1, 2), (2, 1)])
def test_arithmetic_types_at_other_indices(i, j):
    a = arith_combinators(i, j)
    assert type_eq(a["suc"][1].type.cod, nat_type(i + 1))
    assert type_eq(a["add"][1].type.cod.cod, nat_type(max(i, j) + 1))
    assert type_eq(a["mul"][1].type.cod.cod, nat_type(i + j))


@given(st.integers(0, 6), st.integers(0, 6))
def test_arithmetic_matches_integers(m, n):
    a = arith_combinators()
    assert numeral_value(value(a["add"][0], church_term(m), church_term(n))) == m + n
    assert numeral_value(value(a["mul"][0], church_term(m), church_term(n))) == m * n


# ---------------------------------------------------------------- polynomials

@pytest.mark.parametrize("coeffs", [[0, 1], [0, 0, 1], [1, 2, 3], [5], [0, 0, 0, 1], [2, 0, 1]])
def test_polynomials_against_arithmetic(coeffs):
    t, d = poly_term(coeffs)
    assert D.validate(d)
    deg = max([k for k, c in enumerate(coeffs) if c] or [0])
    assert type_eq(d.type.dom, bangs(nat_type(1), deg))
    assert type_eq(d.type.cod, nat_type(2 * deg + 1))
    for n in range(6):
        assert numeral_value(normalize(App(t, church_term(n)))) == poly_eval(coeffs, n)


def test_polynomial_examples():
    t, d = poly_term([0, 1])
    assert numeral_value(normalize(App(t, church_term(4)))) == 4
    t, d = poly_term([0, 0, 1])
    assert numeral_value(normalize(App(t, church_term(3)))) == 9


@pytest.mark.parametrize("k", [1, 2, 3])
def test_monomial_degree_equals_the_bang_prefix(k):
    _, d = poly_term([0] * k + [1])
    assert D.degree(d) == k


# ---------------------------------------------------------------- strings

def test_string_examples():
    t, d = bool_string([])
    assert alpha_eq(t, parse(r"\c z. z"))
    t, d = bool_string([0, 1])
    assert alpha_eq(t, parse(r"\c z. c 0 (c 1 z)"))
    assert D.degree(d) == 0
    ln, dl = len_term()
    assert D.validate(dl)
    assert numeral_value(normalize(App(ln, t))) == 2


@given(st.lists(st.sampled_from([0, 1]), max_size=8))
def test_string_roundtrip_and_length(bits):
    t, d = bool_string(bits)
    assert D.validate(d) and D.degree(d) == 0
    assert string_value(t) == bits
    assert numeral_value(normalize(App(len_term()[0], t))) == len(bits)


# ---------------------------------------------------------------- connectives

def test_connective_truth_tables():
    c = connectives()
    for a, b in itertools.product((0, 1), repeat=2):
        assert value(c["and_"][0], Bool(a), Bool(b)) == Bool(0 if a == b == 0 else 1)
        assert value(c["or_"][0], Bool(a), Bool(b)) == Bool(0 if 0 in (a, b) else 1)
    assert value(c["not_"][0], Bool(0)) == Bool(1)
    assert value(c["and_"][0], Bool(0), Bool(1)) == Bool(1)
    assert value(c["or_"][0], Bool(1), Bool(0)) == Bool(0)


def _alpha_expected(kind, m1, m2):
    k1, k2 = kind
    if k1 == 1:
        return kind
    r1, r2 = m1[1], m2[1]
    if k2 == 0:
        return (0, 0 if 0 in (r1, r2) else 1)
    return (0, 0 if r1 == r2 == 0 else 1)


def test_alpha_table():
    t, d = connectives()["alpha3"]
    assert D.validate(d) and D.degree(d) == 0
    assert all(node.rule != "sp" for _, node in d.nodes())
    pairs = list(itertools.product((0, 1), repeat=2))
    for kind, m1, m2 in itertools.product(pairs, repeat=3):
        out = pair_value(value(t, pair_term(*kind), pair_term(*m1), pair_term(*m2)))
        assert out == _alpha_expected(kind, m1, m2)
        if kind == (1, 0):
            assert out == (1, 0)


# ---------------------------------------------------------------- tensors

def closed_terms():
    return terms(6).filter(lambda t: not t.fv)


def head_steps(t, k):
    for _ in range(k):
        t = step(t, leftmost_redex(t))
    return t


@given(closed_terms(), closed_terms())
def test_pair_projections(m, n):
    # one step passes the selector to the pair, two more consume its components
    p = tensor([m, n])
    assert alpha_eq(head_steps(projection(p, 0, 2), 3), m)
    assert alpha_eq(head_steps(projection(p, 1, 2), 3), n)


@given(st.lists(st.sampled_from([Bool(0), Bool(1), parse(r"\x. x")]), min_size=1, max_size=5))
def test_n_ary_projections(items):
    p = tensor(items)
    for i, item in enumerate(items):
        assert alpha_eq(normalize(projection(p, i, len(items))), item)
