import pytest
from hypothesis import given
from hypothesis import strategies as st

from stab import derivation as D
from stab.corpus import m_n, random_programs
from stab.encodings import church
from stab.rewrite import ShapeMismatch, subject_reduce, subst_derivation
from stab.systemf import (CHURCH_FALSE, CHURCH_TRUE, check_simulation, f_normalize, translate_term,
                          translate_type)
from stab.terms import (Bool, NotARedex, Var, alpha_eq, apps, normalize, parse, reduction_sequence,
                        sliced_occurrences, step, subst)
from stab.types import B, Arrow, Bang, Forall, TVar, parse_type, type_eq

BB = Arrow(B, B)


def m2_by_hand():
    """The derivation of |- M_2 : B assembled rule by rule."""
    inner = D.lolly_e(D.ax("f2", BB), D.ax("z", B))
    body = D.lolly_e(D.ax("f1", BB), inner)
    body = D.mux(body, ["f1", "f2"], "f")
    fun = D.lolly_i(D.lolly_i(body, "z"), "f")
    x = D.ax("x", B)
    arg = D.sp(D.lolly_i(D.bool_e(x, x, x), "x"))
    return D.lolly_e(D.lolly_e(fun, arg), D.bool_intro(0))


def identity_derivation():
    return D.lolly_i(D.ax("x", B), "x")


# ---------------------------------------------------------------- validate

def test_m2_derivation_validates():
    d = m2_by_hand()
    assert D.validate(d)
    assert alpha_eq(d.term, parse(r"(\f. \z. f (f z)) (\x. if x then x else x) 0"))
    assert d.type == B and not d.ctx


def test_shared_variable_in_application_is_rejected():
    f = D.weak(D.ax("f", BB), "x", B)
    d = D.lolly_e(f, D.ax("x", B))
    with pytest.raises(D.RuleViolation, match="disjoint"):
        D.validate(d)


def test_conditional_with_different_branch_contexts_is_rejected():
    t = D.bool_intro(0)
    d = D.bool_e(t, D.ax("x", B), D.bool_intro(1))
    with pytest.raises(D.RuleViolation, match="additive"):
        D.validate(d)


def test_violation_names_the_node():
    bad = D.lolly_e(D.lolly_i(D.ax("x", B), "x"), D.sp(D.bool_intro(0)))
    with pytest.raises(D.RuleViolation) as info:
        D.validate(bad)
    assert info.value.rule == "LollyE" and info.value.path == ()


def test_axiom_must_be_linear():
    with pytest.raises(D.RuleViolation, match="linear"):
        D.validate(D.ax("x", Bang(B)))


def test_forall_elimination_needs_linear_instance():
    const = D.forall_i(D.lolly_i(D.weak(D.bool_intro(0), "x", TVar("a")), "x"), "a")
    assert D.validate(D.forall_e(const, BB))
    bad = D.Derivation("ForallE", {}, const.term, Arrow(Bang(B), B), (const,), {"type": Bang(B)})
    with pytest.raises(D.RuleViolation):
        D.validate(bad)


def test_forall_intro_side_condition():
    d = D.forall_i(D.ax("x", TVar("a")), "a")
    with pytest.raises(D.RuleViolation, match="free in the context"):
        D.validate(d)


# ---------------------------------------------------------------- measures

def test_degree_examples():
    assert D.degree(D.bool_intro(0)) == 0
    assert D.degree(church(3)[1]) == 0
    for n in (1, 2, 5):
        assert D.degree(m_n(n).derivation) == 1
    assert D.degree(m2_by_hand()) == 1


def test_rank_examples():
    assert D.rank(identity_derivation()) == 1
    two = D.mux(D.lolly_e(D.ax("x1", BB), D.lolly_e(D.ax("x2", BB), D.ax("z", B))), ["x1", "x2"], "x")
    assert D.validate(two) and D.rank(two) == 2
    assert D.rank(m2_by_hand()) == 2
    assert D.rank(m_n(2).derivation) == 2


def test_space_weight_examples():
    assert D.space_weight(D.ax("x", B), 7) == 1
    assert D.space_weight(identity_derivation(), 1) == 2
    d = m2_by_hand()
    v = D.space_weight(d, D.rank(d))
    assert v == 16 and v <= 11 ** 2
    # by hand: 7 for the function, 3r for the promoted argument, 3 for the applications and 0
    assert [D.space_weight(d, r) for r in (1, 2, 3)] == [13, 16, 19]


def test_elaborated_m2_has_the_same_measures():
    d1, d2 = m2_by_hand(), m_n(2).derivation
    for r in range(1, 5):
        assert D.space_weight(d1, r) == D.space_weight(d2, r)
    assert D.degree(d1) == D.degree(d2) and D.rank(d1) == D.rank(d2)


# ---------------------------------------------------------------- substitution

def test_subst_derivation_axiom_case():
    out = subst_derivation(D.ax("x", B), "x", D.bool_intro(0))
    assert D.validate(out) and out.term == Bool(0) and not out.ctx


def test_subst_derivation_discards_unused_argument():
    main = D.weak(D.bool_intro(1), "x", B)
    arg = D.ax("y", B)
    out = subst_derivation(main, "x", arg)
    assert D.validate(out)
    assert out.term == Bool(1) and set(out.ctx) == {"y"}


def test_subst_derivation_through_multiplexing():
    d = m2_by_hand()
    fun_body = d.premises[0].premises[0].premises[0]       # f:!(B -o B) |- \z. f (f z)
    arg = d.premises[0].premises[1]                         # |- \x. if x then x else x : !(B -o B)
    out = subst_derivation(fun_body, "f", arg)
    assert D.validate(out)
    assert alpha_eq(out.term, subst(fun_body.term, arg.term, "f"))
    for r in range(D.rank(fun_body), 6):
        assert D.space_weight(out, r) <= D.space_weight(fun_body, r) + D.space_weight(arg, r)


def test_subst_derivation_type_mismatch():
    with pytest.raises(ShapeMismatch):
        subst_derivation(D.ax("x", B), "x", identity_derivation())


# ---------------------------------------------------------------- subject reduction

def test_subject_reduce_examples():
    d = D.lolly_e(identity_derivation(), D.bool_intro(0))
    out = subject_reduce(d)
    assert D.validate(out) and out.term == Bool(0) and out.type == B

    d = D.bool_e(D.bool_intro(0), D.bool_intro(0), D.bool_intro(1))
    out = subject_reduce(d)
    assert out.term == Bool(0)
    assert all(D.space_weight(out, r) < D.space_weight(d, r) for r in range(1, 6))

    d = m2_by_hand()
    rk = D.rank(d)
    out = subject_reduce(d, ("fun",))
    assert D.validate(out)
    assert alpha_eq(out.term, parse(r"(\z. (\x. if x then x else x) ((\x. if x then x else x) z)) 0"))
    assert D.space_weight(out, rk) < D.space_weight(d, rk)
    with pytest.raises(NotARedex):
        subject_reduce(d, ())


@given(st.integers(0, 10**6))
def test_subject_reduction_along_leftmost_sequences(seed):
    (e,) = random_programs(count=1, seed=seed, max_size=40)
    d = e.derivation
    rk = D.rank(d)
    seq, nf = reduction_sequence(e.term)
    for t, pos in seq:
        d2 = subject_reduce(d, pos)
        assert D.validate(d2)
        assert alpha_eq(d2.term, step(t, pos)) and type_eq(d2.type, d.type)
        for r in range(rk, rk + 3):
            assert D.space_weight(d2, r) <= D.space_weight(d, r)
            if all(s == "fun" for s in pos):
                assert D.space_weight(d2, r) < D.space_weight(d, r)
        d = d2
    assert d.term == nf


# ---------------------------------------------------------------- weights and occurrences

@given(st.integers(0, 10**6))
def test_weight_grows_at_most_polynomially_in_r(seed):
    (e,) = random_programs(count=1, seed=seed)
    d = e.derivation
    w1, deg = D.space_weight(d, 1), D.degree(d)
    for r in range(1, 9):
        assert D.space_weight(d, r) <= w1 * r ** deg


def test_banged_conclusions_do_not_use_linear_assumptions(corpus):
    for e in corpus:
        for _, node in e.derivation.nodes():
            if isinstance(node.type, Bang):
                for x, a in node.ctx.items():
                    if not isinstance(a, Bang):
                        assert x not in node.term.fv, (e.name, x)


def _bangs(t):
    n = 0
    while isinstance(t, Bang):
        t, n = t.inner, n + 1
    return n


def test_sliced_occurrences_bounded_by_rank_power(random_corpus):
    for e in random_corpus + [m_n(n) for n in range(1, 6)]:
        for _, node in e.derivation.nodes():
            rk = D.rank(node)
            for x, a in node.ctx.items():
                n = _bangs(a)
                assert sliced_occurrences(x, node.term) <= rk ** n, (e.name, x)


# ---------------------------------------------------------------- System F

def test_translate_type_examples():
    assert type_eq(translate_type(B), parse_type("forall a. a -> a -> a"))
    s = parse_type("!(B -> B)")
    assert type_eq(translate_type(s), translate_type(s.inner))
    assert type_eq(translate_type(parse_type("forall b. !b -> b")), parse_type("forall b. b -> b"))


def test_translate_term_example():
    out = translate_term(parse("if x then 0 else 1"))
    assert alpha_eq(out, apps(Var("x"), CHURCH_TRUE, CHURCH_FALSE))
    assert alpha_eq(translate_term(Bool(0)), parse(r"\a b. a"))


@pytest.mark.parametrize("text,k", [(r"(\x. x) 0", 1), ("if 0 then x else y", 2),
                                    ("if 1 then 0 else 1", 2)])
def test_check_simulation_examples(text, k):
    assert check_simulation(parse(text), ()) == k


@given(st.integers(0, 10**6))
def test_translation_commutes_with_normalization(seed):
    (e,) = random_programs(count=1, seed=seed)
    nf = normalize(e.term)
    assert alpha_eq(f_normalize(translate_term(e.term)), translate_term(nf))


# ---------------------------------------------------------------- serialization

@given(st.integers(0, 10**6))
def test_derivation_json_roundtrip(seed):
    (e,) = random_programs(count=1, seed=seed)
    d2 = D.loads(D.dumps(e.derivation))
    assert D.validate(d2)
    assert D.dumps(d2) == D.dumps(e.derivation)


def test_type_parser():
    t = parse_type("forall a. !(a -> a) -> a -> a")
    assert isinstance(t, Forall)
    assert type_eq(parse_type("B -> B -> B"), Arrow(B, Arrow(B, B)))
    assert type_eq(parse_type("forall a. a -> a"), parse_type("forall b. b -> b"))
