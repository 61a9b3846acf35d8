import pytest
from hypothesis import given
from hypothesis import strategies as st

from stab.bigstep import (Frame, Stuck, bctx_fill, bctx_size, check_weakening, closure, eval_big,
                          evaluate_in, mctx_size, space, walk)
from stab.corpus import m_n, random_programs
from stab.terms import Bool, Var, base_name, parse, show, subst

from test_terms import terms

M2 = parse(r"(\f. \z. f (f z)) (\x. if x then x else x) 0")


def test_closure_examples():
    assert closure(Var("x"), [("x", Bool(0))]) == Bool(0)
    assert closure(Var("x"), [("x", Var("y")), ("y", Bool(0))]) == Bool(0)
    assert closure(Bool(0), [("x", Bool(1))]) == Bool(0)


def test_eval_big_examples():
    assert eval_big(Bool(0))[0] == 0
    assert eval_big(M2)[0] == 0
    b, stats, _ = eval_big(parse(r"(\x. x) 1"))
    assert b == 1 and (stats.total_beta, stats.total_h) == (1, 1)


def test_stuck_reports_configuration():
    with pytest.raises(Stuck) as info:
        eval_big(parse("x 0"))
    assert "x 0" in info.value.config
    with pytest.raises(Stuck, match="abstraction with no argument"):
        eval_big(parse(r"\x. x"))


def test_space_examples():
    assert space(Bool(0)) == 1
    assert space(parse(r"(\x. x) 0")) == 3
    assert space(M2) <= 6 * 11 ** 6


def test_m2_statistics():
    b, stats, root = eval_big(M2, tree=True)
    assert stats.configurations == 25 == sum(1 for _ in walk(root))
    assert stats.max_config_size == 21
    assert (stats.beta_count, stats.h_count, stats.if_count) == (4, 5, 2)


def test_check_weakening_examples():
    assert check_weakening((), (), Bool(0), (Frame(Bool(1), Bool(0)),))
    assert check_weakening((), (("x", Bool(0)),), Var("x"), (Frame(Bool(0), Bool(1)),))


def test_weakening_of_an_inner_subcomputation():
    _, _, root = eval_big(M2, tree=True)
    inner = [n for n in walk(root) if n.step.bctx and n.step.rule == "h"]
    assert inner
    for node in inner:
        s = node.step
        outer = (Frame(Bool(1), Bool(0)), Frame(Var("y"), Bool(1), (Bool(0),)))
        assert check_weakening(s.bctx, s.mctx, s.subject, outer)
        # the subcomputation alone yields the boolean recorded in the tree
        assert evaluate_in(s.bctx, s.mctx, s.subject) == node.result


def frames():
    return st.lists(st.builds(Frame, terms(4), terms(4), st.lists(terms(3), max_size=2).map(tuple)),
                    max_size=3).map(tuple)


@given(frames())
def test_bcontext_size_formula_matches_filling(fs):
    if fs:
        assert bctx_size(fs) == bctx_fill(fs, Var("hole")).size
    else:
        assert bctx_size(fs) == 0


@given(st.lists(st.tuples(st.sampled_from(["a", "b", "c"]), terms(5)), max_size=4))
def test_mcontext_size(assignments):
    assert mctx_size(assignments) == sum(n.size + 1 for _, n in assignments)


def _subterms(t):
    out = {show(t)}
    for child in ("fun", "arg", "body", "test", "then0", "else1"):
        c = getattr(t, child, None)
        if c is not None:
            out |= _subterms(c)
    return out


def _unfresh(t):
    for x in sorted(t.fv):
        if "#" in x:
            t = subst(t, Var(base_name(x)), x)
    return t


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_assigned_terms_are_instances_of_subterms(seed):
    programs = random_programs(count=40, seed=seed) + [m_n(n) for n in (2, 4)]
    for e in programs:
        subs = _subterms(e.term)
        _, _, root = eval_big(e.term, tree=True)
        for node in walk(root):
            for _, n in node.step.mctx:
                assert show(_unfresh(n)) in subs, (e.name, show(n))


def test_counters_match_context_cardinalities(random_corpus):
    for e in random_corpus:
        def check(s):
            assert s.a_card == s.beta
            assert s.c_card == s.pending
        eval_big(e.term, observer=check)
