import random

import pytest

from mcprover.terms import App, Literal, Var
from mcprover.unification import (
    EMPTY_SUBSTITUTION,
    Substitution,
    literals_equal_under,
    resolve_term,
    terms_equal_under,
    unify,
)


# --- independent reference unifier (naive, eager substitution) --------------

def ref_apply(sub, t):
    if isinstance(t, Var):
        while isinstance(t, Var) and t.id in sub:
            t = sub[t.id]
        if isinstance(t, Var):
            return t
    if not t.args:
        return t
    return App(t.functor, tuple(ref_apply(sub, a) for a in t.args))


def ref_occurs(var_id, t, sub):
    t = ref_apply(sub, t)
    if isinstance(t, Var):
        return t.id == var_id
    return any(ref_occurs(var_id, a, sub) for a in t.args)


def ref_unify(s, t, sub=None):
    sub = dict(sub or {})
    queue = [(s, t)]
    while queue:
        a, b = queue.pop()
        a = ref_apply(sub, a)
        b = ref_apply(sub, b)
        if a == b:
            continue
        if isinstance(a, Var):
            if ref_occurs(a.id, b, sub):
                return None
            sub[a.id] = b
        elif isinstance(b, Var):
            queue.append((b, a))
        elif a.functor == b.functor and len(a.args) == len(b.args):
            queue.extend(zip(a.args, b.args))
        else:
            return None
    return sub


def random_term(rng, depth, n_vars=4, n_functors=3, max_arity=3):
    if depth == 0 or rng.random() < 0.35:
        if rng.random() < 0.5:
            return Var(rng.randrange(n_vars))
        return App(f"c{rng.randrange(2)}")
    functor = f"f{rng.randrange(n_functors)}"
    arity = rng.randint(1, max_arity)
    return App(functor, tuple(random_term(rng, depth - 1, n_vars) for _ in range(arity)))


# --- basic examples ----------------------------------------------------------

def test_unify_single_binding():
    s = App("p", (Var(0),))
    t = App("p", (App("a"),))
    sigma = unify(EMPTY_SUBSTITUTION, s, t)
    assert sigma is not None
    assert resolve_term(sigma, s) == t


def test_occurs_check():
    assert unify(EMPTY_SUBSTITUTION, Var(0), App("f", (Var(0),))) is None


def test_unify_extends_without_mutating_parent():
    base = EMPTY_SUBSTITUTION.extended({0: App("a")})
    before = dict(base.items())
    sigma = unify(base, App("q", (Var(0), Var(1))), App("q", (App("a"), App("b"))))
    assert sigma is not None
    assert dict(base.items()) == before
    assert resolve_term(sigma, Var(1)) == App("b")
    assert sigma.factors_through(base)


def test_literal_unification_requires_complement():
    a = Literal(True, "p", (Var(0),))
    b = Literal(False, "p", (App("a"),))
    sigma = unify(EMPTY_SUBSTITUTION, a, b)
    assert resolve_term(sigma, Var(0)) == App("a")
    with pytest.raises(ValueError):
        unify(EMPTY_SUBSTITUTION, a, a)


def test_clash_fails():
    assert unify(EMPTY_SUBSTITUTION, App("a"), App("b")) is None
    assert unify(EMPTY_SUBSTITUTION, App("f", (Var(0),)), App("g", (Var(0),))) is None


def test_factors_through_chain():
    s0 = EMPTY_SUBSTITUTION
    s1 = s0.extended({0: App("a")})
    s2 = s1.extended({1: App("b")})
    assert s2.factors_through(s1)
    assert s2.factors_through(s0)
    assert not s1.factors_through(s2)


def test_flattening_preserves_lookups():
    sigma = EMPTY_SUBSTITUTION
    for i in range(100):
        sigma = sigma.extended({i: App(f"k{i}")})
    for i in range(100):
        assert sigma.lookup(i) == App(f"k{i}")
    assert len(sigma) == 100


def test_equal_under_handles_var_chains():
    sigma = EMPTY_SUBSTITUTION.extended({0: Var(1)}).extended({1: App("a")})
    assert terms_equal_under(sigma, Var(0), App("a"))
    assert literals_equal_under(sigma, Literal(True, "p", (Var(0),)), Literal(True, "p", (Var(1),)))
    assert not literals_equal_under(sigma, Literal(True, "p", (Var(0),)), Literal(False, "p", (Var(0),)))


# --- randomized agreement with the reference unifier -------------------------

def agreement_case(rng):
    s = random_term(rng, depth=rng.randint(1, 4))
    t = random_term(rng, depth=rng.randint(1, 4))
    ours = unify(EMPTY_SUBSTITUTION, s, t)
    reference = ref_unify(s, t)
    if (ours is None) != (reference is None):
        return False, (s, t, "outcome mismatch")
    if ours is not None:
        if resolve_term(ours, s) != resolve_term(ours, t):
            return False, (s, t, "engine result does not unify")
        if ref_apply(reference, s) != ref_apply(reference, t):
            return False, (s, t, "reference result does not unify")
    return True, None


def test_reference_unifier_agreement_1000():
    rng = random.Random(20240817)
    for _ in range(1000):
        ok, detail = agreement_case(rng)
        assert ok, detail


def test_reference_unifier_fixed_occurs_cases():
    cases = [
        (Var(0), App("f", (Var(0),))),
        (App("f", (Var(0), Var(1))), App("f", (Var(1), App("g", (Var(0),))))),
        (App("f", (Var(0),)), App("f", (App("g", (App("h", (Var(0),)),)),))),
    ]
    for s, t in cases:
        assert unify(EMPTY_SUBSTITUTION, s, t) is None
        assert ref_unify(s, t) is None
