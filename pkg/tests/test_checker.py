import random

import pytest
from hypothesis import given, settings, strategies as st

from termgen import AMBIENT, gen_term
from dtt.checker import DEFAULT_FUEL, Checker
from dtt.errors import DttError, FuelExhausted
from dtt.mode_theory import Modality as M
from dtt.surface import load
from dtt.syntax import (
    ID_SM,
    TYPE,
    App,
    BlackDiamond,
    Context,
    DiaForm,
    El,
    Lam,
    Meta,
    Pi,
    TriForm,
    Var,
    alpha_eq,
)


@pytest.fixture(scope="module")
def empty():
    return load("")


def infer_text(mod, ctx_text, expr):
    ctx = mod.context(ctx_text)
    term, ty = mod.term(expr, ctx)
    return ctx, term, ty


def test_beta_and_eta(empty):
    ch = empty.checker
    ctx = empty.context("(A : Type) (a : A)")
    term = App(ID_SM, Lam(ID_SM, Var(0), "x", El(Var(1))), Var(0))
    assert ch.infer(ctx, term) == El(Var(1))
    assert ch.normalize(ctx, term) == Var(0)
    ctx, f, _ = infer_text(empty, "(A : Type) (f : A → A)", "f")
    eta = Lam(ID_SM, App(ID_SM, Var(1), Var(0)), "x", El(Var(1)))
    assert ch.convert(ctx, f, eta)


def test_application_at_wrong_modality_is_rejected(empty):
    ctx = Context.empty().extend(ID_SM, "A", TYPE).extend(ID_SM, "f", Pi(M.TRIBOX, El(Var(0)), El(Var(1))))
    ctx = ctx.extend(ID_SM, "a", El(Var(1)))
    with pytest.raises(DttError) as info:
        empty.checker.infer(ctx, App(ID_SM, Var(1), Var(0)))
    assert info.value.code == "modality-violation"


def test_variable_behind_unmatched_lock_is_hazardous(empty):
    ctx = Context.empty().extend(ID_SM, "A", TYPE).lock(M.TRIBOX)
    with pytest.raises(DttError) as info:
        empty.checker.infer(ctx, Var(0))
    assert info.value.code == "modality-violation"


def test_unannotated_lambda_needs_a_type(empty):
    with pytest.raises(DttError) as info:
        empty.checker.infer(Context.empty(), Lam(ID_SM, Var(0)))
    assert info.value.code == "annotation-required"


def test_modal_intro_checks_under_lock(empty):
    ctx, _, ty = infer_text(empty, "(y :^T Dia Type)", "△ ◇ ◆ y")
    assert ty == TriForm(DiaForm(TYPE))


# The same ◆-using term in two contexts that differ only in their locks.
DIAMOND_CTX = Context.empty().extend(M.TRI, "y", DiaForm(TYPE))
DIAMOND = BlackDiamond(None, Var(0))


def test_diamond_elim_in_flat_context(empty):
    flat = DIAMOND_CTX.lock(M.TRI).lock(M.DIA)
    assert empty.checker.infer(flat, DIAMOND) == TYPE


def test_diamond_elim_in_non_flat_context(empty):
    with pytest.raises(DttError) as info:
        empty.checker.infer(DIAMOND_CTX, DIAMOND)
    assert info.value.code == "not-flat"


def test_fuel_exhaustion_is_reported():
    ch = Checker(fuel=3)
    mod = load("")
    ctx = mod.context("(A : Type) (a : A)")
    term = Var(0)
    for _ in range(5):
        term = App(ID_SM, Lam(ID_SM, Var(0), "x", El(Var(1))), term)
    with pytest.raises(FuelExhausted):
        ch.normalize(ctx, term)
    assert ch.exhausted == 1
    assert mod.checker.normalize(ctx, term) == Var(0)


def test_unify_solves_and_zonks(empty):
    ch = empty.checker
    sol = {}
    pattern = Pi(ID_SM, Meta(0), El(Meta(1)))
    target = Pi(ID_SM, TYPE, El(Var(1)))
    assert ch.unify(pattern, target, sol)
    assert sol == {0: TYPE, 1: Var(0)}
    assert ch.zonk(pattern, sol) == target


def test_unify_refuses_escaping_bound_variable(empty):
    sol = {}
    assert not empty.checker.unify(Lam(ID_SM, Meta(0)), Lam(ID_SM, Var(0)), sol)


@pytest.fixture(scope="module")
def ambient(corpus):
    mod = corpus("fib.dtt")
    return mod, mod.context(AMBIENT)


def test_normalizer_properties_on_random_terms(ambient):
    mod, ctx = ambient
    for seed in range(1000):
        term = gen_term(random.Random(seed), 6, mod.sig)
        ch = Checker(mod.sig)
        ty = ch.infer(ctx, term)
        nf = ch.normalize(ctx, term)
        assert ch.normalize(ctx, nf) == nf, seed
        assert Checker(mod.sig).normalize(ctx, term) == nf, seed
        ch.check(ctx, nf, ty)
        assert ch.exhausted == 0


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_normal_forms_are_stable_under_renaming_hypothesis(ambient, seed):
    mod, ctx = ambient
    term = gen_term(random.Random(seed), 6, mod.sig)
    ch = mod.checker
    assert alpha_eq(ch.normalize(ctx, term), ch.normalize(ctx, ch.whnf(term)))


CORPUS_FILES = ["sst.dtt", "asst.dtt", "int.dtt", "fib.dtt", "fib_prime.dtt", "pt.dtt", "hom.dtt", "modal.dtt"]


@pytest.mark.parametrize("name", CORPUS_FILES)
def test_corpus_checks_without_exhaustion(corpus, name):
    mod = corpus(name)
    assert mod.checker.fuel == DEFAULT_FUEL
    assert mod.checker.exhausted == 0
