import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import golden
from termgen import AMBIENT, gen_psub
from dtt.display import (
    Env,
    decalage_psub,
    decalage_tel,
    disp,
    disp_ty,
    display_tel,
    evens,
    is_decalaged,
    odds,
    pair,
)
from dtt.errors import DttError
from dtt.mode_theory import Modality as M
from dtt.printer import show
from dtt.surface import load
from dtt.syntax import ID_SM, TYPE, El, Pi, Telescope, Var, alpha_eq


@pytest.fixture(scope="module")
def empty():
    return load("")


def normalized_type(mod, ctx_text, expr, **style):
    ctx = mod.context(ctx_text)
    _, ty = mod.term(expr, ctx)
    return show(mod.checker.normalize(ctx, ty), ctx.names(), **style) + "\n"


PI_CTX = "(A :^TB Type) (B :^TB A → Type) (f :^TB (a : A) → B a)"


def test_d_pi_intro_golden(empty):
    assert normalized_type(empty, PI_CTX, "f^d") == golden("d_pi_intro.txt")


def test_d_pi_intro_ascii_golden(empty):
    assert normalized_type(empty, PI_CTX, "f^d", unicode=False) == golden("d_pi_intro.ascii.txt")


def test_universe_display_golden(empty):
    assert normalized_type(empty, "(A :^TB Type)", "A^d", coercions=True) == golden("type_d.txt")


def test_modal_pi_has_no_primed_argument(empty):
    text = normalized_type(empty, "(A :^TB Type) (B :^TB Type) (g :^TB (a :^TB A) → B)", "g^d")
    assert text == golden("modal_pi.txt")
    assert "′" not in text


def test_display_of_type_is_predicate_family():
    # Type^d at a point A is the type of predicates on A
    assert disp_ty(TYPE, Env(), Var(0)) == Pi(ID_SM, El(Var(0)), TYPE)


def test_display_of_variable_bumps_level():
    assert disp(Var(3)) == Var(3, 1)
    assert disp(Var(3, 1)) == Var(3, 2)


def test_display_tel_is_strict_and_sized():
    tel = Telescope(((ID_SM, "a", TYPE), (M.TRIBOX, "b", TYPE), (ID_SM, "c", El(Var(1)))))
    out = display_tel(tel, (Var(0), Var(1), Var(2)))
    assert out.is_strict() and len(out) == 2


def test_pairing_rejects_bad_arity():
    with pytest.raises(DttError):
        pair((Var(0),), (), (ID_SM,))
    with pytest.raises(DttError):
        evens((Var(0),), (ID_SM,))


@pytest.fixture(scope="module")
def ambient():
    mod = load("")
    return mod, mod.context(AMBIENT)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(0, 4))
def test_pairing_isomorphism_property(ambient, seed, length):
    mod, ctx = ambient
    tel, sigma = gen_psub(random.Random(seed), length)
    mod.checker.check_psub(ctx, tel, sigma)
    big = decalage_psub(sigma, tel.mods)
    assert all(alpha_eq(x, y) for x, y in zip(pair(evens(big, tel.mods), odds(big, tel.mods), tel.mods), big))
    assert evens(big, tel.mods) == sigma
    assert is_decalaged(big, tel.mods)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 3))
def test_decalaged_substitution_is_well_typed(ambient, seed, length):
    mod, ctx = ambient
    tel, sigma = gen_psub(random.Random(seed), length)
    mod.checker.check_psub(ctx, decalage_tel(tel), decalage_psub(sigma, tel.mods))
