import pytest
from hypothesis import given, strategies as st

from dtt.errors import DttError
from dtt.mode_theory import Modality as M, Mode
from dtt.subst import apply, lookup_var, shift, subst1, apply_psub
from dtt.syntax import (
    ID_SM,
    TYPE,
    App,
    CLock,
    Context,
    El,
    Lam,
    Pi,
    Telescope,
    MetaAbs,
    Var,
    canonicalize,
    CVar,
    free_vars,
    is_flat,
    tel_vars,
)

# A small strategy of raw lambda terms over Var/App/Lam/Pi.
terms = st.recursive(
    st.builds(Var, st.integers(0, 5)),
    lambda sub: st.one_of(
        st.builds(lambda f, a: App(ID_SM, f, a), sub, sub),
        st.builds(lambda b: Lam(ID_SM, b), sub),
        st.builds(lambda d, c: Pi(ID_SM, El(d), El(c)), sub, sub),
    ),
    max_leaves=12,
)


@given(terms, st.integers(0, 4), st.integers(0, 4))
def test_shift_composes(t, a, b):
    assert shift(shift(t, a), b) == shift(t, a + b)


@given(terms, st.integers(0, 3))
def test_shift_moves_free_variables(t, k):
    assert free_vars(shift(t, k)) == {v + k for v in free_vars(t)}


@given(terms, terms)
def test_substituting_a_weakened_term_is_identity(t, u):
    assert subst1(shift(t, 1), u) == t


@given(terms)
def test_substituting_the_variable_itself_is_identity(t):
    # t over (Γ, x); replace x by x after weakening past a fresh binder, then drop it
    assert apply(t, (Var(0),), 1) == t


@given(terms, terms, terms)
def test_substitution_lemma(t, u, v):
    # t[u/x][v/y] = t[v/y ↑][u[v/y]/x] for t over (Γ, y, x)
    left = subst1(subst1(t, u), v)
    right = subst1(apply(t, (Var(0), shift(v, 1)), 1), subst1(u, v))
    assert left == right


def test_apply_psub_is_outermost_first():
    body = App(ID_SM, Var(1), Var(0))
    assert apply_psub(body, [Var(7), Var(8)]) == App(ID_SM, Var(7), Var(8))


def test_lock_merging_and_absorption():
    ctx = Context.empty().extend(M.TRIBOX, "X", TYPE)
    assert ctx.lock(M.TRIBOX).lock(M.TRIBOX).entries[-1] == CLock(M.TRIBOX)
    back = ctx.lock(M.TRI).lock(M.DIA)
    assert back.entries[-1] == CLock(M.TRIDIA) and back.mode is Mode.SM
    # △ then ◇ then △ collapses to △
    assert ctx.lock(M.TRI).lock(M.DIA).lock(M.TRI).entries[-1] == CLock(M.TRI)
    # ◇ after △ at the empty base lands in the same place as the composite lock
    assert Context.empty().lock(M.TRI).lock(M.DIA) == Context.empty().lock(M.TRIDIA)
    assert Context.empty().lock(M.TRIBOX) == Context.empty()


def test_canonicalize_matches_incremental_pushes():
    raw = [CVar(ID_SM, "a", TYPE), CLock(M.TRI), CLock(M.DIA), CLock(M.TRIBOX)]
    ctx = canonicalize(Mode.SM, raw)
    assert ctx.entries == (CVar(ID_SM, "a", TYPE), CLock(M.TRIBOX))


def test_flatness():
    base = Context.empty().extend(ID_SM, "a", TYPE)
    assert not is_flat(base)
    assert is_flat(base.lock(M.TRIDIA))
    assert is_flat(base.lock(M.TRIDIA).extend(ID_SM, "b", TYPE))
    assert not is_flat(base.lock(M.TRIBOX))
    assert not is_flat(base.lock(M.TRIDIA).lock(M.TRI).lock(M.BOX))


def test_lookup_respects_locks():
    ctx = Context.empty().extend(M.TRIBOX, "X", TYPE).extend(ID_SM, "y", TYPE)
    assert lookup_var(ctx, 0).name == "y"
    assert lookup_var(ctx.lock(M.TRIBOX), 1).name == "X"
    with pytest.raises(DttError) as info:
        lookup_var(ctx.lock(M.TRIBOX), 0)
    assert info.value.code == "modality-violation"
    with pytest.raises(DttError) as info:
        lookup_var(ctx, 5)
    assert info.value.code == "unbound-index"


def test_display_lookup_goes_through_tribox():
    ctx = Context.empty().extend(M.TRIBOX, "X", TYPE).extend(ID_SM, "y", TYPE)
    assert lookup_var(ctx, 1, lvl=1).name == "X"
    with pytest.raises(DttError):
        lookup_var(ctx, 0, lvl=1)


def test_exceptional_variable_rule():
    ctx = Context.empty().extend(M.TRIDIA, "h", TYPE)
    with pytest.raises(DttError) as info:
        lookup_var(ctx, 0)
    assert info.value.code == "modality-violation"
    flat = Context.empty().lock(M.TRIDIA).extend(M.TRIDIA, "h", TYPE)
    assert lookup_var(flat, 0).name == "h"


def test_meta_abstraction_application():
    ma = MetaAbs(Telescope(((ID_SM, "a", TYPE), (ID_SM, "b", El(Var(0))))), App(ID_SM, Var(1), Var(0)))
    assert ma.apply([Var(3), Var(4)]) == App(ID_SM, Var(3), Var(4))
    with pytest.raises(DttError):
        ma.apply([Var(3)])
    assert tel_vars(3) == (Var(2), Var(1), Var(0))
