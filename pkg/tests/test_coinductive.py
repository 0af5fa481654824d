import pytest

from conftest import CORPUS, golden
from dtt.coinductive import check_corec, simplex_type
from dtt.delta_plus import BinarySeq, campion_order, compose
from dtt.display import decalage_tel, disp, env_for
from dtt.errors import DttError
from dtt.printer import Printer, show
from dtt.subst import apply, apply_psub, shift
from dtt.surface import load
from dtt.syntax import Context, Corec, Head, Tail, Telescope, Var, alpha_eq


def corec_redex(mod, name, n, role):
    """A destructor applied to a generic n-fold displayed corecursor.

    Returns the context the redex lives in, its modalities, and the redex.
    """
    sig, ch = mod.sig, mod.checker
    shape = sig.corecs[name].shape
    tel, _ = sig.corec_level(shape, n)
    ctx = Context.empty().extend_tel(tel)
    R = Corec(shape, n, tuple(Var(len(tel) - 1 - i) for i in range(len(tel))))
    hidden = ch.normalize(ctx, ch.infer(ctx, R)).args
    prefix = list(hidden) + [R]
    mods = list(tel.mods)
    if role == "head":
        return ctx, mods, Head(shape.codata, n, tuple(prefix))
    k_n, _ = sig.tail_level(shape.codata, n)
    for mu, nm, ety in k_n.entries[len(prefix):]:
        ctx = ctx.extend(mu, nm, apply_psub(ety, prefix))
        mods.append(mu)
        prefix = [shift(p, 1) for p in prefix] + [Var(0)]
    return ctx, mods, Tail(shape.codata, n, tuple(prefix))


def decalaged(ctx):
    return Context.empty().extend_tel(decalage_tel(Telescope(tuple((e.mu, e.name, e.ty) for e in ctx.entries))))


def test_head_rule_fires_on_corecursor(corpus):
    mod = corpus("fib.dtt")
    ctx, _, redex = corec_redex(mod, "Fib", 0, "head")
    assert show(mod.checker.step(redex), ctx.names()) == "Xᵈ ʒ"


def test_tail_rule_fires_on_corecursor(corpus):
    mod = corpus("fib.dtt")
    ctx, _, redex = corec_redex(mod, "Fib", 0, "tail")
    assert show(mod.checker.step(redex), ctx.names()) == "Fibᵈ X ʒ y"


@pytest.mark.parametrize("role", ["head", "tail"])
@pytest.mark.parametrize("n", [0, 1, 2])
def test_displayed_rule_is_display_of_rule(corpus, n, role):
    mod = corpus("fib.dtt")
    ch = mod.checker
    ctx, mods, redex = corec_redex(mod, "Fib", n, role)
    ch.infer(ctx, redex)
    reduct = ch.step(redex)
    assert reduct is not None
    env = env_for(tuple(mods))
    up = disp(redex, env)
    assert type(up) is type(redex) and up.lvl == n + 1
    dctx = decalaged(ctx)
    ch.infer(dctx, up)
    # the level n+1 rule fires directly on the displayed redex
    assert ch.step(up) is not None
    assert ch.normalize(dctx, up) == ch.normalize(dctx, disp(reduct, env))


def test_corecursor_on_pt_computes(corpus):
    mod = corpus("pt.dtt")
    ctx = mod.context("(Y :^TB Type) (ʒ :^TB Y)")
    t, _ = mod.term("zp^d (sp (fibpt Y ʒ))", ctx)
    assert show(mod.checker.normalize(ctx, t), ctx.names()) == "ʒᵈᵈ"


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_simplex_boundary_matches_delta_plus(corpus, n):
    mod = corpus("sst.dtt")
    ch = mod.checker
    ctx = mod.context("(X : SST)")
    X = Var(0)
    st = simplex_type(ch, ctx, X, n)
    assert len(st.boundary) == 2 ** (n + 1) - 2
    order = [lab.seq for lab in campion_order(n)][:-1]
    assert [BinarySeq.from_number(v, n + 1) for v in st.labels] == order
    lower = {m: simplex_type(ch, ctx, X, m) for m in range(n)}
    pos = {lab: i for i, lab in enumerate(order)}
    entries = st.boundary.entries
    for i, lab in enumerate(order):
        m = lab.source
        here = ctx.extend_tel(Telescope(entries[:i]))
        sub = lower[m]
        faces = [compose(lab, BinarySeq.from_number(v, m + 1)) for v in sub.labels]
        images = tuple(reversed([Var(i - 1 - pos[f]) for f in faces]))
        expected = apply(sub.ty, images, shift_by=i)
        assert ch.convert(here, entries[i][2], expected), (n, str(lab))


def render_simplex(mod, n):
    ctx = mod.context("(X : SST)")
    st = simplex_type(mod.checker, ctx, Var(0), n)
    names = ctx.names()
    lines = Printer().telescope(st.boundary, names)
    full = ctx.extend_tel(st.boundary)
    lines.append(show(mod.checker.normalize(full, st.ty), full.names()))
    return "\n".join(lines) + "\n"


@pytest.mark.parametrize("n", [2, 3])
def test_simplex_goldens(corpus, n):
    assert render_simplex(corpus("sst.dtt"), n) == golden(f"sst_simplices_{n}.txt")


def test_augmented_labels_include_the_empty_face(corpus):
    mod = corpus("asst.dtt")
    ctx = mod.context("(X : ASST)")
    assert simplex_type(mod.checker, ctx, Var(0), -1).names == ()
    st = simplex_type(mod.checker, ctx, Var(0), 1)
    assert st.names == ("ʒ00", "x01", "x10")


def test_simplex_type_rejects_negative_dimension_for_sst(corpus):
    mod = corpus("sst.dtt")
    ctx = mod.context("(X : SST)")
    with pytest.raises(DttError) as info:
        simplex_type(mod.checker, ctx, Var(0), -1)
    assert info.value.code == "arity-mismatch"


def test_side_condition_is_reported_with_both_sides():
    text = (CORPUS / "negative" / "side_condition.dtt").read_text(encoding="utf-8")
    with pytest.raises(DttError) as info:
        load(text)
    err = info.value
    assert err.code == "side-condition-failed"
    assert "Xᵈ is not S X x" in err.message


def test_displayed_corecursor_check_is_repeatable(corpus):
    mod = corpus("fib.dtt")
    cr = mod.sig.corecs["Fib"]
    first = check_corec(mod.sig, cr, mod.checker)
    assert alpha_eq(first, check_corec(mod.sig, cr, mod.checker))
