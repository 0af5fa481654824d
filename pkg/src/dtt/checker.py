"""Bidirectional type checking with normalization-based conversion.

Reduction is untyped and deterministic.  ``whnf`` exposes the head
constructor, ``normalize`` rewrites everywhere, and ``step`` performs a
single leftmost-innermost contraction for printing derivation chains.  Every
contraction costs one unit of fuel; a top-level call that exceeds its budget
raises :class:`FuelExhausted`.
"""
from __future__ import annotations

from contextlib import contextmanager
from typing import Callable, Optional, Sequence

from .coinductive import Signature, c_top_index, reduce_destructor_of_displayed_corec
from .display import Env, disp, disp_step, disp_ty, disp_ty_step, env_for, evens, odds
from .errors import DttError, FuelExhausted
from .mode_theory import Modality, Mode
from .subst import apply, apply_psub, lookup_var, shift, subst1
from .syntax import (
    App,
    BlackDiamond,
    BlackSquare,
    BlackTriangle,
    BoxForm,
    BoxIntro,
    Code,
    Const,
    Context,
    Corec,
    DCoind,
    DiaForm,
    DiaIntro,
    DispTerm,
    DispType,
    El,
    ExplicitSub,
    Head,
    Lam,
    Meta,
    Pi,
    Tail,
    Telescope,
    Term,
    TriForm,
    TriIntro,
    Univ,
    Var,
    free_vars,
    is_flat,
    iter_children,
    map_children,
)

DEFAULT_FUEL = 10 ** 6

_TYPE_FORMERS = (Univ, Pi, El, TriForm, DiaForm, BoxForm, DCoind, DispType)

# modal formers: (node type, mode of the type, lock to push)
_MODAL_FORMS = {
    TriForm: (Mode.SM, Modality.TRI),
    DiaForm: (Mode.DM, Modality.DIA),
    BoxForm: (Mode.DM, Modality.BOX),
}
_INTRO_OF = {TriIntro: TriForm, DiaIntro: DiaForm, BoxIntro: BoxForm}
_ELIM_RULES = {
    # eliminator: (mode of the result, lock for the premise, expected former, intro it cancels)
    BlackSquare: (Mode.SM, Modality.TRI, BoxForm, BoxIntro),
    BlackTriangle: (Mode.DM, Modality.DIA, TriForm, TriIntro),
    BlackDiamond: (Mode.SM, Modality.TRI, DiaForm, DiaIntro),
}


def spine(t: Term) -> tuple[Term, list[Term], list[Modality]]:
    args: list[Term] = []
    mods: list[Modality] = []
    while isinstance(t, App):
        args.append(t.arg)
        mods.append(t.mu)
        t = t.fn
    return t, args[::-1], mods[::-1]


class Checker:
    def __init__(self, sig: Optional[Signature] = None, fuel: int = DEFAULT_FUEL):
        self.sig = sig if sig is not None else Signature()
        self.fuel = fuel
        self.spent = 0
        self.exhausted = 0
        self._depth = 0

    # -- fuel ----------------------------------------------------------------

    @contextmanager
    def _session(self):
        if self._depth == 0:
            self.spent = 0
        self._depth += 1
        try:
            yield
        finally:
            self._depth -= 1

    def _tick(self) -> None:
        self.spent += 1
        if self.spent > self.fuel:
            self.exhausted += 1
            raise FuelExhausted(self.fuel)

    # -- reduction -------------------------------------------------------------

    def whnf(self, t: Term) -> Term:
        with self._session():
            return self._whnf(t)

    def _whnf(self, t: Term) -> Term:
        sig = self.sig
        while True:
            if isinstance(t, App):
                f = self._whnf(t.fn)
                if isinstance(f, Lam):
                    self._tick()
                    t = subst1(f.body, t.arg)
                    continue
                return App(t.mu, f, t.arg)
            if isinstance(t, El):
                c = self._whnf(t.code)
                if isinstance(c, Code):
                    self._tick()
                    t = c.ty
                    continue
                return El(c)
            if isinstance(t, Code):
                ty = self._whnf(t.ty)
                if isinstance(ty, El):
                    self._tick()
                    t = ty.code
                    continue
                return Code(ty)
            if isinstance(t, (BlackSquare, BlackTriangle, BlackDiamond)):
                inner = self._whnf(t.tm)
                if isinstance(inner, _ELIM_RULES[type(t)][3]):
                    self._tick()
                    t = inner.tm
                    continue
                return type(t)(t.ty, inner)
            if isinstance(t, Const):
                body = sig.const_unfold(t.name, t.lvl)
                if body is None:
                    return t
                self._tick()
                t = body
                continue
            if isinstance(t, (Head, Tail)):
                i = c_top_index(sig, t)
                top = self._whnf(t.args[i])
                red = reduce_destructor_of_displayed_corec(sig, t, top)
                if red is not None:
                    self._tick()
                    t = red
                    continue
                return type(t)(t.shape, t.lvl, t.args[:i] + (top,) + t.args[i + 1:])
            if isinstance(t, DispTerm):
                body = self._whnf(t.body)
                red = disp_step(body, env_for(t.mods))
                if red is not None:
                    self._tick()
                    t = apply_psub(red, t.args)
                    continue
                return DispTerm(body, t.mods, t.args)
            if isinstance(t, DispType):
                body = self._whnf(t.body)
                red = disp_ty_step(body, env_for(t.mods).shift1(), Var(0))
                if red is not None:
                    self._tick()
                    t = apply(red, (t.point,) + tuple(reversed(t.args)))
                    continue
                return DispType(body, t.mods, t.args, t.point)
            if isinstance(t, ExplicitSub):
                t = apply(t.body, t.images, t.shift)
                continue
            return t

    def normalize(self, ctx: Optional[Context], t: Term) -> Term:
        with self._session():
            return self._nf(t)

    def _nf(self, t: Term) -> Term:
        t = self._whnf(t)
        if isinstance(t, (DispTerm, DispType)):
            args = tuple(self._nf(a) for a in t.args)
            if t.mods and self._is_decalaged(args, t.mods):
                body = apply_psub(t.body, evens(args, t.mods))
                if isinstance(t, DispTerm):
                    return self._nf(DispTerm(body, (), ()))
                return self._nf(DispType(body, (), (), t.point))
            body = self._nf(t.body)
            if isinstance(t, DispTerm):
                return DispTerm(body, t.mods, args)
            return DispType(body, t.mods, args, self._nf(t.point))
        if isinstance(t, Lam):
            return Lam(t.mu, self._nf(t.body), t.name, t.dom)
        return map_children(t, lambda c, k: self._nf(c))

    def _is_decalaged(self, args: Sequence[Term], mods: Sequence[Modality]) -> bool:
        try:
            ev_part, od_part = evens(args, mods), odds(args, mods)
        except DttError:
            return False
        nonmodal = [e for e, mu in zip(ev_part, mods) if mu.is_identity]
        return all(o == self._nf(disp(e)) for e, o in zip(nonmodal, od_part))

    # -- single steps, for derivation traces --------------------------------------

    def step(self, t: Term) -> Optional[Term]:
        """Contract the leftmost-innermost redex of ``t``; None when ``t`` is normal."""
        with self._session():
            return self._step(t)

    def _corec_spine(self, t: Term) -> Optional[tuple[Const, list[Term]]]:
        head, args, _ = spine(t)
        if not isinstance(head, Const) or not args:
            return None
        cdef = self.sig.consts.get(head.name)
        if cdef is None or cdef.corec is None:
            return None
        shape = self.sig.corecs[cdef.corec].shape
        tel, _ = self.sig.corec_level(shape, head.lvl)
        if len(args) != len(tel):
            return None
        return head, args

    def _step(self, t: Term) -> Optional[Term]:
        cs = self._corec_spine(t)
        if cs is not None:
            head, args = cs
            for i, a in enumerate(args):
                r = self._step(a)
                if r is not None:
                    _, _, mods = spine(t)
                    new_args = args[:i] + [r] + args[i + 1:]
                    out: Term = head
                    for arg, mu in zip(new_args, mods):
                        out = App(mu, out, arg)
                    return out
            cdef = self.sig.consts[head.name]
            self._tick()
            return Corec(self.sig.corecs[cdef.corec].shape, head.lvl, tuple(args))
        children = iter_children(t)
        for idx, (child, _) in enumerate(children):
            r = self._step(child)
            if r is not None:
                counter = iter(range(len(children)))
                return map_children(t, lambda c, k: r if next(counter) == idx else c)
        return self._contract(t)

    def _contract(self, t: Term) -> Optional[Term]:
        sig = self.sig
        if isinstance(t, App) and isinstance(t.fn, Lam):
            return subst1(t.fn.body, t.arg)
        if isinstance(t, El) and isinstance(t.code, Code):
            return t.code.ty
        if isinstance(t, Code) and isinstance(t.ty, El):
            return t.ty.code
        if isinstance(t, (BlackSquare, BlackTriangle, BlackDiamond)):
            if isinstance(t.tm, _ELIM_RULES[type(t)][3]):
                return t.tm.tm
            return None
        if isinstance(t, Const):
            return sig.const_unfold(t.name, t.lvl)
        if isinstance(t, (Head, Tail)):
            return reduce_destructor_of_displayed_corec(sig, t, t.args[c_top_index(sig, t)])
        if isinstance(t, DispTerm):
            red = disp_step(t.body, env_for(t.mods))
            return apply_psub(red, t.args) if red is not None else None
        if isinstance(t, DispType):
            red = disp_ty_step(t.body, env_for(t.mods).shift1(), Var(0))
            return apply(red, (t.point,) + tuple(reversed(t.args))) if red is not None else None
        if isinstance(t, ExplicitSub):
            return apply(t.body, t.images, t.shift)
        return None

    def trace(self, t: Term, render: Callable[[Term], str], limit: int = 10_000) -> list[str]:
        """Printed forms along leftmost-innermost reduction, repeated forms collapsed."""
        out = [render(t)]
        with self._session():
            for _ in range(limit):
                nxt = self._step(t)
                if nxt is None:
                    break
                t = nxt
                text = render(t)
                if text != out[-1]:
                    out.append(text)
        return out

    # -- conversion --------------------------------------------------------------

    def convert(self, ctx: Optional[Context], a: Term, b: Term) -> bool:
        with self._session():
            return self._eq(self._nf(a), self._nf(b))

    def _eq(self, a: Term, b: Term) -> bool:
        if a == b:
            return True
        if isinstance(a, Lam) and isinstance(b, Lam):
            return a.mu == b.mu and self._eq(a.body, b.body)
        if isinstance(a, Lam):
            return self._eq(a.body, self._nf(App(a.mu, shift(b, 1), Var(0))))
        if isinstance(b, Lam):
            return self._eq(self._nf(App(b.mu, shift(a, 1), Var(0))), b.body)
        if type(a) is not type(b):
            return False
        ca, cb = iter_children(a), iter_children(b)
        if len(ca) != len(cb):
            return False
        blank = Var(0)
        if map_children(a, lambda c, k: blank) != map_children(b, lambda c, k: blank):
            return False
        return all(self._eq(x, y) for (x, _), (y, _) in zip(ca, cb))

    # -- typing -----------------------------------------------------------------

    def var_type(self, ctx: Context, idx: int, lvl: int = 0) -> Term:
        found = lookup_var(ctx, idx, lvl)
        ty = found.ty
        for j in range(lvl):
            ty = disp_ty(ty, Env(), Var(idx, j))
        return ty

    def infer(self, ctx: Context, t: Term) -> Term:
        with self._session():
            return self._infer(ctx, t)

    def _infer(self, ctx: Context, t: Term) -> Term:
        sig = self.sig
        if isinstance(t, Var):
            return self.var_type(ctx, t.idx, t.lvl)
        if isinstance(t, Code):
            self._check_type(ctx, t.ty)
            return Univ(ctx.mode)
        if isinstance(t, Lam):
            if t.dom is None:
                raise DttError("annotation-required", "cannot infer the type of an unannotated λ")
            self._require_mode(ctx, t.mu.cod)
            self._check_type(ctx.lock(t.mu), t.dom)
            body_ty = self._infer(ctx.extend(t.mu, t.name, t.dom), t.body)
            return Pi(t.mu, t.dom, body_ty, t.name)
        if isinstance(t, App):
            fty = self._whnf(self._infer(ctx, t.fn))
            if not isinstance(fty, Pi):
                raise DttError("not-a-function", "applying a term whose type is not a Π-type", got=fty)
            if fty.mu != t.mu:
                raise DttError(
                    "modality-violation",
                    f"function expects a {fty.mu.symbol()}-modal argument but is applied at {t.mu.symbol()}",
                    mu=fty.mu,
                    locks=t.mu,
                )
            self._check(ctx.lock(t.mu), t.arg, fty.dom)
            return subst1(fty.cod, t.arg)
        if type(t) in _INTRO_OF:
            former = _INTRO_OF[type(t)]
            mode, lock = _MODAL_FORMS[former]
            self._require_mode(ctx, mode)
            return former(self._infer(ctx.lock(lock), t.tm))
        if type(t) in _ELIM_RULES:
            mode, lock, former, _ = _ELIM_RULES[type(t)]
            self._require_mode(ctx, mode)
            if isinstance(t, BlackDiamond) and not is_flat(ctx):
                raise DttError("not-flat", "◆ needs a flat context")
            inner = ctx.lock(lock)
            if t.ty is not None:
                self._check_type(inner.lock(_MODAL_FORMS[former][1]), t.ty)
                self._check(inner, t.tm, former(t.ty))
                return t.ty
            got = self._whnf(self._infer(inner, t.tm))
            if not isinstance(got, former):
                raise DttError("type-mismatch", f"expected a term of a {former.__name__} type", got=got)
            return got.ty
        if isinstance(t, Const):
            self._require_mode(ctx, Mode.SM)
            return sig.const_type(t.name, t.lvl)
        if isinstance(t, (Head, Tail)):
            self._require_mode(ctx, Mode.SM)
            tel, ty = sig.head_level(t.shape, t.lvl) if isinstance(t, Head) else sig.tail_level(t.shape, t.lvl)
            self._check_psub(ctx, tel, t.args)
            return apply_psub(ty, t.args)
        if isinstance(t, Corec):
            self._require_mode(ctx, Mode.SM)
            tel, ty = sig.corec_level(t.shape, t.lvl)
            self._check_psub(ctx, tel, t.args)
            return apply_psub(ty, t.args)
        if isinstance(t, ExplicitSub):
            return self._infer(ctx, apply(t.body, t.images, t.shift))
        if isinstance(t, DispTerm):
            reduced = self._whnf(t)
            if reduced != t:
                return self._infer(ctx, reduced)
            raise DttError("internal", "cannot infer the type of a stuck display")
        if isinstance(t, Meta):
            raise DttError("internal", "unsolved metavariable reached the kernel")
        if isinstance(t, _TYPE_FORMERS):
            raise DttError("type-mismatch", "a type was used where a term was expected")
        raise DttError("internal", f"unknown term {type(t).__name__}")

    def check(self, ctx: Context, t: Term, ty: Term) -> None:
        with self._session():
            self._check(ctx, t, ty)

    def _check(self, ctx: Context, t: Term, ty: Term) -> None:
        if isinstance(t, Lam) and t.dom is None:
            pty = self._whnf(ty)
            if not isinstance(pty, Pi) or pty.mu != t.mu:
                raise DttError("type-mismatch", "λ checked against a type that is not a matching Π-type", expected=pty)
            self._check(ctx.extend(t.mu, t.name, pty.dom), t.body, pty.cod)
            return
        if type(t) in _INTRO_OF:
            want = self._whnf(ty)
            former = _INTRO_OF[type(t)]
            if isinstance(want, former):
                mode, lock = _MODAL_FORMS[former]
                self._require_mode(ctx, mode)
                self._check(ctx.lock(lock), t.tm, want.ty)
                return
        if isinstance(t, Code):
            want = self._whnf(ty)
            if isinstance(want, Univ):
                self._require_mode(ctx, want.mode)
                self._check_type(ctx, t.ty)
                return
        got = self._infer(ctx, t)
        if not self._eq(self._nf(got), self._nf(ty)):
            raise DttError(
                "type-mismatch",
                "type mismatch",
                expected=self._nf(ty),
                got=self._nf(got),
                names=ctx.names(),
            )

    def check_type(self, ctx: Context, ty: Term) -> None:
        with self._session():
            self._check_type(ctx, ty)

    def _check_type(self, ctx: Context, ty: Term) -> None:
        T = self._whnf(ty)
        if isinstance(T, Univ):
            self._require_mode(ctx, T.mode)
            return
        if isinstance(T, Pi):
            self._require_mode(ctx, T.mu.cod)
            self._check_type(ctx.lock(T.mu), T.dom)
            self._check_type(ctx.extend(T.mu, T.name, T.dom), T.cod)
            return
        if isinstance(T, El):
            self._check(ctx, T.code, Univ(ctx.mode))
            return
        if type(T) in _MODAL_FORMS:
            mode, lock = _MODAL_FORMS[type(T)]
            self._require_mode(ctx, mode)
            self._check_type(ctx.lock(lock), T.ty)
            return
        if isinstance(T, DCoind):
            self._require_mode(ctx, Mode.SM)
            self._check_psub(ctx, self.sig.dcoind_level(T.shape, T.lvl), T.args)
            return
        if isinstance(T, DispType):
            return
        raise DttError("universe-expected", "expected a type")

    def check_tel(self, ctx: Context, tel: Telescope) -> None:
        with self._session():
            for mu, name, ty in tel.entries:
                self._require_mode(ctx, mu.cod)
                self._check_type(ctx.lock(mu), ty)
                ctx = ctx.extend(mu, name, ty)

    def check_psub(self, ctx: Context, tel: Telescope, args: Sequence[Term]) -> None:
        with self._session():
            self._check_psub(ctx, tel, args)

    def _check_psub(self, ctx: Context, tel: Telescope, args: Sequence[Term]) -> None:
        if len(args) != len(tel):
            raise DttError("arity-mismatch", f"expected {len(tel)} arguments, got {len(args)}")
        for j, ((mu, _, ty), a) in enumerate(zip(tel.entries, args)):
            self._check(ctx.lock(mu), a, apply_psub(ty, tuple(args[:j])))

    @staticmethod
    def _require_mode(ctx: Context, mode: Mode) -> None:
        if ctx.mode is not mode:
            raise DttError("mode-mismatch", f"expected a context at mode {mode}, found {ctx.mode}")

    # -- first-order unification for implicit arguments ---------------------------

    def unify(self, a: Term, b: Term, solution: dict[int, Term], depth: int = 0) -> bool:
        """Match ``a`` (which may contain metas) against ``b``, extending ``solution``."""
        with self._session():
            return self._unify(self._nf(self.zonk(a, solution)), self._nf(b), solution, depth)

    def _unify(self, a: Term, b: Term, sol: dict[int, Term], depth: int) -> bool:
        if isinstance(a, Meta):
            if a.k in sol:
                return self._eq(self._nf(shift(sol[a.k], depth)), b)
            if any(v < depth for v in free_vars(b)):
                return False
            sol[a.k] = shift(b, -depth) if depth else b
            return True
        if isinstance(b, Meta):
            return self._unify(b, a, sol, depth)
        if a == b:
            return True
        if type(a) is not type(b):
            return self._eq(a, b)
        ca, cb = iter_children(a), iter_children(b)
        if len(ca) != len(cb):
            return False
        blank = Var(0)
        if map_children(a, lambda c, k: blank) != map_children(b, lambda c, k: blank):
            return False
        return all(self._unify(x, y, sol, depth + k) for (x, k), (y, _) in zip(ca, cb))

    @staticmethod
    def zonk(t: Term, sol: dict[int, Term]) -> Term:
        if not sol:
            return t

        def go(u: Term, depth: int) -> Term:
            if isinstance(u, Meta) and u.k in sol:
                return shift(sol[u.k], depth)
            return map_children(u, lambda c, k: go(c, depth + k))

        return go(t, 0)
