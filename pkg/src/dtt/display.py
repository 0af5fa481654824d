"""Display and décalage.

``disp(t, env)`` computes the display of a term that lives in a context
``(Γ, 🔒_△□ | Υ)``, where Υ is the telescope described by ``env``.  The
result lives in ``(Γ | Υ^D)``, possibly extended by further binders that
only exist on the output side.  ``disp_ty(A, env, p)`` does the same for a
type ``A`` applied to a point ``p`` of the output context.

Where no rule applies the result is a neutral :class:`DispTerm` or
:class:`DispType` node, which the normalizer revisits once its body has
reduced.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import DttError
from .mode_theory import Modality, Mode
from .syntax import (
    ID_SM,
    TYPE,
    App,
    BlackDiamond,
    BlackSquare,
    BlackTriangle,
    Code,
    Const,
    Corec,
    DCoind,
    DispTerm,
    DispType,
    El,
    ExplicitSub,
    Head,
    Lam,
    Pi,
    Tail,
    Telescope,
    Term,
    Univ,
    Var,
    decal_mods,
    decal_mods_n,
    map_vars,
)
from .subst import apply, shift


@dataclass(frozen=True)
class Env:
    """How the source telescope Υ sits inside the output context.

    All tuples are innermost-first.  ``ev[j]`` is the output index of the
    even copy of Υ-variable j, ``odd[j]`` that of its primed partner (None for
    modal entries), and ambient variable i (i ≥ k) goes to ``i + gshift``.
    """

    ev: tuple[int, ...] = ()
    odd: tuple[Optional[int], ...] = ()
    mods: tuple[Modality, ...] = ()
    gshift: int = 0

    @property
    def k(self) -> int:
        return len(self.ev)

    @staticmethod
    def empty() -> "Env":
        return Env()

    def under(self, mu: Modality) -> "Env":
        if mu.is_identity:
            return Env(
                (1,) + tuple(e + 2 for e in self.ev),
                (0,) + tuple(None if o is None else o + 2 for o in self.odd),
                (mu,) + self.mods,
                self.gshift + 1,
            )
        return Env(
            (0,) + tuple(e + 1 for e in self.ev),
            (None,) + tuple(None if o is None else o + 1 for o in self.odd),
            (mu,) + self.mods,
            self.gshift,
        )

    def shift1(self) -> "Env":
        """Account for one binder that exists only in the output context."""
        return Env(
            tuple(e + 1 for e in self.ev),
            tuple(None if o is None else o + 1 for o in self.odd),
            self.mods,
            self.gshift + 1,
        )

    def out_args(self) -> tuple[Term, ...]:
        """The output variables standing for Υ^D, outermost-first."""
        out: list[Term] = []
        for j in range(self.k - 1, -1, -1):
            out.append(Var(self.ev[j]))
            if self.odd[j] is not None:
                out.append(Var(self.odd[j]))
        return tuple(out)

    def even_args(self) -> tuple[Term, ...]:
        return tuple(Var(self.ev[j]) for j in range(self.k - 1, -1, -1))


def env_for(mods: Sequence[Modality]) -> Env:
    """The environment for a telescope (outermost-first modalities) at the top of the context."""
    env = Env()
    for mu in mods:
        env = env.under(mu)
    return env


def ev(t: Term, env: Env) -> Term:
    """t[🔑 | υ^ev]: rename into the output context without displaying."""
    if env.k == 0 and env.gshift == 0:
        return t

    def on_var(depth: int, v: Var) -> Term:
        j = v.idx - depth
        if j < env.k:
            return Var(env.ev[j] + depth, v.lvl)
        return Var(v.idx + env.gshift, v.lvl)

    return map_vars(t, on_var)


def _neutral_body(t: Term, env: Env) -> Term:
    """Move ``t`` into (output, Υ) so it can sit under a neutral display node."""
    k = env.k
    if env.gshift + k == 0:
        return t

    def on_var(depth: int, v: Var) -> Term:
        if v.idx - depth < k:
            return v
        return Var(v.idx + env.gshift + k, v.lvl)

    return map_vars(t, on_var)


def level_mods(t: Term) -> tuple[Modality, ...]:
    """Modalities of the telescope inhabited by the argument list of a coinductive node."""
    if isinstance(t, Head):
        return decal_mods_n(t.shape.phi + (ID_SM,), t.lvl)
    if isinstance(t, Tail):
        return decal_mods_n(t.shape.phi + (ID_SM,) + t.shape.b, t.lvl)
    if isinstance(t, Corec):
        return decal_mods_n(t.shape.ups, t.lvl)
    if isinstance(t, DCoind):
        return dcoind_mods(t.shape.phi, t.lvl)
    raise DttError("internal", f"no level telescope for {type(t).__name__}")


def dcoind_mods(phi: Sequence[Modality], n: int) -> tuple[Modality, ...]:
    mods = tuple(phi)
    for _ in range(n):
        mods = decal_mods(mods) + (ID_SM,)
    return mods


def decal_args(args: Sequence[Term], mods: Sequence[Modality], env: Env) -> tuple[Term, ...]:
    if len(args) != len(mods):
        raise DttError("internal", f"argument list of length {len(args)} for a telescope of length {len(mods)}")
    out: list[Term] = []
    for a, mu in zip(args, mods):
        out.append(ev(a, env))
        if mu.is_identity:
            out.append(disp(a, env))
    return tuple(out)


# ---------------------------------------------------------------------------
# Terms


def disp_step(t: Term, env: Env) -> Optional[Term]:
    """One structural display step, or None when ``t`` is stuck."""
    if isinstance(t, Var):
        j = t.idx
        if j < env.k:
            o = env.odd[j]
            if o is None:
                return Var(env.ev[j], t.lvl + 1)
            if t.lvl == 0:
                return Var(o)
            return None
        return Var(j + env.gshift, t.lvl + 1)
    if isinstance(t, App):
        if t.mu.is_identity:
            return App(ID_SM, App(ID_SM, disp(t.fn, env), ev(t.arg, env)), disp(t.arg, env))
        return App(t.mu, disp(t.fn, env), ev(t.arg, env))
    if isinstance(t, Lam):
        dom = ev(t.dom, env) if t.dom is not None else None
        if t.mu.is_identity:
            dom2 = disp_ty(t.dom, env.shift1(), Var(0)) if t.dom is not None else None
            inner = Lam(ID_SM, disp(t.body, env.under(t.mu)), prime(t.name), dom2)
            return Lam(ID_SM, inner, t.name, dom)
        return Lam(t.mu, disp(t.body, env.under(t.mu)), t.name, dom)
    if isinstance(t, Code):
        return Lam(ID_SM, Code(disp_ty(t.ty, env.shift1(), Var(0))), "a", ev(t.ty, env))
    if isinstance(t, Const):
        return Const(t.name, t.lvl + 1)
    if isinstance(t, (Head, Tail, Corec)):
        return type(t)(t.shape, t.lvl + 1, decal_args(t.args, level_mods(t), env))
    if isinstance(t, ExplicitSub):
        return disp(apply(t.body, t.images, t.shift), env)
    return None


def disp(t: Term, env: Env = Env()) -> Term:
    out = disp_step(t, env)
    if out is not None:
        return out
    return DispTerm(_neutral_body(t, env), tuple(reversed(env.mods)), env.out_args())


def disp_n(t: Term, n: int) -> Term:
    for _ in range(n):
        t = disp(t, Env())
    return t


def disp_over(t: Term, mods: Sequence[Modality]) -> Term:
    """Display of the meta-abstraction of ``t`` over the innermost telescope with ``mods``."""
    return disp(t, env_for(mods))


# ---------------------------------------------------------------------------
# Types


def disp_ty_step(A: Term, env: Env, point: Term) -> Optional[Term]:
    if isinstance(A, Univ):
        if A.mode is not Mode.SM:
            return None
        return Pi(ID_SM, El(point), TYPE, "a")
    if isinstance(A, El):
        return El(App(ID_SM, disp(A.code, env), point))
    if isinstance(A, Pi):
        dom = ev(A.dom, env)
        if A.mu.is_identity:
            dom2 = disp_ty(A.dom, env.shift1(), Var(0))
            cod = disp_ty(A.cod, env.under(A.mu), App(ID_SM, shift(point, 2), Var(1)))
            return Pi(ID_SM, dom, Pi(ID_SM, dom2, cod, prime(A.name)), A.name)
        cod = disp_ty(A.cod, env.under(A.mu), App(A.mu, shift(point, 1), Var(0)))
        return Pi(A.mu, dom, cod, A.name)
    if isinstance(A, DCoind):
        args = decal_args(A.args, dcoind_mods(A.shape.phi, A.lvl), env)
        return DCoind(A.shape, A.lvl + 1, args + (point,))
    if isinstance(A, ExplicitSub):
        return disp_ty(apply(A.body, A.images, A.shift), env, point)
    return None


def disp_ty(A: Term, env: Env, point: Term) -> Term:
    out = disp_ty_step(A, env, point)
    if out is not None:
        return out
    return DispType(_neutral_body(A, env), tuple(reversed(env.mods)), env.out_args(), point)


def disp_ty_over(A: Term, mods: Sequence[Modality], point: Term) -> Term:
    return disp_ty(A, env_for(mods), point)


def prime(name: str) -> str:
    return name + "′"


# ---------------------------------------------------------------------------
# Telescopes and partial substitutions


def decalage_tel(tel: Telescope) -> Telescope:
    """Υ^D, for Υ living in the △□-locked ambient context."""
    env = Env()
    out: list = []
    for mu, name, ty in tel.entries:
        if mu.is_identity:
            out.append((mu, name, ev(ty, env)))
            out.append((mu, prime(name), disp_ty(ty, env.shift1(), Var(0))))
        else:
            if mu.cod is not Mode.SM:
                raise DttError("internal", f"telescope entry with modality {mu} cannot be décalaged")
            out.append((mu, name, ev(ty, env)))
        env = env.under(mu)
    return Telescope(tuple(out))


def decalage_psub(sigma: Sequence[Term], mods: Sequence[Modality]) -> tuple[Term, ...]:
    """σ^D for σ in the locked ambient context."""
    return decal_args(sigma, mods, Env())


def evens(sigma: Sequence[Term], mods: Sequence[Modality]) -> tuple[Term, ...]:
    """σ^ev for σ : Υ^D, where ``mods`` are the modalities of Υ."""
    out, it = [], iter(sigma)
    try:
        for mu in mods:
            out.append(next(it))
            if mu.is_identity:
                next(it)
    except StopIteration:
        raise DttError("arity-mismatch", "partial substitution too short for the décalaged telescope") from None
    if next(it, None) is not None:
        raise DttError("arity-mismatch", "partial substitution too long for the décalaged telescope")
    return tuple(out)


def odds(sigma: Sequence[Term], mods: Sequence[Modality]) -> tuple[Term, ...]:
    """σ^od: the primed components."""
    out, it = [], iter(sigma)
    try:
        for mu in mods:
            next(it)
            if mu.is_identity:
                out.append(next(it))
    except StopIteration:
        raise DttError("arity-mismatch", "partial substitution too short for the décalaged telescope") from None
    if next(it, None) is not None:
        raise DttError("arity-mismatch", "partial substitution too long for the décalaged telescope")
    return tuple(out)


def pair(even: Sequence[Term], odd: Sequence[Term], mods: Sequence[Modality]) -> tuple[Term, ...]:
    """⦅σ, σ′⦆: interleave a substitution with its displayed components."""
    if len(even) != len(mods) or len(odd) != sum(1 for m in mods if m.is_identity):
        raise DttError("arity-mismatch", "pairing needs one even entry per telescope entry and one odd per non-modal entry")
    out, it = [], iter(odd)
    for e, mu in zip(even, mods):
        out.append(e)
        if mu.is_identity:
            out.append(next(it))
    return tuple(out)


def display_tel(tel: Telescope, sigma: Sequence[Term]) -> Telescope:
    """Υ^d σ: the strict telescope of primed partners over a given σ : Υ."""
    if len(sigma) != len(tel):
        raise DttError("arity-mismatch", f"display of a {len(tel)}-entry telescope at {len(sigma)} arguments")
    big = decalage_tel(tel)
    mods = tel.mods
    roles: list[tuple[str, int]] = []
    for j, mu in enumerate(mods):
        roles.append(("ev", j))
        if mu.is_identity:
            roles.append(("od", j))
    vals: list[Term] = []
    out: list = []
    m = 0
    for (role, j), (mu, name, ty) in zip(roles, big.entries):
        if role == "ev":
            vals.append(shift(sigma[j], m))
            continue
        here = apply(ty, tuple(reversed(vals)), m)
        out.append((ID_SM, name, here))
        vals = [shift(v, 1) for v in vals] + [Var(0)]
        m += 1
    result = Telescope(tuple(out))
    assert result.is_strict()
    return result


def is_decalaged(args: Sequence[Term], mods: Sequence[Modality]) -> bool:
    """Recognize a syntactic σ^D: each primed entry is the display of its partner."""
    try:
        ev_part = evens(args, mods)
        od_part = odds(args, mods)
    except DttError:
        return False
    nonmodal = [e for e, mu in zip(ev_part, mods) if mu.is_identity]
    return all(o == disp(e) for e, o in zip(nonmodal, od_part))


def modal_elim(t: Term) -> bool:
    return isinstance(t, (BlackSquare, BlackTriangle, BlackDiamond))
