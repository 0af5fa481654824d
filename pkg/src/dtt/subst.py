"""Substitution, weakening, keys and variable lookup.

Substitutions act on nameless terms as "replace the innermost n variables by
these images, then shift the rest".  Keys and crossing a lock do not change
syntax (the order of the mode theory is posetal and variables are nameless),
so they are recorded in a :class:`Substitution` for diagnostics only.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DttError
from .mode_theory import Modality, Mode, compose, identity, leq, parallel
from .syntax import CLock, Context, CVar, Term, Telescope, Var, map_vars, is_flat


def shift(t: Term, by: int, cutoff: int = 0) -> Term:
    if by == 0:
        return t

    def on_var(depth: int, v: Var) -> Term:
        if v.idx - depth < cutoff:
            return v
        return Var(v.idx + by, v.lvl)

    return map_vars(t, on_var)


def apply(t: Term, images: Sequence[Term], shift_by: int = 0) -> Term:
    """t[images | shift]: Var j < n becomes images[j]; others become Var(j - n + shift).

    A displayed occurrence ``Var(j, l)`` of a replaced variable becomes the
    l-fold display of its image.
    """
    n = len(images)
    if n == 0 and shift_by == 0:
        return t

    def on_var(depth: int, v: Var) -> Term:
        j = v.idx - depth
        if j < n:
            img = images[j]
            if v.lvl:
                img = _display_image(img, v.lvl)
            return shift(img, depth)
        return Var(j - n + shift_by + depth, v.lvl)

    return map_vars(t, on_var)


def _display_image(u: Term, lvl: int) -> Term:
    if isinstance(u, Var):
        return Var(u.idx, u.lvl + lvl)
    from .display import disp_n

    return disp_n(u, lvl)


def subst1(body: Term, arg: Term) -> Term:
    """Instantiate the innermost variable of ``body``."""
    return apply(body, (arg,), 0)


def apply_psub(body: Term, args: Sequence[Term]) -> Term:
    """Instantiate a body over a telescope with an outermost-first partial substitution."""
    return apply(body, tuple(reversed(args)), 0)


def subst_tel(tel: Telescope, images: Sequence[Term], shift_by: int = 0) -> Telescope:
    out = []
    for j, (mu, name, ty) in enumerate(tel.entries):
        out.append((mu, name, apply_under(ty, images, shift_by, j)))
    return Telescope(tuple(out))


def apply_under(t: Term, images: Sequence[Term], shift_by: int, depth: int) -> Term:
    """Apply a substitution to a term that sits under ``depth`` extra binders."""
    if depth == 0:
        return apply(t, images, shift_by)
    lifted = tuple(Var(i) for i in range(depth)) + tuple(shift(im, depth) for im in images)
    return apply(t, lifted, shift_by + depth)


# ---------------------------------------------------------------------------
# Substitution objects


@dataclass(frozen=True)
class Key:
    lo: Modality
    hi: Modality


@dataclass(frozen=True)
class ExceptionalKey:
    pass


@dataclass(frozen=True)
class CrossLock:
    mu: Modality


@dataclass(frozen=True)
class Substitution:
    """A context morphism: term images (innermost-first), a weakening, and lock actions."""

    images: tuple[Term, ...] = ()
    shift: int = 0
    actions: tuple = ()

    @staticmethod
    def identity() -> "Substitution":
        return Substitution()

    @staticmethod
    def weakening(n: int) -> "Substitution":
        return Substitution((), n)

    def extend(self, t: Term) -> "Substitution":
        """[θ, t]"""
        return Substitution((t,) + self.images, self.shift, self.actions)

    def extend_psub(self, args: Sequence[Term]) -> "Substitution":
        """[θ | σ] for an outermost-first partial substitution σ."""
        out = self
        for a in args:
            out = out.extend(a)
        return out

    def cross_lock(self, mu: Modality) -> "Substitution":
        return Substitution(self.images, self.shift, self.actions + (CrossLock(mu),))

    def lift(self) -> "Substitution":
        return Substitution((Var(0),) + tuple(shift(i, 1) for i in self.images), self.shift + 1, self.actions)

    def then(self, other: "Substitution") -> "Substitution":
        """The substitution that acts as ``self`` followed by ``other``."""
        imgs = [apply_sub(i, other) for i in self.images]
        imgs.extend(other.images[self.shift:])
        new_shift = other.shift + max(0, self.shift - len(other.images))
        return Substitution(tuple(imgs), new_shift, self.actions + other.actions)


def apply_sub(t: Term, theta: Substitution) -> Term:
    return apply(t, theta.images, theta.shift)


def make_key(mu: Modality, nu: Modality, gamma: Context | None = None) -> Substitution:
    """🔑^{mu≤nu} : (Γ, 🔒_nu) ⇒ (Γ, 🔒_mu)."""
    if not parallel(mu, nu) or not leq(mu, nu):
        raise DttError("order-violation", f"no 2-cell {mu} ≤ {nu}")
    if mu == nu:
        return Substitution.identity()
    return Substitution(actions=(Key(mu, nu),))


def exceptional_key(gamma: Context) -> Substitution:
    """🔑^{△◇≥1} : Γ ⇒ (Γ, 🔒_△◇) for flat Γ."""
    if not is_flat(gamma):
        raise DttError("not-flat", "the exceptional key needs a flat context")
    return Substitution(actions=(ExceptionalKey(),))


# ---------------------------------------------------------------------------
# Variable lookup


@dataclass(frozen=True)
class VarLookup:
    mu: Modality
    ty: Term
    sub: Substitution
    name: str


def lookup_var(gamma: Context, k: int, lvl: int = 0) -> VarLookup:
    """Find variable k and check that the locks to its right permit the access.

    A displayed occurrence (``lvl > 0``) is accessed through one more △□-lock.
    """
    if k < 0:
        raise DttError("unbound-index", f"negative index {k}")
    mode = gamma.mode
    acc = identity(mode)
    seen = 0
    for pos in range(len(gamma.entries) - 1, -1, -1):
        e = gamma.entries[pos]
        if isinstance(e, CLock):
            acc = compose(e.mu, acc)
            continue
        if seen < k:
            seen += 1
            continue
        assert isinstance(e, CVar)
        eff = acc
        if lvl > 0:
            if mode is not Mode.SM:
                raise DttError("mode-mismatch", f"display of {e.name} requested at mode {mode}")
            eff = compose(acc, Modality.TRIBOX)
        weak = Substitution.weakening(k + 1)
        ty = apply_sub(e.ty, weak)
        if parallel(e.mu, eff) and leq(e.mu, eff):
            key = make_key(e.mu, eff) if e.mu != eff else Substitution.identity()
            return VarLookup(e.mu, ty, weak.then(key), e.name)
        if e.mu is Modality.TRIDIA and eff is Modality.ID_SM:
            prefix = Context(gamma.base, gamma.entries[:pos])
            if is_flat(prefix):
                return VarLookup(e.mu, ty, weak.then(exceptional_key(prefix)), e.name)
        raise DttError(
            "modality-violation",
            f"variable {e.name} has modality {e.mu.symbol()} but the locks to its right compose to {eff.symbol()}",
            mu=e.mu,
            locks=eff,
        )
    raise DttError("unbound-index", f"index {k} out of range for a context with {len(gamma)} variables")
