"""Abstract syntax: nameless terms, lock-bearing contexts and telescopes.

Terms and types share one sort.  Variables are de Bruijn indices that skip
locks; ``Var(i, l)`` stands for the l-fold display of variable i.  Binder
names are kept only as printing hints and never take part in equality, so
structural equality of two terms is alpha-equivalence.

Argument lists of the coinductive formers (and of display neutrals) are
partial substitutions stored outermost-first, in telescope order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .errors import DttError
from .mode_theory import Modality, Mode, compose, identity

# ---------------------------------------------------------------------------
# Terms


class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Var(Term):
    idx: int
    lvl: int = 0


@dataclass(frozen=True)
class Univ(Term):
    """``Type`` at mode sm, ``Disc`` at mode dm."""

    mode: Mode


@dataclass(frozen=True)
class El(Term):
    code: Term


@dataclass(frozen=True)
class Code(Term):
    ty: Term


@dataclass(frozen=True)
class Pi(Term):
    mu: Modality
    dom: Term
    cod: Term
    name: str = field(default="x", compare=False)


@dataclass(frozen=True)
class Lam(Term):
    mu: Modality
    body: Term
    name: str = field(default="x", compare=False)
    dom: Optional[Term] = field(default=None, compare=False)


@dataclass(frozen=True)
class App(Term):
    mu: Modality
    fn: Term
    arg: Term


@dataclass(frozen=True)
class TriForm(Term):
    ty: Term


@dataclass(frozen=True)
class DiaForm(Term):
    ty: Term


@dataclass(frozen=True)
class BoxForm(Term):
    ty: Term


@dataclass(frozen=True)
class TriIntro(Term):
    tm: Term


@dataclass(frozen=True)
class DiaIntro(Term):
    tm: Term


@dataclass(frozen=True)
class BoxIntro(Term):
    tm: Term


@dataclass(frozen=True)
class BlackSquare(Term):
    """■ eliminates □ under a △-lock."""

    ty: Optional[Term]
    tm: Term


@dataclass(frozen=True)
class BlackTriangle(Term):
    """▲ eliminates △ under a ◇-lock."""

    ty: Optional[Term]
    tm: Term


@dataclass(frozen=True)
class BlackDiamond(Term):
    """◆ eliminates ◇ under a △-lock; needs a flat context."""

    ty: Optional[Term]
    tm: Term


@dataclass(frozen=True)
class Const(Term):
    name: str
    lvl: int = 0


@dataclass(frozen=True)
class DCoindShape:
    """The data of a display coinductive type needed to move its nodes around.

    ``phi`` and ``b`` are the modalities of the parameter telescope and of the
    tail-argument telescope; the full types live in the signature.
    """

    name: str
    head: str
    tail: str
    phi: tuple[Modality, ...]
    b: tuple[Modality, ...]


@dataclass(frozen=True)
class CorecShape:
    name: str
    codata: DCoindShape
    ups: tuple[Modality, ...]


@dataclass(frozen=True)
class DCoind(Term):
    shape: DCoindShape
    lvl: int
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Head(Term):
    shape: DCoindShape
    lvl: int
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Tail(Term):
    shape: DCoindShape
    lvl: int
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Corec(Term):
    shape: CorecShape
    lvl: int
    args: tuple[Term, ...]

    @property
    def name(self) -> str:
        return self.shape.name


@dataclass(frozen=True)
class DispType(Term):
    """A stuck display of a meta-abstracted type, applied to args and a point.

    ``body`` lives in the current context extended by a telescope whose
    modalities are ``mods``; ``args`` inhabit the décalage of that telescope.
    """

    body: Term
    mods: tuple[Modality, ...]
    args: tuple[Term, ...]
    point: Term


@dataclass(frozen=True)
class DispTerm(Term):
    body: Term
    mods: tuple[Modality, ...]
    args: tuple[Term, ...]


@dataclass(frozen=True)
class ExplicitSub(Term):
    """body[images | shift]; images are innermost-first.  Always eliminable."""

    body: Term
    images: tuple[Term, ...]
    shift: int = 0


@dataclass(frozen=True)
class Meta(Term):
    """A unification variable of the elaborator.  Never reaches the kernel."""

    k: int


TYPE = Univ(Mode.SM)
DISC = Univ(Mode.DM)
ID_SM = Modality.ID_SM
ID_DM = Modality.ID_DM


def is_modal(mu: Modality) -> bool:
    return not mu.is_identity


def decal_mods(mods: Sequence[Modality]) -> tuple[Modality, ...]:
    """Modalities of the décalage of a telescope with modalities ``mods``."""
    out: list[Modality] = []
    for mu in mods:
        out.extend((mu, mu) if mu.is_identity else (mu,))
    return tuple(out)


def decal_mods_n(mods: Sequence[Modality], n: int) -> tuple[Modality, ...]:
    out = tuple(mods)
    for _ in range(n):
        out = decal_mods(out)
    return out


# ---------------------------------------------------------------------------
# Generic traversal


def map_children(t: Term, f: Callable[[Term, int], Term]) -> Term:
    """Rebuild ``t`` with ``f(child, extra_binders)`` applied to each child."""
    if isinstance(t, (Var, Univ, Const, Meta)):
        return t
    if isinstance(t, El):
        return El(f(t.code, 0))
    if isinstance(t, Code):
        return Code(f(t.ty, 0))
    if isinstance(t, Pi):
        return Pi(t.mu, f(t.dom, 0), f(t.cod, 1), t.name)
    if isinstance(t, Lam):
        dom = f(t.dom, 0) if t.dom is not None else None
        return Lam(t.mu, f(t.body, 1), t.name, dom)
    if isinstance(t, App):
        return App(t.mu, f(t.fn, 0), f(t.arg, 0))
    if isinstance(t, (TriForm, DiaForm, BoxForm)):
        return type(t)(f(t.ty, 0))
    if isinstance(t, (TriIntro, DiaIntro, BoxIntro)):
        return type(t)(f(t.tm, 0))
    if isinstance(t, (BlackSquare, BlackTriangle, BlackDiamond)):
        return type(t)(f(t.ty, 0) if t.ty is not None else None, f(t.tm, 0))
    if isinstance(t, (DCoind, Head, Tail, Corec)):
        return type(t)(t.shape, t.lvl, tuple(f(a, 0) for a in t.args))
    if isinstance(t, DispType):
        return DispType(f(t.body, len(t.mods)), t.mods, tuple(f(a, 0) for a in t.args), f(t.point, 0))
    if isinstance(t, DispTerm):
        return DispTerm(f(t.body, len(t.mods)), t.mods, tuple(f(a, 0) for a in t.args))
    if isinstance(t, ExplicitSub):
        return ExplicitSub(f(t.body, 0), tuple(f(a, 0) for a in t.images), t.shift)
    raise DttError("internal", f"unknown term node {type(t).__name__}")


def iter_children(t: Term):
    """Yield (child, extra_binders) pairs."""
    out: list[tuple[Term, int]] = []

    def grab(c: Term, k: int) -> Term:
        out.append((c, k))
        return c

    map_children(t, grab)
    return out


def map_vars(t: Term, on_var: Callable[[int, Var], Term], depth: int = 0) -> Term:
    """Replace each free variable occurrence.

    ``on_var(depth, v)`` is called for variables with ``v.idx >= depth``
    (that is, free in the original term) where ``depth`` counts the binders
    crossed so far.  ExplicitSub bodies are substituted away first.
    """
    if isinstance(t, Var):
        return t if t.idx < depth else on_var(depth, t)
    if isinstance(t, (Univ, Const, Meta)):
        return t
    if isinstance(t, ExplicitSub):
        from .subst import apply

        return map_vars(apply(t.body, t.images, t.shift), on_var, depth)
    return map_children(t, lambda c, k: map_vars(c, on_var, depth + k))


def free_vars(t: Term, depth: int = 0, acc: Optional[set] = None) -> set[int]:
    acc = set() if acc is None else acc
    if isinstance(t, Var):
        if t.idx >= depth:
            acc.add(t.idx - depth)
        return acc
    for child, k in iter_children(t):
        free_vars(child, depth + k, acc)
    return acc


def has_meta(t: Term) -> bool:
    if isinstance(t, Meta):
        return True
    return any(has_meta(c) for c, _ in iter_children(t))


def term_size(t: Term) -> int:
    return 1 + sum(term_size(c) for c, _ in iter_children(t))


def alpha_eq(a: Term, b: Term) -> bool:
    """Structural equality of nameless terms (binder names are ignored)."""
    return a == b


# ---------------------------------------------------------------------------
# Contexts


@dataclass(frozen=True)
class CVar:
    mu: Modality
    name: str
    ty: Term


@dataclass(frozen=True)
class CLock:
    mu: Modality


Entry = CVar | CLock


@dataclass(frozen=True)
class Context:
    """A context in canonical lock form.

    ``base`` is the mode of the empty context the entries are pushed on.
    Use :meth:`empty`, :meth:`lock` and :meth:`extend`; they keep the
    representation canonical.
    """

    base: Mode
    entries: tuple[Entry, ...] = ()

    @staticmethod
    def empty(mode: Mode = Mode.SM) -> "Context":
        return Context(mode, ())

    @property
    def mode(self) -> Mode:
        mode = self.base
        for e in self.entries:
            if isinstance(e, CLock):
                mode = e.mu.dom
        return mode

    def lock(self, mu: Modality) -> "Context":
        return canonical_push_lock(self, mu)

    def extend(self, mu: Modality, name: str, ty: Term) -> "Context":
        if mu.cod != self.mode:
            raise DttError(
                "mode-mismatch",
                f"variable {name} with modality {mu} cannot live in a context at mode {self.mode}",
            )
        return Context(self.base, self.entries + (CVar(mu, name, ty),))

    def extend_tel(self, tel: "Telescope") -> "Context":
        ctx = self
        for mu, name, ty in tel.entries:
            ctx = ctx.extend(mu, name, ty)
        return ctx

    def vars(self) -> list[CVar]:
        return [e for e in self.entries if isinstance(e, CVar)]

    def names(self) -> list[str]:
        """Variable names innermost-first (index order)."""
        return [e.name for e in reversed(self.entries) if isinstance(e, CVar)]

    def __len__(self) -> int:
        return sum(1 for e in self.entries if isinstance(e, CVar))


def canonical_push_lock(ctx: Context, mu: Modality) -> Context:
    if mu.cod != ctx.mode:
        raise DttError("mode-mismatch", f"lock {mu} does not fit a context at mode {ctx.mode}")
    entries = list(ctx.entries)
    if entries and isinstance(entries[-1], CLock):
        mu = compose(entries[-1].mu, mu)
        entries.pop()
    if not mu.is_identity:
        entries.append(CLock(mu))
    return _absorb(Context(ctx.base, tuple(entries)))


def _absorb(ctx: Context) -> Context:
    """Fold a lone lock sitting on an empty base into the base."""
    if len(ctx.entries) != 1 or not isinstance(ctx.entries[0], CLock):
        return ctx
    mu = ctx.entries[0].mu
    M = Modality
    if ctx.base is Mode.DM and mu is M.BOX:
        return Context(Mode.SM, ())
    if ctx.base is Mode.SM and mu is M.TRI:
        return Context(Mode.DM, ())
    if ctx.base is Mode.SM and mu is M.TRIDIA:
        return Context(Mode.DM, (CLock(M.DIA),))
    if ctx.base is Mode.SM and mu is M.TRIBOX:
        return Context(Mode.SM, ())
    return ctx


def canonicalize(base: Mode, raw: Sequence[Entry]) -> Context:
    """Canonical form of an arbitrary entry list, by pushing entries one at a time."""
    ctx = Context(base, ())
    for e in raw:
        ctx = ctx.lock(e.mu) if isinstance(e, CLock) else ctx.extend(e.mu, e.name, e.ty)
    return ctx


def locks_of(entries: Sequence[Entry], mode: Mode) -> Modality:
    """Composite of the locks in ``entries`` (left to right), ending at ``mode``."""
    acc = identity(mode)
    for e in reversed(entries):
        if isinstance(e, CLock):
            acc = compose(e.mu, acc)
    return acc


def is_flat(ctx: Context) -> bool:
    """A canonical sm context is flat when its last lock is ◇ or △◇."""
    if ctx.mode is not Mode.SM:
        return False
    for e in reversed(ctx.entries):
        if isinstance(e, CLock):
            return e.mu in (Modality.DIA, Modality.TRIDIA)
    return False


# ---------------------------------------------------------------------------
# Telescopes, partial substitutions, meta-abstractions


@dataclass(frozen=True)
class Telescope:
    """A lock-free context suffix: ``(mu, name, type)`` entries, outermost-first."""

    entries: tuple[tuple[Modality, str, Term], ...] = ()

    @property
    def mods(self) -> tuple[Modality, ...]:
        return tuple(mu for mu, _, _ in self.entries)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for _, n, _ in self.entries)

    def is_strict(self) -> bool:
        return all(mu.is_identity for mu, _, _ in self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def locks(self, mode: Mode) -> Modality:
        return identity(mode)


@dataclass(frozen=True)
class MetaAbs:
    """⟬body⟭ over a telescope; applying it substitutes a partial substitution."""

    domain: Telescope
    body: object

    def apply(self, args: Sequence[Term]):
        from .subst import apply_psub, subst_tel

        if len(args) != len(self.domain):
            raise DttError("arity-mismatch", f"meta-abstraction over {len(self.domain)} entries applied to {len(args)}")
        if isinstance(self.body, Telescope):
            return subst_tel(self.body, list(reversed(args)))
        if isinstance(self.body, tuple):
            return tuple(apply_psub(b, args) for b in self.body)
        return apply_psub(self.body, args)


def concat(upsilon: Telescope, phi: Telescope) -> Telescope:
    return Telescope(upsilon.entries + phi.entries)


def tel_vars(n: int, offset: int = 0) -> tuple[Term, ...]:
    """The identity partial substitution of an n-entry telescope, outermost-first."""
    return tuple(Var(offset + n - 1 - j) for j in range(n))
