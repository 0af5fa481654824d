"""Display coinductive types: declarations, corecursors and their reducts.

A display coinductive type is given by parameters Φ, a head type A over Φ,
a telescope B of tail arguments over (Φ, x : A) and a map σ into the display
of Φ.  Iterated displays of the head, the tail and of a corecursor are
represented by one node each, carrying a level n and an argument list that
inhabits the n-fold décalage of the base telescope.  The telescopes and
types at each level are derived here, once, and cached in the signature.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .display import (
    decalage_tel,
    disp,
    disp_n,
    disp_ty,
    display_tel,
    env_for,
    pair,
)
from .errors import DttError, Span
from .mode_theory import Modality
from .subst import apply, apply_psub, apply_under, shift
from .syntax import (
    ID_SM,
    App,
    Const,
    Corec,
    CorecShape,
    DCoind,
    DCoindShape,
    El,
    Head,
    Lam,
    MetaAbs,
    Pi,
    Tail,
    Telescope,
    Term,
    Var,
    decal_mods_n,
    tel_vars,
)


@dataclass
class CodataDef:
    shape: DCoindShape
    phi: Telescope
    head_ty: Term
    b: Telescope
    sigma: tuple[Term, ...]
    span: Optional[Span] = None

    @property
    def name(self) -> str:
        return self.shape.name


@dataclass
class CorecDef:
    shape: CorecShape
    ups: Telescope
    zeta: tuple[Term, ...]
    h: Term
    tau: tuple[Term, ...]
    span: Optional[Span] = None

    @property
    def name(self) -> str:
        return self.shape.name


@dataclass
class ConstDef:
    name: str
    ty: Term
    body: Optional[Term] = None
    corec: Optional[str] = None
    span: Optional[Span] = None


def pi_tel(tel: Telescope, cod: Term) -> Term:
    out = cod
    for mu, name, ty in reversed(tel.entries):
        out = Pi(mu, ty, out, name)
    return out


def lam_tel(tel: Telescope, body: Term) -> Term:
    out = body
    for mu, name, ty in reversed(tel.entries):
        out = Lam(mu, out, name, ty)
    return out


def app_spine(fn: Term, args: Sequence[Term], mods: Sequence[Modality]) -> Term:
    for a, mu in zip(args, mods):
        fn = App(mu, fn, a)
    return fn


def block_size(mu: Modality, n: int) -> int:
    return 2 ** n if mu.is_identity else 1


@dataclass
class Signature:
    """Global declarations plus the caches for their iterated displays."""

    consts: dict[str, ConstDef] = field(default_factory=dict)
    codata: dict[str, CodataDef] = field(default_factory=dict)
    corecs: dict[str, CorecDef] = field(default_factory=dict)
    destructors: dict[str, tuple[str, str]] = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False)

    # -- registration ------------------------------------------------------

    def names(self) -> set[str]:
        return set(self.consts) | set(self.codata) | set(self.destructors)

    def _fresh(self, name: str, span: Optional[Span]) -> None:
        if name in self.names():
            raise DttError("duplicate-definition", f"{name} is already defined", span)

    def add_codata(self, cd: CodataDef) -> None:
        for n in (cd.name, cd.shape.head, cd.shape.tail):
            self._fresh(n, cd.span)
        self.codata[cd.name] = cd
        self.destructors[cd.shape.head] = (cd.name, "head")
        self.destructors[cd.shape.tail] = (cd.name, "tail")

    def add_const(self, cdef: ConstDef) -> None:
        self._fresh(cdef.name, cdef.span)
        self.consts[cdef.name] = cdef

    def add_corec(self, cr: CorecDef, ty: Term) -> ConstDef:
        self._fresh(cr.name, cr.span)
        self.corecs[cr.name] = cr
        body = lam_tel(cr.ups, Corec(cr.shape, 0, tel_vars(len(cr.ups))))
        cdef = ConstDef(cr.name, ty, body, corec=cr.name, span=cr.span)
        self.consts[cr.name] = cdef
        return cdef

    def codata_of(self, shape: DCoindShape) -> CodataDef:
        return self.codata[shape.name]

    # -- constants ---------------------------------------------------------

    def const_type(self, name: str, n: int = 0) -> Term:
        key = ("ctype", name, n)
        if key not in self._cache:
            if n == 0:
                if name not in self.consts:
                    raise DttError("unbound-name", f"unknown constant {name}")
                self._cache[key] = self.consts[name].ty
            else:
                self._cache[key] = disp_ty(self.const_type(name, n - 1), env_for(()), Const(name, n - 1))
        return self._cache[key]

    def const_unfold(self, name: str, n: int = 0) -> Optional[Term]:
        cdef = self.consts.get(name)
        if cdef is None or cdef.body is None:
            return None
        key = ("cbody", name, n)
        if key not in self._cache:
            self._cache[key] = disp_n(cdef.body, n)
        return self._cache[key]

    # -- levels of a codata type -------------------------------------------

    def dcoind_level(self, shape: DCoindShape, n: int) -> Telescope:
        """Ξ_n: the telescope indexing the n-fold display of the type."""
        key = ("xi", shape.name, n)
        if key not in self._cache:
            if n == 0:
                tel = self.codata_of(shape).phi
            else:
                prev = self.dcoind_level(shape, n - 1)
                big = decalage_tel(prev)
                point = DCoind(shape, n - 1, env_for(prev.mods).even_args())
                tel = Telescope(big.entries + ((ID_SM, "a" + "′" * (n - 1), point),))
            self._cache[key] = tel
        return self._cache[key]

    def head_level(self, shape: DCoindShape, n: int) -> tuple[Telescope, Term]:
        """(H_n, T_n): the head at level n takes H_n and has type T_n."""
        key = ("head", shape.name, n)
        if key not in self._cache:
            if n == 0:
                cd = self.codata_of(shape)
                k = len(cd.phi)
                c_ty = DCoind(shape, 0, tel_vars(k))
                tel = Telescope(cd.phi.entries + ((ID_SM, "c", c_ty),))
                ty = shift(cd.head_ty, 1)
            else:
                prev, prev_ty = self.head_level(shape, n - 1)
                tel = decalage_tel(prev)
                env = env_for(prev.mods)
                ty = disp_ty(prev_ty, env, Head(shape, n - 1, env.even_args()))
            self._cache[key] = (tel, ty)
        return self._cache[key]

    def tail_level(self, shape: DCoindShape, n: int) -> tuple[Telescope, Term]:
        """(K_n, U_n) for the tail."""
        key = ("tail", shape.name, n)
        if key not in self._cache:
            if n == 0:
                cd = self.codata_of(shape)
                k = len(cd.phi)
                c_ty = DCoind(shape, 0, tel_vars(k))
                head_c = Head(shape, 0, tel_vars(k + 1))
                b_entries = []
                for j, (mu, name, ty) in enumerate(cd.b.entries):
                    b_entries.append((mu, name, apply_under(ty, (head_c,), 1, j)))
                tel = Telescope(cd.phi.entries + ((ID_SM, "c", c_ty),) + tuple(b_entries))
                m = len(cd.b)
                sig = tuple(apply_under(s, (head_c,), 1, m) for s in cd.sigma)
                phi_vars = tel_vars(k, offset=m + 1)
                args = pair(phi_vars, sig, cd.phi.mods) + (Var(m),)
                ty = DCoind(shape, 1, args)
            else:
                prev, prev_ty = self.tail_level(shape, n - 1)
                tel = decalage_tel(prev)
                env = env_for(prev.mods)
                ty = disp_ty(prev_ty, env, Tail(shape, n - 1, env.even_args()))
            self._cache[key] = (tel, ty)
        return self._cache[key]

    def blocks(self, shape: DCoindShape, n: int) -> tuple[int, int, int]:
        """Sizes of the Φ-block, the c-block and the B-block at level n."""
        phi = len(decal_mods_n(shape.phi, n))
        return phi, 2 ** n, len(decal_mods_n(shape.b, n))

    # -- corecursors -------------------------------------------------------

    def corec_level(self, shape: CorecShape, n: int) -> tuple[Telescope, Term]:
        """(C_n, V_n): the n-fold display of a corecursor takes C_n and has type V_n."""
        key = ("corec", shape.name, n)
        if key not in self._cache:
            if n == 0:
                cr = self.corecs[shape.name]
                tel, ty = cr.ups, DCoind(shape.codata, 0, cr.zeta)
            else:
                prev, prev_ty = self.corec_level(shape, n - 1)
                tel = decalage_tel(prev)
                env = env_for(prev.mods)
                ty = disp_ty(prev_ty, env, Corec(shape, n - 1, env.even_args()))
            self._cache[key] = (tel, ty)
        return self._cache[key]

    def corec_head_reduct(self, name: str, n: int) -> Term:
        """h displayed n times, as a term over C_n."""
        key = ("hred", name, n)
        if key not in self._cache:
            cr = self.corecs[name]
            if n == 0:
                out = cr.h
            else:
                prev = self.corec_head_reduct(name, n - 1)
                out = disp(prev, env_for(decal_mods_n(cr.ups.mods, n - 1)))
            self._cache[key] = out
        return self._cache[key]

    def corec_tail_reduct(self, name: str, n: int) -> Term:
        """The displayed corecursive call, over C_n followed by the B-block."""
        key = ("tred", name, n)
        if key not in self._cache:
            cr = self.corecs[name]
            if n == 0:
                m = len(cr.shape.codata.b)
                ups = tel_vars(len(cr.ups), offset=m)
                out = Corec(cr.shape, 1, pair(ups, cr.tau, cr.ups.mods))
            else:
                prev = self.corec_tail_reduct(name, n - 1)
                mods = decal_mods_n(cr.ups.mods + cr.shape.codata.b, n - 1)
                out = disp(prev, env_for(mods))
            self._cache[key] = out
        return self._cache[key]

    def corec_b_tel(self, name: str) -> Telescope:
        """B(ζ υ, h υ) as a telescope over Υ."""
        cr = self.corecs[name]
        return b_tel_at(self.codata_of(cr.shape.codata), cr.zeta, cr.h)

    def invalidate(self, name: str) -> None:
        """Drop cached levels of a declaration whose premises changed."""
        for key in [k for k in self._cache if k[1] == name]:
            del self._cache[key]

    def corec_side_condition(self, name: str) -> tuple[tuple[Term, ...], tuple[Term, ...]]:
        """Both sides of ζ^d⦅υ, τ υ y⦆ ≡ σ (ζ υ) (h υ) y, over (Υ, y : B(ζυ, hυ))."""
        cr = self.corecs[name]
        cd = self.codata_of(cr.shape.codata)
        m = len(cd.b)
        ups_mods = cr.ups.mods
        env = env_for(ups_mods)
        big = [disp(z, env) for z in cr.zeta]
        # ζ^d over Υ^D, keep only the primed components of each non-modal Φ entry
        lhs_over_D = tuple(d for d, mu in zip(big, cd.phi.mods) if mu.is_identity)
        ups = tel_vars(len(cr.ups), offset=m)
        paired = pair(ups, cr.tau, ups_mods)
        lhs = tuple(apply(t, tuple(reversed(paired)), m) for t in lhs_over_D)
        images = tuple(Var(i) for i in range(m)) + (shift(cr.h, m),) + tuple(shift(z, m) for z in reversed(cr.zeta))
        rhs = tuple(apply(s, images, m) for s in cd.sigma)
        return lhs, rhs


def b_tel_at(cd: CodataDef, zeta: Sequence[Term], h: Term) -> Telescope:
    """The tail telescope B instantiated at parameters ζ and head value h."""
    images = (h,) + tuple(reversed(tuple(zeta)))
    out = []
    for j, (mu, nm, ty) in enumerate(cd.b.entries):
        out.append((mu, nm, apply_under(ty, images, 0, j)))
    return Telescope(tuple(out))


# ---------------------------------------------------------------------------
# Reduction rules


def c_top_index(sig: Signature, node: Head | Tail) -> int:
    phi, c, _ = sig.blocks(node.shape, node.lvl)
    return phi + c - 1


def reduce_head_corec(sig: Signature, node: Head, top: Term) -> Optional[Term]:
    """head^{dⁿ} with a corecursor on top of its c-block: the displayed h."""
    if not isinstance(top, Corec) or top.shape.codata != node.shape or top.lvl != node.lvl:
        return None
    return apply_psub(sig.corec_head_reduct(top.name, node.lvl), top.args)


def reduce_tail_corec(sig: Signature, node: Tail, top: Term) -> Optional[Term]:
    """tail^{dⁿ} with a corecursor on top: the (n+1)-fold display of the call."""
    if not isinstance(top, Corec) or top.shape.codata != node.shape or top.lvl != node.lvl:
        return None
    phi, c, _ = sig.blocks(node.shape, node.lvl)
    b_block = node.args[phi + c:]
    return apply_psub(sig.corec_tail_reduct(top.name, node.lvl), tuple(top.args) + tuple(b_block))


def reduce_destructor_of_displayed_corec(sig: Signature, node: Term, top: Term) -> Optional[Term]:
    if isinstance(node, Head):
        return reduce_head_corec(sig, node, top)
    if isinstance(node, Tail):
        return reduce_tail_corec(sig, node, top)
    return None


def infer_destructor(sig: Signature, name: str, n: int = 0) -> MetaAbs:
    """The meta-abstracted type of the n-fold display of a destructor."""
    if name not in sig.destructors:
        raise DttError("unbound-name", f"{name} is not a destructor")
    codata, role = sig.destructors[name]
    shape = sig.codata[codata].shape
    tel, ty = sig.head_level(shape, n) if role == "head" else sig.tail_level(shape, n)
    return MetaAbs(tel, ty)


infer_head = infer_destructor


# ---------------------------------------------------------------------------
# Formation and corecursion checks


def form_dcoind(sig: Signature, cd: CodataDef, checker=None) -> DCoind:
    """Check the formation premises and return the type former over Φ."""
    from .checker import Checker
    from .syntax import Context

    ch = checker or Checker(sig)
    ctx = Context.empty()
    ch.check_tel(ctx, cd.phi)
    ctx_phi = ctx.extend_tel(cd.phi)
    ch.check_type(ctx_phi, cd.head_ty)
    ctx_x = ctx_phi.extend(ID_SM, "x", cd.head_ty)
    ch.check_tel(ctx_x, cd.b)
    ctx_y = ctx_x.extend_tel(cd.b)
    m = len(cd.b)
    phi_vars = tel_vars(len(cd.phi), offset=m + 1)
    target = display_tel(cd.phi, phi_vars)
    if len(cd.sigma) != len(target):
        raise DttError("arity-mismatch", f"σ has {len(cd.sigma)} components but Φ^d has {len(target)}", cd.span)
    ch.check_psub(ctx_y, target, cd.sigma)
    return DCoind(cd.shape, 0, tel_vars(len(cd.phi)))


def check_corec(sig: Signature, cr: CorecDef, checker=None) -> Corec:
    """Validate corecursor premises; the side condition is checked first."""
    from .checker import Checker
    from .syntax import Context

    ch = checker or Checker(sig)
    cd = sig.codata_of(cr.shape.codata)
    ctx = Context.empty()
    ch.check_tel(ctx, cr.ups)
    ctx_u = ctx.extend_tel(cr.ups)
    ch.check_psub(ctx_u, cd.phi, cr.zeta)
    head_ty = apply_psub(cd.head_ty, cr.zeta)
    ch.check(ctx_u, cr.h, head_ty)
    registered = cr.name in sig.corecs
    if not registered:
        sig.corecs[cr.name] = cr
    try:
        btel = sig.corec_b_tel(cr.name)
        ctx_y = ctx_u.extend_tel(btel)
        lhs, rhs = sig.corec_side_condition(cr.name)
        for l_t, r_t in zip(lhs, rhs):
            nl, nr = ch.normalize(ctx_y, l_t), ch.normalize(ctx_y, r_t)
            if nl != nr:
                from .printer import show

                names = ctx_y.names()
                raise DttError(
                    "side-condition-failed",
                    f"corecursor side condition fails: {show(nl, names)} is not {show(nr, names)}",
                    cr.span,
                    lhs=nl,
                    rhs=nr,
                )
        m = len(btel)
        target = display_tel(cr.ups, tel_vars(len(cr.ups), offset=m))
        ch.check_psub(ctx_y, target, cr.tau)
    finally:
        if not registered:
            del sig.corecs[cr.name]
    return Corec(cr.shape, 0, tel_vars(len(cr.ups)))


# ---------------------------------------------------------------------------
# Simplex types


_DIM_LETTERS = {-1: "ʒ", 0: "x", 1: "β", 2: "𝔣"}


def label_name(value: int, width: int) -> str:
    bits = format(value, f"0{width}b") if width else ""
    dim = bits.count("1") - 1
    return _DIM_LETTERS.get(dim, "θ") + bits


@dataclass
class SimplexType:
    """The type of n-simplices of X, over its boundary telescope."""

    boundary: Telescope
    labels: tuple[int, ...]
    width: int
    code: Term

    @property
    def ty(self) -> Term:
        return El(self.code)

    @property
    def names(self) -> tuple[str, ...]:
        return self.boundary.names


def simplex_type(checker, ctx, X: Term, n: int) -> SimplexType:
    """Iterate the tail and finish with the n-fold displayed head.

    For a codata type shaped like SST (one tail argument) labels run over
    1 .. 2^(n+1)-2; for one shaped like ASST (no tail argument) they run over
    0 .. 2^(n+1)-2 and n may be -1.
    """
    sig = checker.sig
    x_ty = checker.normalize(ctx, checker.infer(ctx, X))
    if not isinstance(x_ty, DCoind) or x_ty.lvl != 0 or x_ty.shape.phi:
        raise DttError("type-mismatch", "simplex_type needs an inhabitant of an unparametrised codata type")
    shape = x_ty.shape
    augmented = len(shape.b) == 0
    if len(shape.b) > 1:
        raise DttError("schema-violation", "simplex_type supports codata with at most one tail argument")
    if n < (-1 if augmented else 0):
        raise DttError("arity-mismatch", f"no simplices of dimension {n} here")
    width = n + 1
    labels = list(range(0, 2 ** width - 1)) if augmented else list(range(1, 2 ** width - 1))
    label_iter = iter(labels)
    entries: list = []
    state = {"ctx": ctx, "held": []}

    def push(ty: Term) -> Var:
        name = label_name(next(label_iter), width)
        entries.append((ID_SM, name, ty))
        state["ctx"] = state["ctx"].extend(ID_SM, name, ty)
        return Var(0)

    def hidden_of(y: Term, k: int) -> tuple[Term, ...]:
        ty = checker.normalize(state["ctx"], checker.infer(state["ctx"], y))
        if not isinstance(ty, DCoind) or ty.lvl != k:
            raise DttError("internal", "unexpected type while building a simplex type")
        return ty.args

    Y = X
    tails = n + 1 if augmented else n
    for k in range(tails):
        prefix = list(hidden_of(Y, k)) + [Y]
        tel_k, _ = sig.tail_level(shape, k)
        for j in range(len(prefix), len(tel_k)):
            ety = apply_psub(tel_k.entries[j][2], prefix)
            v = push(ety)
            prefix = [shift(p, 1) for p in prefix] + [v]
        Y = Tail(shape, k, tuple(prefix))
    level = n + 1 if augmented else n
    head_args = hidden_of(Y, level) + (Y,)
    _, t_n = sig.head_level(shape, level)
    T = apply_psub(t_n, head_args)
    code: Term = Head(shape, level, head_args)
    while len(entries) < len(labels):
        T = checker.whnf(T)
        if not isinstance(T, Pi):
            raise DttError("internal", "head type ran out of arguments before the labels did")
        push(T.dom)
        code = App(ID_SM, shift(code, 1), Var(0))
        T = T.cod
    return SimplexType(Telescope(tuple(entries)), tuple(labels), width, code)
