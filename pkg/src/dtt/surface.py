"""The surface language: lexing, layout-sensitive parsing and elaboration.

A file is a sequence of declarations.  A declaration starts in column 0;
indented lines continue it.  Two declaration forms exist::

    codata pt (X : SST) : Type where
      zp : pt X → Z X
      sp : (p : pt X) → pt^d (S X (zp p)) p

    Fib : (X :^TB Type) (ʒ : X) → SST
    Z (Fib X ʒ) = X^d ʒ
    S (Fib X ʒ) x = Fib^d X ʒ x

A definition whose clauses start with a destructor is a corecursor; one whose
single clause starts with its own name is an ordinary constant; one without
clauses is a postulate.  ``El`` and ``Code`` are inserted where the expected
sort calls for them, and the hidden arguments of iterated destructors and
display types are reconstructed by first-order unification.
"""
from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from .checker import Checker
from .coinductive import (
    CodataDef,
    ConstDef,
    CorecDef,
    Signature,
    b_tel_at,
    check_corec,
    form_dcoind,
)
from .display import Env, disp, disp_ty, display_tel, evens, odds
from .errors import DttError, Span
from .mode_theory import Modality, Mode, identity, parse_modality
from .printer import show
from .subst import apply_psub, subst1
from .syntax import (
    ID_SM,
    App,
    BlackDiamond,
    BlackSquare,
    BlackTriangle,
    BoxForm,
    BoxIntro,
    Code,
    Const,
    Context,
    CorecShape,
    DCoind,
    DCoindShape,
    DiaForm,
    DiaIntro,
    El,
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
    decal_mods_n,
    free_vars,
    has_meta,
    is_flat,
    map_children,
    tel_vars,
)

# ---------------------------------------------------------------------------
# Lexing

KEYWORDS = frozenset({"codata", "def", "where", "Type", "Disc", "El", "Code"})

OPS = {
    "△": "tri", "◇": "dia", "□": "box", "■": "unbox", "▲": "untri", "◆": "undia",
    "Tri": "tri", "Dia": "dia", "Box": "box", "unbox": "unbox", "untri": "untri", "undia": "undia",
}

_MOD_SPELLINGS = ("TB", "TD", "T", "D", "B", "△□", "△◇", "△", "◇", "□", "1")

_NAME_EXTRA = "'′⁺+₀₁₂₃₄₅₆₇₈₉_"


@dataclass(frozen=True)
class Token:
    kind: str  # NAME KW OP SYM COLMOD SUP EOF
    text: str
    start: int  # character offsets into the source
    end: int
    line: int
    col: int
    first: bool = False
    value: object = None


def _is_name_start(ch: str) -> bool:
    if ch == "λ" or ch == "ᵈ":
        return False
    cat = unicodedata.category(ch)
    return cat.startswith("L") or ch == "_"


def _is_name_char(ch: str) -> bool:
    if ch == "λ" or ch == "ᵈ":
        return False
    cat = unicodedata.category(ch)
    return cat.startswith("L") or cat.startswith("N") or ch in _NAME_EXTRA


class Source:
    """A source text with character to byte offset conversion."""

    def __init__(self, text: str, path: str = "<input>"):
        self.text = text
        self.path = path
        offsets = [0]
        for ch in text:
            offsets.append(offsets[-1] + len(ch.encode("utf-8")))
        self._bytes = offsets

    def span(self, start: int, end: int) -> Span:
        return Span(self.path, self._bytes[start], self._bytes[end])


def lex(src: Source) -> list[Token]:
    text = src.text
    toks: list[Token] = []
    i, line, line_start = 0, 1, 0
    fresh_line = True

    def err(msg: str, at: int) -> DttError:
        return DttError("parse-error", msg, src.span(at, min(at + 1, len(text))))

    def push(kind: str, start: int, end: int, value: object = None) -> None:
        nonlocal fresh_line
        toks.append(Token(kind, text[start:end], start, end, line, start - line_start, fresh_line, value))
        fresh_line = False

    while i < len(text):
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            line_start = i
            fresh_line = True
            continue
        if ch.isspace():
            i += 1
            continue
        if text.startswith("--", i):
            while i < len(text) and text[i] != "\n":
                i += 1
            continue
        if text.startswith("->", i):
            push("SYM", i, i + 2, "→")
            i += 2
            continue
        if text.startswith(":^", i):
            for spelling in _MOD_SPELLINGS:
                if text.startswith(spelling, i + 2):
                    mode_of = Modality.ID_SM if spelling == "1" else parse_modality(spelling)
                    push("COLMOD", i, i + 2 + len(spelling), mode_of)
                    i += 2 + len(spelling)
                    break
            else:
                raise err("unknown modality annotation", i)
            continue
        if ch == "^":
            j = i + 1
            while j < len(text) and text[j] == "d":
                j += 1
            if j == i + 1 or (j < len(text) and _is_name_char(text[j])):
                raise err("expected ^d, ^dd, ...", i)
            push("SUP", i, j, j - i - 1)
            i = j
            continue
        if ch == "ᵈ":
            j = i
            while j < len(text) and text[j] == "ᵈ":
                j += 1
            push("SUP", i, j, j - i)
            i = j
            continue
        if ch in "()=:→λ\\.":
            value = {"\\": "λ"}.get(ch, ch)
            push("SYM", i, i + 1, value)
            i += 1
            continue
        if ch in OPS:
            push("OP", i, i + 1, OPS[ch])
            i += 1
            continue
        if _is_name_start(ch):
            j = i + 1
            while j < len(text) and _is_name_char(text[j]):
                j += 1
            word = text[i:j].replace("+", "⁺")
            if word in KEYWORDS:
                push("KW", i, j, word)
            elif word in OPS:
                push("OP", i, j, OPS[word])
            else:
                push("NAME", i, j, word)
            i = j
            continue
        raise err(f"unexpected character {ch!r}", i)
    toks.append(Token("EOF", "", len(text), len(text), line, len(text) - line_start, True))
    return toks


# ---------------------------------------------------------------------------
# Abstract syntax


@dataclass
class SExpr:
    span: Span


@dataclass
class SName(SExpr):
    name: str
    sup: int = 0


@dataclass
class SUniv(SExpr):
    mode: Mode


@dataclass
class Binder:
    names: list[str]
    mu: Optional[Modality]
    ty: SExpr
    span: Span


@dataclass
class SPi(SExpr):
    binders: list[Binder]
    cod: SExpr


@dataclass
class SArrow(SExpr):
    dom: SExpr
    cod: SExpr


@dataclass
class SLam(SExpr):
    names: list[str]
    body: SExpr


@dataclass
class SApp(SExpr):
    fn: SExpr
    arg: SExpr


@dataclass
class SOp(SExpr):
    op: str  # tri dia box unbox untri undia El Code
    arg: SExpr


@dataclass
class SSup(SExpr):
    """The display ``(e)^d`` of a compound expression."""

    expr: SExpr
    n: int


@dataclass
class Destructor:
    name: str
    ty: SExpr
    span: Span


@dataclass
class CodataDecl:
    name: str
    params: list[Binder]
    sort: SExpr
    head: Destructor
    tail: Destructor
    span: Span


@dataclass
class Clause:
    lhs: SExpr
    rhs: SExpr
    span: Span


@dataclass
class DefDecl:
    name: str
    ty: SExpr
    clauses: list[Clause] = field(default_factory=list)
    span: Optional[Span] = None


Decl = Union[CodataDecl, DefDecl]


def spine_of(e: SExpr) -> tuple[SExpr, list[SExpr]]:
    args: list[SExpr] = []
    while isinstance(e, SApp):
        args.append(e.arg)
        e = e.fn
    return e, args[::-1]


# ---------------------------------------------------------------------------
# Parsing


class Parser:
    def __init__(self, src: Source, tokens: Sequence[Token]):
        self.src = src
        end = tokens[-1].end if tokens else 0
        self.toks = list(tokens) + [Token("EOF", "", end, end, 0, 0, True)]
        self.pos = 0

    # -- helpers ---------------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def advance(self) -> Token:
        t = self.tok
        self.pos += 1
        return t

    def at(self, kind: str, value: object = None) -> bool:
        t = self.tok
        return t.kind == kind and (value is None or t.value == value)

    def expect(self, kind: str, value: object = None, what: str = "") -> Token:
        if not self.at(kind, value):
            raise self.error(f"expected {what or value or kind}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def error(self, msg: str) -> DttError:
        t = self.tok
        return DttError("parse-error", msg, self.src.span(t.start, max(t.end, t.start)))

    def span_from(self, start: int) -> Span:
        prev = self.toks[self.pos - 1] if self.pos else self.toks[0]
        return self.src.span(start, max(start, prev.end))

    def done(self) -> None:
        if not self.at("EOF"):
            raise self.error(f"unexpected {self.tok.text!r}")

    # -- expressions -------------------------------------------------------------

    def expr(self) -> SExpr:
        start = self.tok.start
        if self.at("SYM", "λ"):
            self.advance()
            names = [self.expect("NAME", what="a variable name").value]
            while self.at("NAME"):
                names.append(self.advance().value)
            if not (self.at("SYM", "→") or self.at("SYM", ".")):
                raise self.error("expected → after the λ binders")
            self.advance()
            body = self.expr()
            return SLam(self.span_from(start), names, body)
        if self._binder_ahead():
            binders = []
            while self._binder_ahead():
                binders.append(self.binder())
            self.expect("SYM", "→", "→ after the binders")
            cod = self.expr()
            return SPi(self.span_from(start), binders, cod)
        left = self.app()
        if self.at("SYM", "→"):
            self.advance()
            cod = self.expr()
            return SArrow(self.span_from(start), left, cod)
        return left

    def _binder_ahead(self) -> bool:
        if not self.at("SYM", "("):
            return False
        k = 1
        while self.peek(k).kind == "NAME":
            k += 1
        nxt = self.peek(k)
        return k > 1 and (nxt.kind == "COLMOD" or (nxt.kind == "SYM" and nxt.value == ":"))

    def binder(self) -> Binder:
        start = self.expect("SYM", "(").start
        names = []
        while self.at("NAME"):
            names.append(self.advance().value)
        mu = None
        if self.at("COLMOD"):
            mu = self.advance().value
        else:
            self.expect("SYM", ":")
        ty = self.expr()
        self.expect("SYM", ")", "closing parenthesis")
        return Binder(names, mu, ty, self.span_from(start))

    def app(self) -> SExpr:
        start = self.tok.start
        if self.at("OP") or self.at("KW", "El") or self.at("KW", "Code"):
            op = self.advance().value
            arg = self.app()
            return SOp(self.span_from(start), op, arg)
        e = self.atom()
        while self._atom_ahead():
            a = self.atom()
            e = SApp(self.span_from(start), e, a)
        if self.at("OP") or self.at("KW", "El") or self.at("KW", "Code"):
            # a trailing prefix operator takes the rest of the application
            a = self.app()
            e = SApp(self.span_from(start), e, a)
        return e

    def _atom_ahead(self) -> bool:
        t = self.tok
        return t.kind == "NAME" or (t.kind == "KW" and t.value in ("Type", "Disc")) or (t.kind == "SYM" and t.value == "(")

    def atom(self) -> SExpr:
        t = self.tok
        start = t.start
        if t.kind == "NAME":
            self.advance()
            sup = self.advance().value if self.at("SUP") else 0
            return SName(self.span_from(start), t.value, sup)
        if t.kind == "KW" and t.value in ("Type", "Disc"):
            self.advance()
            u = SUniv(self.span_from(start), Mode.SM if t.value == "Type" else Mode.DM)
            if self.at("SUP"):
                return SSup(self.span_from(start), u, self.advance().value)
            return u
        if t.kind == "SYM" and t.value == "(":
            self.advance()
            e = self.expr()
            self.expect("SYM", ")", "closing parenthesis")
            if self.at("SUP"):
                n = self.advance().value
                if isinstance(e, SName):
                    return SName(self.span_from(start), e.name, e.sup + n)
                return SSup(self.span_from(start), e, n)
            return e
        raise self.error(f"expected an expression, found {t.text or 'end of input'!r}")


def _items(tokens: list[Token]) -> list[list[Token]]:
    """Split a token stream into declarations at tokens in column 0."""
    items: list[list[Token]] = []
    for t in tokens:
        if t.kind == "EOF":
            break
        if (t.first and t.col == 0) or not items:
            items.append([])
        items[-1].append(t)
    return items


def parse(text: str, path: str = "<input>") -> list[Decl]:
    src = Source(text, path)
    return parse_source(src)


def parse_source(src: Source) -> list[Decl]:
    decls: list[Decl] = []
    for item in _items(lex(src)):
        head = item[0]
        if head.col != 0:
            raise DttError("parse-error", "declarations must start in column 0", src.span(head.start, head.end))
        if head.kind == "KW" and head.value == "codata":
            decls.append(_codata(src, item))
            continue
        body = item[1:] if head.kind == "KW" and head.value == "def" else item
        if len(body) >= 2 and body[0].kind == "NAME" and body[1].kind == "SYM" and body[1].value == ":":
            p = Parser(src, body[2:])
            ty = p.expr()
            p.done()
            decls.append(DefDecl(body[0].value, ty, [], src.span(item[0].start, item[-1].end)))
            continue
        eq = next((k for k, t in enumerate(item) if t.kind == "SYM" and t.value == "="), None)
        if eq is None:
            raise DttError("parse-error", "expected a declaration, a type signature or a clause", src.span(head.start, head.end))
        if not decls or not isinstance(decls[-1], DefDecl):
            raise DttError("parse-error", "clause without a preceding type signature", src.span(head.start, head.end))
        lp = Parser(src, item[:eq])
        lhs = lp.expr()
        lp.done()
        rp = Parser(src, item[eq + 1:])
        rhs = rp.expr()
        rp.done()
        decls[-1].clauses.append(Clause(lhs, rhs, src.span(item[0].start, item[-1].end)))
    return decls


def _codata(src: Source, item: list[Token]) -> CodataDecl:
    where = next((k for k, t in enumerate(item) if t.kind == "KW" and t.value == "where"), None)
    if where is None:
        raise DttError("parse-error", "codata declaration without 'where'", src.span(item[0].start, item[-1].end))
    p = Parser(src, item[1:where])
    name = p.expect("NAME", what="a codata name").value
    params = []
    while p._binder_ahead():
        params.append(p.binder())
    p.expect("SYM", ":", "':' before the sort")
    sort = p.expr()
    p.done()
    rest = item[where + 1:]
    starts = [
        k for k, t in enumerate(rest)
        if t.first and t.kind == "NAME" and k + 1 < len(rest) and rest[k + 1].kind == "SYM" and rest[k + 1].value == ":"
    ]
    if not starts or starts[0] != 0:
        at = rest[0] if rest else item[where]
        raise DttError("parse-error", "expected destructor declarations after 'where'", src.span(at.start, at.end))
    dtors = []
    for a, b in zip(starts, starts[1:] + [len(rest)]):
        seg = rest[a:b]
        dp = Parser(src, seg[2:])
        ty = dp.expr()
        dp.done()
        dtors.append(Destructor(seg[0].value, ty, src.span(seg[0].start, seg[-1].end)))
    span = src.span(item[0].start, item[-1].end)
    if len(dtors) != 2:
        raise DttError("schema-violation", f"a codata type has exactly a head and a tail destructor, found {len(dtors)}", span)
    return CodataDecl(name, params, sort, dtors[0], dtors[1], span)


def parse_expr(text: str, path: str = "<expr>") -> SExpr:
    src = Source(text, path)
    p = Parser(src, lex(src)[:-1])
    e = p.expr()
    p.done()
    return e


def parse_binders(text: str, path: str = "<ctx>") -> list[Binder]:
    src = Source(text, path)
    p = Parser(src, lex(src)[:-1])
    out = []
    while p._binder_ahead():
        out.append(p.binder())
    p.done()
    return out


# ---------------------------------------------------------------------------
# Elaboration

_FORMER = {"tri": TriForm, "dia": DiaForm, "box": BoxForm}
_INTRO = {"tri": TriIntro, "dia": DiaIntro, "box": BoxIntro}
_LOCK = {"tri": Modality.TRI, "dia": Modality.DIA, "box": Modality.BOX}
_FORMER_MODE = {"tri": Mode.SM, "dia": Mode.DM, "box": Mode.DM}
# eliminator: (premise lock, former it eliminates, node)
_ELIM = {
    "unbox": (Modality.TRI, BoxForm, BlackSquare),
    "untri": (Modality.DIA, TriForm, BlackTriangle),
    "undia": (Modality.TRI, DiaForm, BlackDiamond),
}

_SENTINEL = Meta(-1)


def _visible_mask(kind: str, sig: Signature, shape: DCoindShape, n: int) -> list[bool]:
    """Which entries of a level telescope are written by the user."""
    phi_n = decal_mods_n(shape.phi, n)
    mask = []
    if kind == "dcoind":
        for mu in shape.phi:
            size = 2 ** n if mu.is_identity else 1
            mask.extend([False] * (size - 1) + [True])
        return mask + [True] * (len(sig.dcoind_level(shape, n)) - len(mask))
    c = 2 ** n
    mask = [False] * len(phi_n) + [False] * (c - 1) + [True]
    if kind == "tail":
        tel, _ = sig.tail_level(shape, n)
        mask += [True] * (len(tel) - len(mask))
    return mask


class Elaborator:
    """Turns surface declarations into checked signature entries."""

    def __init__(self, sig: Optional[Signature] = None, checker: Optional[Checker] = None):
        self.sig = sig if sig is not None else Signature()
        self.checker = checker if checker is not None else Checker(self.sig)
        self._metas = 0

    # -- declarations -------------------------------------------------------------

    def declare_all(self, decls: Sequence[Decl]) -> None:
        for d in decls:
            self.declare(d)

    def declare(self, d: Decl) -> None:
        if isinstance(d, CodataDecl):
            self._codata(d)
        else:
            self._def(d)

    # -- codata ----------------------------------------------------------------

    def _self_app(self, e: SExpr, name: str, params: Sequence[str]) -> None:
        head, args = spine_of(e)
        ok = isinstance(head, SName) and head.name == name and head.sup == 0 and len(args) == len(params)
        ok = ok and all(isinstance(a, SName) and a.name == p and a.sup == 0 for a, p in zip(args, params))
        if not ok:
            want = " ".join([name, *params])
            raise DttError("schema-violation", f"the destructor must take an argument of type {want}", e.span)

    @staticmethod
    def _pi_spine(e: SExpr) -> tuple[list[tuple[Optional[str], Optional[Modality], SExpr, Span]], SExpr]:
        doms = []
        while isinstance(e, (SPi, SArrow)):
            if isinstance(e, SArrow):
                doms.append((None, None, e.dom, e.dom.span))
            else:
                for b in e.binders:
                    for nm in b.names:
                        doms.append((nm, b.mu, b.ty, b.span))
            e = e.cod
        return doms, e

    def _codata(self, d: CodataDecl) -> None:
        sig, ch = self.sig, self.checker
        for nm in (d.name, d.head.name, d.tail.name):
            if nm in sig.names():
                raise DttError("duplicate-definition", f"{nm} is already defined", d.span)
        if not (isinstance(d.sort, SUniv) and d.sort.mode is Mode.SM):
            raise DttError("schema-violation", "a codata type must live in Type", d.sort.span)
        ctx = Context.empty()
        entries = []
        for b in d.params:
            for nm in b.names:
                mu = b.mu or ID_SM
                A = self.elab_type(ctx.lock(mu), b.ty)
                ctx = ctx.extend(mu, nm, A)
                entries.append((mu, nm, A))
        phi = Telescope(tuple(entries))
        pnames = list(phi.names)

        hdoms, hcod = self._pi_spine(d.head.ty)
        if not hdoms:
            raise DttError("schema-violation", "the head destructor needs the codata type as its argument", d.head.span)
        _, hmu, hdom, _ = hdoms[0]
        if hmu is not None and not hmu.is_identity:
            raise DttError("schema-violation", "the destructed argument cannot be modal", d.head.span)
        self._self_app(hdom, d.name, pnames)
        head_expr = hcod
        for nm, mu, dom, sp in reversed(hdoms[1:]):
            head_expr = SPi(sp, [Binder([nm], mu, dom, sp)], head_expr) if nm else SArrow(sp, dom, head_expr)

        tdoms, tcod = self._pi_spine(d.tail.ty)
        if not tdoms:
            raise DttError("schema-violation", "the tail destructor needs the codata type as its argument", d.tail.span)
        cname, cmu, cdom, _ = tdoms[0]
        if cmu is not None and not cmu.is_identity:
            raise DttError("schema-violation", "the destructed argument cannot be modal", d.tail.span)
        self._self_app(cdom, d.name, pnames)
        b_mods = tuple(mu or ID_SM for _, mu, _, _ in tdoms[1:])
        shape = DCoindShape(d.name, d.head.name, d.tail.name, phi.mods, b_mods)
        head_ty = self.elab_type(ctx, head_expr)
        cd = CodataDef(shape, phi, head_ty, Telescope(()), (), d.span)
        sig.add_codata(cd)
        try:
            self._codata_tail(d, cd, ctx, cname or "c", tdoms[1:], tcod)
            sig.invalidate(d.name)
            form_dcoind(sig, cd, ch)
        except DttError as exc:
            for nm in (d.name, d.head.name, d.tail.name):
                sig.codata.pop(nm, None)
                sig.destructors.pop(nm, None)
            sig.invalidate(d.name)
            raise exc.with_span(d.span)

    def _codata_tail(self, d, cd: CodataDef, ctx: Context, cname: str, bdoms, tcod) -> None:
        shape = cd.shape
        k = len(cd.phi)
        ctx = ctx.extend(ID_SM, cname, DCoind(shape, 0, tel_vars(k)))
        bentries = []
        for j, (nm, mu, dom, sp) in enumerate(bdoms):
            mu = mu or ID_SM
            A = self.elab_type(ctx.lock(mu), dom)
            nm = nm or ("y" if j == 0 else f"y{j}")
            ctx = ctx.extend(mu, nm, A)
            bentries.append((mu, nm, A))
        m = len(bentries)
        target = self.checker.whnf(self.elab_type(ctx, tcod))
        if not (isinstance(target, DCoind) and target.shape == shape and target.lvl == 1):
            raise DttError("schema-violation", f"the tail must return {d.name}^d applied to the new parameters and the argument", tcod.span)
        args = target.args
        nphi = len(args) - 1
        phi_part, point = args[:nphi], args[nphi]
        if point != Var(m):
            raise DttError("schema-violation", "the last argument of the tail type must be the destructed argument", tcod.span)
        if tuple(evens(phi_part, shape.phi)) != tel_vars(k, offset=m + 1):
            raise DttError("schema-violation", "the tail type must keep the original parameters", tcod.span)
        sigma_raw = odds(phi_part, shape.phi)

        def finish(t: Term, pos: int) -> Term:
            """Abstract c out of a term that sits in front of pos B-entries."""
            cvar = pos

            def go(u: Term, depth: int) -> Term:
                if isinstance(u, Head) and u.shape == shape and u.lvl == 0:
                    if tuple(u.args) == tel_vars(k, offset=cvar + depth + 1) + (Var(cvar + depth),):
                        return _SENTINEL
                return map_children(u, lambda c, kk: go(c, depth + kk))

            out = go(t, 0)
            if cvar in free_vars(out):
                raise DttError(
                    "schema-violation",
                    f"the tail may use {cname} only through its head {shape.head} {cname}",
                    d.tail.span,
                )

            def back(u: Term, depth: int) -> Term:
                if u == _SENTINEL:
                    return Var(cvar + depth)
                return map_children(u, lambda c, kk: back(c, depth + kk))

            return back(out, 0)

        b = Telescope(tuple((mu, nm, finish(A, j)) for j, (mu, nm, A) in enumerate(bentries)))
        sigma = tuple(finish(s, m) for s in sigma_raw)
        cd.b = b
        cd.sigma = sigma

    # -- definitions ----------------------------------------------------------------

    def _def(self, d: DefDecl) -> None:
        sig, ch = self.sig, self.checker
        if d.name in sig.names():
            raise DttError("duplicate-definition", f"{d.name} is already defined", d.span)
        ctx = Context.empty()
        try:
            ty = self.elab_type(ctx, d.ty)
            ch.check_type(ctx, ty)
        except DttError as exc:
            raise exc.with_span(d.ty.span)
        if not d.clauses:
            sig.add_const(ConstDef(d.name, ty, None, None, d.span))
            return
        heads = []
        for cl in d.clauses:
            h, _ = spine_of(cl.lhs)
            if not isinstance(h, SName):
                raise DttError("schema-violation", "a clause must start with a name", cl.lhs.span)
            heads.append(h)
        if any(h.name in sig.destructors for h in heads):
            self._corec(d, ty)
            return
        if len(d.clauses) != 1:
            raise DttError("schema-violation", f"{d.name} is not corecursive and needs exactly one clause", d.clauses[1].span)
        cl = d.clauses[0]
        h, params = spine_of(cl.lhs)
        if h.name != d.name or h.sup:
            raise DttError("schema-violation", f"the clause must define {d.name}", h.span)
        names = []
        for p in params:
            if not isinstance(p, SName) or p.sup:
                raise DttError("schema-violation", "the arguments of a defining clause must be variables", p.span)
            names.append(p.name)
        rhs = SLam(cl.rhs.span, names, cl.rhs) if names else cl.rhs
        try:
            body = self.check(ctx, rhs, ty)
            ch.check(ctx, body, ty)
        except DttError as exc:
            raise exc.with_span(cl.span)
        sig.add_const(ConstDef(d.name, ty, body, None, d.span))

    def _corec(self, d: DefDecl, ty: Term) -> None:
        sig, ch = self.sig, self.checker
        ups_entries = []
        T = ch.whnf(ty)
        while isinstance(T, Pi):
            ups_entries.append((T.mu, T.name, T.dom))
            T = ch.whnf(T.cod)
        if not isinstance(T, DCoind) or T.lvl != 0:
            raise DttError("schema-violation", "a corecursive definition must return a codata type", d.ty.span)
        shape, zeta = T.shape, T.args
        cd = sig.codata_of(shape)
        ups = Telescope(tuple(ups_entries))
        n_ups = len(ups)
        head_cl = tail_cl = None
        for cl in d.clauses:
            h, _ = spine_of(cl.lhs)
            if h.name == shape.head and head_cl is None:
                head_cl = cl
            elif h.name == shape.tail and tail_cl is None:
                tail_cl = cl
            else:
                raise DttError("schema-violation", f"unexpected clause for {h.name}; expected {shape.head} and {shape.tail}", cl.span)
        if head_cl is None or tail_cl is None:
            missing = shape.head if head_cl is None else shape.tail
            raise DttError("schema-violation", f"{d.name} is missing its {missing} clause", d.span)

        def copattern(cl: Clause) -> tuple[list[str], list[SExpr]]:
            h, args = spine_of(cl.lhs)
            if h.sup or not args:
                raise DttError("schema-violation", "a copattern applies a destructor to a call of the definition", cl.lhs.span)
            inner_h, inner_args = spine_of(args[0])
            ok = isinstance(inner_h, SName) and inner_h.name == d.name and inner_h.sup == 0 and len(inner_args) == n_ups
            if not ok:
                raise DttError("schema-violation", f"expected {h.name} ({d.name} with {n_ups} variables) ...", args[0].span)
            vs = []
            for a in inner_args + args[1:]:
                if not isinstance(a, SName) or a.sup or a.name in sig.names():
                    raise DttError("schema-violation", "copattern arguments must be fresh variables", a.span)
                vs.append(a.name)
            if len(set(vs)) != len(vs):
                raise DttError("schema-violation", "copattern variables must be distinct", cl.lhs.span)
            return vs[:n_ups], args[1:]

        hvars, hextra = copattern(head_cl)
        tvars, textra = copattern(tail_cl)
        ups_named = Telescope(tuple((mu, nm, A) for (mu, _, A), nm in zip(ups.entries, hvars)))
        ctx_u = Context.empty().extend_tel(ups_named)
        head_ty = apply_psub(cd.head_ty, zeta)
        rhs = head_cl.rhs
        if hextra:
            rhs = SLam(rhs.span, [x.name for x in hextra], rhs)
        try:
            h = self.check(ctx_u, rhs, head_ty)
        except DttError as exc:
            raise exc.with_span(head_cl.span)

        btel = b_tel_at(cd, zeta, h)
        if len(textra) != len(btel):
            raise DttError("schema-violation", f"the {shape.tail} clause binds {len(btel)} tail arguments, found {len(textra)}", tail_cl.lhs.span)
        ups_t = Telescope(tuple((mu, nm, A) for (mu, _, A), nm in zip(ups.entries, tvars)))
        btel_named = Telescope(tuple((mu, x.name, A) for (mu, _, A), x in zip(btel.entries, textra)))
        ctx_y = Context.empty().extend_tel(ups_t).extend_tel(btel_named)
        rh, rargs = spine_of(tail_cl.rhs)
        want = len(decal_mods_n(ups.mods, 1))
        if not (isinstance(rh, SName) and rh.name == d.name and rh.sup == 1 and len(rargs) == want):
            raise DttError(
                "schema-violation",
                f"the {shape.tail} clause must return {d.name}^d applied to {want} arguments",
                tail_cl.rhs.span,
            )
        ev = evens(rargs, ups.mods)
        bound = [x.name for x in textra]
        for e, nm in zip(ev, tvars):
            if not (isinstance(e, SName) and e.name == nm and e.sup == 0 and nm not in bound):
                raise DttError(
                    "schema-violation",
                    f"the self call must pass the copattern variables unchanged; expected {nm}",
                    e.span,
                )
        m = len(btel)
        target = display_tel(ups, tel_vars(n_ups, offset=m))
        taus: list[Term] = []
        for (mu, _, A), e in zip(target.entries, odds(rargs, ups.mods)):
            try:
                taus.append(self.check(ctx_y.lock(mu), e, apply_psub(A, taus)))
            except DttError as exc:
                raise exc.with_span(e.span)
        cr = CorecDef(CorecShape(d.name, shape, ups.mods), ups_named, tuple(zeta), h, tuple(taus), d.span)
        try:
            check_corec(sig, cr, ch)
        except DttError as exc:
            raise exc.with_span(d.span)
        sig.add_corec(cr, ty)

    # -- expressions ----------------------------------------------------------------

    def _fresh_meta(self) -> Meta:
        self._metas += 1
        return Meta(self._metas)

    def _resolve(self, ctx: Context, e: SName) -> tuple[str, object]:
        names = ctx.names()
        if e.name in names:
            return "var", names.index(e.name)
        if e.name in self.sig.consts:
            return "const", e.name
        if e.name in self.sig.destructors:
            codata, role = self.sig.destructors[e.name]
            return role, self.sig.codata[codata].shape
        if e.name in self.sig.codata:
            return "codata", self.sig.codata[e.name].shape
        raise DttError("unbound-name", f"unknown name {e.name}", e.span)

    def _is_type_like(self, ctx: Context, e: SExpr) -> bool:
        if isinstance(e, (SUniv, SPi, SArrow)):
            return True
        if isinstance(e, SOp):
            if e.op == "El":
                return True
            if e.op in _FORMER:
                return self._is_type_like(ctx, e.arg)
            return False
        h, _ = spine_of(e)
        if isinstance(h, SName):
            try:
                kind, _ = self._resolve(ctx, h)
            except DttError:
                return False
            return kind == "codata"
        return False

    def _mismatch(self, ctx: Context, expected: Term, got: Term, span: Span) -> DttError:
        names = ctx.names()
        ch = self.checker
        return DttError(
            "type-mismatch",
            f"expected a term of type {show(ch.normalize(ctx, expected), names)}, "
            f"but this has type {show(ch.normalize(ctx, got), names)}",
            span,
        )

    def elab_type(self, ctx: Context, e: SExpr) -> Term:
        try:
            return self._elab_type(ctx, e)
        except DttError as exc:
            raise exc.with_span(e.span)

    def _elab_type(self, ctx: Context, e: SExpr) -> Term:
        if isinstance(e, SUniv):
            if ctx.mode is not e.mode:
                word = "Type" if e.mode is Mode.SM else "Disc"
                raise DttError("mode-mismatch", f"{word} is not a type at mode {ctx.mode}", e.span)
            return Univ(e.mode)
        if isinstance(e, SPi):
            return self._pi(ctx, [(nm, b.mu, b.ty) for b in e.binders for nm in b.names], e.cod)
        if isinstance(e, SArrow):
            return self._pi(ctx, [("_", None, e.dom)], e.cod)
        if isinstance(e, SOp) and e.op in _FORMER:
            if ctx.mode is not _FORMER_MODE[e.op]:
                raise DttError("mode-mismatch", f"this modal type lives at mode {_FORMER_MODE[e.op]}", e.span)
            return _FORMER[e.op](self.elab_type(ctx.lock(_LOCK[e.op]), e.arg))
        if isinstance(e, SOp) and e.op == "El":
            return El(self.check(ctx, e.arg, Univ(ctx.mode)))
        h, args = spine_of(e)
        if isinstance(h, SName) and h.name not in ctx.names() and h.name in self.sig.codata:
            shape = self.sig.codata[h.name].shape
            term, _ = self._coind(ctx, "dcoind", shape, h.sup, args, e.span)
            return term
        t, ty = self.infer(ctx, e)
        if not isinstance(self.checker.whnf(ty), Univ):
            raise DttError("universe-expected", f"expected a type, found a term of type {show(ty, ctx.names())}", e.span)
        return El(t)

    def _pi(self, ctx: Context, doms, cod: SExpr) -> Term:
        built = []
        for nm, mu, dom in doms:
            mu = mu or identity(ctx.mode)
            if mu.cod is not ctx.mode:
                raise DttError("mode-mismatch", f"a {mu.symbol()}-modal binder needs a context at mode {mu.cod}", dom.span)
            A = self.elab_type(ctx.lock(mu), dom)
            built.append((mu, nm, A))
            ctx = ctx.extend(mu, nm, A)
        out = self.elab_type(ctx, cod)
        for mu, nm, A in reversed(built):
            out = Pi(mu, A, out, "x" if nm == "_" else nm)
        return out

    def check(self, ctx: Context, e: SExpr, ty: Term) -> Term:
        try:
            return self._check(ctx, e, ty)
        except DttError as exc:
            raise exc.with_span(e.span)

    def _check(self, ctx: Context, e: SExpr, ty: Term) -> Term:
        ch = self.checker
        if isinstance(e, SLam):
            want = ch.whnf(ty)
            if not isinstance(want, Pi):
                raise DttError("type-mismatch", f"a λ needs a Π-type, expected {show(ty, ctx.names())}", e.span)
            rest = SLam(e.span, e.names[1:], e.body) if len(e.names) > 1 else e.body
            body = self.check(ctx.extend(want.mu, e.names[0], want.dom), rest, want.cod)
            return Lam(want.mu, body, e.names[0])
        want = ch.whnf(ty)
        if isinstance(want, Univ) and self._is_type_like(ctx, e):
            return Code(self.elab_type(ctx, e))
        if isinstance(e, SOp) and e.op in _INTRO and isinstance(want, _FORMER[e.op]):
            if ctx.mode is not _FORMER_MODE[e.op]:
                raise DttError("mode-mismatch", f"this introduction lives at mode {_FORMER_MODE[e.op]}", e.span)
            return _INTRO[e.op](self.check(ctx.lock(_LOCK[e.op]), e.arg, want.ty))
        t, got = self.infer(ctx, e)
        if not ch.convert(ctx, got, ty):
            raise self._mismatch(ctx, ty, got, e.span)
        return t

    def infer(self, ctx: Context, e: SExpr) -> tuple[Term, Term]:
        try:
            return self._infer(ctx, e)
        except DttError as exc:
            raise exc.with_span(e.span)

    def _infer(self, ctx: Context, e: SExpr) -> tuple[Term, Term]:
        ch = self.checker
        if self._is_type_like(ctx, e):
            return Code(self.elab_type(ctx, e)), Univ(ctx.mode)
        if isinstance(e, SLam):
            raise DttError("annotation-required", "cannot infer the type of a λ; give the definition a type", e.span)
        if isinstance(e, SOp):
            if e.op == "Code":
                return Code(self.elab_type(ctx, e.arg)), Univ(ctx.mode)
            if e.op in _INTRO:
                if ctx.mode is not _FORMER_MODE[e.op]:
                    raise DttError("mode-mismatch", f"this introduction lives at mode {_FORMER_MODE[e.op]}", e.span)
                t, A = self.infer(ctx.lock(_LOCK[e.op]), e.arg)
                return _INTRO[e.op](t), _FORMER[e.op](A)
            lock, former, node = _ELIM[e.op]
            mode = Mode.DM if e.op == "untri" else Mode.SM
            if ctx.mode is not mode:
                raise DttError("mode-mismatch", f"this eliminator lives at mode {mode}", e.span)
            if e.op == "undia" and not is_flat(ctx):
                raise DttError("not-flat", "◆ needs a flat context: its last lock must be ◇ or △◇", e.span)
            t, A = self.infer(ctx.lock(lock), e.arg)
            got = ch.whnf(A)
            if not isinstance(got, former):
                sym = {BoxForm: "□", TriForm: "△", DiaForm: "◇"}[former]
                raise DttError("type-mismatch", f"expected a term of a {sym}-type, found {show(A, ctx.names())}", e.arg.span)
            return node(None, t), got.ty
        if isinstance(e, SSup):
            t, A = self.infer(ctx.lock(Modality.TRIBOX), e.expr)
            for _ in range(e.n):
                t, A = disp(t, Env()), disp_ty(A, Env(), t)
            return t, A
        h, args = spine_of(e)
        if isinstance(h, SName):
            kind, what = self._resolve(ctx, h)
            if kind == "var":
                t: Term = Var(what, h.sup)
                ty = ch.var_type(ctx, what, h.sup)
            elif kind == "const":
                t = Const(what, h.sup)
                ty = self.sig.const_type(what, h.sup)
            elif kind in ("head", "tail"):
                t, ty, args = self._destructor(ctx, kind, what, h, args, e.span)
            else:
                raise DttError("internal", "codata heads are handled as types")
        else:
            t, ty = self.infer(ctx, h)
        return self._apply_args(ctx, t, ty, args)

    def _apply_args(self, ctx: Context, t: Term, ty: Term, args: Sequence[SExpr]) -> tuple[Term, Term]:
        for a in args:
            fty = self.checker.whnf(ty)
            if not isinstance(fty, Pi):
                raise DttError("not-a-function", f"{show(t, ctx.names())} is not a function", a.span)
            arg = self.check(ctx.lock(fty.mu), a, fty.dom)
            t = App(fty.mu, t, arg)
            ty = subst1(fty.cod, arg)
        return t, ty

    def _destructor(self, ctx, kind, shape, h: SName, args, span):
        n = h.sup
        mask = _visible_mask(kind, self.sig, shape, n)
        need = sum(mask)
        if len(args) < need:
            raise DttError("arity-mismatch", f"{h.name}{'^' + 'd' * n if n else ''} needs {need} explicit arguments, got {len(args)}", span)
        t, ty = self._coind(ctx, kind, shape, n, args[:need], span)
        return t, ty, args[need:]

    def _coind(self, ctx: Context, kind: str, shape: DCoindShape, n: int, args: Sequence[SExpr], span: Span):
        """Build a codata type, head or tail node, reconstructing hidden arguments."""
        sig, ch = self.sig, self.checker
        if ctx.mode is not Mode.SM:
            raise DttError("mode-mismatch", "codata lives at mode sm", span)
        if kind == "dcoind":
            tel, res = sig.dcoind_level(shape, n), None
        elif kind == "head":
            tel, res = sig.head_level(shape, n)
        else:
            tel, res = sig.tail_level(shape, n)
        mask = _visible_mask(kind, sig, shape, n)
        if len(args) != sum(mask):
            name = {"dcoind": shape.name, "head": shape.head, "tail": shape.tail}[kind]
            raise DttError("arity-mismatch", f"{name} at level {n} takes {sum(mask)} explicit arguments, got {len(args)}", span)
        sol: dict[int, Term] = {}
        out: list[Term] = []
        metas: list[Meta] = []
        supplied = iter(args)
        for j, ((mu, _, A), visible) in enumerate(zip(tel.entries, mask)):
            expected = ch.zonk(apply_psub(A, out), sol)
            if not visible:
                mv = self._fresh_meta()
                metas.append(mv)
                out.append(mv)
                continue
            e = next(supplied)
            lctx = ctx.lock(mu)
            if not has_meta(expected):
                out.append(self.check(lctx, e, expected))
                continue
            a, got = self.infer(lctx, e)
            if not ch.unify(expected, got, sol):
                raise self._mismatch(lctx, ch.zonk(expected, sol), got, e.span).with_span(e.span)
            out.append(a)
            out = [ch.zonk(x, sol) for x in out]
        unsolved = [mv for mv in metas if mv.k not in sol]
        if unsolved:
            raise DttError("annotation-required", "cannot reconstruct the hidden arguments here", span)
        final = tuple(ch.zonk(x, sol) for x in out)
        if kind == "dcoind":
            return DCoind(shape, n, final), Univ(Mode.SM)
        node = Head(shape, n, final) if kind == "head" else Tail(shape, n, final)
        return node, apply_psub(res, final)

    # -- convenience -----------------------------------------------------------------

    def context(self, binders: Sequence[Binder], ctx: Optional[Context] = None) -> Context:
        ctx = ctx or Context.empty()
        for b in binders:
            for nm in b.names:
                mu = b.mu or identity(ctx.mode)
                ctx = ctx.extend(mu, nm, self.elab_type(ctx.lock(mu), b.ty))
        return ctx


@dataclass
class Module:
    """The result of loading a source file."""

    path: str
    text: str
    decls: list[Decl]
    elaborator: Elaborator

    @property
    def sig(self) -> Signature:
        return self.elaborator.sig

    @property
    def checker(self) -> Checker:
        return self.elaborator.checker

    def context(self, text: str) -> Context:
        return self.elaborator.context(parse_binders(text)) if text.strip() else Context.empty()

    def term(self, text: str, ctx: Optional[Context] = None) -> tuple[Term, Term]:
        ctx = ctx or Context.empty()
        return self.elaborator.infer(ctx, parse_expr(text))

    def type(self, text: str, ctx: Optional[Context] = None) -> Term:
        ctx = ctx or Context.empty()
        ty = self.elaborator.elab_type(ctx, parse_expr(text))
        self.checker.check_type(ctx, ty)
        return ty


def load(text: str, path: str = "<input>", fuel: Optional[int] = None) -> Module:
    """Parse and check a whole file; raises the first error."""
    from .checker import DEFAULT_FUEL

    src = Source(text, path)
    decls = parse_source(src)
    el = Elaborator(Signature(), Checker(fuel=fuel or DEFAULT_FUEL))
    el.checker.sig = el.sig
    el.declare_all(decls)
    return Module(path, text, decls, el)


def load_file(path: str, fuel: Optional[int] = None) -> Module:
    with open(path, encoding="utf-8") as fh:
        return load(fh.read(), path, fuel)
