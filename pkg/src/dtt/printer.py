"""Pretty printing of terms, telescopes and contexts.

Printing is Russell style by default: ``El`` and ``Code`` are left implicit,
matching how the surface language inserts them.  Iterated destructors hide
the boundary arguments the elaborator can reconstruct: the parameter block
and all but the top entry of the coinductive block.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .mode_theory import Modality
from .syntax import (
    App,
    BlackDiamond,
    BlackSquare,
    BlackTriangle,
    BoxForm,
    BoxIntro,
    CLock,
    Code,
    Const,
    Context,
    Corec,
    CVar,
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
    decal_mods_n,
    free_vars,
)
from .mode_theory import Mode

_ASCII_NAMES = str.maketrans({"ʒ": "z", "β": "b", "𝔣": "f", "′": "'", "υ": "u", "δ": "e"})

_PREFIX = {
    True: {TriForm: "△", DiaForm: "◇", BoxForm: "□", TriIntro: "△", DiaIntro: "◇", BoxIntro: "□",
           BlackSquare: "■", BlackTriangle: "▲", BlackDiamond: "◆"},
    False: {TriForm: "Tri", DiaForm: "Dia", BoxForm: "Box", TriIntro: "Tri", DiaIntro: "Dia", BoxIntro: "Box",
            BlackSquare: "unbox", BlackTriangle: "untri", BlackDiamond: "undia"},
}

TOP, ARROW, APP, ATOM = 0, 1, 2, 3


@dataclass(frozen=True)
class Style:
    unicode: bool = True
    coercions: bool = False

    def sup(self, n: int) -> str:
        if n == 0:
            return ""
        return "ᵈ" * n if self.unicode else "^" + "d" * n

    def name(self, raw: str) -> str:
        return raw if self.unicode else raw.translate(_ASCII_NAMES)

    def arrow(self) -> str:
        return "→" if self.unicode else "->"

    def lam(self) -> str:
        return "λ" if self.unicode else "\\"

    def mod(self, mu: Modality) -> str:
        return mu.symbol(self.unicode)


def visible_args(t: Term) -> tuple[Term, ...]:
    """The arguments the printer shows for a coinductive node."""
    if isinstance(t, (Head, Tail)):
        phi = len(decal_mods_n(t.shape.phi, t.lvl))
        c = 2 ** t.lvl
        top = t.args[phi + c - 1: phi + c]
        return top + (t.args[phi + c:] if isinstance(t, Tail) else ())
    if isinstance(t, DCoind):
        out = []
        pos = 0
        for mu in t.shape.phi:
            size = 2 ** t.lvl if mu.is_identity else 1
            out.append(t.args[pos + size - 1])
            pos += size
        return tuple(out) + t.args[pos:]
    if isinstance(t, Corec):
        return t.args
    return ()


class Printer:
    def __init__(self, style: Style = Style()):
        self.st = style

    # -- names ----------------------------------------------------------------

    def _fresh(self, hint: str, names: Sequence[str], body: Optional[Term]) -> str:
        base = hint or "x"
        if body is None:
            return base
        used = free_vars(body)
        clash = lambda n: any(nm == n and (j + 1) in used for j, nm in enumerate(names))
        candidate, k = base, 0
        while clash(candidate):
            k += 1
            candidate = f"{base}{k}"
        return candidate

    def _var(self, v: Var, names: Sequence[str]) -> str:
        if 0 <= v.idx < len(names):
            base = self.st.name(names[v.idx])
        else:
            base = f"#{v.idx}"
        return base + self.st.sup(v.lvl)

    # -- terms ----------------------------------------------------------------

    def show(self, t: Term, names: Sequence[str] = (), prec: int = TOP) -> str:
        st = self.st
        if isinstance(t, Var):
            return self._var(t, names)
        if isinstance(t, Univ):
            return "Type" if t.mode is Mode.SM else "Disc"
        if isinstance(t, El):
            if st.coercions:
                return self._paren(f"El {self.show(t.code, names, ATOM)}", prec, APP)
            return self.show(t.code, names, prec)
        if isinstance(t, Code):
            if st.coercions:
                return self._paren(f"Code {self.show(t.ty, names, ATOM)}", prec, APP)
            return self.show(t.ty, names, prec)
        if isinstance(t, Meta):
            return f"?{t.k}"
        if isinstance(t, Const):
            return st.name(t.name) + st.sup(t.lvl)
        if isinstance(t, Pi):
            return self._paren(self._pi(t, names), prec, ARROW)
        if isinstance(t, Lam):
            return self._paren(self._lam(t, names), prec, ARROW)
        if isinstance(t, App):
            return self._app(t, names, prec)
        if isinstance(t, (DCoind, Head, Tail, Corec)):
            if isinstance(t, Head):
                head = t.shape.head
            elif isinstance(t, Tail):
                head = t.shape.tail
            else:
                head = t.shape.name
            text = st.name(head) + st.sup(t.lvl)
            args = visible_args(t)
            if not args:
                return text
            text += " " + " ".join(self.show(a, names, ATOM) for a in args)
            return self._paren(text, prec, APP)
        if type(t) in _PREFIX[True]:
            sym = _PREFIX[st.unicode][type(t)]
            inner = t.ty if isinstance(t, (TriForm, DiaForm, BoxForm)) else t.tm
            return self._paren(f"{sym} {self.show(inner, names, ATOM)}", prec, APP)
        if isinstance(t, (DispTerm, DispType)):
            inner_names = [f"υ{j}" for j in range(len(t.mods))][::-1] + list(names)
            body = self.show(t.body, inner_names, ATOM)
            args = " ".join(self.show(a, names, ATOM) for a in t.args)
            text = f"{body}{st.sup(1)}"
            if t.mods:
                text += f" ⦅{args}⦆" if st.unicode else f" [{args}]"
            if isinstance(t, DispType):
                text += " " + self.show(t.point, names, ATOM)
            return self._paren(text, prec, APP)
        if isinstance(t, ExplicitSub):
            from .subst import apply

            return self.show(apply(t.body, t.images, t.shift), names, prec)
        return f"<{type(t).__name__}>"

    @staticmethod
    def _paren(text: str, prec: int, level: int) -> str:
        return f"({text})" if prec > level else text

    def _app(self, t: Term, names: Sequence[str], prec: int) -> str:
        args = []
        while isinstance(t, App):
            args.append(t.arg)
            t = t.fn
        head = self.show(t, names, APP)
        text = head + " " + " ".join(self.show(a, names, ATOM) for a in reversed(args))
        return self._paren(text, prec, APP)

    def _binder(self, mu: Modality, name: str, dom: str) -> str:
        if mu.is_identity:
            return f"({name} : {dom})"
        return f"({name} :^{self.st.mod(mu)} {dom})"

    def _pi(self, t: Pi, names: Sequence[str]) -> str:
        segments: list[tuple[bool, str]] = []
        names = list(names)
        while isinstance(t, Pi):
            if 0 in free_vars(t.cod) or not t.mu.is_identity:
                nm = self._fresh(t.name, names, t.cod)
                segments.append((True, self._binder(t.mu, self.st.name(nm), self.show(t.dom, names, TOP))))
            else:
                nm = t.name
                segments.append((False, self.show(t.dom, names, APP)))
            names = [nm] + names
            t = t.cod
        out = []
        for i, (is_binder, text) in enumerate(segments):
            out.append(text)
            chained = is_binder and i + 1 < len(segments) and segments[i + 1][0]
            out.append(" " if chained else f" {self.st.arrow()} ")
        return "".join(out) + self.show(t, names, ARROW)

    def _lam(self, t: Lam, names: Sequence[str]) -> str:
        binders: list[str] = []
        names = list(names)
        while isinstance(t, Lam):
            nm = self._fresh(t.name, names, t.body)
            binders.append(self.st.name(nm))
            names = [nm] + names
            t = t.body
        return f"{self.st.lam()} {' '.join(binders)} {self.st.arrow()} {self.show(t, names, TOP)}"

    # -- telescopes and contexts -------------------------------------------------

    def telescope(self, tel: Telescope, names: Sequence[str] = ()) -> list[str]:
        out = []
        names = list(names)
        for mu, name, ty in tel.entries:
            sep = " : " if mu.is_identity else f" :^{self.st.mod(mu)} "
            out.append(self.st.name(name) + sep + self.show(ty, names))
            names = [name] + names
        return out

    def context(self, ctx: Context) -> str:
        parts = []
        names: list[str] = []
        for e in ctx.entries:
            if isinstance(e, CLock):
                parts.append(f"🔒{self.st.mod(e.mu)}" if self.st.unicode else f"Lock[{self.st.mod(e.mu)}]")
            else:
                assert isinstance(e, CVar)
                sep = " : " if e.mu.is_identity else f" :^{self.st.mod(e.mu)} "
                parts.append(self.st.name(e.name) + sep + self.show(e.ty, names))
                names = [e.name] + names
        return ", ".join(parts) if parts else "⟨⟩"


def show(t: Term, names: Sequence[str] = (), unicode: bool = True, coercions: bool = False) -> str:
    return Printer(Style(unicode, coercions)).show(t, list(names))


_ASCII_SYMBOLS = [
    ("→", "->"), ("λ", "\\"), ("⦅", "["), ("⦆", "]"), ("⟨⟩", "<>"),
    ("△□", "TB"), ("△◇", "TD"), ("△", "T"), ("◇", "D"), ("□", "B"),
    ("■", "unbox"), ("▲", "untri"), ("◆", "undia"), ("🔒", "Lock "),
]


def ascii_text(text: str) -> str:
    """Transliterate already printed text, such as a diagnostic message."""
    out = []
    run = 0
    for ch in text:
        if ch == "ᵈ":
            run += 1
            continue
        if run:
            out.append("^" + "d" * run)
            run = 0
        out.append(ch)
    if run:
        out.append("^" + "d" * run)
    text = "".join(out)
    for a, b in _ASCII_SYMBOLS:
        text = text.replace(a, b)
    return text.translate(_ASCII_NAMES)
