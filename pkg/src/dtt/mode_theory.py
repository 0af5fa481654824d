"""The fixed mode 2-category: two modes, seven modalities, posetal 2-cells.

Composition and the order relation are stored as total lookup tables built
once at import time from the generating equations below, so every query is a
dictionary lookup and the laws can be checked exhaustively.
"""
from __future__ import annotations

import enum
from itertools import product
from typing import Optional

from .errors import DttError


class Mode(enum.Enum):
    DM = "dm"
    SM = "sm"

    def __str__(self) -> str:
        return self.value


class Modality(enum.Enum):
    """A 1-cell of the mode theory; the value is (tag, dom, cod)."""

    ID_DM = ("Id_dm", Mode.DM, Mode.DM)
    ID_SM = ("Id_sm", Mode.SM, Mode.SM)
    TRI = ("Tri", Mode.DM, Mode.SM)
    DIA = ("Dia", Mode.SM, Mode.DM)
    BOX = ("Box", Mode.SM, Mode.DM)
    TRIDIA = ("TriDia", Mode.SM, Mode.SM)
    TRIBOX = ("TriBox", Mode.SM, Mode.SM)

    @property
    def tag(self) -> str:
        return self.value[0]

    @property
    def dom(self) -> Mode:
        return self.value[1]

    @property
    def cod(self) -> Mode:
        return self.value[2]

    @property
    def is_identity(self) -> bool:
        return self in (Modality.ID_DM, Modality.ID_SM)

    def symbol(self, unicode: bool = True) -> str:
        return (UNICODE_SYMBOLS if unicode else ASCII_SYMBOLS)[self]

    def __str__(self) -> str:
        return self.symbol()

    def __repr__(self) -> str:
        return f"Modality.{self.name}"


ALL_MODALITIES = tuple(Modality)

UNICODE_SYMBOLS = {
    Modality.ID_DM: "1",
    Modality.ID_SM: "1",
    Modality.TRI: "△",
    Modality.DIA: "◇",
    Modality.BOX: "□",
    Modality.TRIDIA: "△◇",
    Modality.TRIBOX: "△□",
}

ASCII_SYMBOLS = {
    Modality.ID_DM: "1",
    Modality.ID_SM: "1",
    Modality.TRI: "T",
    Modality.DIA: "D",
    Modality.BOX: "B",
    Modality.TRIDIA: "TD",
    Modality.TRIBOX: "TB",
}


def identity(mode: Mode) -> Modality:
    return Modality.ID_DM if mode is Mode.DM else Modality.ID_SM


def _generate_composition() -> dict[tuple[Modality, Modality], Modality]:
    M = Modality
    table: dict[tuple[Modality, Modality], Modality] = {}
    # Rows: nu in {Dia, Box, TriDia, TriBox}; columns: rho in {Tri, TriDia, TriBox}.
    first = {
        M.DIA: (M.ID_DM, M.DIA, M.BOX),
        M.BOX: (M.ID_DM, M.DIA, M.BOX),
        M.TRIDIA: (M.TRI, M.TRIDIA, M.TRIBOX),
        M.TRIBOX: (M.TRI, M.TRIDIA, M.TRIBOX),
    }
    for nu, row in first.items():
        for rho, result in zip((M.TRI, M.TRIDIA, M.TRIBOX), row):
            table[(nu, rho)] = result
    table[(M.TRI, M.DIA)] = M.TRIDIA
    table[(M.TRI, M.BOX)] = M.TRIBOX
    for mu in ALL_MODALITIES:
        table[(identity(mu.cod), mu)] = mu
        table[(mu, identity(mu.dom))] = mu
    return table


def _generate_order() -> frozenset[tuple[Modality, Modality]]:
    M = Modality
    pairs = {(mu, mu) for mu in ALL_MODALITIES}
    pairs |= {(M.BOX, M.DIA), (M.TRIBOX, M.ID_SM), (M.ID_SM, M.TRIDIA)}
    # transitive closure
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in product(list(pairs), repeat=2):
            if b == c and (a, d) not in pairs:
                pairs.add((a, d))
                changed = True
    return frozenset(pairs)


COMPOSITION = _generate_composition()
ORDER = _generate_order()

_RIGHT_ADJOINT = {
    Modality.DIA: Modality.TRI,
    Modality.TRI: Modality.BOX,
    Modality.TRIDIA: Modality.TRIBOX,
    Modality.ID_DM: Modality.ID_DM,
    Modality.ID_SM: Modality.ID_SM,
}
_LEFT_ADJOINT = {right: left for left, right in _RIGHT_ADJOINT.items()}


def composable(nu: Modality, rho: Modality) -> bool:
    return nu.dom == rho.cod


def compose(nu: Modality, rho: Modality) -> Modality:
    """Return nu ∘ rho (rho first)."""
    if nu.dom != rho.cod:
        raise DttError(
            "mode-mismatch",
            f"cannot compose {nu.tag}∘{rho.tag}: dom({nu.tag})={nu.dom} but cod({rho.tag})={rho.cod}",
        )
    return COMPOSITION[(nu, rho)]


def compose_all(mods, mode: Mode) -> Modality:
    """Left-to-right composite mu1 ∘ mu2 ∘ ... defaulting to the identity at `mode`."""
    acc = identity(mode)
    for mu in reversed(list(mods)):
        acc = compose(mu, acc)
    return acc


def parallel(mu: Modality, nu: Modality) -> bool:
    return mu.dom == nu.dom and mu.cod == nu.cod


def leq(mu: Modality, nu: Modality) -> bool:
    if not parallel(mu, nu):
        raise DttError("mode-mismatch", f"{mu.tag} and {nu.tag} are not parallel")
    return (mu, nu) in ORDER


def is_hazardous(mu: Modality) -> bool:
    return mu in (Modality.DIA, Modality.TRIDIA)


def right_adjoint(mu: Modality) -> Optional[Modality]:
    """The right adjoint from the adjunctions ◇ ⊣ △ ⊣ □, △◇ ⊣ △□ and 1 ⊣ 1.

    □ and △□ have no right adjoint in the listed adjunctions, so they map to None.
    """
    return _RIGHT_ADJOINT.get(mu)


def left_adjoint(mu: Modality) -> Optional[Modality]:
    """The left adjoint; it exists exactly for the safe modalities."""
    return _LEFT_ADJOINT.get(mu)


def is_tri_prefixed(mu: Modality) -> bool:
    """True when mu factors as △∘ν for some ν (these are the modal sm binders)."""
    return mu.cod is Mode.SM and mu.dom is Mode.SM and not mu.is_identity or mu is Modality.TRI


def strip_tri(mu: Modality) -> Modality:
    """Return ν with mu = △∘ν."""
    for nu in (Modality.ID_DM, Modality.DIA, Modality.BOX):
        if COMPOSITION.get((Modality.TRI, nu)) == mu:
            return nu
    raise DttError("mode-mismatch", f"{mu.tag} does not factor through △")


def parse_modality(text: str) -> Modality:
    table = {
        "T": Modality.TRI, "△": Modality.TRI,
        "D": Modality.DIA, "◇": Modality.DIA,
        "B": Modality.BOX, "□": Modality.BOX,
        "TD": Modality.TRIDIA, "△◇": Modality.TRIDIA,
        "TB": Modality.TRIBOX, "△□": Modality.TRIBOX,
    }
    if text not in table:
        raise DttError("parse-error", f"unknown modality '{text}'")
    return table[text]
