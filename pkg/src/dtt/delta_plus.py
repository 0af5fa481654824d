"""The augmented semi-simplex category as finite 0/1 sequences.

A sequence of length n+1 with m+1 ones is a strictly increasing map
⟨m⟩ → ⟨n⟩; it picks out which vertices of the target are hit.  This module is
deliberately independent of the display engine so it can serve as an oracle
for the simplex types built there.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

from .errors import DttError

_DIGIT_ALIASES = {"0": 0, "1": 1, "𝟘": 0, "𝟙": 1}


@dataclass(frozen=True, order=True)
class BinarySeq:
    digits: tuple[int, ...]

    def __post_init__(self):
        if any(d not in (0, 1) for d in self.digits):
            raise ValueError(f"not a binary sequence: {self.digits!r}")

    @classmethod
    def parse(cls, text: str) -> "BinarySeq":
        if text in ("", "∅", "-"):
            return cls(())
        try:
            return cls(tuple(_DIGIT_ALIASES[c] for c in text))
        except KeyError as exc:
            raise DttError("parse-error", f"bad digit {exc.args[0]!r} in binary sequence {text!r}") from None

    @classmethod
    def from_number(cls, value: int, width: int) -> "BinarySeq":
        if value < 0 or value >= 2 ** width:
            raise ValueError(f"{value} does not fit in {width} bits")
        return cls(tuple((value >> (width - 1 - i)) & 1 for i in range(width)))

    @property
    def target(self) -> int:
        """n, for a map into ⟨n⟩."""
        return len(self.digits) - 1

    @property
    def source(self) -> int:
        """m, for a map out of ⟨m⟩."""
        return sum(self.digits) - 1

    @property
    def value(self) -> int:
        out = 0
        for d in self.digits:
            out = 2 * out + d
        return out

    def __len__(self) -> int:
        return len(self.digits)

    def __str__(self) -> str:
        return "".join(map(str, self.digits)) or "∅"

    def pretty(self) -> str:
        return "".join("𝟙" if d else "𝟘" for d in self.digits) or "∅"


def compose(b1: BinarySeq, b0: BinarySeq) -> BinarySeq:
    """b1 ∘ b0: replace the ones of b1, in order, by the digits of b0."""
    if b1.source != b0.target:
        raise DttError(
            "arity-mismatch",
            f"cannot compose {b1} ∘ {b0}: {b1} has {sum(b1.digits)} ones but {b0} has length {len(b0)}",
        )
    feed = iter(b0.digits)
    return BinarySeq(tuple(next(feed) if d else 0 for d in b1.digits))


def identity(n: int) -> BinarySeq:
    if n < -1:
        raise ValueError("n must be at least -1")
    return BinarySeq((1,) * (n + 1))


def one_prefix(b: BinarySeq) -> BinarySeq:
    return BinarySeq((1,) + b.digits)


def zero_prefix(b: BinarySeq) -> BinarySeq:
    return BinarySeq((0,) + b.digits)


def rho(m: int) -> BinarySeq:
    """The map ⟨m⟩ → ⟨m+1⟩ missing vertex 0."""
    return zero_prefix(identity(m))


def faces(n: int, m: int) -> list[BinarySeq]:
    """All maps ⟨m⟩ → ⟨n⟩, in increasing numeric order."""
    if not -1 <= m <= n:
        raise ValueError(f"need -1 <= m <= n, got m={m}, n={n}")
    out = []
    for ones in combinations(range(n + 1), m + 1):
        out.append(BinarySeq(tuple(1 if i in ones else 0 for i in range(n + 1))))
    return sorted(out, key=lambda b: b.value)


def count_faces(n: int, m: int) -> int:
    return comb(n + 1, m + 1)


@dataclass(frozen=True)
class Label:
    seq: BinarySeq

    @property
    def dimension(self) -> int:
        return self.seq.source

    @property
    def number(self) -> int:
        return self.seq.value

    def __str__(self) -> str:
        return f"{self.seq}:dim {self.dimension}"


def campion_order(n: int) -> list[Label]:
    """Labels 1 .. 2^(n+1)-1 as (n+1)-bit numbers, increasing."""
    if n < 0:
        raise ValueError("n must be non-negative")
    width = n + 1
    return [Label(BinarySeq.from_number(v, width)) for v in range(1, 2 ** width)]


def sub_labels(label: BinarySeq) -> list[BinarySeq]:
    """Every proper non-empty face of the simplex named by `label`, inside the same ambient simplex."""
    k = label.source
    out = []
    for m in range(0, k):
        for face in faces(k, m):
            out.append(compose(label, face))
    return out


def boundary_closed(n: int) -> bool:
    """Check that every face of a label appears before it in the Campion order."""
    position = {lab.seq: i for i, lab in enumerate(campion_order(n))}
    return all(position[f] < position[lab.seq] for lab in campion_order(n) for f in sub_labels(lab.seq))
