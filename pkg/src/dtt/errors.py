"""Diagnostics shared by every layer of the kernel and the front end."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

ERROR_CODES = frozenset({
    "unbound-index",
    "modality-violation",
    "not-flat",
    "not-a-function",
    "universe-expected",
    "annotation-required",
    "type-mismatch",
    "side-condition-failed",
    "schema-violation",
    "unbound-name",
    "duplicate-definition",
    "parse-error",
    "fuel-exhausted",
    "mode-mismatch",
    "order-violation",
    "arity-mismatch",
    "internal",
})


@dataclass(frozen=True)
class Span:
    """A byte range inside one source file."""

    file: str
    start: int
    end: int

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError("span start after end")

    def line_col(self, source: str) -> tuple[int, int]:
        data = source.encode("utf-8")[: self.start].decode("utf-8", errors="ignore")
        line = data.count("\n") + 1
        col = len(data) - (data.rfind("\n") + 1) + 1
        return line, col


class DttError(Exception):
    def __init__(self, code: str, message: str, span: Optional[Span] = None, **data: Any):
        assert code in ERROR_CODES, code
        super().__init__(message)
        self.code = code
        self.message = message
        self.span = span
        self.data = data

    def with_span(self, span: Optional[Span]) -> "DttError":
        if self.span is None and span is not None:
            self.span = span
        return self

    def __str__(self) -> str:
        return f"[{self.code}] {self.message}"


class FuelExhausted(DttError):
    def __init__(self, fuel: int):
        super().__init__("fuel-exhausted", f"normalizer ran out of fuel after {fuel} steps")
        self.fuel = fuel


@dataclass
class Diagnostic:
    path: str
    code: str
    message: str
    span: Optional[Span] = None
    line: int = 0
    col: int = 0
    extra: dict = field(default_factory=dict)

    def render(self) -> str:
        return f"{self.path}:{self.line}:{self.col}: error[{self.code}]: {self.message}"

    def as_record(self) -> dict:
        span = None
        if self.span is not None:
            span = {"start": self.span.start, "end": self.span.end, "line": self.line, "col": self.col}
        return {"path": self.path, "span": span, "code": self.code, "message": self.message}
