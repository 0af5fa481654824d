"""Command-line front end.

Usage::

    dtt check FILE...                      elaborate and check files
    dtt normalize FILE -e EXPR [--ctx TEL] print the normal form of EXPR
    dtt simplices FILE -t TERM -n N        print the boundary and type of n-simplices
    dtt delta compose SEQ SEQ              compose two binary sequences
    dtt delta order N                      list the Campion order of n-simplex labels

Global flags: ``--fuel N`` bounds every normalization session, ``--json``
turns diagnostics into one JSON object per line on stdout, ``--no-unicode``
prints ``^d``, ``->`` and ``:^TB`` instead of the Unicode forms.

Files given to ``check`` are checked in parallel sessions and reported in
input order.

Output format.  ``normalize`` prints one line, the normal form; with
``--trace`` it prints each distinct intermediate form of a leftmost-innermost
reduction instead.  ``simplices`` prints one ``name : type`` line per
boundary entry in Campion order and then the type of the simplex itself.
Diagnostics read ``file:line:col: error[code]: message``.

Exit codes: 0 success, 1 a check failed, 2 usage error, 3 fuel exhausted.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence, TextIO

from . import delta_plus
from .checker import DEFAULT_FUEL
from .coinductive import simplex_type
from .errors import Diagnostic, DttError, FuelExhausted
from .printer import Printer, Style, ascii_text
from .surface import Module, load, parse_expr, SName
from .syntax import Code, Univ

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_FUEL = 0, 1, 2, 3
WORKER_STACK = 256 * 1024 * 1024


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    def flags(default_of) -> argparse.ArgumentParser:
        g = argparse.ArgumentParser(add_help=False)
        g.add_argument("--fuel", type=int, default=default_of(DEFAULT_FUEL), help="normalizer budget per session")
        g.add_argument("--json", action="store_true", default=default_of(False), help="line-delimited JSON diagnostics")
        g.add_argument("--no-unicode", action="store_true", default=default_of(False), help="ASCII output")
        return g

    # flags may come before or after the subcommand; only the top level sets defaults
    common = flags(lambda _: argparse.SUPPRESS)
    p = argparse.ArgumentParser(prog="dtt", description="Displayed type theory checker", parents=[flags(lambda v: v)])
    sub = p.add_subparsers(dest="cmd", required=True)

    c = sub.add_parser("check", parents=[common], help="elaborate and check files")
    c.add_argument("files", nargs="+")

    n = sub.add_parser("normalize", parents=[common], help="print a normal form")
    n.add_argument("file")
    n.add_argument("-e", "--expr", required=True)
    n.add_argument("--ctx", default="", help="a telescope such as '(X :^TB Type) (z : X)'")
    n.add_argument("--trace", action="store_true", help="print every intermediate form")

    s = sub.add_parser("simplices", parents=[common], help="print the type of n-simplices of a term")
    s.add_argument("file")
    s.add_argument("-t", "--term", required=True)
    s.add_argument("-n", type=int, required=True)
    s.add_argument("--ctx", default="", help="a telescope binding the free names of TERM")

    d = sub.add_parser("delta", parents=[common], help="augmented semi-simplex category queries")
    dsub = d.add_subparsers(dest="dcmd", required=True)
    dc = dsub.add_parser("compose", parents=[common])
    dc.add_argument("first")
    dc.add_argument("second")
    do = dsub.add_parser("order", parents=[common])
    do.add_argument("n", type=int)
    return p


class Runner:
    def __init__(self, args: argparse.Namespace, out: TextIO, err: TextIO):
        self.args = args
        self.out = out
        self.err = err
        self.printer = Printer(Style(unicode=not args.no_unicode))

    def text(self, s: str) -> str:
        return s if not self.args.no_unicode else ascii_text(s)

    def emit(self, line: str) -> None:
        print(self.text(line), file=self.out)

    def report(self, path: str, source: str, exc: DttError) -> int:
        line = col = 0
        if exc.span is not None:
            line, col = exc.span.line_col(source)
        diag = Diagnostic(path, exc.code, self.text(exc.message), exc.span, line, col)
        if self.args.json:
            print(json.dumps(diag.as_record(), ensure_ascii=False, sort_keys=True), file=self.out)
        else:
            print(diag.render(), file=self.err)
        return EXIT_FUEL if isinstance(exc, FuelExhausted) else EXIT_FAIL

    def read(self, path: str) -> str:
        try:
            with open(path, encoding="utf-8") as fh:
                return fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc.strerror}") from exc

    # -- subcommands ---------------------------------------------------------

    def check(self) -> int:
        sources = [(path, self.read(path)) for path in self.args.files]

        def session(item: tuple[str, str]) -> Optional[DttError]:
            try:
                load(item[1], item[0], self.args.fuel)
            except DttError as exc:
                return exc
            return None

        # each file gets its own signature and checker; results are reported in input order
        old = threading.stack_size(WORKER_STACK)
        try:
            with ThreadPoolExecutor(max_workers=min(len(sources), os.cpu_count() or 1)) as pool:
                outcomes = list(pool.map(session, sources))
        finally:
            threading.stack_size(old)
        status = EXIT_OK
        for (path, text), exc in zip(sources, outcomes):
            if exc is not None:
                status = max(status, self.report(path, text, exc))
            elif not self.args.json:
                self.emit(f"{path}: ok")
        return status

    def normalize(self) -> int:
        path = self.args.file
        text = self.read(path)
        try:
            mod = load(text, path, self.args.fuel)
            ctx = mod.context(self.args.ctx)
            term, ty = mod.term(self.args.expr, ctx)
            if isinstance(term, Code) and isinstance(ty, Univ):
                term = term.ty
            names = ctx.names()
            if self.args.trace:
                for line in mod.checker.trace(term, lambda t: self.printer.show(t, names)):
                    self.emit(line)
            else:
                self.emit(self.printer.show(mod.checker.normalize(ctx, term), names))
        except DttError as exc:
            src = text if exc.span is None or exc.span.file == path else self.args.expr
            return self.report(exc.span.file if exc.span else path, src, exc)
        return EXIT_OK

    def simplices(self) -> int:
        path = self.args.file
        text = self.read(path)
        try:
            mod = load(text, path, self.args.fuel)
            ctx_text = self.args.ctx or self._default_ctx(mod)
            ctx = mod.context(ctx_text)
            term, _ = mod.term(self.args.term, ctx)
            st = simplex_type(mod.checker, ctx, term, self.args.n)
            names = ctx.names()
            for line in self.printer.telescope(st.boundary, names):
                self.emit(line)
            inner = list(reversed(st.names)) + names
            code = mod.checker.normalize(ctx.extend_tel(st.boundary), st.code)
            self.emit(self.printer.show(code, inner))
        except DttError as exc:
            src = text if exc.span is None or exc.span.file == path else self.args.term
            return self.report(exc.span.file if exc.span else path, src, exc)
        return EXIT_OK

    def _default_ctx(self, mod: Module) -> str:
        """Bind a bare unknown TERM to the first unparametrised codata type of the file."""
        e = parse_expr(self.args.term, "<term>")
        if isinstance(e, SName) and e.name not in mod.sig.names():
            for cd in mod.sig.codata.values():
                if not cd.phi.entries:
                    return f"({e.name} : {cd.name})"
        return ""

    def delta(self) -> int:
        try:
            if self.args.dcmd == "compose":
                b1 = delta_plus.BinarySeq.parse(self.args.first)
                b0 = delta_plus.BinarySeq.parse(self.args.second)
                self.emit(str(delta_plus.compose(b1, b0)))
            else:
                for lab in delta_plus.campion_order(self.args.n):
                    self.emit(f"{lab.seq} {lab.dimension}")
        except (DttError, ValueError) as exc:
            raise UsageError(str(exc)) from exc
        return EXIT_OK


def main(argv: Optional[Sequence[str]] = None, out: TextIO = None, err: TextIO = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    runner = Runner(args, out, err)
    try:
        return getattr(runner, args.cmd)()
    except UsageError as exc:
        print(f"dtt: error: {exc}", file=err)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
