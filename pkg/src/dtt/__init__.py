"""A proof-checking kernel for displayed type theory.

The kernel layers are, bottom up: the mode theory, nameless syntax with
contexts and locks, substitution, the display and décalage operations,
display coinductive types, and the bidirectional checker.  The surface
language and the command line sit on top.
"""
import sys

from .checker import Checker
from .coinductive import Signature, simplex_type
from .errors import DttError
from .surface import load, load_file

# Reduction and printing recurse along the term structure; deep displays
# of corecursors nest a few hundred frames.
if sys.getrecursionlimit() < 10_000:
    sys.setrecursionlimit(10_000)

__all__ = ["Checker", "DttError", "Signature", "load", "load_file", "simplex_type"]
