"""Seeded generators of well-typed kernel terms and partial substitutions.

Terms live in the ambient context AMBIENT below, extended by the fib corpus
signature.  Every ambient variable is △□-modal, so any closed-in-ambient term
can also be displayed.
"""
import random

from dtt.display import disp
from dtt.mode_theory import Modality
from dtt.syntax import (
    ID_SM,
    App,
    Code,
    Const,
    El,
    Head,
    Lam,
    Pi,
    Tail,
    Var,
)

AMBIENT = "(A :^TB Type) (B :^TB A → Type) (a0 :^TB A) (g :^TB A → A) (f :^TB (x : A) → B x)"
# outermost-first positions of the ambient variables
_POS = {"A": 0, "B": 1, "a0": 2, "g": 3, "f": 4}
TB = Modality.TRIBOX


def amb(name: str, scope) -> Var:
    return Var(len(scope) + 4 - _POS[name])


def gen_a(rng: random.Random, scope: list, depth: int):
    """A term of type A."""
    options = ["a0"]
    locals_a = [j for j, k in enumerate(scope) if k == "A"]
    if locals_a:
        options.append("local")
    if depth > 0:
        options += ["g", "beta", "beta"]
    pick = rng.choice(options)
    if pick == "a0":
        return amb("a0", scope)
    if pick == "local":
        return Var(rng.choice(locals_a))
    if pick == "g":
        return App(ID_SM, amb("g", scope), gen_a(rng, scope, depth - 1))
    body = gen_a(rng, ["A"] + scope, depth - 1)
    arg = gen_a(rng, scope, depth - 1)
    return App(ID_SM, Lam(ID_SM, body, "x", El(amb("A", scope))), arg)


def gen_code(rng: random.Random, scope: list, depth: int, sig=None):
    """A term of type Type."""
    options = ["A"]
    if depth > 0:
        options += ["B", "pi", "beta"]
        if sig is not None:
            options += ["fib", "fib1"]
    pick = rng.choice(options)
    if pick == "A":
        return amb("A", scope)
    if pick == "B":
        return App(ID_SM, amb("B", scope), gen_a(rng, scope, depth - 1))
    if pick == "pi":
        dom = gen_code(rng, scope, depth - 1, sig)
        cod = gen_code(rng, ["other"] + scope, depth - 1, sig)
        return Code(Pi(ID_SM, El(dom), El(cod), "y"))
    if pick == "beta":
        body = gen_code(rng, ["A"] + scope, depth - 1, sig)
        return App(ID_SM, Lam(ID_SM, body, "x", El(amb("A", scope))), gen_a(rng, scope, depth - 1))
    shape = sig.codata["SST"].shape
    pt = gen_a(rng, scope, depth - 1)
    fib = App(ID_SM, App(TB, Const("Fib"), amb("A", scope)), pt)
    if pick == "fib":
        return Head(shape, 0, (fib,))
    # Z^d (S (Fib A t) t^d) t^d, well typed only when t is closed in the ambient context
    if scope:
        return Head(shape, 0, (fib,))
    tail = Tail(shape, 0, (fib, disp(pt)))
    return App(ID_SM, Head(shape, 1, (fib, tail)), disp(pt))


def gen_term(rng: random.Random, depth: int, sig=None):
    """A closed-in-ambient term of depth at most ``depth``, possibly displayed."""
    base = gen_a(rng, [], depth - 1) if rng.random() < 0.5 else gen_code(rng, [], depth - 1, sig)
    if rng.random() < 0.3:
        return disp(base)
    return base


def gen_psub(rng: random.Random, length: int, depth: int = 3):
    """A telescope over AMBIENT with ``length`` entries and a partial substitution into it.

    Returns (telescope, sigma) where telescope is a tuple of (mu, name, type)
    entries outermost-first and sigma is outermost-first.
    """
    from dtt.syntax import TYPE, Telescope

    entries, sigma, kinds = [], [], []
    for j in range(length):
        scope = ["other"] * j  # the telescope entries already bound
        options = ["A", "Abox", "T"]
        if "A" in kinds:
            options.append("B")
        if "T" in kinds:
            options.append("El")
        pick = rng.choice(options)
        if pick in ("A", "Abox"):
            mu = TB if pick == "Abox" else ID_SM
            entries.append((mu, f"a{j}", El(amb("A", scope))))
            sigma.append(gen_a(rng, [], depth))
            kinds.append("A" if pick == "A" else "Abox")
        elif pick == "T":
            entries.append((ID_SM, f"T{j}", TYPE))
            sigma.append(amb("A", []))
            kinds.append("T")
        elif pick == "El":
            src = max(i for i, k in enumerate(kinds) if k == "T")
            entries.append((ID_SM, f"e{j}", El(Var(j - 1 - src))))
            sigma.append(gen_a(rng, [], depth))
            kinds.append("other")
        else:
            src = max(i for i, k in enumerate(kinds) if k == "A")
            entries.append((ID_SM, f"b{j}", El(App(ID_SM, amb("B", scope), Var(j - 1 - src)))))
            sigma.append(App(ID_SM, amb("f", []), sigma[src]))
            kinds.append("other")
    return Telescope(tuple(entries)), tuple(sigma)
