"""The named MLNs used throughout, plus a seeded random generator for unary ones."""
from __future__ import annotations

from fractions import Fraction
import random

from .logic import GRAPH, UNARY, Signature
from .mln import Mln
from .patterns import degree_bound_text, no_clique_text

M3_PSI = ("x1 = x1 & x2 = x2 & exists x3 (exists x4 (exists x5 ("
          "R(x3) & R(x4) & R(x5) & x3 != x4 & x3 != x5 & x4 != x5 & "
          "forall x6 (R(x6) -> (x6 = x3 | x6 = x4 | x6 = x5)))))")


def two_point(w0=1, w1=0, w2=1) -> Mln:
    """Colour MLN rewarding monochromatic pairs; the default has two limit points."""
    return Mln.from_strings(UNARY, [
        ("~R(x1) & ~R(x2)", w0),
        ("(R(x1) & ~R(x2)) | (~R(x1) & R(x2))", w1),
        ("R(x1) & R(x2)", w2),
    ])


def colour(w1, w0=0) -> Mln:
    """``{(R(x1), w1), (~R(x1), w0)}``: limit proportion ``2^c / (1 + 2^c)``, ``c = w1 - w0``."""
    return Mln.from_strings(UNARY, [("R(x1)", w1), ("~R(x1)", w0)])


def clique(size: int, w) -> Mln:
    """Soft constraint: ``x1..x_size`` do not form a clique."""
    return Mln.from_strings(GRAPH, [(no_clique_text(size), w)])


def triangle(w) -> Mln:
    return clique(3, w)


def max_degree(delta: int, w) -> Mln:
    """Soft constraint: ``x1`` is not adjacent to ``delta + 1`` distinct others."""
    return Mln.from_strings(GRAPH, [(degree_bound_text(delta), w)])


def m3(w=1) -> Mln:
    """Quantified MLN whose only rewarded worlds have exactly three coloured elements."""
    return Mln.from_strings(UNARY, [(M3_PSI, w)])


def empty(signature: Signature = GRAPH) -> Mln:
    return Mln(signature, ())


# ------------------------------------------------------------ random

def _random_formula(rng: random.Random, k: int) -> str:
    # one relation literal per variable, sometimes an (in)equality, random connectives
    parts = [f"{rng.choice(['', '~'])}R(x{i})" for i in range(1, k + 1)]
    if k >= 2 and rng.random() < 0.3:
        i, j = sorted(rng.sample(range(1, k + 1), 2))
        parts.append(f"x{i} {rng.choice(['=', '!='])} x{j}")
    rng.shuffle(parts)
    text = parts[0]
    for p in parts[1:]:
        text = f"({text} {rng.choice(['&', '|', '->'])} {p})"
    return text


def random_unary_mln(seed: int, max_arity: int = 3, max_constraints: int = 4,
                     max_weight: float = 4.0, rational: bool = False) -> Mln:
    """A reproducible random quantifier-free MLN over one unary symbol.

    Rational weights are multiples of 1/4, which keeps every check exact.
    """
    rng = random.Random(seed)
    pairs, seen = [], set()
    while len(pairs) < rng.randint(1, max_constraints) or not pairs:
        text = _random_formula(rng, rng.randint(1, max_arity))
        if text in seen:
            continue
        seen.add(text)
        if rational:
            w = Fraction(rng.randint(0, int(4 * max_weight)), 4)
        else:
            w = rng.uniform(0.0, max_weight)
        pairs.append((text, w))
    return Mln.from_strings(UNARY, pairs)
