"""Recognition of soft constraints that have fast sufficient statistics.

A quantifier-free constraint over a single binary irreflexive-symmetric
symbol is matched by meaning rather than by spelling: its set of implying
maximal conjunctions is compared with that of a reference formula.  So any
rewording of the no-clique or degree-bound constraint is recognised as long
as the variables play the same roles.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial, perm

import numpy as np

from .logic import Formula, Signature, World, parse_formula
from .logic.graphstats import clique_count, common_clique_count, degrees

MAX_PATTERN_ARITY = 6


def no_clique_text(size: int) -> str:
    """``x1..xl`` are not pairwise distinct or miss at least one edge."""
    xs = range(1, size + 1)
    eqs = [f"x{a} = x{b}" for a in xs for b in xs if a < b]
    edges = [f"~R(x{a},x{b})" for a in xs for b in xs if a < b]
    return " | ".join(eqs + edges)


def degree_bound_text(max_degree: int) -> str:
    """x1 is not adjacent to all of ``x2..x(max_degree+2)`` when those are distinct."""
    xs = range(2, max_degree + 3)
    eqs = [f"x{a} = x{b}" for a in xs for b in xs if a < b]
    edges = [f"~R(x1,x{a})" for a in xs]
    return " | ".join(eqs + edges)


@dataclass(frozen=True)
class NoClique:
    size: int
    symbol: str = "R"

    def violations(self, w: World) -> int:
        return factorial(self.size) * clique_count(w, self.size, self.symbol)

    def satisfied(self, w: World) -> int:
        return w.n ** self.size - self.violations(w)

    def violation_delta(self, rows, a: int, b: int) -> int:
        """Change in violations when edge ``ab`` is added (rows exclude it)."""
        return factorial(self.size) * common_clique_count(rows, a, b, self.size - 2)

    def batch_violations(self, rel: np.ndarray) -> np.ndarray:
        from itertools import combinations
        n = rel.shape[1]
        total = np.zeros(rel.shape[0], dtype=np.int64)
        for vs in combinations(range(n), self.size):
            hit = np.ones(rel.shape[0], dtype=bool)
            for a, b in combinations(vs, 2):
                hit &= rel[:, a, b]
            total += hit
        return total * factorial(self.size)


@dataclass(frozen=True)
class DegreeBound:
    max_degree: int
    symbol: str = "R"

    @property
    def size(self) -> int:
        return self.max_degree + 2

    def violations(self, w: World) -> int:
        return sum(perm(d, self.max_degree + 1) for d in degrees(w, self.symbol))

    def satisfied(self, w: World) -> int:
        return w.n ** self.size - self.violations(w)

    def violation_delta_degrees(self, da: int, db: int) -> int:
        """Change in violations when an edge joins vertices of degrees ``da``, ``db``."""
        k = self.max_degree + 1
        return (perm(da + 1, k) - perm(da, k)) + (perm(db + 1, k) - perm(db, k))

    def batch_violations(self, rel: np.ndarray) -> np.ndarray:
        deg = rel.sum(axis=2, dtype=np.int64)
        k = self.max_degree + 1
        falling = np.ones_like(deg)
        for i in range(k):
            falling *= np.maximum(deg - i, 0)
        return falling.sum(axis=1)


def _table(f: Formula, sig: Signature) -> frozenset:
    from .normalform import qf_classes
    return frozenset(qf_classes(f, sig))


@lru_cache(maxsize=None)
def _reference(sig: Signature, symbol: str, arity: int):
    refs = []
    if arity >= 3:
        refs.append((NoClique(arity, symbol),
                     _table(parse_formula(no_clique_text(arity).replace("R(", f"{symbol}("), sig), sig)))
    if arity >= 3:
        refs.append((DegreeBound(arity - 2, symbol),
                     _table(parse_formula(degree_bound_text(arity - 2).replace("R(", f"{symbol}("), sig), sig)))
    return refs


@lru_cache(maxsize=4096)
def _classify(f: Formula, sig: Signature):
    if len(sig.symbols) != 1:
        return None
    sym = sig.symbols[0]
    if not (sym.symmetric and sym.arity == 2):
        return None
    if not f.quantifier_free or not 3 <= f.arity <= MAX_PATTERN_ARITY:
        return None
    if f.free_vars != tuple(range(1, f.arity + 1)):
        return None
    table = _table(f, sig)
    for pattern, ref in _reference(sig, sym.name, f.arity):
        if table == ref:
            return pattern
    return None


def classify(f: Formula, sig: Signature):
    """A :class:`NoClique` or :class:`DegreeBound` matching ``f``, else None."""
    return _classify(f, sig)
