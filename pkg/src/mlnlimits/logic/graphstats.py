"""Sufficient statistics of graph worlds computed on adjacency bitsets."""
from __future__ import annotations

from math import factorial, perm

from .world import World


def _clique_count(cand: int, rows, size: int) -> int:
    # cliques of `size` vertices inside the vertex set `cand`, each counted once
    if size == 0:
        return 1
    if size == 1:
        return cand.bit_count()
    total = 0
    while cand:
        low = cand & -cand
        v = low.bit_length() - 1
        cand ^= low
        total += _clique_count(cand & rows[v], rows, size - 1)
    return total


def clique_count(w: World, size: int, symbol: str = "R") -> int:
    """Number of vertex sets of the given size that induce a complete graph."""
    rows = w.adjacency_bits(symbol)
    return _clique_count((1 << w.n) - 1, rows, size)


def triangle_count(w: World, symbol: str = "R") -> int:
    return clique_count(w, 3, symbol)


def common_clique_count(rows, a: int, b: int, size: int) -> int:
    """Cliques of ``size`` vertices inside the common neighbourhood of ``a`` and ``b``."""
    return _clique_count(rows[a] & rows[b], rows, size)


def degrees(w: World, symbol: str = "R") -> list[int]:
    return [row.bit_count() for row in w.adjacency_bits(symbol)]


def degree_violation_count(w: World, max_degree: int, symbol: str = "R") -> int:
    """``sum_v (deg v)_(max_degree+1)``: ordered tuples violating the degree bound."""
    if max_degree < 1:
        raise ValueError("max_degree must be >= 1")
    return sum(perm(d, max_degree + 1) for d in degrees(w, symbol))


def clique_violation_count(w: World, size: int, symbol: str = "R") -> int:
    """Ordered tuples of ``size`` vertices forming a clique: ``size! * #cliques``."""
    return factorial(size) * clique_count(w, size, symbol)
