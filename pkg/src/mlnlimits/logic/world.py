from __future__ import annotations

from functools import cached_property
from itertools import combinations, permutations, product
from typing import Iterable, Mapping

import numpy as np

from .signature import Signature, Symbol


class WorldError(ValueError):
    pass


def ground_atoms(symbol: Symbol, n: int) -> list[tuple[int, ...]]:
    """The free ground atoms of ``symbol`` over the domain ``0..n-1``.

    Symmetric symbols contribute one atom per set of distinct elements (as a
    sorted tuple); other symbols one atom per ordered tuple.
    """
    if symbol.symmetric:
        return list(combinations(range(n), symbol.arity))
    return list(product(range(n), repeat=symbol.arity))


class World:
    """A finite structure on the domain ``{0, ..., n-1}``.

    ``relations`` maps each symbol name to its set of tuples. Tuples of
    symmetric symbols are stored once, sorted; any ordering may be passed in.
    Instances are treated as immutable.
    """


    def __init__(self, signature: Signature, n: int,
                 relations: Mapping[str, Iterable] | None = None):
        if n < 1:
            raise WorldError("domain size must be >= 1")
        relations = dict(relations or {})
        unknown = set(relations) - {s.name for s in signature.symbols}
        if unknown:
            raise WorldError(f"unknown symbols {sorted(unknown)}")
        rels = {}
        for sym in signature.symbols:
            tuples = set()
            for t in relations.get(sym.name, ()):
                t = (t,) if sym.arity == 1 and not isinstance(t, tuple) else tuple(t)
                if len(t) != sym.arity:
                    raise WorldError(f"{sym.name}: tuple {t} has wrong length")
                if any(not 0 <= a < n for a in t):
                    raise WorldError(f"{sym.name}: tuple {t} leaves the domain [0, {n})")
                if sym.symmetric:
                    if len(set(t)) != len(t):
                        raise WorldError(f"{sym.name} is irreflexive; got {t}")
                    t = tuple(sorted(t))
                tuples.add(t)
            rels[sym.name] = frozenset(tuples)
        self.signature = signature
        self.n = n
        self.relations = rels

    @classmethod
    def graph(cls, n: int, edges: Iterable, symbol: str = "R",
              signature: Signature | None = None) -> "World":
        from .signature import GRAPH
        return cls(signature or GRAPH, n, {symbol: edges})

    @classmethod
    def coloured(cls, n: int, elements: Iterable[int], symbol: str = "R",
                 signature: Signature | None = None) -> "World":
        from .signature import UNARY
        return cls(signature or UNARY, n, {symbol: [(a,) for a in elements]})

    def size(self, name: str) -> int:
        """``|R(A)|`` counted as ordered tuples."""
        sym = self.signature[name]
        k = len(self.relations[name])
        if sym.symmetric:
            k *= len(list(permutations(range(sym.arity))))
        return k

    def array(self, name: str) -> np.ndarray:
        return self._arrays[name]

    @cached_property
    def _arrays(self) -> dict[str, np.ndarray]:
        out = {}
        for sym in self.signature.symbols:
            a = np.zeros((self.n,) * sym.arity, dtype=bool)
            for t in self.relations[sym.name]:
                if sym.symmetric:
                    for p in permutations(t):
                        a[p] = True
                else:
                    a[t] = True
            a.setflags(write=False)
            out[sym.name] = a
        return out

    def adjacency_bits(self, name: str = "R") -> tuple[int, ...]:
        """Neighbour bitsets, one int per vertex, for a binary symmetric symbol."""
        sym = self.signature[name]
        if not (sym.symmetric and sym.arity == 2):
            raise WorldError(f"{name} is not a binary irreflexive-symmetric symbol")
        return self._bits[name]

    @cached_property
    def _bits(self) -> dict[str, tuple[int, ...]]:
        out = {}
        for sym in self.signature.symbols:
            if sym.symmetric and sym.arity == 2:
                rows = [0] * self.n
                for a, b in self.relations[sym.name]:
                    rows[a] |= 1 << b
                    rows[b] |= 1 << a
                out[sym.name] = tuple(rows)
        return out

    def relabel(self, perm) -> "World":
        """Image of this world under the domain permutation ``i -> perm[i]``."""
        return World(self.signature, self.n, {
            name: [tuple(perm[a] for a in t) for t in tuples]
            for name, tuples in self.relations.items()})

    def __eq__(self, other) -> bool:
        return (isinstance(other, World) and self.signature == other.signature
                and self.n == other.n and self.relations == other.relations)

    def __hash__(self) -> int:
        return hash((self.n, tuple(sorted(self.relations.items()))))

    def __repr__(self) -> str:
        body = ", ".join(f"{k}={sorted(v)}" for k, v in self.relations.items())
        return f"World(n={self.n}, {body})"
