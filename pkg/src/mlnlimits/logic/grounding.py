from __future__ import annotations

from functools import cached_property
from itertools import permutations

import numpy as np

from .signature import Signature
from .world import World, ground_atoms


class Grounding:
    """Bijection between worlds on ``n`` elements and integers ``0..2^atoms - 1``.

    Bit ``offset[symbol] + j`` of a world index is the truth value of the
    ``j``-th ground atom of that symbol (order of :func:`ground_atoms`).
    """

    def __init__(self, signature: Signature, n: int):
        self.signature = signature
        self.n = n
        self.atoms = {s.name: ground_atoms(s, n) for s in signature.symbols}
        self.offset = {}
        total = 0
        for s in signature.symbols:
            self.offset[s.name] = total
            total += len(self.atoms[s.name])
        self.num_atoms = total

    @property
    def num_worlds(self) -> int:
        return 1 << self.num_atoms

    def world(self, index: int) -> World:
        rels = {}
        for s in self.signature.symbols:
            off = self.offset[s.name]
            rels[s.name] = [t for j, t in enumerate(self.atoms[s.name]) if index >> (off + j) & 1]
        return World(self.signature, self.n, rels)

    def index(self, world: World) -> int:
        idx = 0
        for s in self.signature.symbols:
            pos = self._positions[s.name]
            for t in world.relations[s.name]:
                idx |= 1 << (self.offset[s.name] + pos[t])
        return idx

    @cached_property
    def _positions(self):
        return {name: {t: j for j, t in enumerate(atoms)} for name, atoms in self.atoms.items()}

    def atom_bit(self, name: str, t: tuple[int, ...]) -> int:
        if self.signature[name].symmetric:
            t = tuple(sorted(t))
        return self.offset[name] + self._positions[name][t]

    def relation_arrays(self, indices: np.ndarray) -> dict[str, np.ndarray]:
        """Dense boolean relation tensors of shape ``(B, n, ..., n)`` for a batch."""
        indices = np.asarray(indices, dtype=np.uint64)
        batch = indices.shape[0]
        out = {}
        for s in self.signature.symbols:
            atoms = self.atoms[s.name]
            arr = np.zeros((batch,) + (self.n,) * s.arity, dtype=bool)
            if atoms:
                shifts = np.arange(self.offset[s.name], self.offset[s.name] + len(atoms),
                                   dtype=np.uint64)
                bits = ((indices[:, None] >> shifts[None, :]) & np.uint64(1)).astype(bool)
                coords = np.array(atoms, dtype=np.intp)
                perms = list(permutations(range(s.arity))) if s.symmetric else [tuple(range(s.arity))]
                for p in perms:
                    c = coords[:, p]
                    arr[(slice(None),) + tuple(c.T)] = bits
            out[s.name] = arr
        return out

    def permutation_map(self, perm) -> np.ndarray:
        """For each atom bit, the bit it moves to under ``i -> perm[i]``."""
        target = np.empty(self.num_atoms, dtype=np.intp)
        for s in self.signature.symbols:
            for j, t in enumerate(self.atoms[s.name]):
                target[self.offset[s.name] + j] = self.atom_bit(s.name, tuple(perm[a] for a in t))
        return target
