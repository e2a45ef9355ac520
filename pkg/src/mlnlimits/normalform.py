"""Quantifier-free normal forms.

A quantifier-free constraint over ``x1..xk`` is expanded into the maximal
consistent conjunctions that imply it.  Each conjunction is described by an
equality pattern on the variables (a set partition) and, after identifying
equal variables, by a truth assignment to every ground atom over the ``j``
remaining distinct variables.  That assignment is exactly a world on ``j``
elements, so the work is done with :class:`~mlnlimits.logic.Grounding`.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from math import comb
from numbers import Rational

import numpy as np

from .logic import And, Atom, Equal, Formula, Grounding, Not, Signature
from .logic.evaluate import satisfaction_tensor
from .mln import Constraint, Mln, MlnError

MAX_PATTERN_ATOMS = 20


def set_partitions(k: int):
    """Restricted growth strings of length ``k``: block label of each variable."""
    if k == 0:
        yield ()
        return

    def rec(prefix, top):
        if len(prefix) == k:
            yield tuple(prefix)
            return
        for b in range(top + 2):
            yield from rec(prefix + [b], max(top, b))

    yield from rec([0], 0)


@lru_cache(maxsize=None)
def _grounding(signature: Signature, j: int) -> Grounding:
    g = Grounding(signature, j)
    if g.num_atoms > MAX_PATTERN_ATOMS:
        raise MlnError(f"{g.num_atoms} ground atoms over {j} variables is too many to expand")
    return g


def qf_classes(f: Formula, signature: Signature) -> list[tuple[int, int]]:
    """The ``(j, world index)`` classes of maximal conjunctions implying ``f``.

    Each class is already variable-reduced: ``j`` distinct variables
    ``x1..xj`` numbered in order of the first original variable of each block.
    Different equality patterns that reduce to the same class are listed once
    per pattern, because each pattern contributes its own tuples.
    """
    if not f.quantifier_free:
        raise MlnError(f"{f} is not quantifier-free")
    out = []
    for rgs in set_partitions(f.arity):
        j = max(rgs) + 1
        g = _grounding(signature, j)
        idx = np.arange(g.num_worlds, dtype=np.uint64)
        tensor = satisfaction_tensor(f, g.relation_arrays(idx), j)
        holds = tensor[(slice(None),) + tuple(rgs)]
        out.extend((j, int(i)) for i in np.flatnonzero(holds))
    return out


@lru_cache(maxsize=None)
def _canonical_table(signature: Signature, j: int) -> np.ndarray:
    g = _grounding(signature, j)
    idx = np.arange(g.num_worlds, dtype=np.uint64)
    best = idx.copy()
    for p in permutations(range(j)):
        target = g.permutation_map(p).astype(np.uint64)
        moved = np.zeros_like(idx)
        for bit, dest in enumerate(target):
            moved |= ((idx >> np.uint64(bit)) & np.uint64(1)) << dest
        best = np.minimum(best, moved)
    return best


def canonical_class(signature: Signature, j: int, index: int) -> int:
    """Least world index in the orbit of ``index`` under relabelling the variables."""
    return int(_canonical_table(signature, j)[index])


def class_formula(signature: Signature, j: int, index: int) -> Formula:
    """The maximal consistent conjunction for a class, with pairwise distinctness."""
    g = _grounding(signature, j)
    parts = [Not(Equal(a, b)) for a in range(1, j + 1) for b in range(a + 1, j + 1)]
    for s in signature.symbols:
        for pos, t in enumerate(g.atoms[s.name]):
            atom = Atom(s.name, tuple(a + 1 for a in t))
            parts.append(atom if index >> (g.offset[s.name] + pos) & 1 else Not(atom))
    if not parts:
        if j == 1:  # one element and no atoms over it, e.g. a graph symbol
            return Formula(Equal(1, 1), (1,))
        raise MlnError("empty conjunction")
    node = parts[0]
    for p in parts[1:]:
        node = And(node, p)
    return Formula(node, tuple(range(1, j + 1)))


def _zero(exact: bool):
    return Fraction(0) if exact else 0.0


def _as_weight(w, exact: bool):
    return Fraction(w) if exact else float(w)


def normalized_weights(m: Mln) -> dict[tuple[int, int], object]:
    """Merged weight per canonical class ``(j, index)``."""
    if not m.quantifier_free:
        raise MlnError("normal form requires a quantifier-free MLN")
    exact = m.rational_weights
    acc = defaultdict(lambda: _zero(exact))
    for c in m.constraints:
        w = _as_weight(c.weight, exact)
        for j, index in qf_classes(c.formula, m.signature):
            acc[(j, canonical_class(m.signature, j, index))] += w
    return dict(acc)


def normalize_qf(m: Mln) -> Mln:
    """An equivalent MLN whose constraints are maximal consistent conjunctions.

    Each output formula implies pairwise distinctness of its variables, and
    conjunctions that differ only by renaming variables are merged (they have
    the same number of satisfying tuples in every world), so the log2-weight
    of every world is preserved exactly, not just the distribution.
    """
    weights = normalized_weights(m)
    cons = [Constraint(class_formula(m.signature, j, index), w)
            for (j, index), w in sorted(weights.items())]
    return Mln(m.signature, tuple(cons))


@dataclass(frozen=True)
class UnaryProfileNF:
    """Weights ``w[k][s]`` of "x1..xk distinct, exactly s of them coloured".

    ``table[k-1]`` holds row ``k`` (``k+1`` entries).  The log2-weight of a
    world with ``m`` coloured elements out of ``n`` is
    ``sum_k sum_s w[k][s] * C(k,s) * (m)_s * (n-m)_(k-s)``.
    """

    table: tuple[tuple, ...]

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(tuple(r) for r in self.table))
        for k, row in enumerate(self.table, start=1):
            if len(row) != k + 1:
                raise MlnError(f"row {k} must have {k + 1} entries, got {len(row)}")
            if any(x < 0 for x in row):
                raise MlnError(f"negative weight in row {k}")

    @property
    def nu(self) -> int:
        return len(self.table)

    def row(self, k: int) -> tuple:
        return self.table[k - 1]

    @property
    def exact(self) -> bool:
        return all(isinstance(x, Rational) for row in self.table for x in row)

    def to_json(self) -> dict:
        def conv(x):
            if isinstance(x, Fraction):
                return x.numerator if x.denominator == 1 else str(x)
            return x
        return {"nu": self.nu, "table": [[conv(x) for x in row] for row in self.table]}


def unary_normal_form(m: Mln) -> UnaryProfileNF:
    if not m.signature.is_single_unary():
        raise MlnError("unary normal form needs a signature with a single unary symbol")
    if not m.quantifier_free:
        raise MlnError("unary normal form requires a quantifier-free MLN")
    exact = m.rational_weights
    nu = max((c.arity for c in m.constraints), default=0)
    table = [[_zero(exact)] * (k + 1) for k in range(1, nu + 1)]
    for (j, index), w in normalized_weights(m).items():
        s = int(index).bit_count()
        table[j - 1][s] += w / comb(j, s)
    return UnaryProfileNF(tuple(tuple(r) for r in table))
