"""Events on worlds, usable both on enumeration batches and on single worlds."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .logic import Formula, World, evaluate
from .logic.evaluate import count_batch
from .logic.formula import Exists, Forall, Not, bound_variables, free_variables
from .patterns import DegreeBound, NoClique, classify


@dataclass(frozen=True)
class Event:
    name: str
    batch: Callable[[dict, int], np.ndarray] = field(repr=False, compare=False)
    world: Callable[[World], bool] = field(repr=False, compare=False)
    depth: int = 2  # variables in play; sizes enumeration chunks
    invariant: bool = True  # unchanged by relabelling the domain

    def __call__(self, w: World) -> bool:
        return bool(self.world(w))


def _strip(node, kind):
    vars_ = []
    while isinstance(node, kind):
        vars_.append(node.var)
        node = node.body
    return vars_, node


def _pattern_event(f: Formula, sig):
    """Fast form of ``forall xs (p)`` / ``exists xs (~p)`` for a known pattern ``p``."""
    node, negate = f.ast, False
    if isinstance(node, Not):
        node, negate = node.body, True
    for kind, flip in ((Forall, False), (Exists, True)):
        vars_, body = _strip(node, kind)
        if not vars_:
            continue
        if flip:
            if not isinstance(body, Not):
                return None
            body = body.body
        if set(vars_) != free_variables(body) or len(vars_) != len(set(vars_)):
            return None
        pattern = classify(Formula.of(body), sig)
        if pattern is None:
            return None
        # forall: no violations; exists ~p: some violation
        return pattern, negate ^ flip
    return None


def sentence_event(f: Formula, signature) -> Event:
    if not f.is_sentence:
        raise ValueError(f"event {f} has free variables {f.free_vars}")
    fast = _pattern_event(f, signature)
    if fast is not None:
        pattern, some = fast
        sym = pattern.symbol

        def batch(rels, n):
            bad = pattern.batch_violations(rels[sym]) > 0
            return bad if some else ~bad

        def world(w):
            return (pattern.violations(w) > 0) == some

        return Event(str(f), batch, world, depth=2)

    def batch(rels, n):
        return count_batch(f, rels, n) > 0

    depth = len(free_variables(f.ast) | bound_variables(f.ast))
    return Event(str(f), batch, lambda w: evaluate(f, w), depth=max(depth, 1))


def clique_free(size: int = 3, symbol: str = "R") -> Event:
    p = NoClique(size, symbol)
    return Event("triangle-free" if size == 3 else f"K{size}-free",
                 lambda rels, n: p.batch_violations(rels[symbol]) == 0,
                 lambda w: p.violations(w) == 0)


def triangle_free(symbol: str = "R") -> Event:
    return clique_free(3, symbol)


def max_degree_at_most(max_degree: int, symbol: str = "R") -> Event:
    p = DegreeBound(max_degree, symbol)
    return Event(f"max-degree<={max_degree}",
                 lambda rels, n: p.batch_violations(rels[symbol]) == 0,
                 lambda w: p.violations(w) == 0)


def edge_present(a: int, b: int, symbol: str = "R") -> Event:
    t = tuple(sorted((a, b)))
    return Event(f"edge({a},{b})",
                 lambda rels, n: rels[symbol][:, a, b],
                 lambda w: t in w.relations[symbol], invariant=False)


def coloured_count(m: int, symbol: str = "R") -> Event:
    return Event(f"exactly {m} coloured",
                 lambda rels, n: rels[symbol].sum(axis=1) == m,
                 lambda w: len(w.relations[symbol]) == m, depth=1)


def atom_holds(symbol: str, t: tuple[int, ...]) -> Event:
    t = tuple(t)
    return Event(f"{symbol}{t}",
                 lambda rels, n: rels[symbol][(slice(None),) + t],
                 lambda w: bool(w.array(symbol)[t]), depth=1, invariant=False)
