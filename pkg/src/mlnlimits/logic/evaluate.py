"""Model checking by tensor evaluation.

Every subformula is evaluated to a boolean array with one leading batch axis
(one entry per world) and one axis of length ``n`` per free variable, in
increasing variable order.  Quantifiers reduce an axis with ``all``/``any``,
so a formula with ``q`` nested quantifiers costs ``O(n^q)`` per world, but the
loop runs inside numpy for a whole batch of worlds at once.
"""
from __future__ import annotations

from typing import Mapping

import numpy as np

from .formula import (Atom, And, Equal, Exists, Forall, Formula, FormulaError, Iff,
                      Implies, Node, Not, Or)
from .world import World


def _align(vars_: tuple[int, ...], arr: np.ndarray, target: tuple[int, ...]) -> np.ndarray:
    shape = (arr.shape[0],) + tuple(arr.shape[1 + vars_.index(v)] if v in vars_ else 1
                                    for v in target)
    return arr.reshape(shape)


def _eval(node: Node, rels: Mapping[str, np.ndarray], n: int):
    if isinstance(node, Atom):
        vars_ = tuple(sorted(set(node.args)))
        rel = rels[node.symbol]
        if tuple(node.args) == vars_:
            return vars_, rel
        k = len(vars_)
        idx = []
        for v in node.args:
            shape = [1] * k
            shape[vars_.index(v)] = n
            idx.append(np.arange(n).reshape(shape))
        return vars_, rel[(slice(None),) + tuple(idx)]
    if isinstance(node, Equal):
        if node.left == node.right:
            return (node.left,), np.ones((1, n), dtype=bool)
        vars_ = tuple(sorted((node.left, node.right)))
        return vars_, np.eye(n, dtype=bool)[None]
    if isinstance(node, Not):
        vars_, arr = _eval(node.body, rels, n)
        return vars_, ~arr
    if isinstance(node, (And, Or, Implies, Iff)):
        lv, la = _eval(node.left, rels, n)
        rv, ra = _eval(node.right, rels, n)
        vars_ = tuple(sorted(set(lv) | set(rv)))
        la, ra = _align(lv, la, vars_), _align(rv, ra, vars_)
        if isinstance(node, And):
            out = la & ra
        elif isinstance(node, Or):
            out = la | ra
        elif isinstance(node, Implies):
            out = ~la | ra
        else:
            out = la == ra
        return vars_, out
    vars_, arr = _eval(node.body, rels, n)
    if node.var not in vars_:
        return vars_, arr  # vacuous quantifier over a nonempty domain
    axis = 1 + vars_.index(node.var)
    if arr.shape[axis] == 1:
        arr = np.broadcast_to(arr, arr.shape[:axis] + (n,) + arr.shape[axis + 1:])
    red = arr.all(axis=axis) if isinstance(node, Forall) else arr.any(axis=axis)
    return tuple(v for v in vars_ if v != node.var), red


def satisfaction_tensor(f: Formula, rels: Mapping[str, np.ndarray], n: int) -> np.ndarray:
    """Boolean array ``(B, n, ..., n)`` over the free variables of ``f`` in order."""
    batch = next(iter(rels.values())).shape[0]
    vars_, arr = _eval(f.ast, rels, n)
    target = tuple(sorted(f.free_vars))
    arr = np.broadcast_to(_align(vars_, arr, target), (batch,) + (n,) * len(target))
    order = [target.index(v) for v in f.free_vars]
    return arr.transpose([0] + [1 + i for i in order])


def count_batch(f: Formula, rels: Mapping[str, np.ndarray], n: int) -> np.ndarray:
    """``|f(A)|`` for every world of a batch, as int64."""
    arr = satisfaction_tensor(f, rels, n)
    return arr.reshape(arr.shape[0], -1).sum(axis=1, dtype=np.int64)


def _world_rels(w: World) -> dict[str, np.ndarray]:
    return {name: w.array(name)[None] for name in w.relations}


def _var_key(key) -> int:
    if isinstance(key, str):
        if not (key.startswith("x") and key[1:].isdigit()):
            raise FormulaError(f"bad variable name {key!r}")
        return int(key[1:])
    return int(key)


def evaluate(f: Formula, w: World, assignment: Mapping | None = None) -> bool:
    """Whether ``w`` satisfies ``f`` under ``assignment`` (variable -> element).

    Variables may be given as ``"x3"`` or as the index ``3``.
    """
    assignment = {_var_key(k): v for k, v in (assignment or {}).items()}
    missing = set(f.free_vars) - set(assignment)
    extra = set(assignment) - set(f.free_vars)
    if missing or extra:
        raise FormulaError(
            f"assignment must cover exactly {['x%d' % v for v in f.free_vars]}; "
            f"missing {sorted(missing)}, extra {sorted(extra)}")
    for v, a in assignment.items():
        if not 0 <= a < w.n:
            raise FormulaError(f"x{v} -> {a} is outside the domain [0, {w.n})")
    arr = satisfaction_tensor(f, _world_rels(w), w.n)
    return bool(arr[(0,) + tuple(assignment[v] for v in f.free_vars)])


def count_satisfying(f: Formula, w: World) -> int:
    """Number of ordered ``k``-tuples (repeats allowed) satisfying ``f``.

    A sentence counts 1 when true and 0 when false.
    """
    return int(count_batch(f, _world_rels(w), w.n)[0])
