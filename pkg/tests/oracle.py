"""Slow, obviously-correct reference implementations used as test oracles.

Nothing here touches the tensor evaluator, the grounding bit tricks or the
log-space reductions of the package; worlds are plain sets of tuples.
"""
from fractions import Fraction
from itertools import combinations, product
import math

from mlnlimits.logic import World
from mlnlimits.logic.formula import (And, Atom, Equal, Exists, Forall, Iff, Implies, Not, Or)


def holds(node, rels, n, env):
    """Truth of an AST node; ``rels`` maps a symbol to a set of tuples (both orders)."""
    if isinstance(node, Atom):
        return tuple(env[v] for v in node.args) in rels[node.symbol]
    if isinstance(node, Equal):
        return env[node.left] == env[node.right]
    if isinstance(node, Not):
        return not holds(node.body, rels, n, env)
    if isinstance(node, And):
        return holds(node.left, rels, n, env) and holds(node.right, rels, n, env)
    if isinstance(node, Or):
        return holds(node.left, rels, n, env) or holds(node.right, rels, n, env)
    if isinstance(node, Implies):
        return (not holds(node.left, rels, n, env)) or holds(node.right, rels, n, env)
    if isinstance(node, Iff):
        return holds(node.left, rels, n, env) == holds(node.right, rels, n, env)
    if isinstance(node, (Forall, Exists)):
        test = all if isinstance(node, Forall) else any
        return test(holds(node.body, rels, n, {**env, node.var: a}) for a in range(n))
    raise TypeError(node)


def count(formula, rels, n):
    """``|phi(A)|`` by looping over every assignment of the free variables."""
    fv = formula.free_vars
    return sum(holds(formula.ast, rels, n, dict(zip(fv, t)))
               for t in product(range(n), repeat=len(fv)))


def atoms_of(signature, n):
    out = []
    for s in signature.symbols:
        if s.symmetric:
            out += [(s.name, t) for t in combinations(range(n), s.arity)]
        else:
            out += [(s.name, t) for t in product(range(n), repeat=s.arity)]
    return out


def worlds(signature, n):
    """Every world as ``(rels, World)`` with ``rels`` closed under symmetry."""
    atoms = atoms_of(signature, n)
    sym = {s.name: s.symmetric for s in signature.symbols}
    for bits in product((0, 1), repeat=len(atoms)):
        chosen = [a for a, b in zip(atoms, bits) if b]
        rels = {s.name: set() for s in signature.symbols}
        for name, t in chosen:
            rels[name].add(t)
            if sym[name]:
                rels[name].update(_perms(t))
        world = World(signature, n, {s.name: [t for name, t in chosen if name == s.name]
                                     for s in signature.symbols})
        yield rels, world


def _perms(t):
    from itertools import permutations
    return set(permutations(t))


def log2_weight(mln, rels, n):
    return sum(Fraction(c.weight) * count(c.formula, rels, n) for c in mln.constraints)


def distribution(mln, n):
    """Exact ``P(world)`` as Fractions for rational weights whose exponents are integers."""
    ws = [(world, log2_weight(mln, rels, n)) for rels, world in worlds(mln.signature, n)]
    base = min(e for _, e in ws)
    # exponents are integers in every use of this helper
    masses = [(w, 2 ** int(e - base)) for w, e in ws]
    z = sum(m for _, m in masses)
    return [(w, Fraction(m, z)) for w, m in masses]


def float_distribution(mln, n):
    ws = [(world, float(log2_weight(mln, rels, n))) for rels, world in worlds(mln.signature, n)]
    top = max(e for _, e in ws)
    z = math.fsum(2.0 ** (e - top) for _, e in ws)
    return [(w, 2.0 ** (e - top) / z) for w, e in ws]


def triangle_free_graphs(n):
    """Number of triangle-free labelled graphs on ``n`` vertices."""
    pairs = list(combinations(range(n), 2))
    total = 0
    for bits in product((0, 1), repeat=len(pairs)):
        edges = {p for p, b in zip(pairs, bits) if b}
        if not any((a, b) in edges and (a, c) in edges and (b, c) in edges
                   for a, b, c in combinations(range(n), 3)):
            total += 1
    return total


def bernstein(weights, a):
    k = len(weights) - 1
    return math.fsum(w * math.comb(k, s) * a ** s * (1 - a) ** (k - s)
                     for s, w in enumerate(weights))
