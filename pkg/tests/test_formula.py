import itertools
import random

import pytest
from hypothesis import assume, given, settings, strategies as st

from mlnlimits.logic import (GRAPH, UNARY, And, Atom, Equal, Exists, Forall, Formula, FormulaError,
                             FormulaSyntaxError, Iff, Implies, Not, Or, Signature, SignatureError,
                             Symbol, World, WorldError, count_satisfying, evaluate, parse_formula,
                             render, triangle_count)
from mlnlimits.logic.formula import bound_variables, free_variables
from mlnlimits.logic.graphstats import degree_violation_count
from mlnlimits.patterns import degree_bound_text, no_clique_text

import oracle

MIXED = Signature.of(("P", 1), ("E", 2, True))


# ------------------------------------------------------------ signature

def test_signature_derived_sizes():
    assert (MIXED.r, MIXED.rho) == (2, 2)
    assert (UNARY.r, UNARY.rho) == (1, 1)


@pytest.mark.parametrize("specs", [
    [("R", 1), ("R", 2)],
    [("R", 1, True)],
    [("R", 0)],
    [("x1", 1)],
    [("forall", 1)],
])
def test_signature_rejects_bad_symbols(specs):
    with pytest.raises(SignatureError):
        Signature.of(*specs)


def test_signature_json_roundtrip():
    data = MIXED.to_json()
    assert data[1] == {"name": "E", "arity": 2, "symmetric_irreflexive": True}
    assert Signature.from_json(data) == MIXED


# --------------------------------------------------------------- parser

def test_parse_conjunction_of_negations():
    f = parse_formula("~R(x1) & ~R(x2)", UNARY)
    assert f.ast == And(Not(Atom("R", (1,))), Not(Atom("R", (2,))))
    assert f.free_vars == (1, 2)


def test_parse_identity_atom():
    f = parse_formula("x1 = x1", UNARY)
    assert f.ast == Equal(1, 1)
    assert f.free_vars == (1,)


def test_parse_quantifier_leaves_one_free():
    f = parse_formula("forall x2 (~R(x1,x2))", GRAPH)
    assert f.ast == Forall(2, Not(Atom("R", (1, 2))))
    assert f.free_vars == (1,)
    assert not f.quantifier_free


def test_precedence_and_associativity():
    sig = Signature.of(("A", 1), ("B", 1), ("C", 1))
    a, b, c = (Atom(s, (1,)) for s in "ABC")
    assert parse_formula("A(x1) | B(x1) & C(x1)", sig).ast == Or(a, And(b, c))
    assert parse_formula("A(x1) -> B(x1) -> C(x1)", sig).ast == Implies(Implies(a, b), c)
    assert parse_formula("A(x1) <-> B(x1) -> C(x1)", sig).ast == Iff(a, Implies(b, c))
    assert parse_formula("~A(x1) & B(x1)", sig).ast == And(Not(a), b)
    assert parse_formula("x1 != x2", sig).ast == Not(Equal(1, 2))


def test_free_vars_sorted_by_index():
    f = parse_formula("R(x3) & R(x1) & x10 = x2", UNARY)
    assert f.free_vars == (1, 2, 3, 10)


@pytest.mark.parametrize("text, message", [
    ("Q(x1)", "unknown relation symbol"),
    ("P(x1,x2)", "arity"),
    ("P(x1) P(x2)", "trailing"),
    ("P(x1", None),
    ("x1 == x2", "expected a variable"),
    ("forall (P(x1))", None),
])
def test_syntax_errors_carry_position(text, message):
    with pytest.raises(FormulaSyntaxError, match=message) as info:
        parse_formula(text, MIXED)
    assert info.value.pos >= 0


def test_shadowing_a_free_variable_is_rejected():
    with pytest.raises(FormulaError, match="shadows"):
        parse_formula("P(x1) & forall x1 (P(x1))", MIXED)


def test_formula_free_vars_must_match():
    with pytest.raises(FormulaError):
        Formula(Atom("R", (1,)), (1, 2))
    with pytest.raises(FormulaError):
        Formula(And(Atom("R", (1,)), Atom("R", (2,))), (2, 2))


# random ASTs over a unary and a symmetric binary symbol

def _formulas(max_var=3):
    var = st.integers(1, max_var)
    leaves = st.one_of(
        st.builds(lambda v: Atom("P", (v,)), var),
        st.builds(lambda a, b: Atom("E", (a, b)), var, var),
        st.builds(Equal, var, var),
    )

    def extend(children):
        return st.one_of(
            st.builds(Not, children),
            st.builds(And, children, children),
            st.builds(Or, children, children),
            st.builds(Implies, children, children),
            st.builds(Iff, children, children),
            st.builds(Forall, var, children),
            st.builds(Exists, var, children),
        )

    return st.recursive(leaves, extend, max_leaves=8)


def _worlds(n):
    return st.builds(
        lambda ps, es: World(MIXED, n, {"P": [(p,) for p in ps], "E": es}),
        st.sets(st.integers(0, n - 1)),
        st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
                .filter(lambda t: t[0] != t[1]).map(lambda t: tuple(sorted(t)))),
    )


@settings(max_examples=200, deadline=None)
@given(_formulas())
def test_render_parse_roundtrip(ast):
    assume(not (free_variables(ast) & bound_variables(ast)))
    f = Formula.of(ast)
    assert parse_formula(str(f), MIXED).ast == ast


def _rels(w):
    out = {"P": set(w.relations["P"]), "E": set()}
    for a, b in w.relations["E"]:
        out["E"] |= {(a, b), (b, a)}
    return out


@settings(max_examples=150, deadline=None)
@given(_formulas(), st.integers(1, 3).flatmap(lambda n: _worlds(n)))
def test_count_matches_naive_recursive_evaluator(ast, w):
    f = Formula.of(ast)
    assert count_satisfying(f, w) == oracle.count(f, _rels(w), w.n)


@settings(max_examples=100, deadline=None)
@given(_formulas(), st.integers(1, 3).flatmap(lambda n: _worlds(n)))
def test_count_bounds_and_complement(ast, w):
    f = Formula.of(ast)
    k = len(f.free_vars)
    c = count_satisfying(f, w)
    assert 0 <= c <= w.n ** k
    assert c + count_satisfying(Formula(Not(ast), f.free_vars), w) == w.n ** k


@settings(max_examples=60, deadline=None)
@given(_formulas(), _worlds(4), st.permutations(range(4)))
def test_count_invariant_under_relabelling(ast, w, perm):
    f = Formula.of(ast)
    assert count_satisfying(f, w) == count_satisfying(f, w.relabel(perm))


# ------------------------------------------------------------ evaluate

def test_evaluate_membership():
    w = World.coloured(3, [2])
    assert evaluate(parse_formula("R(x1)", UNARY), w, {"x1": 2})
    assert not evaluate(parse_formula("R(x1)", UNARY), w, {1: 0})


def test_evaluate_sentence_with_no_witness():
    assert not evaluate(parse_formula("exists x1 (R(x1))", UNARY), World.coloured(4, []))


def test_evaluate_triangle_violation_on_k3():
    violation = Formula(Not(parse_formula(no_clique_text(3), GRAPH).ast), (1, 2, 3))
    k3 = World.graph(3, [(0, 1), (0, 2), (1, 2)])
    assert evaluate(violation, k3, {"x1": 0, "x2": 1, "x3": 2})


@pytest.mark.parametrize("assignment", [{}, {"x1": 0, "x2": 1}, {"x1": 7}])
def test_evaluate_rejects_bad_assignments(assignment):
    with pytest.raises(FormulaError):
        evaluate(parse_formula("R(x1)", UNARY), World.coloured(3, [0]), assignment)


# ---------------------------------------------------------------- counts

def test_count_identity():
    assert count_satisfying(parse_formula("x1 = x1", UNARY), World.coloured(5, [])) == 5


def test_count_triangle_constraint_on_k3():
    k3 = World.graph(3, [(0, 1), (0, 2), (1, 2)])
    assert count_satisfying(parse_formula(no_clique_text(3), GRAPH), k3) == 21


def test_count_mixed_colour_pairs():
    f = parse_formula("R(x1) & ~R(x2) & x1 != x2", UNARY)
    assert count_satisfying(f, World.coloured(4, [0, 3])) == 4


def test_sentence_counts_zero_or_one():
    f = parse_formula("exists x1 (R(x1))", UNARY)
    assert count_satisfying(f, World.coloured(3, [1])) == 1
    assert count_satisfying(f, World.coloured(3, [])) == 0


# ----------------------------------------------------------- graph stats

def _complete(n):
    return World.graph(n, itertools.combinations(range(n), 2))


def test_triangle_count_examples():
    assert triangle_count(_complete(3)) == 1
    assert triangle_count(World.graph(6, [])) == 0
    assert triangle_count(_complete(4)) == 4


def test_triangle_count_needs_graph_symbol():
    with pytest.raises(WorldError):
        triangle_count(World.coloured(3, [0]))


def test_degree_violation_examples():
    star = World.graph(4, [(0, 1), (0, 2), (0, 3)])
    assert degree_violation_count(star, 1) == 6
    assert degree_violation_count(World.graph(5, [(0, 1), (2, 3)]), 1) == 0
    assert degree_violation_count(_complete(4), 2) == 24


def _all_graphs(n):
    for _, w in oracle.worlds(GRAPH, n):
        yield w


def test_triangle_count_matches_negated_constraint_exhaustively():
    neg = Formula(Not(parse_formula(no_clique_text(3), GRAPH).ast), (1, 2, 3))
    for n in range(1, 5):
        for w in _all_graphs(n):
            assert 6 * triangle_count(w) == count_satisfying(neg, w)


def test_triangle_count_matches_negated_constraint_randomly():
    neg = Formula(Not(parse_formula(no_clique_text(3), GRAPH).ast), (1, 2, 3))
    rng = random.Random(5)
    for _ in range(40):
        n = rng.choice([5, 6])
        edges = [e for e in itertools.combinations(range(n), 2) if rng.random() < 0.5]
        w = World.graph(n, edges)
        assert 6 * triangle_count(w) == count_satisfying(neg, w)


@pytest.mark.parametrize("delta", [1, 2])
def test_degree_violations_match_negated_constraint(delta):
    f = parse_formula(degree_bound_text(delta), GRAPH)
    neg = Formula(Not(f.ast), f.free_vars)
    for n in range(1, 6 if delta == 1 else 5):
        for w in _all_graphs(n):
            assert degree_violation_count(w, delta) == count_satisfying(neg, w)


# ---------------------------------------------------------------- worlds

def test_world_validation():
    with pytest.raises(WorldError):
        World.graph(3, [(0, 0)])
    with pytest.raises(WorldError):
        World.graph(3, [(0, 3)])
    with pytest.raises(WorldError):
        World.coloured(2, [2])


def test_symmetric_edges_are_normalised():
    assert World.graph(3, [(2, 0)]) == World.graph(3, [(0, 2)])
    assert World.graph(3, [(2, 0)]).size("R") == 2  # ordered tuples


def test_symbol_requires_valid_name():
    with pytest.raises(SignatureError):
        Symbol("exists", 1)
