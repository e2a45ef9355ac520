from .signature import GRAPH, UNARY, Signature, SignatureError, Symbol
from .formula import (And, Atom, Equal, Exists, Forall, Formula, FormulaError,
                      FormulaSyntaxError, Iff, Implies, Not, Or, parse_formula, render)
from .world import World, WorldError
from .evaluate import count_satisfying, evaluate
from .graphstats import (clique_count, clique_violation_count, degree_violation_count,
                         triangle_count)
from .grounding import Grounding

__all__ = [
    "GRAPH", "UNARY", "Signature", "SignatureError", "Symbol",
    "And", "Atom", "Equal", "Exists", "Forall", "Formula", "FormulaError",
    "FormulaSyntaxError", "Iff", "Implies", "Not", "Or", "parse_formula", "render",
    "World", "WorldError", "count_satisfying", "evaluate",
    "clique_count", "clique_violation_count", "degree_violation_count", "triangle_count",
    "Grounding",
]
