"""First-order formula trees and the ASCII formula parser.

Variables are written ``x1, x2, ...`` and stored by their integer index.
Precedence, tightest first: ``~``, ``&``, ``|``, ``->``, ``<->``; all binary
connectives associate to the left.
"""
from __future__ import annotations

from dataclasses import dataclass
import re
from typing import Union

from .signature import Signature


class FormulaError(ValueError):
    pass


class FormulaSyntaxError(FormulaError):
    def __init__(self, message: str, text: str, pos: int):
        self.text = text
        self.pos = pos
        super().__init__(f"{message} at position {pos}: {text[:pos]}<HERE>{text[pos:]}")


@dataclass(frozen=True)
class Atom:
    symbol: str
    args: tuple[int, ...]


@dataclass(frozen=True)
class Equal:
    left: int
    right: int


@dataclass(frozen=True)
class Not:
    body: "Node"


@dataclass(frozen=True)
class And:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Or:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Implies:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Iff:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Forall:
    var: int
    body: "Node"


@dataclass(frozen=True)
class Exists:
    var: int
    body: "Node"


Node = Union[Atom, Equal, Not, And, Or, Implies, Iff, Forall, Exists]
BINARY = (And, Or, Implies, Iff)
QUANTIFIERS = (Forall, Exists)
_OPS = {And: "&", Or: "|", Implies: "->", Iff: "<->"}
_LEVEL = {Iff: 0, Implies: 1, Or: 2, And: 3}


def free_variables(node: Node) -> frozenset[int]:
    if isinstance(node, Atom):
        return frozenset(node.args)
    if isinstance(node, Equal):
        return frozenset((node.left, node.right))
    if isinstance(node, Not):
        return free_variables(node.body)
    if isinstance(node, BINARY):
        return free_variables(node.left) | free_variables(node.right)
    return free_variables(node.body) - {node.var}


def bound_variables(node: Node) -> frozenset[int]:
    if isinstance(node, (Atom, Equal)):
        return frozenset()
    if isinstance(node, Not):
        return bound_variables(node.body)
    if isinstance(node, BINARY):
        return bound_variables(node.left) | bound_variables(node.right)
    return bound_variables(node.body) | {node.var}


def is_quantifier_free(node: Node) -> bool:
    if isinstance(node, (Atom, Equal)):
        return True
    if isinstance(node, Not):
        return is_quantifier_free(node.body)
    if isinstance(node, BINARY):
        return is_quantifier_free(node.left) and is_quantifier_free(node.right)
    return False


def symbols_used(node: Node) -> frozenset[str]:
    if isinstance(node, Atom):
        return frozenset((node.symbol,))
    if isinstance(node, Equal):
        return frozenset()
    if isinstance(node, (Not, *QUANTIFIERS)):
        return symbols_used(node.body)
    return symbols_used(node.left) | symbols_used(node.right)


def render(node: Node, level: int = 0) -> str:
    """Inverse of the parser: ``parse(render(ast))`` reproduces ``ast``."""
    if isinstance(node, Atom):
        return f"{node.symbol}({','.join(f'x{v}' for v in node.args)})"
    if isinstance(node, Equal):
        return f"x{node.left} = x{node.right}"
    if isinstance(node, Not):
        inner = node.body
        if isinstance(inner, Equal):
            return f"x{inner.left} != x{inner.right}"
        return "~" + render(inner, 4)
    if isinstance(node, QUANTIFIERS):
        q = "forall" if isinstance(node, Forall) else "exists"
        return f"{q} x{node.var} ({render(node.body)})"
    op_level = _LEVEL[type(node)]
    text = (f"{render(node.left, op_level)} {_OPS[type(node)]} "
            f"{render(node.right, op_level + 1)}")
    return f"({text})" if op_level < level else text


@dataclass(frozen=True)
class Formula:
    """A formula together with its ordered tuple of free variables."""

    ast: Node
    free_vars: tuple[int, ...]

    def __post_init__(self):
        fv = tuple(self.free_vars)
        object.__setattr__(self, "free_vars", fv)
        if len(set(fv)) != len(fv):
            raise FormulaError(f"free variables repeat: {fv}")
        if set(fv) != free_variables(self.ast):
            raise FormulaError(
                f"free_vars {fv} do not match the free variables "
                f"{sorted(free_variables(self.ast))} of the formula")

    @classmethod
    def of(cls, ast: Node) -> "Formula":
        return cls(ast, tuple(sorted(free_variables(ast))))

    @property
    def arity(self) -> int:
        return len(self.free_vars)

    @property
    def quantifier_free(self) -> bool:
        return is_quantifier_free(self.ast)

    @property
    def is_sentence(self) -> bool:
        return not self.free_vars

    def __str__(self) -> str:
        return render(self.ast)


# ---------------------------------------------------------------- parser

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<iff><->)
  | (?P<imp>->)
  | (?P<neq>!=)
  | (?P<op>[~&|=(),])
  | (?P<word>[A-Za-z_][A-Za-z0-9_]*)
""", re.VERBOSE)
_VAR = re.compile(r"x(\d+)\Z")


def _tokenize(text: str):
    tokens, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        if m.lastgroup != "ws":
            tokens.append((m.group(), m.start()))
        pos = m.end()
    tokens.append(("", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, signature: Signature):
        self.text = text
        self.signature = signature
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> str:
        return self.tokens[self.i][0]

    def pos(self) -> int:
        return self.tokens[self.i][1]

    def error(self, message: str):
        raise FormulaSyntaxError(message, self.text, self.pos())

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if expected is not None and tok != expected:
            self.error(f"expected {expected!r}, found {tok or 'end of input'!r}")
        self.i += 1
        return tok

    def var(self) -> int:
        tok = self.peek()
        m = _VAR.match(tok)
        if m is None or int(m.group(1)) < 1:
            self.error(f"expected a variable x1, x2, ..., found {tok or 'end of input'!r}")
        self.i += 1
        return int(m.group(1))

    # formula := unary {binop unary}, precedence climbing
    def formula(self, level: int = 0) -> Node:
        if level == 4:
            return self.unary()
        left = self.formula(level + 1)
        cls = {0: ("<->", Iff), 1: ("->", Implies), 2: ("|", Or), 3: ("&", And)}[level]
        while self.peek() == cls[0]:
            self.take()
            left = cls[1](left, self.formula(level + 1))
        return left

    def unary(self) -> Node:
        tok = self.peek()
        if tok == "~":
            self.take()
            return Not(self.unary())
        if tok == "(":
            self.take()
            node = self.formula()
            self.take(")")
            return node
        if tok in ("forall", "exists"):
            self.take()
            v = self.var()
            self.take("(")
            body = self.formula()
            self.take(")")
            return (Forall if tok == "forall" else Exists)(v, body)
        if _VAR.match(tok):
            left = self.var()
            op = self.peek()
            if op not in ("=", "!="):
                self.error(f"expected '=' or '!=' after variable, found {op or 'end of input'!r}")
            self.take()
            node = Equal(left, self.var())
            return node if op == "=" else Not(node)
        if re.match(r"[A-Za-z_]", tok or " "):
            start = self.pos()
            name = self.take()
            if name not in self.signature:
                raise FormulaSyntaxError(f"unknown relation symbol {name!r}", self.text, start)
            self.take("(")
            args = [self.var()]
            while self.peek() == ",":
                self.take()
                args.append(self.var())
            self.take(")")
            arity = self.signature[name].arity
            if len(args) != arity:
                raise FormulaSyntaxError(
                    f"symbol {name} has arity {arity} but got {len(args)} arguments",
                    self.text, start)
            return Atom(name, tuple(args))
        self.error(f"unexpected token {tok or 'end of input'!r}")


def parse_formula(text: str, signature: Signature) -> Formula:
    p = _Parser(text, signature)
    ast = p.formula()
    if p.peek() != "":
        p.error(f"unexpected trailing token {p.peek()!r}")
    clash = free_variables(ast) & bound_variables(ast)
    if clash:
        raise FormulaError(
            "quantified variable shadows a free variable: "
            + ", ".join(f"x{v}" for v in sorted(clash)))
    return Formula.of(ast)
