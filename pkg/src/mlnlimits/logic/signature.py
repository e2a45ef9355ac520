from __future__ import annotations

from dataclasses import dataclass
import re

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_RESERVED = {"forall", "exists"}


class SignatureError(ValueError):
    pass


@dataclass(frozen=True)
class Symbol:
    name: str
    arity: int
    symmetric: bool = False  # irreflexive and symmetric

    def __post_init__(self):
        if not _NAME.match(self.name) or self.name in _RESERVED:
            raise SignatureError(f"invalid relation symbol name {self.name!r}")
        if re.fullmatch(r"x\d+", self.name):
            raise SignatureError(f"symbol name {self.name!r} collides with variable syntax")
        if self.arity < 1:
            raise SignatureError(f"symbol {self.name} must have arity >= 1")
        if self.symmetric and self.arity < 2:
            raise SignatureError(
                f"symbol {self.name}: irreflexive-symmetric requires arity >= 2")


@dataclass(frozen=True)
class Signature:
    """A finite relational vocabulary without constants or function symbols."""

    symbols: tuple[Symbol, ...]

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if not self.symbols:
            raise SignatureError("signature must contain at least one symbol")
        names = [s.name for s in self.symbols]
        if len(set(names)) != len(names):
            raise SignatureError(f"duplicate symbol names in {names}")

    @classmethod
    def of(cls, *specs) -> "Signature":
        """Build from ``(name, arity)`` or ``(name, arity, symmetric)`` tuples."""
        return cls(tuple(Symbol(*spec) for spec in specs))

    @property
    def r(self) -> int:
        return len(self.symbols)

    @property
    def rho(self) -> int:
        return max(s.arity for s in self.symbols)

    def __getitem__(self, name: str) -> Symbol:
        for s in self.symbols:
            if s.name == name:
                return s
        raise KeyError(name)

    def __contains__(self, name) -> bool:
        return any(s.name == name for s in self.symbols)

    def is_single_unary(self) -> bool:
        return len(self.symbols) == 1 and self.symbols[0].arity == 1

    def to_json(self) -> list[dict]:
        return [{"name": s.name, "arity": s.arity, "symmetric_irreflexive": s.symmetric}
                for s in self.symbols]

    @classmethod
    def from_json(cls, data) -> "Signature":
        try:
            return cls(tuple(
                Symbol(d["name"], int(d["arity"]), bool(d.get("symmetric_irreflexive", False)))
                for d in data))
        except (KeyError, TypeError) as exc:
            raise SignatureError(f"malformed signature entry: {exc}") from exc


UNARY = Signature.of(("R", 1))
GRAPH = Signature.of(("R", 2, True))
