"""Markov logic networks and their unnormalised log2-weights."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import json
import math
from numbers import Rational, Real
from pathlib import Path

from .logic import Formula, Signature, World, count_satisfying, parse_formula


class MlnError(ValueError):
    pass


@dataclass(frozen=True)
class Constraint:
    formula: Formula
    weight: Real

    @property
    def arity(self) -> int:
        return self.formula.arity


@dataclass(frozen=True)
class Mln:
    """A finite set of soft constraints ``(formula, weight)`` with weights >= 0.

    Weights may be ints, Fractions or floats.  With rational weights every
    log2-weight is computed exactly as a Fraction when ``exact=True``.
    """

    signature: Signature
    constraints: tuple[Constraint, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        seen = set()
        for c in self.constraints:
            w = c.weight
            if isinstance(w, bool) or not isinstance(w, Real):
                raise MlnError(f"weight {w!r} is not a real number")
            if not math.isfinite(w) or w < 0:
                raise MlnError(f"weights must be finite and >= 0, got {w!r}")
            key = str(c.formula)
            if key in seen:
                raise MlnError(f"duplicate soft constraint {key!r}")
            seen.add(key)

    @classmethod
    def from_strings(cls, signature: Signature, pairs) -> "Mln":
        return cls(signature, tuple(Constraint(parse_formula(text, signature), w)
                                    for text, w in pairs))

    @property
    def weights(self) -> list:
        return [c.weight for c in self.constraints]

    @property
    def quantifier_free(self) -> bool:
        return all(c.formula.quantifier_free for c in self.constraints)

    @property
    def integer_weights(self) -> bool:
        return all(_is_integral(c.weight) for c in self.constraints)

    @property
    def rational_weights(self) -> bool:
        return all(isinstance(c.weight, Rational) for c in self.constraints)

    def with_weights(self, weights) -> "Mln":
        return Mln(self.signature, tuple(Constraint(c.formula, w)
                                         for c, w in zip(self.constraints, weights)))

    # ------------------------------------------------------------ json
    def to_json(self) -> dict:
        return {
            "signature": self.signature.to_json(),
            "constraints": [{"formula": str(c.formula), "weight": _json_weight(c.weight)}
                            for c in self.constraints],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Mln":
        if "signature" not in data:
            raise MlnError("model file lacks a 'signature' entry")
        sig = Signature.from_json(data["signature"])
        texts = [c["formula"] for c in data.get("constraints", [])]
        if len(set(texts)) != len(texts):
            raise MlnError("duplicate formula strings in model file")
        pairs = []
        for c in data.get("constraints", []):
            w = c["weight"]
            if isinstance(w, str):
                w = Fraction(w)
            elif isinstance(w, int):
                w = int(w)
            else:
                w = float(w)
            pairs.append((c["formula"], w))
        return cls.from_strings(sig, pairs)

    @classmethod
    def load(cls, path) -> "Mln":
        return cls.from_json(json.loads(Path(path).read_text()))

    def dump(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n")


def _is_integral(w) -> bool:
    return isinstance(w, Rational) and Fraction(w).denominator == 1


def _json_weight(w):
    if isinstance(w, Fraction):
        return w.numerator if w.denominator == 1 else str(w)
    return w


def constraint_count(c: Constraint, w: World) -> int:
    """``|phi(A)|`` using a fast counter when the constraint is a known pattern."""
    from .patterns import classify
    pattern = classify(c.formula, w.signature)
    if pattern is not None:
        return pattern.satisfied(w)
    return count_satisfying(c.formula, w)


def log2_mu(m: Mln, w: World, exact: bool = False):
    """``sum_i w_i |phi_i(A)|``, the base-2 logarithm of the world's weight.

    ``exact=True`` returns a Fraction (requires rational weights).
    """
    if w.signature != m.signature:
        raise MlnError("world and MLN have different signatures")
    if exact:
        if not m.rational_weights:
            raise MlnError("exact mode needs int or Fraction weights")
        return sum((Fraction(c.weight) * constraint_count(c, w) for c in m.constraints),
                   Fraction(0))
    return math.fsum(float(c.weight) * constraint_count(c, w) for c in m.constraints)


def probability_of_world(m: Mln, w: World, log2_z: float) -> float:
    return 2.0 ** (float(log2_mu(m, w)) - log2_z)
