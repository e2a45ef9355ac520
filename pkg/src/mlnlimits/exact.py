"""Exact distributions of MLNs on small domains.

Two routes compute the same quantities:

* enumeration of every world (the oracle), vectorised over batches of world
  indices and reduced in log2 space with a per-class max shift;
* for one unary symbol, the collapse onto the number ``m`` of coloured
  elements, either through the unary normal form (quantifier-free MLNs) or
  by evaluating one representative world per ``m`` (any MLN, since worlds
  with equal ``m`` are isomorphic).
"""
from __future__ import annotations

from collections import Counter, defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
import math
from math import comb, lgamma, log
from typing import Callable, Iterator, Mapping

import numpy as np

from . import events as ev
from .logic import Formula, Grounding, Signature, World
from .logic.evaluate import count_batch
from .mln import Mln, MlnError
from .normalform import UnaryProfileNF, unary_normal_form
from .patterns import classify

DEFAULT_BUDGET = 1 << 28
_TENSOR_ELEMENTS = 1 << 22
_LN2 = log(2.0)


class BudgetExceeded(RuntimeError):
    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(f"enumeration needs {required} worlds, budget is {budget}")


# ----------------------------------------------------------- enumeration

def _check_budget(g: Grounding, budget: int):
    if g.num_worlds > budget:
        raise BudgetExceeded(g.num_worlds, budget)


def enumerate_worlds(signature: Signature, n: int, budget: int = DEFAULT_BUDGET,
                     part: int = 0, parts: int = 1) -> Iterator[World]:
    """Every world on ``n`` elements once, in world-index order.

    ``part``/``parts`` select a contiguous slice of the index range (fixed
    high-order bits when ``parts`` is a power of two) for partitioned runs.
    """
    g = Grounding(signature, n)
    _check_budget(g, budget)
    if not 0 <= part < parts:
        raise ValueError("need 0 <= part < parts")
    total = g.num_worlds
    lo, hi = total * part // parts, total * (part + 1) // parts
    for i in range(lo, hi):
        yield g.world(i)


# ------------------------------------------------------ log-space helpers

_EXACT_BINOMIAL_MAX_N = 2048


@lru_cache(maxsize=64)
def _log2_binomial_row(n: int) -> np.ndarray:
    row, c = [], 1
    for m in range(n + 1):
        row.append(math.log2(c))
        c = c * (n - m) // (m + 1)
    return np.array(row)


def log2_binomial(n: int, m) -> np.ndarray:
    """``log2 C(n, m)``; exactly symmetric under ``m -> n - m``.

    Correctly rounded from big integers for moderate ``n``, via lgamma beyond.
    """
    m = np.asarray(m)
    if n <= _EXACT_BINOMIAL_MAX_N and np.issubdtype(m.dtype, np.integer):
        return _log2_binomial_row(n)[m]
    lg = np.vectorize(lgamma, otypes=[float])
    return (lgamma(n + 1) - (lg(m + 1.0) + lg(n - m + 1.0))) / _LN2


def log2_sum(log2_values) -> float:
    vals = np.asarray(list(log2_values), dtype=float)
    if vals.size == 0:
        return -math.inf
    top = vals.max()
    if top == -math.inf:
        return -math.inf
    return float(top + math.log2(math.fsum(np.exp2(vals - top))))


@dataclass
class _Partial:
    top: float
    total: float


def _merge_float(parts: list[dict]) -> dict:
    grouped = defaultdict(list)
    for part in parts:
        for key, p in part.items():
            grouped[key].append(p)
    out = {}
    for key, ps in grouped.items():
        top = max(p.top for p in ps)
        s = math.fsum(p.total * 2.0 ** (p.top - top) for p in ps)
        out[key] = top + math.log2(s)
    return out


def _merge_exact(parts: list[dict]) -> dict:
    out = defaultdict(Counter)
    for part in parts:
        for key, hist in part.items():
            out[key].update(hist)
    return {key: sum(c << e for e, c in hist.items()) for key, hist in out.items()}


# ------------------------------------------------------------- the engine

KeyFn = Callable[[Mapping[str, np.ndarray], np.ndarray, int], np.ndarray]


class _Engine:
    """Keyed weight reductions over all worlds of an MLN on ``n`` elements.

    A key function maps a batch (relation tensors, constraint counts with
    shape ``(constraints, B)``) to integer class labels; the engine returns
    the total weight ``mu`` of each class, as log2 (float mode) or as an exact
    integer (integer weights).
    """

    def __init__(self, m: Mln, n: int, method: str = "auto", budget: int = DEFAULT_BUDGET,
                 threads: int = 1, depth: int = 1, invariant: bool = True):
        if n < 1:
            raise ValueError("n must be >= 1")
        self.m, self.n, self.threads = m, n, max(1, threads)
        self.grounding = Grounding(m.signature, n)
        unary = m.signature.is_single_unary()
        if method == "auto":
            method = ("representatives" if unary and invariant and self.grounding.num_worlds > 256
                      else "enumeration")
        if method == "representatives" and not unary:
            raise MlnError("the representative-world route needs a single unary symbol")
        if method not in ("enumeration", "representatives"):
            raise ValueError(f"unknown method {method!r}")
        if method == "enumeration":
            _check_budget(self.grounding, budget)
        self.method = method
        self.counters = [self._counter(c.formula) for c in m.constraints]
        generic_depth = max((c.formula.arity for c, (kind, _) in zip(m.constraints, self.counters)
                             if kind == "generic"), default=1)
        width = max(depth, generic_depth, m.signature.rho)
        size = max(1, _TENSOR_ELEMENTS // n ** width)
        self.batch = 1 << min(16, size.bit_length() - 1)

    def _counter(self, f: Formula):
        pattern = classify(f, self.m.signature)
        if pattern is not None:
            k = f.arity
            sym = pattern.symbol
            return "pattern", lambda rels: self.n ** k - pattern.batch_violations(rels[sym])
        return "generic", lambda rels: count_batch(f, rels, self.n)

    def counts(self, rels) -> np.ndarray:
        b = next(iter(rels.values())).shape[0]
        if not self.counters:
            return np.zeros((0, b), dtype=np.int64)
        return np.stack([fn(rels) for _, fn in self.counters])

    def _tasks(self):
        if self.method == "representatives":
            return [None]
        total = self.grounding.num_worlds
        return [(lo, min(lo + self.batch, total)) for lo in range(0, total, self.batch)]

    def _batch(self, task):
        if task is None:
            # world m colours elements 0..m-1
            n = self.n
            rel = np.arange(n)[None, :] < np.arange(n + 1)[:, None]
            return {self.m.signature.symbols[0].name: rel}, [comb(n, m) for m in range(n + 1)]
        lo, hi = task
        return self.grounding.relation_arrays(np.arange(lo, hi, dtype=np.uint64)), None

    def _run(self, keys: Mapping[str, KeyFn], exact: bool):
        weights = self.m.weights

        def work(task):
            rels, mult = self._batch(task)
            counts = self.counts(rels)
            labels = {name: np.asarray(fn(rels, counts, self.n)).astype(np.int64)
                      for name, fn in keys.items()}
            if exact:
                ints = np.array([int(w) for w in weights], dtype=np.int64)
                e = ints @ counts if len(ints) else np.zeros(counts.shape[1], dtype=np.int64)
                res = {}
                for name, lab in labels.items():
                    pairs, inv = np.unique(np.stack([lab, e], axis=1), axis=0,
                                           return_inverse=True)
                    inv = inv.ravel()
                    if mult is None:
                        cnt = np.bincount(inv, minlength=len(pairs)).tolist()
                    else:
                        cnt = [0] * len(pairs)
                        for j, g in enumerate(inv):
                            cnt[g] += mult[j]
                    for (key, ex), c in zip(pairs.tolist(), cnt):
                        res.setdefault((name, key), Counter())[ex] += c
                return res
            e = (np.asarray(weights, dtype=float) @ counts if weights
                 else np.zeros(counts.shape[1]))
            if mult is not None:
                e = e + log2_binomial(self.n, np.arange(self.n + 1))
            res = {}
            for name, lab in labels.items():
                uniq, inv = np.unique(lab, return_inverse=True)
                top = np.full(len(uniq), -np.inf)
                np.maximum.at(top, inv, e)
                tot = np.zeros(len(uniq))
                np.add.at(tot, inv, np.exp2(e - top[inv]))
                for u, t, s in zip(uniq, top, tot):
                    res[(name, int(u))] = _Partial(float(t), float(s))
            return res

        tasks = self._tasks()
        if self.threads > 1 and len(tasks) > 1:
            with ThreadPoolExecutor(self.threads) as pool:
                parts = list(pool.map(work, tasks))
        else:
            parts = [work(t) for t in tasks]
        merged = _merge_exact(parts) if exact else _merge_float(parts)
        out = {name: {} for name in keys}
        for (name, key), v in sorted(merged.items()):
            out[name][key] = v
        return out

    def log2_masses(self, keys: Mapping[str, KeyFn]) -> dict[str, dict[int, float]]:
        return self._run(keys, exact=False)

    def exact_masses(self, keys: Mapping[str, KeyFn]) -> dict[str, dict[int, int]]:
        if not self.m.integer_weights:
            raise MlnError("exact masses need integer weights")
        return self._run(keys, exact=True)


def _all(rels, counts, n):
    return np.zeros(counts.shape[1], dtype=np.int64)


# ------------------------------------------------------------- profiles

@dataclass(frozen=True)
class ProfileDistribution:
    """Distribution of the number ``m`` of coloured elements, ``m = 0..n``."""

    n: int
    log2_weight: np.ndarray
    prob: np.ndarray

    def mass(self, lo: int, hi: int) -> float:
        lo, hi = max(lo, 0), min(hi, self.n)
        if lo > hi:
            return 0.0
        return math.fsum(self.prob[lo:hi + 1])

    def to_csv(self) -> str:
        rows = ["m,log2_weight,prob"]
        rows += [f"{m},{lw:.17g},{p:.17g}" for m, (lw, p)
                 in enumerate(zip(self.log2_weight, self.prob))]
        return "\n".join(rows) + "\n"

    @classmethod
    def from_log2(cls, n: int, log2_weight) -> "ProfileDistribution":
        lw = np.asarray(log2_weight, dtype=float)
        z = log2_sum(lw)
        prob = np.exp2(lw - z)
        prob = prob / math.fsum(prob)
        return cls(n, lw, prob)


def _falling(x: np.ndarray, s: int) -> np.ndarray:
    out = np.ones_like(x, dtype=float)
    for i in range(s):
        out *= x - i
    return out


def profile_exponent(nf: UnaryProfileNF, n: int) -> np.ndarray:
    """``sum_k sum_s w[k][s] C(k,s) (m)_s (n-m)_(k-s)`` for each ``m`` (floats)."""
    m = np.arange(n + 1, dtype=float)
    total = np.zeros(n + 1)
    for k, row in enumerate(nf.table, start=1):
        for s, w in enumerate(row):
            if w:
                total += float(w) * comb(k, s) * _falling(m, s) * _falling(n - m, k - s)
    return total


def profile_exponent_exact(nf: UnaryProfileNF, n: int) -> list[Fraction]:
    def falling(x, s):
        return math.prod(range(x - s + 1, x + 1)) if s <= x else 0
    return [sum((Fraction(w) * comb(k, s) * falling(m, s) * falling(n - m, k - s)
                 for k, row in enumerate(nf.table, start=1) for s, w in enumerate(row)),
                Fraction(0))
            for m in range(n + 1)]


def unary_profile_distribution(nf: UnaryProfileNF, n: int) -> ProfileDistribution:
    if n < 1:
        raise ValueError("n must be >= 1")
    m = np.arange(n + 1)
    return ProfileDistribution.from_log2(n, log2_binomial(n, m) + profile_exponent(nf, n))


def unary_profile_masses_exact(nf: UnaryProfileNF, n: int) -> list[int]:
    """``mu(W_n^m)`` as exact integers; needs integral exponents."""
    out = []
    for m, e in enumerate(profile_exponent_exact(nf, n)):
        if e.denominator != 1:
            raise MlnError("exponent is not an integer; exact masses unavailable")
        out.append(comb(n, m) << int(e))
    return out


def profile_by_enumeration(m: Mln, n: int, method: str = "enumeration",
                           budget: int = DEFAULT_BUDGET, threads: int = 1) -> ProfileDistribution:
    """The colour-count distribution computed without the normal form."""
    if not m.signature.is_single_unary():
        raise MlnError("profile needs a single unary symbol")
    sym = m.signature.symbols[0].name
    eng = _Engine(m, n, method=method, budget=budget, threads=threads)
    masses = eng.log2_masses({"m": lambda rels, c, n_: rels[sym].sum(axis=1)})["m"]
    return ProfileDistribution.from_log2(n, [masses.get(k, -math.inf) for k in range(n + 1)])


def profile_distribution(m: Mln, n: int, budget: int = DEFAULT_BUDGET) -> ProfileDistribution:
    """Profile of any MLN over one unary symbol, by the cheapest exact route."""
    if m.quantifier_free:
        return unary_profile_distribution(unary_normal_form(m), n)
    return profile_by_enumeration(m, n, method="representatives", budget=budget)


# ------------------------------------------------------- public reductions

def log2_partition(m: Mln, n: int, budget: int = DEFAULT_BUDGET, threads: int = 1,
                   method: str = "auto") -> float:
    """``log2`` of the partition function ``mu(W_n)``."""
    if method == "auto" and m.signature.is_single_unary() and m.quantifier_free:
        dist_lw = log2_binomial(n, np.arange(n + 1)) + profile_exponent(unary_normal_form(m), n)
        return log2_sum(dist_lw)
    if method == "profile":
        method = "representatives"
    eng = _Engine(m, n, method=method, budget=budget, threads=threads)
    return eng.log2_masses({"all": _all})["all"][0]


def partition_exact(m: Mln, n: int, budget: int = DEFAULT_BUDGET, threads: int = 1,
                    method: str = "auto") -> int:
    """``mu(W_n)`` as an exact integer (integer weights only)."""
    eng = _Engine(m, n, method=method, budget=budget, threads=threads)
    return eng.exact_masses({"all": _all})["all"][0]


def world_log2_weights(m: Mln, n: int, budget: int = 1 << 16) -> tuple[np.ndarray, np.ndarray]:
    """``(world indices, log2 mu)`` for every world; small domains only."""
    eng = _Engine(m, n, method="enumeration", budget=budget)
    idx = np.arange(eng.grounding.num_worlds, dtype=np.uint64)
    counts = eng.counts(eng.grounding.relation_arrays(idx))
    w = np.asarray(m.weights, dtype=float)
    e = w @ counts if len(w) else np.zeros(len(idx))
    return idx, e


@dataclass(frozen=True)
class EventProbability:
    value: float
    method: str  # "exact-enumeration" or "profile-exact"
    exact: Fraction | None = None

    def __float__(self) -> float:
        return self.value


def _as_event(event, signature) -> ev.Event:
    if isinstance(event, ev.Event):
        return event
    if isinstance(event, Formula):
        return ev.sentence_event(event, signature)
    raise TypeError(f"cannot use {event!r} as an event")


def event_probabilities(m: Mln, n: int, events, budget: int = DEFAULT_BUDGET,
                        threads: int = 1, method: str = "auto", exact: bool = False
                        ) -> list[EventProbability]:
    """Probabilities of several events (Formula sentences or :class:`Event`) at once."""
    events = [_as_event(e, m.signature) for e in events]
    depth = max((e.depth for e in events), default=1)
    invariant = all(e.invariant for e in events)
    if method in ("representatives", "profile") and not invariant:
        raise MlnError("events that name specific elements need enumeration")
    if method == "profile":
        method = "representatives"
    eng = _Engine(m, n, method=method, budget=budget, threads=threads, depth=depth,
                  invariant=invariant)
    label = "profile-exact" if eng.method == "representatives" else "exact-enumeration"
    keys = {"all": _all}
    for i, e in enumerate(events):
        keys[f"e{i}"] = (lambda e_: lambda rels, c, n_: e_.batch(rels, n_))(e)
    if exact:
        masses = eng.exact_masses(keys)
        z = masses["all"][0]
        out = []
        for i in range(len(events)):
            frac = Fraction(masses[f"e{i}"].get(1, 0), z)
            out.append(EventProbability(float(frac), label, frac))
        return out
    masses = eng.log2_masses(keys)
    z = masses["all"][0]
    return [EventProbability(min(1.0, 2.0 ** (masses[f"e{i}"].get(1, -math.inf) - z)), label)
            for i in range(len(events))]


def event_probability(m: Mln, n: int, event, budget: int = DEFAULT_BUDGET, threads: int = 1,
                      method: str = "auto", exact: bool = False) -> EventProbability:
    return event_probabilities(m, n, [event], budget, threads, method, exact)[0]


def statistic_distribution(m: Mln, n: int, key: KeyFn, budget: int = DEFAULT_BUDGET,
                           threads: int = 1, method: str = "auto") -> dict[int, float]:
    """Exact distribution of an integer statistic of the world."""
    eng = _Engine(m, n, method=method, budget=budget, threads=threads)
    masses = eng.log2_masses({"all": _all, "key": key})
    z = masses["all"][0]
    return {k: 2.0 ** (v - z) for k, v in masses["key"].items()}


# ------------------------------------------------------------ derived

def tv_distance(p, q) -> float:
    """Total variation distance ``1/2 sum |p - q|`` of two distributions.

    Accepts equal-length sequences or mappings over the same outcome set.
    """
    if isinstance(p, Mapping) or isinstance(q, Mapping):
        if not (isinstance(p, Mapping) and isinstance(q, Mapping)) or set(p) != set(q):
            raise ValueError("distributions are over different outcome sets")
        keys = sorted(p)
        p, q = [p[k] for k in keys], [q[k] for k in keys]
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"outcome sets differ in size: {p.shape} vs {q.shape}")
    for name, d in (("p", p), ("q", q)):
        if np.any(d < -1e-15) or abs(math.fsum(d) - 1.0) > 1e-9:
            raise ValueError(f"{name} is not a normalised distribution")
    return min(1.0, 0.5 * math.fsum(np.abs(p - q)))


def independence_gap(m: Mln, n: int, a: int, b: int, budget: int = DEFAULT_BUDGET) -> float:
    """``P(R(a) & R(b)) - P(R(a)) P(R(b))`` for a single unary symbol.

    Worlds with the same number of coloured elements are isomorphic, so the
    marginals follow from the colour-count distribution.
    """
    if a == b:
        raise ValueError("independence gap needs two different elements")
    if not (0 <= a < n and 0 <= b < n):
        raise ValueError(f"elements must lie in [0, {n})")
    if not m.signature.is_single_unary():
        raise MlnError("independence gap is defined for a single unary symbol")
    prob = profile_distribution(m, n, budget).prob
    ms = np.arange(n + 1, dtype=float)
    p_one = math.fsum(prob * ms / n)
    p_two = math.fsum(prob * ms * (ms - 1) / (n * (n - 1)))
    return p_two - p_one * p_one


def violation_threshold(m: Mln, n: int) -> float:
    """``r n^rho / w`` for the single weighted constraint of ``m``."""
    if len(m.constraints) != 1:
        raise MlnError("the violation tail needs exactly one soft constraint")
    w = m.constraints[0].weight
    if w <= 0:
        raise MlnError("the violation tail needs a positive weight")
    sig = m.signature
    return sig.r * n ** sig.rho / float(w)


def violation_tail_probability(m: Mln, n: int, budget: int = DEFAULT_BUDGET,
                               threads: int = 1, method: str = "auto") -> float:
    """Probability that at most ``r n^rho / w`` tuples violate the constraint."""
    limit = violation_threshold(m, n)
    k = m.constraints[0].arity

    def within(rels, counts, n_):
        return (n_ ** k - counts[0]) <= limit

    eng = _Engine(m, n, method=method, budget=budget, threads=threads)
    masses = eng.log2_masses({"all": _all, "y": within})
    return min(1.0, 2.0 ** (masses["y"].get(1, -math.inf) - masses["all"][0]))
