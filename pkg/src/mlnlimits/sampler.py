"""Single-site Gibbs sampling from MLN distributions on larger domains.

Each step picks one ground atom and redraws it from its exact conditional
given the rest of the world.  The conditional only needs the change in
``log2 mu`` caused by the atom, which the dynamics classes below compute
incrementally:

* graphs whose constraints are all recognised patterns keep adjacency
  bitsets, degrees and per-constraint violation counts;
* a single unary symbol keeps the colour count ``m``, since ``mu`` depends
  on the world only through ``m``;
* anything else recounts ``log2 mu`` from scratch (slow, small ``n`` only).

Randomness comes from numpy's Philox counter-based generator.  A master seed
is split with ``SeedSequence.spawn`` into one independent stream per chain,
so results depend only on the seed and the configuration.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import io
import math
import multiprocessing as mp
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence

import numpy as np

from . import events as ev
from .logic import Formula, Grounding, World
from .logic.graphstats import _clique_count
from .logic.world import ground_atoms
from .mln import Mln, MlnError, constraint_count, log2_mu
from .normalform import unary_normal_form
from .patterns import DegreeBound, NoClique, classify

RHAT_LIMIT = 1.1
_BLOCK = 4096


class NotMixed(RuntimeError):
    """Chains disagree (split R-hat above the limit); no estimate is reported."""


def present_probability(d: float) -> float:
    """``2^d / (1 + 2^d)`` without overflow for any finite ``d``."""
    if d >= 0:
        return 1.0 / (1.0 + 2.0 ** -d) if d < 1100 else 1.0
    return 0.0 if d < -1100 else (t := 2.0 ** d) / (1.0 + t)


# ------------------------------------------------------------- dynamics

class Dynamics:
    """Mutable world plus whatever is needed to score one-atom changes."""

    num_atoms: int
    statistic_names: tuple[str, ...] = ()

    def load(self, world: World) -> None:
        raise NotImplementedError

    def fill(self, present: bool) -> None:
        """Reset to the empty (False) or complete (True) structure."""
        raise NotImplementedError

    def get(self, i: int) -> bool:
        raise NotImplementedError

    def delta(self, i: int) -> float:
        """``log2 mu`` with atom ``i`` present minus with it absent."""
        raise NotImplementedError

    def set(self, i: int, value: bool) -> None:
        raise NotImplementedError

    def world(self) -> World:
        raise NotImplementedError

    def statistic(self, name: str) -> int:
        raise NotImplementedError

    def tracked(self) -> tuple[int, ...]:
        """Incrementally maintained integers, comparable with :meth:`recount`."""
        raise NotImplementedError

    def recount(self) -> tuple[int, ...]:
        raise NotImplementedError


class GraphDynamics(Dynamics):
    """One irreflexive-symmetric binary symbol, every constraint a known pattern."""

    def __init__(self, m: Mln, n: int):
        sym = m.signature.symbols[0]
        self.m, self.n, self.symbol = m, n, sym.name
        self.patterns = [classify(c.formula, m.signature) for c in m.constraints]
        if any(p is None for p in self.patterns):
            raise MlnError("graph dynamics needs every constraint to be a known pattern")
        self.weights = [float(c.weight) for c in m.constraints]
        self.pairs = ground_atoms(sym, n)
        self.num_atoms = len(self.pairs)
        self.statistic_names = ("edges", "triangles", "max_degree") + tuple(
            f"violations:{j}" for j in range(len(self.patterns)))
        self.fill(False)

    def _bump(self, a: int, b: int) -> list[int]:
        # violation increase of every constraint if edge ab is added
        rows = self.rows
        out = []
        for p in self.patterns:
            if isinstance(p, NoClique):
                k = p.size - 2
                common = rows[a] & rows[b]
                c = common.bit_count() if k == 1 else _clique_count(common, rows, k)
                out.append(math.factorial(p.size) * c)
            else:
                ea = rows[a] >> b & 1
                out.append(p.violation_delta_degrees(self.deg[a] - ea, self.deg[b] - ea))
        return out

    def load(self, world: World) -> None:
        self.rows = list(world.adjacency_bits(self.symbol))
        self.deg = [r.bit_count() for r in self.rows]
        self.edges = sum(self.deg) // 2
        self.viol = self._violations()

    def fill(self, present: bool) -> None:
        full = (1 << self.n) - 1
        self.rows = [(full ^ (1 << v)) if present else 0 for v in range(self.n)]
        self.deg = [r.bit_count() for r in self.rows]
        self.edges = sum(self.deg) // 2
        self.viol = self._violations()

    def get(self, i: int) -> bool:
        a, b = self.pairs[i]
        return bool(self.rows[a] >> b & 1)

    def delta(self, i: int) -> float:
        a, b = self.pairs[i]
        return -math.fsum(w * d for w, d in zip(self.weights, self._bump(a, b)))

    def set(self, i: int, value: bool) -> None:
        a, b = self.pairs[i]
        if bool(self.rows[a] >> b & 1) == value:
            return
        bump = self._bump(a, b)
        sign = 1 if value else -1
        self.rows[a] ^= 1 << b
        self.rows[b] ^= 1 << a
        self.deg[a] += sign
        self.deg[b] += sign
        self.edges += sign
        for j, d in enumerate(bump):
            self.viol[j] += sign * d

    def world(self) -> World:
        edges = [(a, b) for a, b in self.pairs if self.rows[a] >> b & 1]
        return World.graph(self.n, edges, self.symbol, self.m.signature)

    def statistic(self, name: str) -> int:
        if name == "edges":
            return self.edges
        if name == "triangles":
            return _clique_count((1 << self.n) - 1, self.rows, 3)
        if name == "max_degree":
            return max(self.deg)
        if name.startswith("violations:"):
            return self.viol[int(name.split(":", 1)[1])]
        raise KeyError(name)

    def tracked(self) -> tuple[int, ...]:
        return (self.edges, *self.deg, *self.viol)

    def _violations(self) -> list[int]:
        full = (1 << self.n) - 1
        out = []
        for p in self.patterns:
            if isinstance(p, NoClique):
                out.append(math.factorial(p.size) * _clique_count(full, self.rows, p.size))
            else:
                out.append(sum(math.perm(r.bit_count(), p.max_degree + 1) for r in self.rows))
        return out

    def recount(self) -> tuple[int, ...]:
        deg = [r.bit_count() for r in self.rows]
        return (sum(deg) // 2, *deg, *self._violations())


class UnaryDynamics(Dynamics):
    """One unary symbol: ``log2 mu`` is a function ``L(m)`` of the colour count."""

    statistic_names = ("m",)

    def __init__(self, m: Mln, n: int):
        self.m, self.n = m, n
        self.symbol = m.signature.symbols[0].name
        self.num_atoms = n
        if m.quantifier_free:
            from .exact import profile_exponent
            self._levels = [float(x) for x in profile_exponent(unary_normal_form(m), n)]
        else:
            self._levels = [None] * (n + 1)
        self.fill(False)

    def level(self, k: int) -> float:
        lv = self._levels[k]
        if lv is None:
            lv = self._levels[k] = log2_mu(self.m, World.coloured(self.n, range(k), self.symbol,
                                                                  self.m.signature))
        return lv

    def load(self, world: World) -> None:
        self.bits = [False] * self.n
        for (v,) in world.relations[self.symbol]:
            self.bits[v] = True
        self.count = sum(self.bits)

    def fill(self, present: bool) -> None:
        self.bits = [present] * self.n
        self.count = self.n if present else 0

    def get(self, i: int) -> bool:
        return self.bits[i]

    def delta(self, i: int) -> float:
        k = self.count - self.bits[i]
        return self.level(k + 1) - self.level(k)

    def set(self, i: int, value: bool) -> None:
        if self.bits[i] != value:
            self.bits[i] = value
            self.count += 1 if value else -1

    def world(self) -> World:
        return World.coloured(self.n, [v for v, b in enumerate(self.bits) if b], self.symbol,
                              self.m.signature)

    def statistic(self, name: str) -> int:
        if name == "m":
            return self.count
        raise KeyError(name)

    def tracked(self) -> tuple[int, ...]:
        return (self.count,)

    def recount(self) -> tuple[int, ...]:
        return (sum(self.bits),)


class GenericDynamics(Dynamics):
    """Any signature; rescoring recounts every constraint on the whole world."""

    def __init__(self, m: Mln, n: int):
        self.m, self.n = m, n
        self.grounding = Grounding(m.signature, n)
        self.num_atoms = self.grounding.num_atoms
        self.statistic_names = tuple(f"violations:{j}" for j in range(len(m.constraints)))
        self.fill(False)

    def _counts(self, index: int) -> list[int]:
        w = self.grounding.world(index)
        return [constraint_count(c, w) for c in self.m.constraints]

    def _log2(self, counts) -> float:
        return math.fsum(float(c.weight) * k for c, k in zip(self.m.constraints, counts))

    def load(self, world: World) -> None:
        self.index = self.grounding.index(world)
        self.counts = self._counts(self.index)

    def fill(self, present: bool) -> None:
        self.index = (1 << self.num_atoms) - 1 if present else 0
        self.counts = self._counts(self.index)

    def get(self, i: int) -> bool:
        return bool(self.index >> i & 1)

    def delta(self, i: int) -> float:
        on, off = self.index | 1 << i, self.index & ~(1 << i)
        cur = self._log2(self.counts)
        other = self._log2(self._counts(off if self.get(i) else on))
        return cur - other if self.get(i) else other - cur

    def set(self, i: int, value: bool) -> None:
        if self.get(i) != value:
            self.index ^= 1 << i
            self.counts = self._counts(self.index)

    def world(self) -> World:
        return self.grounding.world(self.index)

    def statistic(self, name: str) -> int:
        if name.startswith("violations:"):
            j = int(name.split(":", 1)[1])
            c = self.m.constraints[j]
            return self.n ** c.arity - self.counts[j]
        raise KeyError(name)

    def tracked(self) -> tuple[int, ...]:
        return tuple(self.counts)

    def recount(self) -> tuple[int, ...]:
        return tuple(self._counts(self.index))


def make_dynamics(m: Mln, n: int) -> Dynamics:
    sig = m.signature
    if sig.is_single_unary():
        return UnaryDynamics(m, n)
    if (len(sig.symbols) == 1 and sig.symbols[0].arity == 2 and sig.symbols[0].symmetric
            and all(classify(c.formula, sig) is not None for c in m.constraints)):
        return GraphDynamics(m, n)
    return GenericDynamics(m, n)


def gibbs_step(dyn: Dynamics, site: int, u: float) -> bool:
    """Redraw atom ``site`` from its conditional using the uniform ``u``; returns the new value."""
    value = u < present_probability(dyn.delta(site))
    dyn.set(site, value)
    return value


def transition_matrix(m: Mln, n: int) -> tuple[np.ndarray, np.ndarray]:
    """One-step random-site kernel over all worlds, with each world's ``log2 mu``.

    Rows and columns follow the world-index order of :class:`Grounding`.
    """
    g = Grounding(m.signature, n)
    if g.num_worlds > 1 << 12:
        raise MlnError("transition matrix is for tiny domains only")
    dyn = make_dynamics(m, n)
    if g.num_atoms != dyn.num_atoms:
        raise MlnError("dynamics and grounding disagree on the atoms")
    size = g.num_worlds
    t = np.zeros((size, size))
    weights = np.zeros(size)
    for a in range(size):
        world = g.world(a)
        weights[a] = log2_mu(m, world)
        dyn.load(world)
        for i in range(g.num_atoms):
            p = present_probability(dyn.delta(i))
            t[a, a | 1 << i] += p / g.num_atoms
            t[a, a & ~(1 << i)] += (1 - p) / g.num_atoms
    return t, weights


# --------------------------------------------------------------- chains

@dataclass(frozen=True)
class ChainConfig:
    burn_in: int
    samples: int
    thin: int
    scan: str = "random"  # or "systematic"
    check_every: int = 0  # compare incremental statistics with a recount

    def __post_init__(self):
        if self.scan not in ("random", "systematic"):
            raise ValueError(f"unknown scan {self.scan!r}")
        if self.samples < 2 or self.thin < 1 or self.burn_in < 0:
            raise ValueError("need samples >= 2, thin >= 1, burn_in >= 0")


def default_config(num_atoms: int, samples: int = 200, burn_in=None, thin=None,
                   scan: str = "random", check_every: int = 0) -> ChainConfig:
    return ChainConfig(50 * num_atoms if burn_in is None else burn_in, samples,
                       num_atoms if thin is None else thin, scan, check_every)


class ChainState:
    """A running chain: dynamics, its random stream, and the step counter."""

    def __init__(self, dyn: Dynamics, seed: np.random.SeedSequence, scan: str = "random"):
        self.dyn, self.scan = dyn, scan
        self.rng = np.random.Generator(np.random.Philox(seed))
        self.step_counter = 0
        self._sites: list[int] = []
        self._us: list[float] = []
        self._pos = 0

    def _refill(self):
        a = self.dyn.num_atoms
        self._sites = self.rng.integers(0, a, size=_BLOCK).tolist()
        self._us = self.rng.random(_BLOCK).tolist()
        self._pos = 0

    def advance(self, steps: int, check_every: int = 0) -> None:
        dyn, atoms = self.dyn, self.dyn.num_atoms
        for _ in range(steps):
            if self._pos == len(self._us):
                self._refill()
            if self.scan == "random":
                site = self._sites[self._pos]
            else:
                site = self.step_counter % atoms
            u = self._us[self._pos]
            self._pos += 1
            dyn.set(site, u < present_probability(dyn.delta(site)))
            self.step_counter += 1
            if check_every and self.step_counter % check_every == 0:
                self.verify()

    def verify(self) -> None:
        if self.dyn.tracked() != self.dyn.recount():
            raise RuntimeError(f"incremental statistics drifted at step {self.step_counter}")


Recorder = Callable[[Dynamics], Sequence[float]]


@dataclass
class _Job:
    m: Mln
    n: int
    config: ChainConfig
    record: Recorder
    seeds: list
    starts: list


_ACTIVE: _Job | None = None


def _run_chain(job: _Job, c: int) -> tuple[np.ndarray, int]:
    dyn = make_dynamics(job.m, job.n)
    dyn.fill(job.starts[c])
    state = ChainState(dyn, job.seeds[c], job.config.scan)
    cfg = job.config
    state.advance(cfg.burn_in, cfg.check_every)
    rows = []
    for _ in range(cfg.samples):
        state.advance(cfg.thin, cfg.check_every)
        rows.append(tuple(job.record(dyn)))
    return np.asarray(rows, dtype=float), state.step_counter


def _run_forked(c: int):
    return _run_chain(_ACTIVE, c)


def run_chains(m: Mln, n: int, record: Recorder, chains: int, config: ChainConfig,
               seed: int, workers: int = 1) -> np.ndarray:
    """Samples of shape ``(chains, samples, values)``.

    Even-numbered chains start empty and odd-numbered ones complete.  With
    ``workers > 1`` chains run in forked processes; the result is identical.
    """
    global _ACTIVE
    if chains < 2:
        raise ValueError("need at least two chains")
    seeds = np.random.SeedSequence(seed).spawn(chains)
    job = _Job(m, n, config, record, seeds, [c % 2 == 1 for c in range(chains)])
    if workers > 1 and "fork" in mp.get_all_start_methods():
        _ACTIVE = job
        try:
            with ProcessPoolExecutor(workers, mp_context=mp.get_context("fork")) as pool:
                results = list(pool.map(_run_forked, range(chains)))
        finally:
            _ACTIVE = None
    else:
        results = [_run_chain(job, c) for c in range(chains)]
    return np.stack([r[0] for r in results])


# ------------------------------------------------------------ estimates

def split_rhat(draws: np.ndarray) -> float:
    """Split-chain potential scale reduction of ``draws`` shaped ``(chains, samples)``."""
    draws = np.asarray(draws, dtype=float)
    half = draws.shape[1] // 2
    if half < 2:
        raise ValueError("need at least four samples per chain")
    parts = np.concatenate([draws[:, :half], draws[:, -half:]])
    means = parts.mean(axis=1)
    within = parts.var(axis=1, ddof=1).mean()
    between = half * means.var(ddof=1)
    if within == 0:
        return 1.0 if between == 0 else math.inf
    var_plus = (half - 1) / half * within + between / half
    return math.sqrt(var_plus / within)


@dataclass(frozen=True)
class Estimate:
    mean: float
    std_error: float
    n_chains: int
    samples_per_chain: int
    burn_in: int
    rhat: float = 1.0
    chain_means: tuple[float, ...] = ()
    max_rhat: float = RHAT_LIMIT

    @property
    def mixed(self) -> bool:
        return self.rhat <= self.max_rhat

    @property
    def status(self) -> str:
        return "ok" if self.mixed else "not-mixed"

    def value(self) -> float:
        """The mean, refusing when the chains have not mixed."""
        if not self.mixed:
            raise NotMixed(f"split R-hat {self.rhat:.3g} exceeds {self.max_rhat}")
        return self.mean

    def to_json(self) -> dict:
        out = {"status": self.status,
               "rhat": self.rhat if math.isfinite(self.rhat) else "inf", "n_chains": self.n_chains,
               "samples_per_chain": self.samples_per_chain, "burn_in": self.burn_in}
        if self.mixed:
            out.update(mean=self.mean, std_error=self.std_error)
        return out


def summarize(draws: np.ndarray, burn_in: int, max_rhat: float = RHAT_LIMIT) -> Estimate:
    draws = np.asarray(draws, dtype=float)
    means = draws.mean(axis=1)
    chains, samples = draws.shape
    se = float(means.std(ddof=1) / math.sqrt(chains))
    return Estimate(float(draws.mean()), se, chains, samples, burn_in, split_rhat(draws),
                    tuple(float(x) for x in means), max_rhat)


def _as_predicate(event, m: Mln) -> tuple[str, Callable[[World], bool]]:
    if isinstance(event, ev.Event):
        return event.name, event.world
    if isinstance(event, Formula):
        e = ev.sentence_event(event, m.signature)
        return e.name, e.world
    if callable(event):
        return getattr(event, "__name__", "event"), event
    raise TypeError(f"cannot use {event!r} as an event")


def write_log(stream, draws: np.ndarray, names: Sequence[str], burn_in: int, thin: int) -> None:
    """Stream retained samples as CSV ``chain,step,statistic,value``."""
    stream.write("chain,step,statistic,value\n")
    chains, samples, _ = draws.shape
    for c in range(chains):
        for s in range(samples):
            step = burn_in + (s + 1) * thin
            for j, name in enumerate(names):
                stream.write(f"{c},{step},{name},{draws[c, s, j]:.17g}\n")


def estimate_event(m: Mln, n: int, event, chains: int = 4, burn_in=None, samples: int = 200,
                   thin=None, seed: int = 0, scan: str = "random", max_rhat: float = RHAT_LIMIT,
                   workers: int = 1, check_every: int = 0, log=None) -> Estimate:
    """Probability of ``event`` (an Event, a sentence, or a predicate on worlds)."""
    name, pred = _as_predicate(event, m)
    cfg = default_config(make_dynamics(m, n).num_atoms, samples, burn_in, thin, scan, check_every)
    draws = run_chains(m, n, lambda d: (1.0 if pred(d.world()) else 0.0,), chains, cfg, seed,
                       workers)
    if log is not None:
        write_log(log, draws, [name], cfg.burn_in, cfg.thin)
    return summarize(draws[:, :, 0], cfg.burn_in, max_rhat)


@dataclass(frozen=True)
class StatisticHistogram:
    statistic: str
    draws: np.ndarray = field(repr=False)  # (chains, samples)
    summary: Estimate
    starts: tuple[bool, ...]

    @property
    def values(self) -> list[int]:
        return sorted(set(int(v) for v in self.draws.ravel()))

    def frequencies(self) -> dict[int, float]:
        flat = self.draws.ravel()
        return {v: float(np.mean(flat == v)) for v in self.values}

    def bin_estimates(self) -> dict[int, Estimate]:
        return {v: summarize((self.draws == v).astype(float), self.summary.burn_in,
                             self.summary.max_rhat)
                for v in self.values}

    def basin_frequencies(self, basin_weights: dict[bool, float]) -> dict[int, float]:
        """Frequencies with each start's chains reweighted by an externally known basin mass.

        ``basin_weights`` maps the start (False empty, True complete) to the
        probability of the region its chains stay trapped in.
        """
        out: dict[int, float] = {}
        for start, weight in basin_weights.items():
            rows = self.draws[[i for i, s in enumerate(self.starts) if s == start]]
            if rows.size == 0:
                raise ValueError(f"no chains started from {'complete' if start else 'empty'}")
            for v in self.values:
                out[v] = out.get(v, 0.0) + weight * float(np.mean(rows == v))
        return out


def estimate_statistic_histogram(m: Mln, n: int, statistic: str, chains: int = 4, burn_in=None,
                                 samples: int = 200, thin=None, seed: int = 0,
                                 scan: str = "random", max_rhat: float = RHAT_LIMIT,
                                 workers: int = 1, check_every: int = 0,
                                 log=None) -> StatisticHistogram:
    """Empirical distribution of a named integer statistic of the sampled worlds."""
    dyn = make_dynamics(m, n)
    if statistic not in dyn.statistic_names:
        raise ValueError(f"unknown statistic {statistic!r}; choose from "
                         f"{', '.join(dyn.statistic_names)}")
    cfg = default_config(dyn.num_atoms, samples, burn_in, thin, scan, check_every)
    draws = run_chains(m, n, lambda d: (d.statistic(statistic),), chains, cfg, seed, workers)
    if log is not None:
        write_log(log, draws, [statistic], cfg.burn_in, cfg.thin)
    d = draws[:, :, 0]
    return StatisticHistogram(statistic, d, summarize(d, cfg.burn_in, max_rhat),
                              tuple(c % 2 == 1 for c in range(chains)))


def sample_log_csv(m: Mln, n: int, statistics: Sequence[str], chains: int = 2, samples: int = 50,
                   burn_in=None, thin=None, seed: int = 0) -> str:
    dyn = make_dynamics(m, n)
    cfg = default_config(dyn.num_atoms, samples, burn_in, thin)
    draws = run_chains(m, n, lambda d: [d.statistic(s) for s in statistics], chains, cfg, seed)
    buf = io.StringIO()
    write_log(buf, draws, statistics, cfg.burn_in, cfg.thin)
    return buf.getvalue()
