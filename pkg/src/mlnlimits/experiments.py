"""Registry of desk-scale experiments, one per limit result, with verdicts.

Every check carries the number of the acceptance criterion it serves.  A
verdict is one of ``pass``, ``fail``, ``not-mixed``, ``inconclusive`` or
``vacuous-bound``; the last is informational and never affects the exit code.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction
import io
import json
import math
from math import comb
from pathlib import Path
import random
import time
from typing import Callable

import numpy as np

from . import events as ev
from . import models
from .asymptotics import (bernstein_poly, entropy_perturbed_max, global_maxima,
                          is_constant_weights, predict_limit, star_profile_log2,
                          star_reference_mass, star_window, triangle_bound)
from .exact import (ProfileDistribution, event_probabilities, event_probability,
                    profile_by_enumeration, profile_exponent_exact, tv_distance,
                    unary_profile_distribution, violation_tail_probability,
                    independence_gap, violation_threshold)
from .logic import Grounding, parse_formula
from .mln import Mln, log2_mu
from .normalform import normalize_qf, unary_normal_form
from .sampler import (ChainState, estimate_event, estimate_statistic_histogram,
                      make_dynamics, transition_matrix)

VERDICTS = ("pass", "fail", "not-mixed", "inconclusive", "vacuous-bound")


class ExperimentError(ValueError):
    pass


@dataclass
class ExperimentSpec:
    name: str
    params: dict = field(default_factory=dict)
    mode: str = "auto"  # exact | sample | auto
    seed: int = 0
    threads: int = 1
    chains: int = 4
    samples: int = 200
    burn_in: int | None = None
    thin: int | None = None
    max_rhat: float = 1.1
    out: str | None = None

    def __post_init__(self):
        if self.name not in REGISTRY:
            raise ExperimentError(f"unknown experiment {self.name!r}; valid names: "
                                  f"{', '.join(REGISTRY)}")
        if self.mode not in ("exact", "sample", "auto"):
            raise ExperimentError(f"mode must be exact, sample or auto, not {self.mode!r}")
        unknown = set(self.params) - set(REGISTRY[self.name].defaults)
        if unknown:
            raise ExperimentError(f"unknown parameters for {self.name}: {sorted(unknown)}")

    def param(self, key):
        return self.params.get(key, REGISTRY[self.name].defaults[key])

    @property
    def exact(self) -> bool:
        return self.mode in ("exact", "auto")

    @property
    def sample(self) -> bool:
        return self.mode in ("sample", "auto")

    def sampler_kwargs(self) -> dict:
        return dict(chains=self.chains, samples=self.samples, burn_in=self.burn_in,
                    thin=self.thin, seed=self.seed, max_rhat=self.max_rhat,
                    workers=self.threads)


@dataclass(frozen=True)
class Check:
    criterion: int
    name: str
    verdict: str
    detail: str = ""


@dataclass
class ExperimentReport:
    name: str
    params: dict
    rows: list[dict] = field(default_factory=list)
    checks: list[Check] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)

    def row(self, **values) -> None:
        self.rows.append(values)

    def check(self, criterion: int, name: str, ok, detail: str = "") -> None:
        verdict = ok if isinstance(ok, str) else ("pass" if ok else "fail")
        if verdict not in VERDICTS:
            raise ValueError(verdict)
        self.checks.append(Check(criterion, name, verdict, detail))

    @property
    def exit_code(self) -> int:
        verdicts = {c.verdict for c in self.checks}
        if "fail" in verdicts:
            return 2
        if verdicts & {"not-mixed", "inconclusive"}:
            return 3
        return 0

    def verdicts_by_criterion(self) -> dict[int, str]:
        order = {"fail": 0, "not-mixed": 1, "inconclusive": 2, "pass": 3, "vacuous-bound": 4}
        out: dict[int, str] = {}
        for c in self.checks:
            if c.verdict == "vacuous-bound":
                continue
            cur = out.get(c.criterion)
            if cur is None or order[c.verdict] < order[cur]:
                out[c.criterion] = c.verdict
        return out

    def to_csv(self) -> str:
        cols: list[str] = []
        for r in self.rows:
            cols += [k for k in r if k not in cols]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in self.rows:
            w.writerow([_fmt(r.get(c, "")) for c in cols])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {"name": self.name, "params": self.params,
                "checks": [c.__dict__ for c in self.checks], "skipped": self.skipped,
                "criteria": {str(k): v for k, v in sorted(self.verdicts_by_criterion().items())}}

    def write(self, out_dir) -> tuple[Path, Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        csv_path, json_path = out / f"{self.name}.csv", out / f"{self.name}.json"
        with open(csv_path, "w", newline="\n") as fh:
            fh.write(self.to_csv())
        with open(json_path, "w", newline="\n") as fh:
            json.dump(self.to_json(), fh, indent=2, default=_json_default)
            fh.write("\n")
        return csv_path, json_path


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    if isinstance(v, (list, tuple)):
        return " ".join(_fmt(x) for x in v)
    return str(v)


def _json_default(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, np.generic):
        return v.item()
    raise TypeError(type(v))


def _strictly(seq, cmp) -> bool:
    return all(cmp(a, b) for a, b in zip(seq, seq[1:]))


def _sampled(rep: ExperimentReport, criterion: int, name: str, est, ok: Callable[[float], bool],
             detail: str = ""):
    rep.row(part=name, quantity="estimate", value=est.mean if est.mixed else "",
            std_error=est.std_error, rhat=est.rhat, status=est.status)
    if not est.mixed:
        rep.check(criterion, name, "not-mixed", f"R-hat {est.rhat:.3g}")
    else:
        rep.check(criterion, name, ok(est.mean),
                  f"estimate {est.mean:.4g} +/- {est.std_error:.2g}, R-hat {est.rhat:.3g} {detail}")


# ------------------------------------------------------------ entries

def _two_point(spec: ExperimentSpec, rep: ExperimentReport):
    m = models.two_point()
    if spec.exact:
        n = spec.param("n")
        nf = unary_normal_form(m)
        dist = unary_profile_distribution(nf, n)
        masses = [comb(n, k) << int(e) for k, e in enumerate(profile_exponent_exact(nf, n))]
        gap = independence_gap(m, n, 0, 1)
        ends = dist.prob[0] + dist.prob[n]
        rep.row(part="exact", n=n, quantity="prob[0]", value=dist.prob[0])
        rep.row(part="exact", n=n, quantity="prob[n]", value=dist.prob[n])
        rep.row(part="exact", n=n, quantity="independence_gap", value=gap)
        rep.check(3, "prob[0] == prob[n] (exact integers)", masses[0] == masses[n]
                  and dist.prob[0] == dist.prob[n])
        rep.check(3, "prob[0] + prob[n] >= 0.999", ends >= 0.999, f"{ends:.6f}")
        rep.check(3, "independence gap >= 0.2", gap >= 0.2, f"{gap:.6f}")
    if spec.sample:
        n = spec.param("sample_n")
        hist = estimate_statistic_histogram(m, n, "m", **spec.sampler_kwargs())
        exact = unary_profile_distribution(unary_normal_form(m), n)
        half = n // 2
        low = exact.mass(0, (n - 1) // 2) + (exact.prob[half] / 2 if n % 2 == 0 else 0.0)
        freq = hist.basin_frequencies({False: low, True: 1.0 - low})
        mass = freq.get(0, 0.0) + freq.get(n, 0.0)
        rep.row(part="sample per-basin", n=n, quantity="mass on {0,n}", value=mass,
                rhat=hist.summary.rhat, status=hist.summary.status)
        rep.check(3, "sampled mass on {0,n} >= 0.95 (per-basin, exact basin weights)",
                  mass >= 0.95, f"{mass:.4f}; chains not pooled, R-hat {hist.summary.rhat:.3g}")


def _near_mass(dist: ProfileDistribution, points, radius: float) -> float:
    ms = np.arange(dist.n + 1) / dist.n
    near = np.min(np.abs(ms[:, None] - np.asarray(points)[None, :]), axis=1) <= radius + 1e-12
    return math.fsum(dist.prob[near])


def _oracle_equivalence(spec, rep):
    t0 = time.perf_counter()
    worst = 0.0
    for seed in range(spec.param("suite")):
        m = models.random_unary_mln(seed)
        nf = unary_normal_form(m)
        for n in range(1, spec.param("oracle_n") + 1):
            a = unary_profile_distribution(nf, n).prob
            b = profile_by_enumeration(m, n, method="enumeration").prob
            worst = max(worst, float(np.max(np.abs(a - b) / np.maximum(b, 1e-300))))
    took = time.perf_counter() - t0
    rep.row(part="oracle", quantity="max relative error", value=worst, seconds=round(took, 1))
    rep.check(1, "profile engine == enumeration within 1e-9", worst <= 1e-9, f"{worst:.3g}")
    rep.check(1, "oracle suite runtime < 60 s", took < 60, f"{took:.1f} s")


def _nf_preservation(spec, rep):
    bad = 0
    for seed in range(spec.param("suite")):
        m = models.random_unary_mln(seed, rational=True)
        norm, nf = normalize_qf(m), unary_normal_form(m)
        for n in range(1, spec.param("nf_n") + 1):
            g = Grounding(m.signature, n)
            prof = profile_exponent_exact(nf, n)
            for i in range(g.num_worlds):
                w = g.world(i)
                a = log2_mu(m, w, exact=True)
                if a != log2_mu(norm, w, exact=True) or a != prof[w.size("R")]:
                    bad += 1
    rep.row(part="normal form", quantity="worlds with mu mismatch", value=bad)
    rep.check(2, "normalize_qf and unary_normal_form preserve mu exactly", bad == 0)


def _colour_limits(spec: ExperimentSpec, rep: ExperimentReport):
    n, radius = spec.param("n"), spec.param("radius")
    if spec.exact:
        _oracle_equivalence(spec, rep)
        _nf_preservation(spec, rep)
        suite = [(f"random seed {s}", models.random_unary_mln(s)) for s in range(spec.param("random"))]
        suite.append(("two-point", models.two_point()))
        for label, m in suite:
            nf = unary_normal_form(m)
            lp = predict_limit(nf)
            mass = _near_mass(unary_profile_distribution(nf, n), lp.points, radius)
            rep.row(part="prediction", model=label, case=lp.case, points=list(lp.points),
                    n=n, quantity="mass within radius", value=mass)
            rep.check(4, f"{label}: mass within {radius} of predicted points >= 0.99",
                      mass >= 0.99, f"{mass:.4f} around {[round(p, 4) for p in lp.points]}")
        for w1, w0 in spec.param("entropy_family"):
            dist = unary_profile_distribution(unary_normal_form(models.colour(w1, w0)), n)
            arg = int(np.argmax(dist.prob)) / n
            target = entropy_perturbed_max(w0, w1)
            rep.row(part="entropy balance", w1=w1, w0=w0, n=n, quantity="argmax m/n", value=arg,
                    target=target)
            rep.check(4, f"entropy balance w1={w1}, w0={w0}: argmax within 0.02",
                      abs(arg - target) <= 0.02, f"{arg:.4f} vs {target:.4f}")
        # constancy of Bernstein forms against the all-equal predicate
        rng = random.Random(spec.seed)
        disagree = 0
        for _ in range(spec.param("constancy_trials")):
            k = rng.randint(1, 6)
            if rng.random() < 0.3:
                w = [rng.choice([0, 1, 2.5, 3])] * (k + 1)
            else:
                w = [rng.choice([0, 1, 2, rng.uniform(0, 4)]) for _ in range(k + 1)]
            equal = len(set(w)) == 1
            disagree += is_constant_weights(w) != equal
            disagree += bernstein_poly(w).is_constant() != equal
        rep.row(part="constancy", quantity="disagreements", value=disagree)
        rep.check(9, "Bernstein constancy == all weights equal", disagree == 0)
        pts, val = global_maxima(bernstein_poly([1, 0, 1]))
        rep.check(11, "global_maxima(1 - 2a + 2a^2) = {0, 1}",
                  pts == [0.0, 1.0] and abs(val - 1) < 1e-12)
        rep.check(11, "entropy_perturbed_max(w0, w0) = 1/2", entropy_perturbed_max(1.5, 1.5) == 0.5)


def _star_separation(spec: ExperimentSpec, rep: ExperimentReport):
    t0 = time.perf_counter()
    n, eps = spec.param("n"), spec.param("eps")
    lo, hi = star_window(n, eps)
    ref = star_reference_mass(n, eps)
    two = unary_profile_distribution(unary_normal_form(models.two_point()), n)
    star = ProfileDistribution.from_log2(n, star_profile_log2(n))
    window = two.mass(lo, hi)
    tv = tv_distance(two.prob, star.prob)
    took = time.perf_counter() - t0
    rep.row(n=n, eps=eps, window=f"{lo}..{hi}", quantity="reference mass", value=ref)
    rep.row(n=n, eps=eps, window=f"{lo}..{hi}", quantity="two-point mass", value=window)
    rep.row(n=n, eps=eps, window=f"{lo}..{hi}", quantity="tv distance", value=tv)
    rep.check(5, "reference mass >= 0.99", ref >= 0.99, f"{ref:.6f}")
    rep.check(5, "two-point window mass <= 0.01", window <= 0.01, f"{window:.3g}")
    rep.check(5, "tv distance >= 0.98", tv >= 0.98, f"{tv:.6f}")
    rep.check(5, "runtime < 10 s", took < 10, f"{took:.2f} s")


def _triangle(spec: ExperimentSpec, rep: ExperimentReport):
    delta = spec.param("delta")
    if spec.exact:
        t0 = time.perf_counter()
        n = spec.param("n")
        probs = []
        for w in spec.param("weights"):
            p = event_probability(models.triangle(w), n, ev.triangle_free(), threads=spec.threads)
            probs.append(p.value)
            bound = triangle_bound(w, delta) if w > 0 else None
            rep.row(part="exact", n=n, w=w, quantity="P(triangle-free)", value=p.value,
                    bound="" if bound is None else bound)
            if bound is not None and bound < 0:
                rep.check(6, f"asymptotic bound at w={w}, delta={delta}", "vacuous-bound",
                          f"{bound:.4f} < 0")
        rep.check(6, f"P(triangle-free) strictly increasing in w at n={n}",
                  _strictly(probs, lambda a, b: a < b), " < ".join(f"{p:.6f}" for p in probs))
        rep.check(6, "w=4 exceeds uniform by >= 0.3", probs[-1] - probs[0] >= 0.3,
                  f"{probs[-1] - probs[0]:.4f}")
        sanity = event_probability(models.triangle(0), 4, ev.triangle_free(), exact=True).exact
        rep.row(part="sanity", n=4, w=0, quantity="P(triangle-free)", value=float(sanity),
                exact=str(sanity))
        rep.check(6, "n=4, w=0 sanity value 38/64", sanity == Fraction(38, 64),
                  f"computed {sanity} = {sanity * 64}/64")
        rep.check(11, "triangle_bound(w -> inf, delta) = 1 - delta",
                  abs(triangle_bound(math.inf, delta) - (1 - delta)) <= 1e-12
                  and abs(triangle_bound(60.0, delta) - (1 - delta)) <= 1e-12)
        rep.row(part="timing", quantity="exact seconds", value=round(time.perf_counter() - t0, 1))
        _sampler_correctness(spec, rep)
    if spec.sample:
        n, w = spec.param("sample_n"), spec.param("sample_w")
        est = estimate_event(models.triangle(w), n, ev.triangle_free(), **spec.sampler_kwargs())
        rep.row(part="bound", n=n, w=w, quantity="asymptotic lower bound",
                value=triangle_bound(w, delta))
        _sampled(rep, 6, f"sampled P(triangle-free) >= 0.7 at n={n}, w={w}", est,
                 lambda v: v >= 0.7)


def _sampler_correctness(spec, rep):
    worst = 0.0
    for m in (models.triangle(1.5), models.max_degree(1, 1.0), models.two_point()):
        t, lw = transition_matrix(m, 3)
        p = np.exp2(lw - lw.max())
        p /= p.sum()
        flow = p[:, None] * t
        worst = max(worst, float(np.max(np.abs(flow - flow.T))))
    rep.row(part="sampler", quantity="detailed balance max |P(A)T(A,B) - P(B)T(B,A)|", value=worst)
    rep.check(12, "detailed balance at n=3 within 1e-12", worst <= 1e-12, f"{worst:.3g}")

    steps = spec.param("recount_steps")
    tri, deg = models.triangle(1.0), models.max_degree(2, 0.5)
    mixed = Mln(tri.signature, tri.constraints + deg.constraints)
    dyn = make_dynamics(mixed, 12)
    dyn.fill(False)
    state = ChainState(dyn, np.random.SeedSequence(spec.seed))
    ok = True
    try:
        state.advance(steps, check_every=max(1, steps // 100))
        state.verify()
    except RuntimeError:
        ok = False
    rep.row(part="sampler", quantity="incremental == recount after steps", value=steps)
    rep.check(12, f"incremental statistics equal recount after {steps} steps", ok)

    for m, n, e in ((models.triangle(0), 5, ev.triangle_free()),
                    (models.triangle(0), 7, ev.triangle_free()),
                    (models.colour(0), 6, parse_formula("exists x1 (R(x1))", models.colour(0).signature))):
        exact = event_probability(m, n, e).value
        est = estimate_event(m, n, e, chains=4, samples=spec.param("uniform_samples"),
                             seed=spec.seed)
        rep.row(part="sampler uniform", n=n, quantity=str(getattr(e, "name", e)),
                value=est.mean, exact=exact, std_error=est.std_error)
        rep.check(12, f"w=0 estimate within 3 stderr at n={n}",
                  abs(est.mean - exact) <= 3 * est.std_error,
                  f"{est.mean:.4f} vs {exact:.4f} (se {est.std_error:.3g})")


ZERO_ONE_SUITE = (
    ("exists an edge", "exists x1 (exists x2 (R(x1,x2)))"),
    ("exists an isolated vertex", "exists x1 (forall x2 (~R(x1,x2)))"),
    ("exists a path of length 2",
     "exists x1 (exists x2 (exists x3 (x1 != x3 & R(x1,x2) & R(x2,x3))))"),
)


def _zero_one(spec: ExperimentSpec, rep: ExperimentReport):
    delta, w = spec.param("delta"), spec.param("w")
    m = models.triangle(w)
    sentences = [(label, parse_formula(text, m.signature)) for label, text in ZERO_ONE_SUITE]

    def verdict(v):
        return "pass" if v <= delta or v >= 1 - delta else "inconclusive"

    if spec.exact:
        n = spec.param("n")
        probs = event_probabilities(m, n, [f for _, f in sentences], threads=spec.threads)
        for (label, _), p in zip(sentences, probs):
            rep.row(part="exact", sentence=label, n=n, w=w, value=p.value)
            rep.check(6, f"0-1 dichotomy, exact n={n}: {label}", verdict(p.value), f"{p.value:.4f}")
    if spec.sample:
        n = spec.param("sample_n")
        for label, f in sentences:
            est = estimate_event(m, n, f, **spec.sampler_kwargs())
            rep.row(part="sample", sentence=label, n=n, w=w, value=est.mean if est.mixed else "",
                    std_error=est.std_error, rhat=est.rhat, status=est.status)
            if not est.mixed:
                rep.check(6, f"0-1 dichotomy, sampled n={n}: {label}", "not-mixed")
            else:
                rep.check(6, f"0-1 dichotomy, sampled n={n}: {label}", verdict(est.mean),
                          f"{est.mean:.4f}")


def _max_degree(spec: ExperimentSpec, rep: ExperimentReport):
    if spec.exact:
        delta, w = spec.param("delta"), spec.param("w")
        probs = []
        for n in spec.param("ns"):
            p = event_probability(models.max_degree(delta, w), n, ev.max_degree_at_most(delta),
                                  threads=spec.threads).value
            probs.append(p)
            rep.row(part="exact", n=n, delta=delta, w=w, quantity="P(max degree <= delta)",
                    value=p)
        rep.check(7, f"P(max degree <= {delta}) strictly decreasing in n",
                  _strictly(probs, lambda a, b: a > b), " > ".join(f"{p:.6f}" for p in probs))
    if spec.sample:
        delta, n = spec.param("sample_delta"), spec.param("sample_n")
        for w in spec.param("sample_weights"):
            est = estimate_event(models.max_degree(delta, w), n, ev.max_degree_at_most(delta),
                                 **spec.sampler_kwargs())
            _sampled(rep, 7, f"sampled P(max degree <= {delta}) <= 0.2 at n={n}, w={w}", est,
                     lambda v: v <= 0.2)


def _violation_tail(spec: ExperimentSpec, rep: ExperimentReport):
    n, w = spec.param("n"), spec.param("w")
    m = models.triangle(w)
    p = violation_tail_probability(m, n, threads=spec.threads)
    rep.row(n=n, w=w, threshold=violation_threshold(m, n), quantity="P(violations <= f(n))",
            value=p)
    rep.check(8, f"tail probability >= 0.99 at n={n}, w={w}", p >= 0.99, f"{p:.8f}")


def _quantified_m3(spec: ExperimentSpec, rep: ExperimentReport):
    n, w = spec.param("n"), spec.param("w")
    p = event_probability(models.m3(w), n, ev.coloured_count(3), method="enumeration",
                          exact=True).exact
    c = comb(n, 3)
    closed = Fraction(c * 2 ** (w * n * n), c * 2 ** (w * n * n) + 2 ** n - c)
    rep.row(n=n, w=w, quantity="P(exactly 3 coloured)", value=float(p), exact=str(p))
    rep.check(10, "brute force equals the closed form", p == closed)
    rep.check(10, "P(exactly 3 coloured) >= 0.999", p >= Fraction(999, 1000), f"{float(p):.12f}")


def _clique(spec: ExperimentSpec, rep: ExperimentReport):
    size = spec.param("size")
    name = f"K{size}-free"
    if spec.exact:
        n = spec.param("n")
        probs = []
        for w in spec.param("weights"):
            # integer weights: exact fractions, since 1 - P underflows doubles for large w
            m = models.clique(size, w)
            p = event_probability(m, n, ev.clique_free(size), threads=spec.threads,
                                  exact=m.integer_weights)
            probs.append(p.exact if p.exact is not None else p.value)
            rep.row(part="exact", n=n, w=w, quantity=f"P({name})", value=p.value,
                    complement=float(1 - probs[-1]))
        rep.check(6, f"P({name}) strictly increasing in w at n={n}",
                  _strictly(probs, lambda a, b: a < b),
                  "1 - P: " + " > ".join(f"{float(1 - p):.3g}" for p in probs))
    if spec.sample:
        n, w = spec.param("sample_n"), spec.param("sample_w")
        est = estimate_event(models.clique(size, w), n, ev.clique_free(size),
                             **spec.sampler_kwargs())
        _sampled(rep, 6, f"sampled P({name}) >= 0.7 at n={n}, w={w}", est, lambda v: v >= 0.7)


@dataclass(frozen=True)
class Entry:
    name: str
    theorem: str
    summary: str
    criteria: tuple[int, ...]
    run: Callable
    defaults: dict


REGISTRY: dict[str, Entry] = {e.name: e for e in (
    Entry("two-point", "two-point colour limit", "two limit points of the colour proportion; dependent atoms",
          (3,), _two_point, {"n": 64, "sample_n": 30}),
    Entry("colour-limits", "colour limit profile", "predicted limit points against exact n = 400 profiles",
          (1, 2, 4, 9, 11), _colour_limits,
          {"n": 400, "radius": 0.05, "random": 10, "suite": 20, "oracle_n": 8, "nf_n": 6,
           "entropy_family": [[1, 0], [0, 1], [2, 0], [0.5, 2], [3, 1]], "constancy_trials": 1000}),
    Entry("star-separation", "reference colouring separation", "reference colouring vs the two-point MLN on a window",
          (5,), _star_separation, {"n": 10_000, "eps": 0.1}),
    Entry("triangle", "triangle-free lower bound", "triangle-free probability against weight, with the bound",
          (6, 11, 12), _triangle,
          {"n": 7, "weights": [0, 1, 2, 4], "delta": 0.1, "sample_n": 40, "sample_w": 6,
           "recount_steps": 100_000, "uniform_samples": 400}),
    Entry("zero-one", "approximate zero-one law", "first-order sentences end up near 0 or near 1",
          (6,), _zero_one, {"n": 7, "w": 6, "delta": 0.1, "sample_n": 40}),
    Entry("max-degree", "bounded degree vanishes", "probability of bounded maximum degree against n",
          (7,), _max_degree,
          {"n": 7, "ns": [5, 6, 7], "delta": 1, "w": 4, "sample_n": 40, "sample_delta": 2,
           "sample_weights": [2, 6]}),
    Entry("violation-tail", "violation tail", "few violations of the soft constraint",
          (8,), _violation_tail, {"n": 7, "w": 4}),
    Entry("quantified-m3", "quantified three-colour MLN", "quantified MLN concentrating on three coloured",
          (10,), _quantified_m3, {"n": 10, "w": 1}),
    Entry("clique", "clique generalisation", "clique-free probability against weight",
          (6,), _clique, {"size": 4, "n": 6, "weights": [0, 1, 2, 4], "sample_n": 30,
                          "sample_w": 6}),
)}


def list_experiments() -> list[dict]:
    return [{"name": e.name, "theorem": e.theorem, "summary": e.summary,
             "criteria": list(e.criteria)} for e in REGISTRY.values()]


def run_experiment(spec: ExperimentSpec) -> ExperimentReport:
    entry = REGISTRY[spec.name]
    params = {**entry.defaults, **spec.params}
    rep = ExperimentReport(spec.name, {**params, "mode": spec.mode, "seed": spec.seed})
    entry.run(spec, rep)
    if spec.mode == "exact":
        rep.skipped.append("sampler checks (mode=exact)")
    elif spec.mode == "sample":
        rep.skipped.append("exact checks (mode=sample)")
    if spec.out:
        rep.write(spec.out)
    return rep
