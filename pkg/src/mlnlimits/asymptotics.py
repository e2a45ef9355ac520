"""Limit predictions for unary MLNs and the closed-form bounds around them."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
import logging
import math
from math import comb
from numbers import Rational

import numpy as np

from .normalform import UnaryProfileNF

log = logging.getLogger(__name__)

MAXIMA_TOL = 1e-9


class ConstantPolynomialError(ValueError):
    pass


def _exact(x) -> Fraction:
    # every finite float is a dyadic rational, so this is lossless
    return Fraction(x)


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial in the monomial basis, ``coeffs[i]`` multiplying ``a**i``."""

    coeffs: tuple

    def __post_init__(self):
        c = list(self.coeffs)
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c) if c else (0,))

    @property
    def degree(self) -> int:
        return 0 if self.coeffs == (0,) else len(self.coeffs) - 1

    def is_constant(self) -> bool:
        return len(self.coeffs) == 1

    def __call__(self, x):
        acc = 0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + (float(c) if isinstance(x, float) or isinstance(x, np.ndarray) else c)
        return acc

    def derivative(self) -> "Polynomial":
        return Polynomial(tuple(i * c for i, c in enumerate(self.coeffs))[1:] or (0,))

    def exact(self) -> "Polynomial":
        return Polynomial(tuple(_exact(c) for c in self.coeffs))


def bernstein_poly(weights) -> Polynomial:
    """Monomial form of ``sum_s w_s C(k,s) a^s (1-a)^(k-s)``.

    The coefficient of ``a^j`` is ``C(k,j)`` times the ``j``-th forward
    difference of the weights.  Differences are taken exactly, so equal
    float weights give exactly zero higher coefficients; float input gives
    float coefficients back.
    """
    w = list(weights)
    k = len(w) - 1
    if k < 0:
        raise ValueError("need at least one weight")
    floats = any(isinstance(x, float) for x in w)
    w = [_exact(x) for x in w]
    coeffs = []
    for j in range(k + 1):
        diff = sum(comb(j, s) * (-1) ** (j - s) * w[s] for s in range(j + 1))
        c = comb(k, j) * diff
        coeffs.append(float(c) if floats else c)
    return Polynomial(tuple(coeffs))


def is_constant_weights(weights) -> bool:
    """Whether the Bernstein combination is constant, decided in exact arithmetic."""
    return bernstein_poly([_exact(x) for x in weights]).is_constant()


# ------------------------------------------------------- root isolation

def _polydiv(num: list, den: list) -> tuple[list, list]:
    num = list(num)
    q = [Fraction(0)] * max(len(num) - len(den) + 1, 1)
    while len(num) >= len(den) and any(num):
        shift = len(num) - len(den)
        factor = num[-1] / den[-1]
        q[shift] = factor
        for i, d in enumerate(den):
            num[i + shift] -= factor * d
        num.pop()
        while num and num[-1] == 0:
            num.pop()
    return q, num


def _gcd(a: list, b: list) -> list:
    while b:
        _, r = _polydiv(a, b)
        a, b = b, r
    return [c / a[-1] for c in a]


def _squarefree(c: list) -> list:
    d = [i * v for i, v in enumerate(c)][1:]
    if not any(d):
        return c
    g = _gcd(c, d)
    if len(g) == 1:
        return c
    q, _ = _polydiv(c, g)
    return q


def sturm_sequence(p: Polynomial) -> list[list[Fraction]]:
    """Sturm chain of the square-free part of ``p`` (same distinct roots)."""
    a = _squarefree([_exact(c) for c in p.coeffs])
    p = Polynomial(tuple(a))
    b = [_exact(c) for c in p.derivative().coeffs]
    seq = [a]
    if any(b):
        seq.append(b)
    while len(seq) > 1 and len(seq[-1]) > 1:
        _, r = _polydiv(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-c for c in r])
    return seq


def _horner(c: list, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for v in reversed(c):
        acc = acc * x + v
    return acc


def _sign_changes(seq, x: Fraction) -> int:
    signs = [v for v in (_horner(c, x) for c in seq) if v != 0]
    return sum(1 for u, v in zip(signs, signs[1:]) if (u < 0) != (v < 0))


def real_roots(p: Polynomial, lo=0, hi=1, tol: float = 1e-13) -> list[float]:
    """Distinct real roots of ``p`` in ``[lo, hi]``, isolated by Sturm sequences.

    Coefficients are taken as exact rationals; each isolating interval is
    bisected down to ``tol`` and the midpoint is polished by Newton steps.
    """
    if p.is_constant():
        if p.coeffs[0] == 0:
            raise ConstantPolynomialError("the zero polynomial has no isolated roots")
        return []
    seq = sturm_sequence(p)
    lo, hi = _exact(lo), _exact(hi)
    exact = p.exact()
    roots = []
    for endpoint in (lo, hi):
        if _horner(list(exact.coeffs), endpoint) == 0:
            roots.append(endpoint)
    # roots strictly inside (lo, hi]; endpoints were handled above
    stack = [(lo, hi, _sign_changes(seq, lo) - _sign_changes(seq, hi))]
    while stack:
        a, b, k = stack.pop()
        if k == 0:
            continue
        if _horner(list(exact.coeffs), b) == 0 and b != hi:
            roots.append(b)
        if k == 1 and b - a < tol:
            mid = (a + b) / 2
            if _horner(list(exact.coeffs), b) != 0:
                roots.append(mid)
            continue
        if b - a < Fraction(1, 10**30):
            roots.append((a + b) / 2)
            continue
        mid = (a + b) / 2
        vm = _sign_changes(seq, mid)
        stack.append((a, mid, _sign_changes(seq, a) - vm))
        stack.append((mid, b, vm - _sign_changes(seq, b)))
    out = sorted(set(float(r) for r in roots))
    simple = Polynomial(tuple(seq[0]))  # every root simple, so Newton converges fast
    return [_newton(simple, x, float(lo), float(hi)) for x in out]


def _newton(p: Polynomial, x: float, lo: float, hi: float) -> float:
    dp = p.derivative()
    for _ in range(3):
        d = float(dp(x))
        if d == 0:
            break
        nxt = x - float(p(x)) / d
        if not lo <= nxt <= hi or abs(nxt - x) > 1e-10:
            break
        x = nxt
    return x


def global_maxima(p: Polynomial, tol: float = MAXIMA_TOL) -> tuple[list[float], float]:
    """All maximisers of ``p`` on ``[0, 1]`` and the maximum value.

    Candidates are the endpoints and the critical points found by isolating
    the roots of ``p'``; points within ``tol`` of each other are merged.
    """
    if p.is_constant():
        raise ConstantPolynomialError("a constant polynomial has no isolated maxima")
    cands = [0.0, 1.0] + [x for x in real_roots(p.derivative()) if 0.0 <= x <= 1.0]
    vals = [float(p(float(x))) for x in cands]
    best = max(vals)
    scale = max(1.0, abs(best))
    winners = sorted(x for x, v in zip(cands, vals) if v >= best - tol * scale)
    merged = []
    for x in winners:
        if merged and x - merged[-1] <= tol:
            continue
        merged.append(x)
    return merged, best


def entropy_perturbed_max(w0: float, w1: float) -> float:
    """Maximiser of ``H2(a) + (w1 - w0) a + w0`` on ``(0, 1)``: ``2^c / (1 + 2^c)``."""
    c = float(w1) - float(w0)
    if c >= 0:
        return 1.0 / (1.0 + 2.0 ** -c)
    t = 2.0 ** c
    return t / (1.0 + t)


# ------------------------------------------------------- limit profile

@dataclass(frozen=True)
class LimitProfile:
    kind: str  # "uniform-like" or "concentration"
    points: tuple[float, ...]
    max_value: float
    dropped_rows: tuple[int, ...] = ()
    case: str = ""

    def to_json(self) -> dict:
        return {"kind": self.kind, "points": list(self.points), "max_value": self.max_value,
                "dropped_rows": list(self.dropped_rows)}


def predict_limit(nf: UnaryProfileNF) -> LimitProfile:
    """Where the colour proportion ``m/n`` concentrates as ``n`` grows.

    Top rows whose weights are all equal add the same amount to every world
    and are dropped.  With nothing left the distribution is uniform.  If the
    surviving top row has arity at least 2, its Bernstein polynomial dominates
    the binomial coefficient and the limit points are its maximisers.  If only
    arity 1 survives, the binomial coefficient competes at the same order and
    the limit is the maximiser of the entropy-perturbed line.
    """
    dropped = []
    nu = nf.nu
    while nu >= 1 and is_constant_weights(nf.row(nu)):
        dropped.append(nu)
        nu -= 1
    if nu == 0:
        return LimitProfile("uniform-like", (0.5,), 1.0, tuple(dropped), "all rows constant")
    row = nf.row(nu)
    if nu >= 2:
        points, beta = global_maxima(bernstein_poly(row))
        return LimitProfile("concentration", tuple(points), beta, tuple(dropped), "polynomial maxima")
    w0, w1 = float(row[0]), float(row[1])
    a = entropy_perturbed_max(w0, w1)
    h = -a * math.log2(a) - (1 - a) * math.log2(1 - a)
    return LimitProfile("concentration", (a,), h + (w1 - w0) * a + w0, tuple(dropped), "entropy balance")


# -------------------------------------------------------------- bounds

def triangle_bound(w: float, delta: float) -> float:
    """``1 - delta - (1 + delta) 2^-w / (1 - 2^-w)``; ``w = inf`` gives ``1 - delta``."""
    if not w > 0:
        raise ValueError("the triangle bound needs w > 0")
    if delta <= 0:
        raise ValueError("delta must be > 0")
    if math.isinf(w):
        return 1.0 - delta
    return 1.0 - delta - (1.0 + delta) / math.expm1(w * math.log(2.0))


def _iroot_ceil(x: int, k: int) -> int:
    """Least integer ``r >= 0`` with ``r**k >= x``."""
    r = int(round(x ** (1.0 / k)))
    while r ** k < x:
        r += 1
    while r > 0 and (r - 1) ** k >= x:
        r -= 1
    return r


def star_window(n: int, eps: float) -> tuple[int, int]:
    """Integer range ``n^(3/4) <= m <= (1 + eps) n^(4/5)``, decided exactly."""
    lo = _iroot_ceil(n ** 3, 4)
    bound = (1 + Fraction(eps)) ** 5 * n ** 4
    hi = int(round((1 + eps) * n ** 0.8)) + 1
    while hi > 0 and hi ** 5 > bound:
        hi -= 1
    while (hi + 1) ** 5 <= bound:
        hi += 1
    return lo, min(hi, n)


def star_probability(n: int) -> float:
    """``n^(-1/5)``, exact when ``n`` is a fifth power."""
    r = _iroot_ceil(n, 5)
    return 1.0 / r if r ** 5 == n else n ** -0.2


def star_profile_log2(n: int) -> np.ndarray:
    """``log2 P*(W_n^m)`` for ``m = 0..n`` under independent colouring."""
    from .exact import log2_binomial
    p = star_probability(n)
    m = np.arange(n + 1, dtype=float)
    return log2_binomial(n, m) + m * math.log2(p) + (n - m) * math.log2(1 - p)


def star_reference_mass(n: int, eps: float) -> float:
    """Mass the independent-colouring distribution puts on the window."""
    if n < 2 or eps <= 0:
        raise ValueError("need n >= 2 and eps > 0")
    lo, hi = star_window(n, eps)
    if lo > hi:
        log.warning("empty window [%d, %d] at n=%d, eps=%g", lo, hi, n, eps)
        return 0.0
    from .exact import log2_sum
    lw = star_profile_log2(n)
    return min(1.0, 2.0 ** (log2_sum(lw[lo:hi + 1]) - log2_sum(lw)))
