from fractions import Fraction
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mlnlimits import models
from mlnlimits.asymptotics import (ConstantPolynomialError, Polynomial, bernstein_poly,
                                   entropy_perturbed_max, global_maxima, is_constant_weights,
                                   predict_limit, real_roots, star_probability,
                                   star_reference_mass, star_window, sturm_sequence,
                                   triangle_bound)
from mlnlimits.exact import profile_distribution, tv_distance, unary_profile_distribution
from mlnlimits.logic import UNARY
from mlnlimits.mln import Mln
from mlnlimits.normalform import UnaryProfileNF, unary_normal_form

import oracle


# ------------------------------------------------------------- bernstein

def test_bernstein_examples():
    assert bernstein_poly([1, 0, 1]).coeffs == (1, -2, 2)
    assert bernstein_poly([0, 1]).coeffs == (0, 1)
    assert bernstein_poly([3, 3, 3, 3]).coeffs == (3,)


_weights = st.lists(st.integers(0, 16).map(lambda x: x / 4), min_size=1, max_size=7)


@given(_weights, st.floats(0, 1))
def test_bernstein_change_of_basis(w, a):
    assert bernstein_poly(w)(a) == pytest.approx(oracle.bernstein(w, a), abs=1e-9)


@given(_weights)
def test_constancy_matches_equality(w):
    assert is_constant_weights(w) == (len(set(w)) == 1)
    assert bernstein_poly(w).is_constant() == (len(set(w)) == 1)


def test_constancy_on_1000_random_vectors():
    rng = random.Random(2024)
    for _ in range(1000):
        k = rng.randint(0, 6)
        if rng.random() < 0.3:
            w = [rng.uniform(0, 4)] * (k + 1)
        else:
            w = [rng.choice([rng.uniform(0, 4), 1.0]) for _ in range(k + 1)]
        assert is_constant_weights(w) == (len(set(w)) == 1)


def test_constancy_is_exact_on_near_ties():
    assert not is_constant_weights([1.0, 1.0 + 2 ** -50, 1.0])
    assert is_constant_weights([Fraction(1, 3)] * 4)


# ----------------------------------------------------------------- roots

def test_sturm_counts_roots():
    p = Polynomial((Fraction(-3, 16), 1, -1))  # roots 1/4 and 3/4
    assert real_roots(p) == pytest.approx([0.25, 0.75], abs=1e-12)
    assert len(sturm_sequence(p)) >= 2


def test_roots_of_product():
    coeffs = np.polynomial.polynomial.polyfromroots([0.1, 0.5, 0.9])
    assert real_roots(Polynomial(tuple(coeffs))) == pytest.approx([0.1, 0.5, 0.9], abs=1e-10)


def test_double_root_found_once():
    p = Polynomial((Fraction(9, 100), Fraction(-3, 5), 1))  # (a - 0.3)^2
    assert real_roots(p) == pytest.approx([0.3], abs=1e-12)


def test_repeated_root_at_endpoint():
    # derivative of 4a^3(1-a) is 12a^2 - 16a^3: double root at 0, simple at 3/4
    dp = bernstein_poly([0, 0, 0, 1, 0]).derivative()
    assert real_roots(dp) == pytest.approx([0.0, 0.75], abs=1e-12)
    assert global_maxima(bernstein_poly([0, 0, 0, 1, 0])) == ([0.75], 0.421875)


# ---------------------------------------------------------------- maxima

def test_maxima_examples():
    pts, val = global_maxima(Polynomial((1, -2, 2)))
    assert pts == [0.0, 1.0] and val == 1.0
    pts, val = global_maxima(Polynomial((0, 0, 1)))
    assert pts == [1.0] and val == 1.0
    pts, val = global_maxima(Polynomial((-0.09, 0.6, -1.0)))
    assert pts == pytest.approx([0.3], abs=1e-9) and val == pytest.approx(0, abs=1e-15)


def test_maxima_rejects_constant():
    with pytest.raises(ConstantPolynomialError):
        global_maxima(Polynomial((2,)))


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(0, 8), min_size=2, max_size=6).filter(lambda w: len(set(w)) > 1))
def test_maxima_beat_a_fine_grid(w):
    p = bernstein_poly(w)
    pts, val = global_maxima(p)
    grid = np.linspace(0, 1, 20001)
    top = max(float(p(float(a))) for a in grid)
    assert val >= top - 1e-9
    for a in pts:
        assert 0 <= a <= 1
        assert float(p(a)) == pytest.approx(val, abs=1e-9)


# -------------------------------------------------------------- entropy

def test_entropy_examples():
    assert entropy_perturbed_max(2, 2) == 0.5
    assert entropy_perturbed_max(0, 1) == pytest.approx(2 / 3, abs=1e-15)
    assert entropy_perturbed_max(1, 0) == pytest.approx(1 / 3, abs=1e-15)


@given(st.floats(-12, 12), st.floats(0, 4))
def test_entropy_maximiser_is_stationary(c, w0):
    a = entropy_perturbed_max(w0, w0 + c)
    assert 0 < a < 1
    assert math.log2((1 - a) / a) + c == pytest.approx(0, abs=1e-9)
    assert entropy_perturbed_max(w0 + c, w0) == pytest.approx(1 - a, abs=1e-12)


def test_entropy_is_stable_for_extreme_gaps():
    assert entropy_perturbed_max(0, 2000) == 1.0
    assert entropy_perturbed_max(2000, 0) == 0.0


# --------------------------------------------------------------- predict

def test_predict_two_point():
    lp = predict_limit(unary_normal_form(models.two_point()))
    assert lp.kind == "concentration" and lp.points == (0.0, 1.0)


def test_predict_uniform():
    lp = predict_limit(UnaryProfileNF(((0, 0), (0, 0, 0))))
    assert lp.kind == "uniform-like" and lp.points == (0.5,)
    assert lp.dropped_rows == (2, 1)


def test_predict_entropy_case():
    lp = predict_limit(UnaryProfileNF(((0, 1),)))
    assert lp.points == pytest.approx((2 / 3,), abs=1e-15)


def test_predict_drops_constant_top_row():
    nf = UnaryProfileNF(((0, 1), (2, 2, 2)))
    lp = predict_limit(nf)
    assert lp.dropped_rows == (2,)
    assert lp.points == pytest.approx((2 / 3,))


def test_prediction_tracks_the_profile_peak():
    tested = 0
    for seed in range(100, 130):
        nf = unary_normal_form(models.random_unary_mln(seed))
        lp = predict_limit(nf)
        if lp.kind != "concentration" or len(lp.points) != 1:
            continue
        tested += 1
        prob = unary_profile_distribution(nf, 4000).prob
        assert abs(int(np.argmax(prob)) / 4000 - lp.points[0]) < 0.05, seed
    assert tested >= 5


def test_limit_json():
    lp = predict_limit(unary_normal_form(models.two_point()))
    assert lp.to_json() == {"kind": "concentration", "points": [0.0, 1.0], "max_value": 1.0,
                            "dropped_rows": []}


# ---------------------------------------------------------------- bounds

def test_triangle_bound_values():
    assert triangle_bound(1, 0.1) == pytest.approx(-0.2, abs=1e-12)
    assert triangle_bound(6, 0.1) == pytest.approx(0.9 - 1.1 / 63, abs=1e-12)
    assert triangle_bound(6, 0.1) == pytest.approx(0.8825, abs=1e-4)
    assert triangle_bound(math.inf, 0.1) == 0.9
    assert abs(triangle_bound(200, 0.1) - 0.9) <= 1e-12


@given(st.floats(0.01, 50), st.floats(0.01, 50), st.floats(0.001, 0.5))
def test_triangle_bound_increases_in_w(w1, w2, delta):
    lo, hi = sorted((w1, w2))
    assert triangle_bound(lo, delta) <= triangle_bound(hi, delta) + 1e-15


def test_triangle_bound_validation():
    with pytest.raises(ValueError):
        triangle_bound(0, 0.1)
    with pytest.raises(ValueError):
        triangle_bound(1, 0)


# ------------------------------------------------------------------ star

def test_star_probability_is_exact_on_fifth_powers():
    assert star_probability(32) == 0.5
    assert star_probability(3 ** 5) == 1 / 3
    assert star_probability(10 ** 4) == pytest.approx(10 ** -0.8)


def test_star_window_is_exact():
    lo, hi = star_window(10 ** 4, 0.1)
    assert lo ** 4 >= 10 ** 12 > (lo - 1) ** 4
    assert hi ** 5 <= Fraction(11, 10) ** 5 * 10 ** 16 < (hi + 1) ** 5


def _binomial_window(n, p, lo, hi):
    # direct lgamma sum, independent of the package's log helpers
    def log_term(m):
        return (math.lgamma(n + 1) - math.lgamma(m + 1) - math.lgamma(n - m + 1)
                + m * math.log(p) + (n - m) * math.log1p(-p))
    return math.fsum(math.exp(log_term(m)) for m in range(lo, hi + 1))


def test_star_reference_mass():
    n, eps = 10 ** 4, 0.1
    mass = star_reference_mass(n, eps)
    lo, hi = star_window(n, eps)
    assert mass == pytest.approx(_binomial_window(n, 10 ** -0.8, lo, hi), rel=1e-9)
    assert mass >= 0.99
    assert 1 - mass <= 0.01


def test_star_separates_from_two_point():
    n, eps = 10 ** 4, 0.1
    lo, hi = star_window(n, eps)
    tp = profile_distribution(models.two_point(), n)
    assert tp.mass(lo, hi) <= 0.01
    from mlnlimits.asymptotics import star_profile_log2
    from mlnlimits.exact import ProfileDistribution
    star = ProfileDistribution.from_log2(n, star_profile_log2(n))
    assert tv_distance(star.prob, tp.prob) >= 0.98


def test_star_empty_window_warns(caplog):
    assert star_reference_mass(2, 0.1) == 0.0
    assert "empty window" in caplog.text


def test_star_validation():
    with pytest.raises(ValueError):
        star_reference_mass(1, 0.1)
    with pytest.raises(ValueError):
        star_reference_mass(100, 0)
