"""Markov logic networks on finite domains: exact distributions, limit
predictions for colourings, and Gibbs sampling for larger graphs."""
from .logic import (GRAPH, UNARY, Formula, Grounding, Signature, Symbol, World,
                    count_satisfying, evaluate, parse_formula)
from .mln import Constraint, Mln, MlnError, log2_mu, probability_of_world
from .normalform import UnaryProfileNF, normalize_qf, unary_normal_form
from .exact import (BudgetExceeded, EventProbability, ProfileDistribution, enumerate_worlds,
                    event_probability, independence_gap, log2_partition, tv_distance,
                    unary_profile_distribution, violation_tail_probability)
from .asymptotics import (LimitProfile, Polynomial, bernstein_poly, entropy_perturbed_max,
                          global_maxima, is_constant_weights, predict_limit,
                          star_reference_mass, triangle_bound)
from .sampler import Estimate, estimate_event, estimate_statistic_histogram, gibbs_step

__version__ = "0.1.0"
