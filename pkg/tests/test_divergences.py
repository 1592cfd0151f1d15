import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from povmred.divergences import (
    CHI2,
    HELLINGER,
    KL,
    divergence_between_states,
    f_divergence,
    get_generator,
    hellinger,
    tv_metric,
)
from povmred.errors import DimensionMismatch, ValidationError
from povmred.fuzzy_order import post_process
from povmred.generators import computational_pvm, random_density, random_markov, random_povm
from povmred.matops import trace_norm
from povmred.povm import outcome_distribution, validate_povm


def prob_vectors(n):
    return st.lists(st.floats(0, 1), min_size=n, max_size=n).filter(lambda v: sum(v) > 1e-3).map(
        lambda v: np.array(v) / sum(v)
    )


def test_generators_vanish_at_one():
    for g in (HELLINGER, KL, CHI2):
        assert g.f(1.0) == 0.0
    assert get_generator("kl") is KL
    with pytest.raises(ValueError):
        get_generator("renyi")


def test_hellinger_examples():
    assert hellinger([0.3, 0.7], [0.3, 0.7]) == 0.0
    assert hellinger([1, 0], [0, 1]) == pytest.approx(2.0)
    # (1 - sqrt(.5))^2 + (0 - sqrt(.5))^2
    assert hellinger([1, 0], [0.5, 0.5]) == pytest.approx(2 - math.sqrt(2), abs=1e-15)


def test_zero_conventions():
    assert f_divergence(KL, [1, 0], [0.5, 0.5]) == pytest.approx(math.log(2))
    assert f_divergence(KL, [0.5, 0.5], [1, 0]) == math.inf
    assert f_divergence(CHI2, [0.5, 0.5], [1, 0]) == math.inf
    assert f_divergence(CHI2, [0.5, 0.5, 0], [0.25, 0.75, 0]) == pytest.approx(
        0.25 * 1 + 0.75 * (1 / 1.5 - 1) ** 2
    )
    # mass below the zero threshold counts as zero
    assert f_divergence(KL, [1 - 1e-16, 1e-16], [1.0, 0.0]) == pytest.approx(0.0, abs=1e-15)


def test_input_checks():
    with pytest.raises(DimensionMismatch):
        hellinger([1.0], [0.5, 0.5])
    with pytest.raises(ValidationError):
        hellinger([0.6, 0.6], [0.5, 0.5])
    with pytest.raises(DimensionMismatch):
        tv_metric([1.0], [0.5, 0.5])


def test_tv_examples():
    assert tv_metric([0.4, 0.6], [0.4, 0.6]) == 0.0
    assert tv_metric([1, 0], [0, 1]) == 1.0
    assert tv_metric([0.7, 0.3], [0.5, 0.5]) == pytest.approx(0.2)


def test_tv_equals_sup_over_events():
    rng = np.random.default_rng(0)
    p, q = rng.dirichlet(np.ones(5)), rng.dirichlet(np.ones(5))
    best = 0.0
    for mask in range(32):
        event = [(mask >> i) & 1 for i in range(5)]
        best = max(best, abs(np.dot(event, p - q)))
    assert tv_metric(p, q) == pytest.approx(best)


@given(prob_vectors(4), prob_vectors(4))
@settings(max_examples=200)
def test_hellinger_range_and_symmetry(p, q):
    h = hellinger(p, q)
    assert 0 <= h <= 2
    assert h == hellinger(q, p) or abs(h - hellinger(q, p)) <= 1e-15
    # closed form on the thresholded vectors (mass below 1e-14 is zero)
    p0, q0 = np.where(p < 1e-14, 0, p), np.where(q < 1e-14, 0, q)
    assert h == pytest.approx(np.sum((np.sqrt(p0) - np.sqrt(q0)) ** 2), abs=1e-12)


def test_between_states_examples():
    rho = random_density(2, 1)
    pvm = computational_pvm(2)
    assert divergence_between_states("hellinger", pvm, rho, rho) == 0.0
    trivial = validate_povm([np.eye(2)])
    assert divergence_between_states("hellinger", trivial, rho, random_density(2, 2)) == 0.0
    value = divergence_between_states("hellinger", pvm, np.diag([1.0, 0.0]), np.eye(2) / 2)
    assert value == pytest.approx(2 - math.sqrt(2), abs=1e-15)


@pytest.mark.parametrize("seed", range(40))
def test_monotone_under_post_processing(seed):
    d, n = 2 + seed % 3, 2 + seed % 5
    a = random_povm(d, n, seed)
    b = post_process(random_markov(3, n, seed + 1), a)
    rho, sigma = random_density(d, seed + 2), random_density(d, seed + 3)
    for tag in ("hellinger", "kl", "chi2"):
        before = divergence_between_states(tag, a, rho, sigma)
        after = divergence_between_states(tag, b, rho, sigma)
        assert after <= before + 1e-9


@pytest.mark.parametrize("seed", range(40))
def test_tv_bounded_by_trace_distance(seed):
    d = 2 + seed % 3
    a = random_povm(d, 4, seed)
    rho, sigma = random_density(d, seed + 2), random_density(d, seed + 3)
    p, q = outcome_distribution(a, rho), outcome_distribution(a, sigma)
    assert tv_metric(p, q) <= trace_norm(rho - sigma) + 1e-9
