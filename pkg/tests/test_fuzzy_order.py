import numpy as np
import pytest

from povmred.errors import DimensionMismatch, LabelMismatch, NotMarkov
from povmred.fuzzy_order import (
    MarkovMatrix,
    equivalent,
    kernel_product,
    pair_label,
    post_process,
    preceq,
    projection_map,
    residual,
)
from povmred.generators import (
    computational_pvm,
    intro_a,
    intro_b,
    random_markov,
    random_povm,
    split_povm,
    trine,
)
from povmred.povm import pushforward, validate_povm
from povmred.reduction import is_sufficient_statistic, reduce

EPS_LP = 1e-7


def check_witness(a, b, verdict):
    # re-verified without the solver
    k = verdict.witness.matrix
    assert k.min() >= -1e-12
    np.testing.assert_allclose(k.sum(axis=0), 1, atol=1e-9)
    rebuilt = np.einsum("xy,yij->xij", k, b.effects)
    assert np.abs(rebuilt - a.effects).max() <= EPS_LP


def test_reflexive_identity_witness():
    a = random_povm(3, 4, 0)
    v = preceq(a, a)
    assert v.holds
    np.testing.assert_allclose(v.witness.matrix, np.eye(4), atol=1e-9)
    check_witness(a, a, v)


def test_coarse_from_intro_split():
    a, b = intro_a(), intro_b()
    v = preceq(a, b)
    assert v.holds
    expected = np.array([[1, 1, 0, 0], [0, 0, 1, 1]])
    np.testing.assert_allclose(v.witness.matrix, expected, atol=1e-9)
    assert v.witness.rows == a.labels and v.witness.cols == b.labels
    check_witness(a, b, v)


def test_trine_not_below_pvm():
    # post-processings of a PVM are diagonal in its basis; trine effects are not
    v = preceq(trine(), computational_pvm(2))
    assert not v.holds
    assert v.residual > 10 * EPS_LP
    assert not v.borderline
    assert v.witness is None


def test_borderline_flag():
    a = computational_pvm(2)
    d = np.array([[0, 3e-7], [3e-7, 0]])
    b = validate_povm([a.effects[0] + d, a.effects[1] - d])
    v = preceq(b, a)
    assert not v.holds and v.borderline
    assert EPS_LP < v.residual <= 10 * EPS_LP


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        preceq(computational_pvm(2), computational_pvm(3))
    with pytest.raises(DimensionMismatch):
        equivalent(computational_pvm(2), computational_pvm(3))


@pytest.mark.parametrize("seed", range(15))
def test_coarse_graining_below_original(seed):
    d, n = 2 + seed % 3, 3 + seed % 3
    b = random_povm(d, n, seed)
    a = post_process(random_markov(2, n, seed + 1), b)
    v = preceq(a, b)
    assert v.holds
    check_witness(a, b, v)


@pytest.mark.parametrize("seed", range(10))
def test_transitive_chain(seed):
    c = random_povm(2, 3, seed)
    b = split_povm(c, random_markov(2, 3, seed + 1))
    a = post_process(random_markov(2, len(b), seed + 2), b)
    assert preceq(a, b) and preceq(b, c) and preceq(a, c)
    assert preceq(c, b)
    assert preceq(a, a)


def test_equivalent_examples():
    a, b = intro_a(), intro_b()
    for method in ("lp", "reduce"):
        assert equivalent(a, b, method)
        assert equivalent(a, a, method)
        assert not equivalent(computational_pvm(2), trine(), method)
    with pytest.raises(ValueError):
        equivalent(a, b, "magic")


@pytest.mark.parametrize("seed", range(20))
def test_methods_agree(seed):
    n = 2 + seed % 3
    a = random_povm(2, n, seed)
    b = split_povm(a, random_markov(2, n, seed + 1), seed=seed) if seed % 2 else random_povm(2, n, seed + 7)
    assert equivalent(a, b, "lp").holds == equivalent(a, b, "reduce").holds == bool(seed % 2)


@pytest.mark.parametrize("seed", range(10))
def test_reduction_equivalent_by_lp(seed):
    a = split_povm(random_povm(2 + seed % 2, 3, seed), random_markov(2, 3, seed + 1))
    assert equivalent(reduce(a).reduced, a, "lp")


def test_kernel_product_identity_and_intro():
    b = random_povm(2, 3, 1)
    ident = MarkovMatrix.from_array(np.eye(3), b.labels, b.labels)
    c = kernel_product(ident, b)
    for i, x in enumerate(b.labels):
        for j, y in enumerate(b.labels):
            expected = b[y] if i == j else np.zeros((2, 2))
            np.testing.assert_array_equal(c[pair_label(x, y)], expected)
    lam = 0.3
    a = intro_a()
    kappa = MarkovMatrix.from_array([[lam, lam], [1 - lam, 1 - lam]], ["0", "1"], a.labels)
    joint = kernel_product(kappa, a)
    # (j, i) here is B_ij of the introductory example
    for i in "01":
        for j in "01":
            np.testing.assert_allclose(joint[pair_label(j, i)], intro_b()[i + j], atol=1e-15)


@pytest.mark.parametrize("seed", range(15))
def test_kernel_product_marginals_and_sufficiency(seed):
    d, n = 2 + seed % 3, 2 + seed % 4
    b = random_povm(d, n, seed)
    kappa = random_markov(3, n, seed + 1, cols=b.labels)
    c = kernel_product(kappa, b)
    second = pushforward(c, projection_map(kappa.rows, b.labels, 2))
    for y in b.labels:
        assert np.abs(second[y] - b[y]).max() <= 1e-9
    first = pushforward(c, projection_map(kappa.rows, b.labels, 1))
    np.testing.assert_allclose(first.effects, post_process(kappa, b).effects, atol=1e-12)
    assert is_sufficient_statistic(c, projection_map(kappa.rows, b.labels, 2))


def test_kernel_product_label_mismatch():
    b = computational_pvm(2)
    with pytest.raises(LabelMismatch):
        kernel_product(MarkovMatrix.from_array(np.eye(2), cols=["a", "b"]), b)


def test_markov_checks():
    with pytest.raises(NotMarkov):
        MarkovMatrix.from_array([[0.5, 1.2], [0.5, -0.2]]).check()
    with pytest.raises(NotMarkov):
        MarkovMatrix.from_array([[0.5, 0.5], [0.4, 0.5]]).check()
    assert MarkovMatrix.from_array([[0.5, 1.0], [0.5, 0.0]]).check().defect() == 0.0


def test_residual_is_zero_for_exact_witness():
    b = random_povm(3, 4, 2)
    kappa = random_markov(2, 4, 3)
    a = post_process(kappa, b)
    assert residual(a, b, kappa.matrix) <= 1e-15
