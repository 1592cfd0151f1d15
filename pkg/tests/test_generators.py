import itertools

import numpy as np
import pytest

from povmred.generators import (
    intro_a,
    intro_b,
    random_density,
    random_instrument,
    random_markov,
    random_povm,
    split_povm,
    trine,
)
from povmred.povm import validate_povm
from povmred.reduction import reduce, strict_isomorphic


def proportional_pairs(povm, eps=1e-8):
    # brute force over all pairs, independent of the reduction code
    out = []
    for (x, a), (y, b) in itertools.combinations(povm.items(), 2):
        na, nb = a / np.trace(a).real, b / np.trace(b).real
        if np.linalg.norm(na - nb) <= eps:
            out.append((x, y))
    return out


def test_single_outcome_is_identity():
    povm = random_povm(2, 1, 99)
    np.testing.assert_allclose(povm.effects[0], np.eye(2))


@pytest.mark.parametrize("dim, n, seed", [(2, 4, 42), (3, 9, 7), (4, 12, 1)])
def test_random_povm_valid(dim, n, seed):
    povm = random_povm(dim, n, seed)
    validate_povm(povm.effects)
    assert len(povm) == n
    assert proportional_pairs(povm) == []


def test_random_density():
    np.testing.assert_allclose(random_density(1, 5), [[1.0]])
    rho = random_density(2, 42)
    assert abs(np.trace(rho) - 1) < 1e-12
    assert np.linalg.eigvalsh(rho).min() >= -1e-12
    assert np.linalg.eigvalsh(random_density(4, 3)).min() > 1e-8


def test_random_markov():
    np.testing.assert_array_equal(random_markov(1, 4, 0).matrix, np.ones((1, 4)))
    for rows, cols, seed in [(2, 2, 42), (3, 5, 1)]:
        k = random_markov(rows, cols, seed).matrix
        np.testing.assert_allclose(k.sum(axis=0), 1, atol=1e-12)
        assert k.min() > 0


def test_determinism():
    a, b = random_povm(3, 5, 11), random_povm(3, 5, 11)
    assert np.array_equal(a.effects, b.effects)
    assert np.array_equal(random_markov(3, 4, 2).matrix, random_markov(3, 4, 2).matrix)
    assert np.array_equal(random_density(3, 8), random_density(3, 8))
    assert not np.array_equal(random_povm(3, 5, 12).effects, a.effects)
    i1, i2 = random_instrument(2, 2, 2, 4), random_instrument(2, 2, 2, 4)
    assert all(np.array_equal(x, y) for x, y in zip(i1.kraus, i2.kraus))


def test_split_identity_kernel_relabels():
    a = random_povm(2, 3, 0)
    b = split_povm(a, np.eye(3))
    assert len(b) == 3
    np.testing.assert_array_equal(b.effects, a.effects)


def test_split_reproduces_intro_example():
    lam = 0.3
    b = split_povm(intro_a(), np.array([[lam, lam], [1 - lam, 1 - lam]]))
    assert strict_isomorphic(b, intro_b()) == {
        "(0,0)": "00",
        "(1,0)": "01",
        "(0,1)": "10",
        "(1,1)": "11",
    }


@pytest.mark.parametrize("seed", range(25))
def test_split_is_valid_and_reduces_like_original(seed):
    d, n = 2 + seed % 3, 2 + seed % 4
    a = random_povm(d, n, seed)
    b = split_povm(a, random_markov(4, n, seed + 1), seed=seed)
    validate_povm(b.effects, b.labels)
    assert strict_isomorphic(reduce(a).reduced, reduce(b).reduced) is not None


def test_split_drops_zero_kernel_entries():
    k = np.array([[1.0, 0.5, 0.0], [0.0, 0.5, 1.0]])
    b = split_povm(trine(), k)
    assert b.labels == ("(0,0)", "(0,1)", "(1,1)", "(1,2)")


def test_random_instrument_normalized():
    inst = random_instrument(3, 3, 2, 0)
    np.testing.assert_allclose(inst.total(), np.eye(3), atol=1e-12)
