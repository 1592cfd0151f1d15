import numpy as np
import pytest
from scipy.optimize import linprog

from povmred import simplex
from povmred.errors import Infeasible, SolverStalled


@pytest.mark.parametrize("seed", range(80))
def test_matches_scipy(seed):
    rng = np.random.default_rng(seed)
    m, n = rng.integers(2, 9), rng.integers(4, 16)
    a = rng.standard_normal((m, n))
    if seed % 2:
        a = np.hstack([a, np.eye(m)])
    b = a @ rng.random(a.shape[1])
    c = rng.random(a.shape[1])
    ours = simplex.solve(c, a, b)
    ref = linprog(c, A_eq=a, b_eq=b, bounds=(0, None), method="highs")
    assert ours.objective == pytest.approx(ref.fun, abs=1e-8)
    assert np.abs(a @ ours.x - b).max() <= 1e-8
    assert ours.x.min() >= -1e-12


def test_redundant_rows():
    a = np.array([[1.0, 1.0, 0.0], [2.0, 2.0, 0.0], [0.0, 1.0, 1.0]])
    res = simplex.solve([1.0, 2.0, 0.0], a, [1.0, 2.0, 1.0])
    assert res.objective == pytest.approx(1.0)


def test_infeasible_and_unbounded():
    with pytest.raises(Infeasible):
        simplex.solve([1.0, 1.0], [[1.0, 1.0]], [-1.0])
    with pytest.raises(Infeasible):
        simplex.solve([-1.0, 0.0], [[1.0, -1.0]], [0.0])


def test_iteration_cap():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((6, 12))
    with pytest.raises(SolverStalled):
        simplex.solve(rng.random(12), a, a @ rng.random(12), max_iter=1)
