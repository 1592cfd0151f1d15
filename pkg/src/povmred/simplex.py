"""Dense two-phase tableau simplex with Bland's pivoting rule.

Solves ``min c @ x`` subject to ``A @ x == b`` and ``x >= 0``.  Only meant
for the small feasibility programs of the order checks, where a few
hundred rows and columns is the upper end.
"""

from dataclasses import dataclass

import numpy as np

from povmred.errors import Infeasible, SolverStalled

PIVOT_TOL = 1e-9
COST_TOL = 1e-9


@dataclass
class LPResult:
    x: np.ndarray
    objective: float
    iterations: int


class _Tableau:
    # Rows 0..m-1 are constraints with rhs in the last column; row m is the
    # reduced-cost row, whose last entry holds minus the objective value.

    def __init__(self, table: np.ndarray, basis: list[int], max_iter: int):
        self.t = table
        self.basis = basis
        self.max_iter = max_iter
        self.iterations = 0

    def pivot(self, row: int, col: int):
        t = self.t
        t[row] /= t[row, col]
        column = t[:, col].copy()
        column[row] = 0.0
        rows = np.flatnonzero(column)
        t[rows] -= np.outer(column[rows], t[row])
        self.basis[row] = col

    def run(self, n_active: int, floor: float = -np.inf):
        """Bland's rule over the first ``n_active`` columns until optimal.

        Stops early once the objective reaches the known lower bound
        ``floor``; past that point only rounding noise drives pivots.
        """
        t = self.t
        m = t.shape[0] - 1
        while True:
            if -t[m, -1] <= floor:
                return
            costs = t[m, :n_active]
            entering = np.flatnonzero(costs < -COST_TOL)
            if entering.size == 0:
                return
            if self.iterations >= self.max_iter:
                raise SolverStalled(f"simplex exceeded {self.max_iter} pivots")
            col = int(entering[0])
            column = t[:m, col]
            rows = np.flatnonzero(column > PIVOT_TOL)
            if rows.size == 0:
                raise Infeasible("objective is unbounded below")
            ratios = t[rows, -1] / column[rows]
            best = ratios.min()
            ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
            row = min(ties, key=lambda r: self.basis[r])
            self.pivot(int(row), col)
            self.iterations += 1


def solve(
    c, a_eq, b_eq, max_iter: int = 50_000, feas_tol: float = 1e-9, lower_bound=None
) -> LPResult:
    """Minimize ``c @ x`` over ``a_eq @ x == b_eq, x >= 0``.

    ``lower_bound``, when known (e.g. zero for a nonnegative objective),
    lets phase two stop as soon as it is attained to within 1e-13.
    Raises :class:`Infeasible` or :class:`SolverStalled`.
    """
    c = np.asarray(c, dtype=float)
    a = np.array(a_eq, dtype=float)
    b = np.array(b_eq, dtype=float)
    m, n = a.shape
    neg = b < 0
    a[neg] *= -1
    b[neg] *= -1

    # Phase one.  Unit columns of A start basic where possible; the other
    # rows get artificial variables n..n+k-1.
    basis = [-1] * m
    for j in np.flatnonzero((np.count_nonzero(a, axis=0) == 1)):
        r = int(np.flatnonzero(a[:, j])[0])
        if basis[r] == -1 and a[r, j] == 1.0:
            basis[r] = int(j)
    need = [r for r in range(m) if basis[r] == -1]
    k = len(need)
    table = np.zeros((m + 1, n + k + 1))
    table[:m, :n] = a
    table[:m, -1] = b
    for i, r in enumerate(need):
        table[r, n + i] = 1.0
        basis[r] = n + i
    table[m, :n] = -a[need].sum(axis=0)
    table[m, -1] = -b[need].sum()
    tab = _Tableau(table, basis, max_iter)
    tab.run(n + k, floor=1e-13 * max(1.0, b.sum()))
    if -tab.t[m, -1] > feas_tol * max(1.0, b.sum()):
        raise Infeasible(f"constraints infeasible (phase-one value {-tab.t[m, -1]:.3e})")

    # Drive remaining artificials out of the basis; drop redundant rows.
    keep = []
    for r in range(m):
        if tab.basis[r] >= n:
            entries = np.abs(tab.t[r, :n])
            col = int(np.argmax(entries))
            if entries[col] <= 1e-9:
                continue
            tab.pivot(r, col)
        keep.append(r)
    t = np.vstack([tab.t[keep][:, list(range(n)) + [-1]], np.zeros((1, n + 1))])
    basis = [tab.basis[r] for r in keep]

    # Phase two: reduced costs for the true objective.
    t[-1, :n] = c
    for r, j in enumerate(basis):
        if c[j] != 0.0:
            t[-1] -= c[j] * t[r]
    phase2 = _Tableau(t, basis, max_iter - tab.iterations)
    phase2.run(n, floor=-np.inf if lower_bound is None else lower_bound + 1e-13)

    x = np.zeros(n)
    for r, j in enumerate(phase2.basis):
        x[j] = phase2.t[r, -1]
    return LPResult(x=x, objective=float(c @ x), iterations=tab.iterations + phase2.iterations)
