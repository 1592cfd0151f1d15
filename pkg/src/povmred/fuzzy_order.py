"""Post-processing order between discrete POVMs.

``A`` precedes ``B`` when a column-stochastic matrix ``kappa`` maps ``B``
onto ``A``: ``A(x) = sum_y kappa[x, y] B(y)``.  Whether such a matrix exists
is a linear feasibility question; :func:`preceq` answers it by minimizing
the largest entrywise residual ``s`` with the in-repo simplex.
"""

from dataclasses import dataclass, field

import numpy as np

from povmred import simplex
from povmred.config import resolve
from povmred.errors import DimensionMismatch, LabelMismatch, NotMarkov
from povmred.povm import DiscretePovm
from povmred.reduction import almost_isomorphic, reduce

BORDERLINE_FACTOR = 10.0


def pair_label(x: str, y: str) -> str:
    return f"({x},{y})"


def projection_map(first, second, component: int = 2) -> dict[str, str]:
    """Map each pair label ``(x,y)`` to ``x`` (component 1) or ``y`` (component 2)."""
    if component not in (1, 2):
        raise ValueError("component must be 1 or 2")
    return {
        pair_label(x, y): (x if component == 1 else y) for x in first for y in second
    }


@dataclass(frozen=True, eq=False)
class MarkovMatrix:
    """Column-stochastic matrix; ``matrix[i, j]`` is ``kappa(rows[i] | cols[j])``."""

    matrix: np.ndarray
    rows: tuple[str, ...]
    cols: tuple[str, ...]

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2:
            raise NotMarkov(f"Markov matrix must be 2-D, got shape {m.shape}")
        rows = tuple(str(r) for r in self.rows)
        cols = tuple(str(c) for c in self.cols)
        if m.shape != (len(rows), len(cols)):
            raise LabelMismatch(f"shape {m.shape} does not fit {len(rows)}x{len(cols)} labels")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)

    @classmethod
    def from_array(cls, m, rows=None, cols=None) -> "MarkovMatrix":
        m = np.asarray(m, dtype=float)
        rows = rows if rows is not None else [str(i) for i in range(m.shape[0])]
        cols = cols if cols is not None else [str(j) for j in range(m.shape[1])]
        return cls(m, tuple(rows), tuple(cols))

    def defect(self) -> float:
        """Largest violation of nonnegativity or unit column sums."""
        neg = max(0.0, -float(self.matrix.min()))
        colsum = float(np.abs(self.matrix.sum(axis=0) - 1).max())
        return max(neg, colsum)

    def check(self, neg_tol: float = 1e-12, sum_tol: float = 1e-9) -> "MarkovMatrix":
        if self.matrix.min() < -neg_tol:
            raise NotMarkov(f"negative entry {self.matrix.min():.3e}", magnitude=-self.matrix.min())
        colsum = np.abs(self.matrix.sum(axis=0) - 1).max()
        if colsum > sum_tol:
            raise NotMarkov(f"column sums deviate from 1 by {colsum:.3e}", magnitude=colsum)
        return self

    def with_labels(self, rows=None, cols=None) -> "MarkovMatrix":
        return MarkovMatrix(self.matrix, rows or self.rows, cols or self.cols)


def post_process(kappa: MarkovMatrix, b: DiscretePovm) -> DiscretePovm:
    """``A(x) = sum_y kappa(x|y) B(y)``, columns of ``kappa`` taken in ``b``'s order."""
    if kappa.matrix.shape[1] != len(b):
        raise LabelMismatch(f"{kappa.matrix.shape[1]} columns for a {len(b)}-outcome POVM")
    effects = np.einsum("xy,yij->xij", kappa.matrix, b.effects)
    return DiscretePovm(kappa.rows, effects)


def kernel_product(kappa: MarkovMatrix, b: DiscretePovm) -> DiscretePovm:
    """Joint POVM ``C(x,y) = kappa(x|y) B(y)`` over pair labels.

    Its marginal over ``x`` is ``b`` and its marginal over ``y`` is
    ``post_process(kappa, b)``; the projection onto ``y`` is sufficient.
    """
    if kappa.cols != b.labels:
        raise LabelMismatch(f"kernel columns {list(kappa.cols)} do not match labels {list(b.labels)}")
    labels, effects = [], []
    for i, x in enumerate(kappa.rows):
        for j, y in enumerate(b.labels):
            labels.append(pair_label(x, y))
            effects.append(kappa.matrix[i, j] * b.effects[j])
    return DiscretePovm(tuple(labels), np.stack(effects))


def _real_coordinates(effects: np.ndarray) -> np.ndarray:
    # d*d real coordinates of each Hermitian effect: real upper triangle
    # (with diagonal), then imaginary strict upper triangle.
    d = effects.shape[-1]
    iu = np.triu_indices(d)
    ius = np.triu_indices(d, k=1)
    return np.concatenate([effects[:, iu[0], iu[1]].real, effects[:, ius[0], ius[1]].imag], axis=1)


def residual(a: DiscretePovm, b: DiscretePovm, kappa: np.ndarray) -> float:
    """Max-norm of ``A(x) - sum_y kappa[x, y] B(y)`` over real coordinates."""
    ra, rb = _real_coordinates(a.effects), _real_coordinates(b.effects)
    return float(np.abs(kappa @ rb - ra).max())


@dataclass(frozen=True, eq=False)
class OrderVerdict:
    holds: bool
    residual: float
    witness: "MarkovMatrix | None" = None
    borderline: bool = False
    iterations: int = 0

    def __bool__(self):
        return self.holds


def _clean_witness(k: np.ndarray) -> np.ndarray:
    k = np.clip(k, 0.0, None)
    sums = k.sum(axis=0)
    sums[sums == 0] = 1.0
    return k / sums


def preceq(a: DiscretePovm, b: DiscretePovm, tol=None, max_iter: int = 50_000) -> OrderVerdict:
    """Decide whether ``a`` is a classical post-processing of ``b``.

    Solves ``min s`` over ``kappa >= 0`` with unit column sums and
    ``|sum_y kappa[x, y] B(y) - A(x)| <= s`` on every real coordinate.  The
    verdict holds when the residual of the (cleaned) optimal ``kappa`` is at
    most ``tol.lp``; a residual up to ten times that is flagged borderline.
    """
    tol = resolve(tol)
    if a.dim != b.dim:
        raise DimensionMismatch(f"dimensions differ: {a.dim} vs {b.dim}")
    na, nb = len(a), len(b)
    ra, rb = _real_coordinates(a.effects), _real_coordinates(b.effects)
    k = ra.shape[1]
    nk = na * nb
    n_res = na * k
    n_var = nk + 1 + 2 * n_res
    s_col = nk
    rows, rhs = [], []
    # Two-sided residual rows: +-(sum_y kappa B - A) - s + slack = 0.
    for sign in (1.0, -1.0):
        for x in range(na):
            for c in range(k):
                row = np.zeros(n_var)
                row[x * nb : (x + 1) * nb] = sign * rb[:, c]
                row[s_col] = -1.0
                slack = nk + 1 + (0 if sign > 0 else n_res) + x * k + c
                row[slack] = 1.0
                rows.append(row)
                rhs.append(sign * ra[x, c])
    for y in range(nb):
        row = np.zeros(n_var)
        row[y:nk:nb] = 1.0
        rows.append(row)
        rhs.append(1.0)
    cost = np.zeros(n_var)
    cost[s_col] = 1.0
    result = simplex.solve(cost, np.array(rows), np.array(rhs), max_iter=max_iter, lower_bound=0.0)
    kappa = _clean_witness(result.x[:nk].reshape(na, nb))
    res = residual(a, b, kappa)
    holds = res <= tol.lp
    witness = MarkovMatrix(kappa, a.labels, b.labels) if holds else None
    borderline = (not holds) and res <= BORDERLINE_FACTOR * tol.lp
    return OrderVerdict(holds, res, witness, borderline, result.iterations)


@dataclass(frozen=True, eq=False)
class Equivalence:
    holds: bool
    method: str
    evidence: dict = field(default_factory=dict)
    borderline: bool = False

    def __bool__(self):
        return self.holds


def equivalent(a: DiscretePovm, b: DiscretePovm, method: str = "reduce", tol=None) -> Equivalence:
    """Mutual post-processing, decided by two LPs or by comparing reductions."""
    tol = resolve(tol)
    if a.dim != b.dim:
        raise DimensionMismatch(f"dimensions differ: {a.dim} vs {b.dim}")
    if method == "lp":
        forward = preceq(a, b, tol)
        backward = preceq(b, a, tol)
        holds = forward.holds and backward.holds
        failing = [v for v in (forward, backward) if not v.holds]
        borderline = bool(failing) and all(v.borderline for v in failing)
        return Equivalence(holds, "lp", {"a_from_b": forward, "b_from_a": backward}, borderline)
    if method == "reduce":
        ra, rb = reduce(a, tol), reduce(b, tol)
        bijection = almost_isomorphic(ra.reduced, rb.reduced, tol)
        evidence = {"bijection": bijection, "reduced_a": ra, "reduced_b": rb}
        return Equivalence(bijection is not None, "reduce", evidence)
    raise ValueError(f"unknown method {method!r}; expected 'lp' or 'reduce'")
