"""Minimal sufficient reduction of discrete POVMs.

Two outcomes carry the same information exactly when their effects are
positive multiples of each other.  :func:`reduce` groups outcomes by
trace-normalized effect and merges each group into one outcome; the result
is pairwise linearly independent and unique up to relabelling.
:func:`reduce_via_lsb` reaches the same partition from outcome statistics
alone, grouping by the vector of likelihood ratios against the pivotal
state of an informationally complete ensemble.
"""

from collections.abc import Callable, Mapping
from dataclasses import dataclass, field

import numpy as np

from povmred.config import resolve
from povmred.errors import (
    AmbiguousMatching,
    DimensionMismatch,
    ToleranceAmbiguity,
    VanishingOutcome,
)
from povmred.povm import DiscretePovm, StateEnsemble, tomographic_ensemble


class UnionFind:
    """Disjoint sets over ``0..n-1``; the root is always the smallest index."""

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry)] = min(rx, ry)

    def groups(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for i in range(len(self.parent)):
            out.setdefault(self.find(i), []).append(i)
        return list(out.values())


@dataclass(frozen=True, eq=False)
class ReductionReport:
    """Outcome of a reduction.

    ``groups`` maps every surviving input label to the label of its merged
    outcome in ``reduced``.  ``h`` holds, for each surviving input label,
    the weight ``tr A(x) / tr Abar(S(x))``; then ``A(x) == h[x] * Abar(S(x))``
    and the weights within a group sum to one.
    """

    groups: dict[str, str]
    reduced: DiscretePovm
    dropped: tuple[str, ...]
    h: dict[str, float]
    representatives: dict[str, str] = field(default_factory=dict)

    def partition(self) -> frozenset[frozenset[str]]:
        blocks: dict[str, set[str]] = {}
        for x, g in self.groups.items():
            blocks.setdefault(g, set()).add(x)
        return frozenset(frozenset(b) for b in blocks.values())


def normalized_effects(povm: DiscretePovm) -> np.ndarray:
    tr = povm.traces()
    return povm.effects / tr[:, None, None]


def _pairwise_distances(vectors: np.ndarray, ord: str) -> np.ndarray:
    diff = vectors[:, None, :] - vectors[None, :, :]
    if ord == "fro":
        return np.sqrt(np.sum(np.abs(diff) ** 2, axis=-1))
    return np.max(np.abs(diff), axis=-1)


def _group(vectors: np.ndarray, eps: float, ord: str, traces: np.ndarray, labels):
    # Union-find over pairs within eps, then a coherence check of each member
    # against the group representative (largest trace) at 3*eps.
    n = len(vectors)
    dist = _pairwise_distances(vectors, ord)
    uf = UnionFind(n)
    for i, j in zip(*np.nonzero(np.triu(dist <= eps, k=1))):
        uf.union(int(i), int(j))
    groups = []
    for members in uf.groups():
        rep = max(members, key=lambda i: (traces[i], -i))
        worst = max(dist[rep, i] for i in members)
        if worst > 3 * eps:
            names = [labels[i] for i in members]
            raise ToleranceAmbiguity(
                f"outcomes {names} chain into one group but deviate by {worst:.3e} "
                f"(> 3 * {eps:g}) from representative {labels[rep]!r}"
            )
        groups.append((members, rep))
    return groups


def _report(povm: DiscretePovm, kept: list[int], groups, dropped) -> ReductionReport:
    traces = povm.traces()
    mapping, h, reps = {}, {}, {}
    out_labels, out_effects = [], []
    for members, rep in sorted(groups, key=lambda g: min(g[0])):
        idx = [kept[i] for i in members]
        label = min(povm.labels[i] for i in idx)
        total = povm.effects[idx].sum(axis=0)
        total = (total + total.conj().T) / 2
        total_tr = float(np.real(np.trace(total)))
        for i in idx:
            mapping[povm.labels[i]] = label
            h[povm.labels[i]] = float(traces[i] / total_tr)
        reps[label] = povm.labels[kept[rep]]
        out_labels.append(label)
        out_effects.append(total)
    reduced = DiscretePovm(tuple(out_labels), np.stack(out_effects))
    return ReductionReport(mapping, reduced, tuple(dropped), h, reps)


def _split_vanishing(povm: DiscretePovm, eps_zero: float):
    traces = povm.traces()
    kept = [i for i in range(len(povm)) if traces[i] >= eps_zero]
    dropped = [povm.labels[i] for i in range(len(povm)) if traces[i] < eps_zero]
    return kept, dropped


def reduce(povm: DiscretePovm, tol=None) -> ReductionReport:
    """Minimal sufficient reduction by grouping proportional effects.

    Effects with trace below ``tol.zero`` are dropped.  Remaining outcomes
    are joined when their trace-normalized effects agree within
    ``tol.prop`` in Frobenius norm, and each group is replaced by the sum of
    its members.  Raises :class:`ToleranceAmbiguity` when near-proportional
    chains would merge effects that are not themselves close.
    """
    tol = resolve(tol)
    kept, dropped = _split_vanishing(povm, tol.zero)
    if not kept:
        raise VanishingOutcome("every effect vanishes")
    sub = povm.subset(kept)
    vectors = normalized_effects(sub).reshape(len(sub), -1)
    groups = _group(vectors, tol.prop, "fro", sub.traces(), sub.labels)
    return _report(povm, kept, groups, dropped)


def lsb_vectors(povm: DiscretePovm, ensemble: StateEnsemble, tol=None) -> np.ndarray:
    """Likelihood-ratio vectors, one row per outcome.

    Entry ``[x, i]`` is ``tr[rho_i A(x)] / tr[rho_* A(x)]`` where ``rho_*`` is
    the ensemble's pivotal state.
    """
    tol = resolve(tol)
    if ensemble.dim != povm.dim:
        raise DimensionMismatch(f"dim-{ensemble.dim} ensemble for a dim-{povm.dim} POVM")
    num = np.real(np.einsum("ijk,xkj->xi", ensemble.states, povm.effects))
    den = np.real(np.einsum("jk,xkj->x", ensemble.pivotal, povm.effects))
    if np.any(den < tol.zero):
        bad = [povm.labels[i] for i in np.flatnonzero(den < tol.zero)]
        raise VanishingOutcome(f"outcomes {bad} have zero pivotal probability")
    return num / den[:, None]


def reduce_via_lsb(povm: DiscretePovm, ensemble: "StateEnsemble | None" = None, tol=None):
    """Reduction that groups outcomes by equal likelihood-ratio vectors."""
    tol = resolve(tol)
    if ensemble is None:
        ensemble = tomographic_ensemble(povm.dim)
    kept, dropped = _split_vanishing(povm, tol.zero)
    if not kept:
        raise VanishingOutcome("every effect vanishes")
    sub = povm.subset(kept)
    vectors = lsb_vectors(sub, ensemble, tol)
    groups = _group(vectors, tol.lsb, "max", sub.traces(), sub.labels)
    return _report(povm, kept, groups, dropped)


def is_pairwise_linearly_independent(povm: DiscretePovm, tol=None) -> bool:
    tol = resolve(tol)
    traces = povm.traces()
    if np.any(traces < tol.zero):
        return False
    vectors = normalized_effects(povm).reshape(len(povm), -1)
    dist = _pairwise_distances(vectors, "fro")
    np.fill_diagonal(dist, np.inf)
    return bool(np.all(dist > tol.prop))


@dataclass(frozen=True)
class Sufficiency:
    """Verdict of :func:`is_sufficient_statistic` with its factorization.

    ``h[x]`` is ``tr A(x)`` and ``G[t]`` the trace-normalized representative
    of fibre ``t``, so that ``A(x) == h[x] * G[T(x)]`` when ``holds``.
    """

    holds: bool
    h: dict
    G: dict
    violations: tuple = ()

    def __bool__(self):
        return self.holds


def is_sufficient_statistic(
    povm: DiscretePovm, statistic: "Mapping[str, str] | Callable[[str], str]", tol=None
) -> Sufficiency:
    tol = resolve(tol)
    fn = statistic.__getitem__ if isinstance(statistic, Mapping) else statistic
    traces = povm.traces()
    normed = np.zeros_like(povm.effects)
    live = traces >= tol.zero
    normed[live] = povm.effects[live] / traces[live, None, None]
    fibres: dict[str, list[int]] = {}
    for i, x in enumerate(povm.labels):
        fibres.setdefault(str(fn(x)), []).append(i)
    h = {x: float(traces[i]) for i, x in enumerate(povm.labels)}
    G, violations = {}, []
    for t, members in fibres.items():
        alive = [i for i in members if live[i]]
        if not alive:
            G[t] = np.zeros((povm.dim, povm.dim), dtype=np.complex128)
            continue
        rep = max(alive, key=lambda i: (traces[i], -i))
        G[t] = normed[rep]
        for a_pos, i in enumerate(alive):
            for j in alive[a_pos + 1 :]:
                gap = float(np.linalg.norm(normed[i] - normed[j]))
                if gap > tol.prop:
                    violations.append((t, povm.labels[i], povm.labels[j], gap))
    return Sufficiency(not violations, h, G, tuple(violations))


def _max_matching(adj: list[list[int]], n_right: int) -> list[int]:
    # Kuhn's augmenting-path algorithm; returns match_left[i] (or -1).
    match_right = [-1] * n_right

    def augment(i, seen):
        for j in adj[i]:
            if not seen[j]:
                seen[j] = True
                if match_right[j] == -1 or augment(match_right[j], seen):
                    match_right[j] = i
                    return True
        return False

    for i in range(len(adj)):
        augment(i, [False] * n_right)
    match_left = [-1] * len(adj)
    for j, i in enumerate(match_right):
        if i != -1:
            match_left[i] = j
    return match_left


def strict_isomorphic(a: DiscretePovm, b: DiscretePovm, tol=None) -> "dict[str, str] | None":
    """Label bijection carrying each effect of ``a`` to an equal effect of ``b``.

    Returns ``None`` when no such bijection exists.  Raises
    :class:`AmbiguousMatching` if an effect lies within ``tol.iso`` of two
    partners that are not within ``tol.iso`` of each other.
    """
    tol = resolve(tol)
    if len(a) != len(b) or a.dim != b.dim:
        return None
    fa = a.effects.reshape(len(a), -1)
    fb = b.effects.reshape(len(b), -1)
    close = np.linalg.norm(fa[:, None, :] - fb[None, :, :], axis=-1) <= tol.iso
    within_b = np.linalg.norm(fb[:, None, :] - fb[None, :, :], axis=-1) <= tol.iso
    within_a = np.linalg.norm(fa[:, None, :] - fa[None, :, :], axis=-1) <= tol.iso
    for i in range(len(a)):
        js = np.flatnonzero(close[i])
        if len(js) > 1 and not within_b[np.ix_(js, js)].all():
            raise AmbiguousMatching(
                f"effect {a.labels[i]!r} matches non-equivalent partners "
                f"{[b.labels[j] for j in js]}"
            )
    for j in range(len(b)):
        is_ = np.flatnonzero(close[:, j])
        if len(is_) > 1 and not within_a[np.ix_(is_, is_)].all():
            raise AmbiguousMatching(
                f"effect {b.labels[j]!r} matches non-equivalent partners "
                f"{[a.labels[i] for i in is_]}"
            )
    adj = [list(np.flatnonzero(close[i])) for i in range(len(a))]
    match = _max_matching(adj, len(b))
    if any(j == -1 for j in match):
        return None
    return {a.labels[i]: b.labels[j] for i, j in enumerate(match)}


def non_vanishing_part(povm: DiscretePovm, tol=None) -> DiscretePovm:
    tol = resolve(tol)
    kept, _ = _split_vanishing(povm, tol.zero)
    return povm.subset(kept)


def almost_isomorphic(a: DiscretePovm, b: DiscretePovm, tol=None) -> "dict[str, str] | None":
    """Strict isomorphism between the non-vanishing parts of ``a`` and ``b``."""
    tol = resolve(tol)
    pa, pb = non_vanishing_part(a, tol), non_vanishing_part(b, tol)
    if len(pa) == 0 or len(pb) == 0:
        return None
    return strict_isomorphic(pa, pb, tol)
