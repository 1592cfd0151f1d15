"""Discrete POVMs, density matrices and tomographic state ensembles."""

from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from povmred.config import resolve
from povmred.errors import (
    CompletenessViolated,
    DimensionMismatch,
    DuplicateLabel,
    NotADensityMatrix,
    NotPSD,
    ValidationError,
)
from povmred.matops import eig_hermitian, eigvalsh, hermitian


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DiscretePovm:
    """A finite family of labelled effects summing to the identity.

    Instances are normally obtained from :func:`validate_povm`; the
    constructor itself only checks shapes and label uniqueness.
    """

    labels: tuple[str, ...]
    effects: np.ndarray  # shape (n, d, d), complex, read-only

    def __post_init__(self):
        effects = np.asarray(self.effects, dtype=np.complex128)
        if effects.ndim != 3 or effects.shape[1] != effects.shape[2]:
            raise DimensionMismatch(f"effects must have shape (n, d, d), got {effects.shape}")
        labels = tuple(str(x) for x in self.labels)
        if len(labels) != effects.shape[0]:
            raise DimensionMismatch(f"{len(labels)} labels for {effects.shape[0]} effects")
        if len(set(labels)) != len(labels):
            dup = sorted({x for x in labels if labels.count(x) > 1})
            raise DuplicateLabel(f"duplicate label(s): {dup}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "effects", _frozen(effects.copy()))

    @property
    def dim(self) -> int:
        return self.effects.shape[1]

    def __len__(self):
        return len(self.labels)

    def __getitem__(self, label: str) -> np.ndarray:
        return self.effects[self.index(label)]

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(label) from None

    def items(self):
        return zip(self.labels, self.effects)

    def traces(self) -> np.ndarray:
        return np.real(np.trace(self.effects, axis1=1, axis2=2))

    def subset(self, keep: Sequence[int]) -> "DiscretePovm":
        keep = list(keep)
        return DiscretePovm(tuple(self.labels[i] for i in keep), self.effects[keep])

    def relabel(self, mapping: Mapping[str, str]) -> "DiscretePovm":
        return DiscretePovm(tuple(mapping[x] for x in self.labels), self.effects)

    def __repr__(self):
        return f"DiscretePovm(dim={self.dim}, labels={list(self.labels)})"


def validate_povm(matrices, labels=None, tol=None) -> DiscretePovm:
    """Check the POVM axioms and build a :class:`DiscretePovm`.

    Each matrix is symmetrized after the Hermiticity check.  Raises
    :class:`NotPSD`, :class:`CompletenessViolated`,
    :class:`DimensionMismatch` or :class:`DuplicateLabel`; every error
    carries the size of the violation in ``magnitude``.
    """
    tol = resolve(tol)
    mats = [hermitian(m, tol) for m in matrices]
    if not mats:
        raise ValidationError("a POVM needs at least one outcome")
    if labels is None:
        labels = [str(i) for i in range(len(mats))]
    labels = [str(x) for x in labels]
    if len(labels) != len(mats):
        raise DimensionMismatch(f"{len(labels)} labels for {len(mats)} effects")
    dims = {m.shape[0] for m in mats}
    if len(dims) != 1:
        raise DimensionMismatch(f"effects have differing dimensions {sorted(dims)}")
    povm = DiscretePovm(tuple(labels), np.stack(mats))
    for label, effect in povm.items():
        w = eigvalsh(effect)
        if w[-1] < -tol.psd:
            raise NotPSD(
                f"effect {label!r} is not PSD: min eigenvalue {w[-1]:.3e}", magnitude=-w[-1]
            )
        if w[0] > 1 + tol.psd:
            raise NotPSD(
                f"effect {label!r} has operator norm {w[0]:.6g} > 1", magnitude=w[0] - 1
            )
    deficit = completeness_defect(povm)
    if deficit > tol.comp:
        raise CompletenessViolated(
            f"effects do not sum to the identity: ||sum - I||_F = {deficit:.3e}",
            magnitude=deficit,
        )
    return povm


def completeness_defect(povm: DiscretePovm) -> float:
    return float(np.linalg.norm(povm.effects.sum(axis=0) - np.eye(povm.dim)))


def validate_density(m, tol=None) -> np.ndarray:
    tol = resolve(tol)
    rho = hermitian(m, tol)
    w = eigvalsh(rho)
    if w[-1] < -tol.psd:
        raise NotADensityMatrix(f"state is not PSD: min eigenvalue {w[-1]:.3e}", magnitude=-w[-1])
    tr = float(np.real(np.trace(rho)))
    if abs(tr - 1) > 1e-9:
        raise NotADensityMatrix(f"state has trace {tr!r}, expected 1", magnitude=abs(tr - 1))
    return _frozen(rho)


def outcome_distribution(povm: DiscretePovm, rho) -> np.ndarray:
    """Outcome probabilities ``tr[rho A(x)]`` in label order."""
    rho = np.asarray(rho)
    if rho.shape != (povm.dim, povm.dim):
        raise DimensionMismatch(f"state of shape {rho.shape} for a dim-{povm.dim} POVM")
    p = np.real(np.einsum("ij,xji->x", rho, povm.effects))
    if p.min() < -1e-10 or p.max() > 1 + 1e-10:
        raise ValidationError(f"probabilities out of range [{p.min():.3e}, {p.max():.3e}]")
    p = np.clip(p, 0.0, 1.0)
    if abs(p.sum() - 1) > 1e-9:
        raise ValidationError(f"probabilities sum to {p.sum()!r}")
    return p


def pushforward(
    povm: DiscretePovm, f: "Mapping[str, str] | Callable[[str], str]"
) -> DiscretePovm:
    """Coarse-grain ``povm`` through the relabelling ``f``.

    Outcome ``y`` of the result carries the sum of all effects ``A(x)`` with
    ``f(x) == y``.  Output labels appear in order of first occurrence.
    """
    fn = f.__getitem__ if isinstance(f, Mapping) else f
    order: dict[str, np.ndarray] = {}
    for label, effect in povm.items():
        y = str(fn(label))
        if y in order:
            order[y] = order[y] + effect
        else:
            order[y] = effect.copy()
    return DiscretePovm(tuple(order), np.stack(list(order.values())))


@dataclass(frozen=True, eq=False)
class StateEnsemble:
    states: np.ndarray  # (m, d, d)
    weights: np.ndarray  # (m,)
    pivotal: np.ndarray  # (d, d)
    informationally_complete: bool

    @property
    def dim(self) -> int:
        return self.pivotal.shape[0]

    def __len__(self):
        return len(self.weights)


def gram_rank(states: np.ndarray, rtol: float = 1e-10) -> int:
    """Rank of the Hilbert-Schmidt Gram matrix of ``states``."""
    flat = states.reshape(len(states), -1)
    gram = np.real(flat.conj() @ flat.T)
    w = eigvalsh(gram)
    return int(np.sum(w > rtol * max(w[0], 1.0)))


def make_ensemble(states, weights=None, tol=None) -> StateEnsemble:
    states = np.stack([validate_density(s, tol) for s in states])
    m, d = states.shape[0], states.shape[1]
    if weights is None:
        weights = np.full(m, 1.0 / m)
    weights = np.asarray(weights, dtype=float)
    if np.any(weights <= 0) or abs(weights.sum() - 1) > 1e-12:
        raise ValidationError("ensemble weights must be positive and sum to 1")
    pivotal = np.einsum("i,ijk->jk", weights, states)
    pivotal = (pivotal + pivotal.conj().T) / 2
    if eig_hermitian(pivotal)[0][-1] <= 0:
        raise ValidationError("pivotal state is not positive definite")
    complete = gram_rank(states) == d * d
    return StateEnsemble(_frozen(states), _frozen(weights), _frozen(pivotal), complete)


def tomographic_ensemble(dim: int) -> StateEnsemble:
    """``dim**2`` pure states spanning the Hermitian matrices, uniform weights.

    Basis projectors ``|j><j|`` come first, then for each ``j < k`` the
    states ``(|j>+|k>)/sqrt2`` and ``(|j>+i|k>)/sqrt2``.
    """
    if dim < 1:
        raise ValueError("dim must be positive")
    basis = np.eye(dim, dtype=np.complex128)
    vecs = [basis[j] for j in range(dim)]
    for j in range(dim):
        for k in range(j + 1, dim):
            vecs.append((basis[j] + basis[k]) / np.sqrt(2))
            vecs.append((basis[j] + 1j * basis[k]) / np.sqrt(2))
    states = [np.outer(v, v.conj()) for v in vecs]
    ens = make_ensemble(states)
    if not ens.informationally_complete:
        raise AssertionError("tomographic ensemble failed the completeness check")
    return ens
