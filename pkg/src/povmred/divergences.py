"""f-divergences and the total variation distance between outcome distributions."""

import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from povmred.config import resolve
from povmred.errors import DimensionMismatch, ValidationError
from povmred.povm import DiscretePovm, outcome_distribution


@dataclass(frozen=True)
class FGenerator:
    """Convex ``f`` with ``f(1) = 0`` and ``f_star_at_0 = lim_{t->inf} f(t)/t``."""

    tag: str
    f: Callable[[float], float]
    f_star_at_0: float


def _xlogx(t: float) -> float:
    return 0.0 if t == 0 else t * math.log(t)


HELLINGER = FGenerator("hellinger", lambda t: (math.sqrt(t) - 1.0) ** 2, 1.0)
KL = FGenerator("kl", _xlogx, math.inf)
CHI2 = FGenerator("chi2", lambda t: (t - 1.0) ** 2, math.inf)

GENERATORS = {g.tag: g for g in (HELLINGER, KL, CHI2)}


def get_generator(tag: "str | FGenerator") -> FGenerator:
    if isinstance(tag, FGenerator):
        return tag
    try:
        return GENERATORS[tag]
    except KeyError:
        raise ValueError(f"unknown f-divergence {tag!r}; choose from {sorted(GENERATORS)}") from None


def _check_pair(p, q):
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape or p.ndim != 1:
        raise DimensionMismatch(f"distributions have shapes {p.shape} and {q.shape}")
    for name, v in (("P", p), ("Q", q)):
        if v.min(initial=0.0) < -1e-12 or abs(v.sum() - 1) > 1e-9:
            raise ValidationError(f"{name} is not a probability vector (sum {v.sum()!r})")
    return p, q


def f_divergence(f, p, q, tol=None) -> float:
    """``sum_x q(x) f(p(x)/q(x))`` with the zero conventions.

    Probabilities below ``tol.prob_zero`` count as zero.  A term with
    ``q(x) = 0`` contributes ``p(x) f*(0)`` if ``p(x) > 0`` and nothing
    otherwise, so the result is ``inf`` when ``f*(0)`` is infinite and ``p``
    puts mass where ``q`` has none.
    """
    tol = resolve(tol)
    gen = get_generator(f)
    p, q = _check_pair(p, q)
    total = 0.0
    for pi, qi in zip(p, q):
        p_zero = pi < tol.prob_zero
        if qi < tol.prob_zero:
            if not p_zero:
                total += pi * gen.f_star_at_0
        else:
            total += qi * gen.f(0.0 if p_zero else pi / qi)
    return max(total, 0.0)


def hellinger(p, q, tol=None) -> float:
    return f_divergence(HELLINGER, p, q, tol)


def tv_metric(p, q) -> float:
    """Total variation ``sup_E |P(E) - Q(E)|``, i.e. half the l1 distance."""
    p, q = _check_pair(p, q)
    return float(0.5 * np.abs(p - q).sum())


def divergence_between_states(f, povm: DiscretePovm, rho, sigma, tol=None) -> float:
    return f_divergence(f, outcome_distribution(povm, rho), outcome_distribution(povm, sigma), tol)
