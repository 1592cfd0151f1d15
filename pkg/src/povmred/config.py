"""Numerical tolerances shared by every module."""

from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    herm: float = 1e-10  # relative Hermiticity defect accepted before symmetrizing
    pd: float = 1e-9  # minimum eigenvalue for inverse square roots
    psd: float = 1e-9
    comp: float = 1e-8  # completeness, Frobenius norm
    zero: float = 1e-10  # trace below which an effect is treated as vanishing
    prop: float = 1e-8  # trace-normalized proportionality, Frobenius norm
    lsb: float = 1e-7  # likelihood-ratio vector agreement, max norm
    lp: float = 1e-7  # feasibility threshold on the optimal l-inf slack
    iso: float = 1e-7  # effect matching in isomorphism checks
    prob_zero: float = 1e-14  # probabilities below this count as exact zeros

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not value > 0:
                raise ValueError(f"tolerance {f.name} must be positive, got {value!r}")

    def with_(self, **changes) -> "Tolerances":
        return replace(self, **changes)

    @classmethod
    def names(cls) -> list[str]:
        return [f.name for f in fields(cls)]


DEFAULT_TOL = Tolerances()


def resolve(tol: "Tolerances | None") -> Tolerances:
    return DEFAULT_TOL if tol is None else tol
