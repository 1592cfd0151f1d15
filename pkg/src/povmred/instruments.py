"""CP instruments in Kraus form and information conservation checks."""

import itertools
from dataclasses import dataclass, field

import numpy as np

from povmred.config import resolve
from povmred.errors import CompletenessViolated, DimensionMismatch, DuplicateLabel
from povmred.fuzzy_order import equivalent, pair_label, projection_map
from povmred.matops import as_cmatrix
from povmred.povm import DiscretePovm, pushforward, validate_povm
from povmred.reduction import is_sufficient_statistic, normalized_effects

LP_CROSS_CHECK_LIMIT = 400  # max |C| * |B| for the LP cross-check of condition 2


@dataclass(frozen=True, eq=False)
class KrausInstrument:
    labels: tuple[str, ...]
    kraus: tuple[np.ndarray, ...]  # per outcome, shape (k, d, d)

    @classmethod
    def from_kraus(cls, families, labels=None, tol=None) -> "KrausInstrument":
        """Validate normalization ``sum_{x,k} K^H K == I`` and build the instrument."""
        tol = resolve(tol)
        fams = []
        for fam in families:
            mats = [as_cmatrix(k) for k in fam]
            if not mats:
                raise DimensionMismatch("an outcome needs at least one Kraus operator")
            fams.append(np.stack(mats))
        if not fams:
            raise DimensionMismatch("an instrument needs at least one outcome")
        if labels is None:
            labels = [str(i) for i in range(len(fams))]
        labels = tuple(str(x) for x in labels)
        if len(labels) != len(fams):
            raise DimensionMismatch(f"{len(labels)} labels for {len(fams)} outcomes")
        if len(set(labels)) != len(labels):
            raise DuplicateLabel("instrument labels must be unique")
        shapes = {f.shape[1:] for f in fams}
        if len(shapes) != 1:
            raise DimensionMismatch(f"Kraus operators have differing shapes {sorted(shapes)}")
        for f in fams:
            f.setflags(write=False)
        inst = cls(labels, tuple(fams))
        defect = float(np.linalg.norm(inst.total() - np.eye(inst.dim)))
        if defect > tol.comp:
            raise CompletenessViolated(
                f"instrument is not normalized: ||sum K^H K - I||_F = {defect:.3e}",
                magnitude=defect,
            )
        return inst

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[1]

    def total(self) -> np.ndarray:
        return sum(np.einsum("kji,kjl->il", f.conj(), f) for f in self.kraus)

    def __len__(self):
        return len(self.labels)


def heisenberg_apply(inst: KrausInstrument, label: str, a) -> np.ndarray:
    """``sum_k K_k^H a K_k`` for the Kraus family of outcome ``label``."""
    try:
        fam = inst.kraus[inst.labels.index(label)]
    except ValueError:
        raise KeyError(f"unknown instrument outcome {label!r}") from None
    a = np.asarray(a)
    if a.shape != (inst.dim, inst.dim):
        raise DimensionMismatch(f"operator of shape {a.shape} for a dim-{inst.dim} instrument")
    out = np.einsum("kji,jl,klm->im", fam.conj(), a, fam)
    return (out + out.conj().T) / 2


def compose(inst: KrausInstrument, b: DiscretePovm, tol=None) -> DiscretePovm:
    """Joint POVM of ``inst`` followed by ``b``: ``C(x,y) = I_x(B(y))``."""
    if inst.dim != b.dim:
        raise DimensionMismatch(f"instrument dim {inst.dim} vs POVM dim {b.dim}")
    labels, effects = [], []
    for x in inst.labels:
        for y, effect in b.items():
            labels.append(pair_label(x, y))
            effects.append(heisenberg_apply(inst, x, effect))
    return validate_povm(effects, labels, tol)


def luders_instrument(pvm: DiscretePovm) -> KrausInstrument:
    """Lueders instrument whose single Kraus operator per outcome is the projector."""
    return KrausInstrument.from_kraus([[e] for e in pvm.effects], pvm.labels)


def identity_instrument(dim: int) -> KrausInstrument:
    return KrausInstrument.from_kraus([[np.eye(dim)]], ["id"])


@dataclass(frozen=True, eq=False)
class ConservationVerdict:
    condition1_projection: bool
    condition1_exhaustive: "bool | None"  # None: not attempted
    condition2: bool
    evidence: dict = field(default_factory=dict)
    borderline: bool = False

    @property
    def condition1(self) -> "bool | None":
        """True, False, or None when undecided."""
        if self.condition1_projection or self.condition1_exhaustive:
            return True
        if self.condition1_exhaustive is False:
            return False
        return None


def _matches_marginal(c: DiscretePovm, b: DiscretePovm, statistic, tol) -> bool:
    image = pushforward(c, statistic)
    for y, effect in b.items():
        got = image[y] if y in image.labels else np.zeros_like(effect)
        if np.linalg.norm(got - effect) > tol.comp:
            return False
    return set(image.labels) <= set(b.labels)


def search_statistic(c: DiscretePovm, b: DiscretePovm, tol=None) -> "dict[str, str] | None":
    """Find a sufficient ``T: labels(c) -> labels(b)`` with ``c_T == b``, if any.

    Equivalent to enumerating every map, but prunes: a non-vanishing
    ``C(z)`` can only be sent to ``y`` when ``C(z)`` is proportional to
    ``B(y)``, since the fibre over ``y`` must be proportional and sum to
    ``B(y)``.  Vanishing outcomes are assigned arbitrarily.
    """
    tol = resolve(tol)
    tc, tb = c.traces(), b.traces()
    live_c = [i for i in range(len(c)) if tc[i] >= tol.zero]
    live_b = [j for j in range(len(b)) if tb[j] >= tol.zero]
    nc = normalized_effects(c.subset(live_c))
    nb = normalized_effects(b.subset(live_b))
    options = []
    for pos, i in enumerate(live_c):
        allowed = [
            b.labels[j] for q, j in enumerate(live_b) if np.linalg.norm(nc[pos] - nb[q]) <= tol.prop
        ]
        if not allowed:
            return None
        options.append(allowed)
    default = b.labels[0]
    for choice in itertools.product(*options):
        statistic = {label: default for label in c.labels}
        for i, y in zip(live_c, choice):
            statistic[c.labels[i]] = y
        if _matches_marginal(c, b, statistic, tol) and is_sufficient_statistic(c, statistic, tol):
            return statistic
    return None


def check_conservation(
    inst: KrausInstrument, b: DiscretePovm, exhaustive_limit: int = 10**6, tol=None
) -> ConservationVerdict:
    """Evaluate both information conservation conditions for ``inst * b``.

    Condition 1 asks for a sufficient statistic on the joint outcomes whose
    image reproduces ``b`` exactly; it is tried for the projection onto the
    second outcome and, when the map space has at most ``exhaustive_limit``
    elements, over all maps.  Condition 2 asks for ``inst * b`` to be
    equivalent to ``b``.
    """
    tol = resolve(tol)
    c = compose(inst, b, tol)
    proj = projection_map(inst.labels, b.labels, component=2)
    cond1_proj = _matches_marginal(c, b, proj, tol) and bool(is_sufficient_statistic(c, proj, tol))

    evidence: dict = {}
    exhaustive = None
    if cond1_proj:
        evidence["statistic"] = proj
    elif len(b) ** len(c) <= exhaustive_limit:
        found = search_statistic(c, b, tol)
        exhaustive = found is not None
        if found is not None:
            evidence["statistic"] = found

    eq = equivalent(c, b, "reduce", tol)
    evidence["bijection"] = eq.evidence["bijection"]
    borderline = False
    if len(c) * len(b) <= LP_CROSS_CHECK_LIMIT:
        lp = equivalent(c, b, "lp", tol)
        evidence["lp"] = lp.evidence
        if lp.holds != eq.holds:
            borderline = True
            evidence["disagreement"] = f"reduce says {eq.holds}, lp says {lp.holds}"
    if (cond1_proj or exhaustive) and not eq.holds:
        # Condition 1 implies condition 2; a violation means tolerances are off.
        borderline = True
        evidence["disagreement"] = "condition 1 holds but condition 2 fails"
    return ConservationVerdict(cond1_proj, exhaustive, eq.holds, evidence, borderline)
