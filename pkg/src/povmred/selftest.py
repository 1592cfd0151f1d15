"""Seeded property suite behind the ``selftest`` command.

Each property draws ``trials`` random instances and stops at the first
counterexample, which is dumped in the report.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from povmred import io
from povmred.config import resolve
from povmred.divergences import hellinger, tv_metric
from povmred.fuzzy_order import equivalent, kernel_product, post_process, projection_map
from povmred.generators import (
    computational_pvm,
    random_density,
    random_instrument,
    random_markov,
    random_povm,
    random_unitary,
    split_povm,
)
from povmred.instruments import check_conservation, compose, luders_instrument
from povmred.matops import eig_hermitian, trace_norm
from povmred.povm import completeness_defect, outcome_distribution, pushforward, validate_povm
from povmred.reduction import (
    is_pairwise_linearly_independent,
    is_sufficient_statistic,
    reduce,
    reduce_via_lsb,
    strict_isomorphic,
    almost_isomorphic,
)

log = logging.getLogger(__name__)

DIMS = (2, 3, 4)


@dataclass
class PropertyResult:
    name: str
    passed: bool
    trials: int
    counterexample: dict = field(default_factory=dict)
    note: str = ""

    def to_json(self) -> dict:
        out = {"property": self.name, "passed": self.passed, "trials": self.trials}
        if self.counterexample:
            out["counterexample"] = self.counterexample
        if self.note:
            out["note"] = self.note
        return out


def _seeds(seed: int, salt: int, trials: int):
    for t in range(trials):
        yield t, (seed * 1_000_003 + salt * 10_007 + t) % 2**64


def _instance(s: int, max_outcomes: int = 5):
    rng = np.random.default_rng(s)
    d = int(rng.choice(DIMS))
    n = int(rng.integers(2, max_outcomes + 1))
    return d, n


def lossy_merge(povm):
    """Merge the first two outcomes; information-losing for generic POVMs."""
    first, second = povm.labels[:2]
    return pushforward(povm, lambda x: first if x == second else x)


def prop_eig_reconstruction(seed, trials, tol):
    for t, s in _seeds(seed, 1, trials):
        d, _ = _instance(s)
        rng = np.random.default_rng(s)
        m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        m = m + m.conj().T
        w, v = eig_hermitian(m)
        err = np.linalg.norm(v @ np.diag(w) @ v.conj().T - m) / np.linalg.norm(m)
        if err > 1e-9:
            return {"seed": s, "relative_error": err}
    return None


def prop_uniqueness(seed, trials, tol):
    for t, s in _seeds(seed, 2, trials):
        d, n = _instance(s)
        a = random_povm(d, n, s)
        b = split_povm(a, random_markov(3, n, s + 1), seed=s + 2)
        ra, rb = reduce(a, tol).reduced, reduce(b, tol).reduced
        if almost_isomorphic(ra, rb, tol) is None:
            return {"seed": s, "povm": io.povm_to_json(a)}
        if not is_pairwise_linearly_independent(rb, tol):
            return {"seed": s, "reason": "reduction not pairwise linearly independent"}
        if strict_isomorphic(reduce(rb, tol).reduced, rb, tol) is None:
            return {"seed": s, "reason": "reduction not idempotent"}
    return None


def prop_divergence_conservation(seed, trials, tol, inject_lossy=False):
    for t, s in _seeds(seed, 3, trials):
        d, n = _instance(s)
        a = split_povm(random_povm(d, n, s), random_markov(2, n, s + 1))
        reduced = reduce(a, tol).reduced
        if inject_lossy:
            reduced = lossy_merge(reduced)
        rho, sigma = random_density(d, s + 2), random_density(d, s + 3)
        h_a = hellinger(outcome_distribution(a, rho), outcome_distribution(a, sigma))
        h_r = hellinger(outcome_distribution(reduced, rho), outcome_distribution(reduced, sigma))
        if abs(h_a - h_r) > 1e-8:
            return {"seed": s, "hellinger_full": h_a, "hellinger_reduced": h_r}
    return None


def prop_monotonicity(seed, trials, tol):
    for t, s in _seeds(seed, 4, trials):
        d, n = _instance(s)
        a = random_povm(d, n, s)
        b = post_process(random_markov(3, n, s + 1), a)
        rho, sigma = random_density(d, s + 2), random_density(d, s + 3)
        h_a = hellinger(outcome_distribution(a, rho), outcome_distribution(a, sigma))
        h_b = hellinger(outcome_distribution(b, rho), outcome_distribution(b, sigma))
        if h_b > h_a + 1e-9:
            return {"seed": s, "before": h_a, "after": h_b}
    return None


def prop_metric_bound(seed, trials, tol):
    for t, s in _seeds(seed, 5, trials):
        d, n = _instance(s)
        a = random_povm(d, n, s)
        rho, sigma = random_density(d, s + 2), random_density(d, s + 3)
        p, q = outcome_distribution(a, rho), outcome_distribution(a, sigma)
        tv, tn, h = tv_metric(p, q), trace_norm(rho - sigma), hellinger(p, q)
        if tv > tn + 1e-9 or not 0 <= h <= 2:
            return {"seed": s, "tv": tv, "trace_norm": tn, "hellinger": h}
    return None


def prop_lsb_partition(seed, trials, tol):
    for t, s in _seeds(seed, 6, trials):
        d, n = _instance(s)
        a = random_povm(d, n, s)
        if t % 2:
            a = split_povm(a, random_markov(2, n, s + 1), seed=s)
        if reduce(a, tol).partition() != reduce_via_lsb(a, tol=tol).partition():
            return {"seed": s, "povm": io.povm_to_json(a)}
    return None


def prop_method_agreement(seed, trials, tol):
    for t, s in _seeds(seed, 7, trials):
        n = 2 + t % 3
        a = random_povm(2, n, s)
        b = split_povm(a, random_markov(2, n, s + 1), seed=s) if t % 2 == 0 else random_povm(2, n, s + 9)
        lp, red = equivalent(a, b, "lp", tol), equivalent(a, b, "reduce", tol)
        if lp.holds != red.holds or lp.holds != (t % 2 == 0):
            return {"seed": s, "lp": lp.holds, "reduce": red.holds}
    return None


def prop_kernel_product(seed, trials, tol):
    for t, s in _seeds(seed, 8, trials):
        d, n = _instance(s)
        b = random_povm(d, n, s)
        kappa = random_markov(3, n, s + 1, cols=b.labels)
        c = kernel_product(kappa, b)
        marginal = pushforward(c, projection_map(kappa.rows, b.labels, 2))
        err = max(np.abs(marginal[y] - b[y]).max() for y in b.labels)
        if err > 1e-9 or not is_sufficient_statistic(c, projection_map(kappa.rows, b.labels, 2), tol):
            return {"seed": s, "marginal_error": err}
    return None


def prop_compose_completeness(seed, trials, tol):
    for t, s in _seeds(seed, 9, trials):
        d, n = _instance(s)
        inst = random_instrument(d, 2, 2, s)
        c = compose(inst, random_povm(d, n, s + 1), tol)
        if completeness_defect(c) > tol.comp:
            return {"seed": s, "defect": completeness_defect(c)}
    return None


def prop_condition2_invariance(seed, trials, tol):
    for t, s in _seeds(seed, 10, trials):
        d = 2
        if t % 2 == 0:
            u = random_unitary(d, s)
            pvm = validate_povm([u @ e @ u.conj().T for e in computational_pvm(d).effects])
            inst, b = luders_instrument(pvm), pvm
        else:
            inst, b = random_instrument(d, 2, 1, s), random_povm(d, 3, s + 1)
        b2 = split_povm(b, random_markov(2, len(b), s + 2), seed=s)
        v1, v2 = check_conservation(inst, b, tol=tol), check_conservation(inst, b2, tol=tol)
        if v1.condition2 != v2.condition2 or (v1.condition1 and not v1.condition2):
            return {"seed": s, "original": v1.condition2, "split": v2.condition2}
    return None


PROPERTIES = {
    "eig_reconstruction": prop_eig_reconstruction,
    "reduction_uniqueness_and_independence": prop_uniqueness,
    "divergence_conservation": prop_divergence_conservation,
    "hellinger_monotonicity": prop_monotonicity,
    "metric_bound": prop_metric_bound,
    "lsb_partition_agreement": prop_lsb_partition,
    "lp_reduce_agreement": prop_method_agreement,
    "kernel_product_marginal": prop_kernel_product,
    "compose_completeness": prop_compose_completeness,
    "condition2_invariance": prop_condition2_invariance,
}


def run_selftest(seed: int = 0, trials: int = 20, tol=None, inject_lossy: bool = False):
    """Run every property; returns a list of :class:`PropertyResult`."""
    tol = resolve(tol)
    if trials == 0:
        log.warning("selftest ran with zero trials; every property passes vacuously")
    results = []
    for name, prop in PROPERTIES.items():
        kwargs = {"inject_lossy": True} if inject_lossy and name == "divergence_conservation" else {}
        try:
            counterexample = prop(seed, trials, tol, **kwargs)
        except Exception as exc:  # report, never crash the suite
            counterexample = {"error": f"{type(exc).__name__}: {exc}"}
        note = "vacuous: zero trials" if trials == 0 else ""
        results.append(PropertyResult(name, counterexample is None, trials, counterexample or {}, note))
    return results
