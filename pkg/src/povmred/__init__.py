"""Minimal sufficient reduction and fuzzy ordering of discrete POVMs."""

from povmred.config import DEFAULT_TOL, Tolerances
from povmred.povm import (
    DiscretePovm,
    StateEnsemble,
    outcome_distribution,
    pushforward,
    tomographic_ensemble,
    validate_density,
    validate_povm,
)
from povmred.reduction import (
    ReductionReport,
    almost_isomorphic,
    is_pairwise_linearly_independent,
    is_sufficient_statistic,
    lsb_vectors,
    reduce,
    reduce_via_lsb,
    strict_isomorphic,
)
from povmred.fuzzy_order import (
    MarkovMatrix,
    OrderVerdict,
    equivalent,
    kernel_product,
    post_process,
    preceq,
)
from povmred.instruments import (
    KrausInstrument,
    check_conservation,
    compose,
    heisenberg_apply,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOL",
    "Tolerances",
    "DiscretePovm",
    "StateEnsemble",
    "outcome_distribution",
    "pushforward",
    "tomographic_ensemble",
    "validate_density",
    "validate_povm",
    "ReductionReport",
    "almost_isomorphic",
    "is_pairwise_linearly_independent",
    "is_sufficient_statistic",
    "lsb_vectors",
    "reduce",
    "reduce_via_lsb",
    "strict_isomorphic",
    "MarkovMatrix",
    "OrderVerdict",
    "equivalent",
    "kernel_product",
    "post_process",
    "preceq",
    "KrausInstrument",
    "check_conservation",
    "compose",
    "heisenberg_apply",
]
