"""Seeded random POVMs, states, Markov matrices and instruments.

Every generator takes an explicit seed and draws from a counter-based
Philox stream, so equal seeds give bit-identical output on any platform.
"""

import numpy as np

from povmred.errors import DegenerateSample, NotPositiveDefinite
from povmred.fuzzy_order import MarkovMatrix, pair_label
from povmred.matops import inv_sqrt_psd
from povmred.povm import DiscretePovm, validate_density, validate_povm

MAX_RETRIES = 10


def rng_for(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(int(seed) % 2**64))


def _ginibre(rng, rows, cols):
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_povm(dim: int, n_outcomes: int, seed) -> DiscretePovm:
    """Normalize random PSD matrices ``G_i = M_i M_i^H`` to sum to the identity."""
    if n_outcomes < 1:
        raise ValueError("n_outcomes must be at least 1")
    if n_outcomes == 1:
        return validate_povm([np.eye(dim)])
    rng = rng_for(seed)
    for _ in range(MAX_RETRIES):
        ms = [_ginibre(rng, dim, dim) for _ in range(n_outcomes)]
        gs = [m @ m.conj().T for m in ms]
        try:
            s = inv_sqrt_psd(sum(gs))
        except NotPositiveDefinite:
            continue
        return validate_povm([s @ g @ s for g in gs])
    raise DegenerateSample(f"no positive definite sum after {MAX_RETRIES} draws")


def random_density(dim: int, seed) -> np.ndarray:
    rng = rng_for(seed)
    m = _ginibre(rng, dim, dim)
    rho = m @ m.conj().T
    return validate_density(rho / np.real(np.trace(rho)))


def random_markov(n_rows: int, n_cols: int, seed, rows=None, cols=None) -> MarkovMatrix:
    """Columns drawn independently and uniformly from the probability simplex."""
    rng = rng_for(seed)
    if n_rows == 1:
        m = np.ones((1, n_cols))
    else:
        m = rng.dirichlet(np.ones(n_rows), size=n_cols).T
        m /= m.sum(axis=0)
    return MarkovMatrix.from_array(m, rows, cols)


def split_povm(povm: DiscretePovm, kappa, seed=None) -> DiscretePovm:
    """Redundant refinement ``B((x,y)) = kappa(x|y) A(y)``.

    Columns of ``kappa`` follow ``povm``'s outcome order.  Zero entries of
    ``kappa`` produce no outcome.  With a seed the outcomes are shuffled.
    """
    if not isinstance(kappa, MarkovMatrix):
        kappa = MarkovMatrix.from_array(kappa)
    if kappa.matrix.shape[1] != len(povm):
        raise ValueError(f"kernel has {kappa.matrix.shape[1]} columns for {len(povm)} outcomes")
    labels, effects = [], []
    for j, (y, effect) in enumerate(povm.items()):
        for i, x in enumerate(kappa.rows):
            if kappa.matrix[i, j] > 0:
                labels.append(pair_label(x, y))
                effects.append(kappa.matrix[i, j] * effect)
    order = np.arange(len(labels))
    if seed is not None:
        order = rng_for(seed).permutation(len(labels))
    return DiscretePovm(tuple(labels[i] for i in order), np.stack([effects[i] for i in order]))


def random_instrument(dim: int, n_outcomes: int, n_kraus: int, seed):
    """Instrument with Kraus operators ``K_{x,k} = G_{x,k} S^{-1/2}``."""
    from povmred.instruments import KrausInstrument

    rng = rng_for(seed)
    for _ in range(MAX_RETRIES):
        gs = _ginibre(rng, n_outcomes * n_kraus * dim, dim).reshape(n_outcomes, n_kraus, dim, dim)
        total = np.einsum("xkji,xkjl->il", gs.conj(), gs)
        try:
            s = inv_sqrt_psd(total)
        except NotPositiveDefinite:
            continue
        kraus = gs @ s
        return KrausInstrument.from_kraus(kraus, [str(i) for i in range(n_outcomes)])
    raise DegenerateSample(f"no positive definite normalizer after {MAX_RETRIES} draws")


def random_unitary(dim: int, seed) -> np.ndarray:
    rng = rng_for(seed)
    q, r = np.linalg.qr(_ginibre(rng, dim, dim))
    return q * (np.diag(r) / np.abs(np.diag(r)))


# Named fixtures


def computational_pvm(dim: int = 2) -> DiscretePovm:
    return validate_povm([np.diag(np.eye(dim)[j]) for j in range(dim)])


def trine() -> DiscretePovm:
    """Three rank-one qubit effects at 120 degrees on the real Bloch circle."""
    effects = []
    for k in range(3):
        angle = 2 * np.pi * k / 3
        v = np.array([np.cos(angle / 2), np.sin(angle / 2)])
        effects.append(2 / 3 * np.outer(v, v))
    return validate_povm(effects)


INTRO_LAMBDA = 0.3
INTRO_A0 = np.diag([0.6, 0.1])


def intro_a(a0=INTRO_A0) -> DiscretePovm:
    a0 = np.asarray(a0, dtype=np.complex128)
    return validate_povm([a0, np.eye(len(a0)) - a0])


def intro_b(lam: float = INTRO_LAMBDA, a0=INTRO_A0) -> DiscretePovm:
    """Four-outcome refinement ``B_ij`` with ``B_i0 = lam A_i``, ``B_i1 = (1-lam) A_i``."""
    a = intro_a(a0)
    effects, labels = [], []
    for i in range(2):
        for j, w in enumerate((lam, 1 - lam)):
            labels.append(f"{i}{j}")
            effects.append(w * a.effects[i])
    return validate_povm(effects, labels)
