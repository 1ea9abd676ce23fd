"""
Seeded random generators shared by the checkers and the test-suite.
"""
import numpy as np
from scipy.stats import ortho_group, unitary_group

from opt_foundry.conf import get_setting


def make_rng(seed=None):
    """
    A numpy Generator; ``seed=None`` uses the configured ``SEED``.
    """
    return np.random.default_rng(get_setting('SEED') if seed is None else seed)


def resolve_seed(seed):
    return get_setting('SEED') if seed is None else int(seed)


def haar_unitary(n, rng):
    if n == 1:
        return np.array([[np.exp(2j * np.pi * rng.random())]])
    return unitary_group.rvs(n, random_state=rng)


def haar_orthogonal(n, rng):
    if n == 1:
        return np.array([[1.0 if rng.random() < 0.5 else -1.0]])
    return ortho_group.rvs(n, random_state=rng)


def random_density(n, rng, real=False, rank=None):
    """
    A random density matrix of size ``n`` (real symmetric when ``real``), full rank unless
    ``rank`` is given.
    """
    rank = n if rank is None else rank
    G = rng.standard_normal((n, rank))
    if not real:
        G = G + 1j * rng.standard_normal((n, rank))
    rho = G @ G.conj().T
    return rho / np.trace(rho).real


def random_vector(n, rng, real=False):
    v = rng.standard_normal(n)
    if not real:
        v = v + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def random_probabilities(n, rng):
    p = rng.random(n) + 1e-3
    return p / p.sum()
