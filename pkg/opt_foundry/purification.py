"""
Purification, steering, zigzag pairs and purification uniqueness for the quantum backends.

Conventions: a pure state on ``A x A'`` with vector ``psi`` has matricization ``M`` with
``psi[i * n + j] = M[i, j]`` (row-major). The purification of ``rho`` uses ``M = rho^(1/2)``,
so the first marginal is ``M M^dagger = rho`` and the complementary state (marginal on the
purifying factor) is ``(M^dagger M)^T = conj(rho)``.
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from opt_foundry import eja
from opt_foundry.conf import get_setting
from opt_foundry.cones import ConeContext, LinearMap, cone_member, is_internal, is_normalized
from opt_foundry.theories import BackendKind, Channel, DimensionMismatch, get_backend

log = logging.getLogger(__name__)


class PurificationError(ValueError):
    pass


class SteeringError(PurificationError):
    pass


class NoCommonMarginalError(PurificationError):
    pass


class ZigzagError(PurificationError):
    pass


@dataclass(frozen=True, eq=False)
class PurificationPair:
    backend: object
    level: int
    rho: eja.Element
    state: eja.Element
    matricization: np.ndarray

    @property
    def vector(self):
        return self.matricization.reshape(-1)


@dataclass(frozen=True, eq=False)
class SteeringResult:
    effects: tuple
    ensemble: tuple


@dataclass(frozen=True, eq=False)
class ZigzagPair:
    effect: eja.Element
    probability: float
    pair: PurificationPair


def _quantum(backend):
    backend = get_backend(backend)
    if backend.kind == BackendKind.CLASSICAL:
        raise PurificationError('Classical states have no constructive purification')
    return backend


def _matrix(backend, x):
    M = backend.to_matrix(x)
    return M.real if backend.real else M


def _factor_level(level):
    n = int(round(np.sqrt(level)))
    if n * n != level:
        raise DimensionMismatch(f'Level {level} is not the square of a system level')
    return n


def _pure_state(backend, vector):
    level = len(vector)
    return backend.from_matrix(level, np.outer(vector, vector.conj()))


def purify(backend, rho, tol=None):
    """
    Purify ``rho`` on two copies of its system via ``M = rho^(1/2)``.
    """
    backend = _quantum(backend)
    tol = get_setting('TOLERANCE') if tol is None else tol
    level = backend.level_of(rho)
    if not is_normalized(rho, tol) or not cone_member(ConeContext(rho.algebra, tol), rho):
        raise PurificationError('Only normalized states can be purified')
    w, V = np.linalg.eigh(_matrix(backend, rho))
    if w.min() < 0:
        log.warning('Clipping negative eigenvalue %s of the input state', w.min())
    M = (V * np.sqrt(np.clip(w, 0, None))) @ V.conj().T
    state = _pure_state(backend, M.reshape(-1))
    return PurificationPair(backend, level, rho, state, M)


def matricize(backend, state):
    """
    Matricization of a pure composite state, up to a global phase.
    """
    backend = get_backend(backend)
    n = _factor_level(backend.level_of(state))
    w, V = np.linalg.eigh(_matrix(backend, state))
    return (np.sqrt(max(w[-1], 0.0)) * V[:, -1]).reshape(n, n)


def marginal(backend, state, keep=0, dims=None):
    """
    Partial trace of a bipartite state, keeping factor ``keep`` (0 or 1).
    """
    backend = get_backend(backend)
    level = backend.level_of(state)
    if dims is None:
        n = _factor_level(level)
        dims = (n, n)
    n_a, n_b = dims
    if n_a * n_b != level:
        raise DimensionMismatch(f'Factors {dims} do not compose to level {level}')
    T = backend.to_matrix(state).reshape(n_a, n_b, n_a, n_b)
    if keep == 0:
        return backend.from_matrix(n_a, np.einsum('ijkj->ik', T))
    if keep == 1:
        return backend.from_matrix(n_b, np.einsum('ijil->jl', T))
    raise DimensionMismatch(f'keep must be 0 or 1, got {keep}')


def complementary_state(pair):
    return marginal(pair.backend, pair.state, keep=1)


def apply_local_effect(backend, state, effect, dims=None):
    """
    ``(id x b)(Psi)`` by direct contraction, ``b`` given as an effect (cone element) on the
    second factor. The result is an unnormalized state of the first factor.
    """
    backend = get_backend(backend)
    level = backend.level_of(state)
    n_b = backend.level_of(effect)
    n_a = level // n_b if dims is None else dims[0]
    T = backend.to_matrix(state).reshape(n_a, n_b, n_a, n_b)
    return backend.from_matrix(n_a, np.einsum('abcd,db->ac', T, backend.to_matrix(effect)))


def steering_measurement(pair, ensemble, tol=None):
    """
    Measurement on the purifying system whose outcomes leave the first system in the
    (unnormalized) states ``ensemble``.

    ``b_i^T = M^+ sigma_i M^+^dagger``, with the projector onto the kernel of ``M`` added to
    the first outcome so the effects resolve the unit.
    """
    backend = pair.backend
    tol = get_setting('CHECK_TOLERANCE') if tol is None else tol
    if not ensemble:
        raise SteeringError('Empty ensemble')
    ctx = ConeContext(pair.rho.algebra, tol)
    for sigma in ensemble:
        if backend.level_of(sigma) != pair.level or not cone_member(ctx, sigma):
            raise SteeringError('Ensemble members must be cone elements of the purified system')
    total = sum(ensemble, pair.rho.algebra.zero)
    if not total.allclose(pair.rho, tol):
        raise SteeringError('Ensemble does not sum to the purified state')

    M = pair.matricization
    pinv = linalg.pinv(M, rtol=1e-10)
    kernel = np.eye(pair.level) - pinv @ M
    blocks = [pinv @ backend.to_matrix(sigma) @ pinv.conj().T for sigma in ensemble]
    blocks[0] = blocks[0] + kernel
    effects = tuple(backend.from_matrix(pair.level, B.T) for B in blocks)

    reproduced = tuple(apply_local_effect(backend, pair.state, b) for b in effects)
    for sigma, got in zip(ensemble, reproduced):
        if not got.allclose(sigma, tol):
            raise SteeringError('Steered state differs from the requested ensemble member')
    return SteeringResult(effects, reproduced)


def _bent_wire_first(psi_matrix, effect_matrix, X, n):
    """
    ``(id x E)(Psi x X)``: Psi on factors 1-2, X on 3, E on factors 2-3.
    """
    T = np.kron(psi_matrix, X).reshape(n, n * n, n, n * n)
    return np.einsum('abcd,db->ac', T, effect_matrix)


def _bent_wire_second(psi_matrix, effect_matrix, X, n):
    """
    ``(E x id)(X x Psi)``: X on factor 1, Psi on 2-3, E on factors 1-2.
    """
    T = np.kron(X, psi_matrix).reshape(n * n, n, n * n, n)
    return np.einsum('badc,db->ac', T, effect_matrix)


def snake_maps(zigzag):
    """
    Both bent-wire composites evaluated on every matrix unit: a list of
    ``(X, first_snake(X), second_snake(X))``.
    """
    pair = zigzag.pair
    backend, n = pair.backend, pair.level
    psi_matrix = backend.to_matrix(pair.state)
    effect_matrix = backend.to_matrix(zigzag.effect)
    out = []
    for k in range(n):
        for l in range(n):
            X = np.zeros((n, n), dtype=complex)
            X[k, l] = 1.0
            out.append((
                X,
                _bent_wire_first(psi_matrix, effect_matrix, X, n),
                _bent_wire_second(psi_matrix, effect_matrix, X, n),
            ))
    return out


def zigzag_pair(backend, rho, tol=None):
    """
    Effect ``E`` on two copies of the system and probability ``p`` with both bent-wire
    composites equal to ``p`` times the identity.

    ``E`` is the projector onto ``vec(conj(M^-1))`` (normalized) and ``p = 1 / tr(rho^-1)``,
    the largest scale keeping this rank-one ``E`` below the unit.
    """
    backend = _quantum(backend)
    tol = get_setting('CHECK_TOLERANCE') if tol is None else tol
    if not is_internal(ConeContext(rho.algebra, tol), rho):
        raise ZigzagError('Zigzag pairs need an internal state')
    pair = purify(backend, rho)
    inverse = np.linalg.inv(pair.matricization)
    phi = inverse.conj().reshape(-1)
    probability = float(1.0 / np.vdot(phi, phi).real)
    phi = phi * np.sqrt(probability)
    zigzag = ZigzagPair(_pure_state(backend, phi), probability, pair)

    for X, first, second in snake_maps(zigzag):
        if not (np.allclose(first, probability * X, rtol=0, atol=tol)
                and np.allclose(second, probability * X, rtol=0, atol=tol)):
            raise ZigzagError('Bent-wire composites are not proportional to the identity')
    return zigzag


def gamma_from_zigzag(backend, tau, rho):
    """
    ``X -> p_tau^-1 (id x E_tau)(Psi_rho x X)``: a cone automorphism mapping ``tau`` to ``rho``.
    """
    backend = _quantum(backend)
    zigzag = zigzag_pair(backend, tau)
    psi_matrix = backend.to_matrix(purify(backend, rho).state)
    effect_matrix = backend.to_matrix(zigzag.effect)
    n = backend.level_of(tau)

    def gamma(x):
        out = _bent_wire_first(psi_matrix, effect_matrix, backend.to_matrix(x), n)
        return backend.from_matrix(n, out / zigzag.probability)
    alg = backend.algebra(n)
    return LinearMap.from_function(alg, alg, gamma)


def rotate_purifier(backend, state, U):
    """
    ``(id x Ad_U)(Psi)``.
    """
    backend = get_backend(backend)
    n = U.shape[0]
    ch = Channel.identity(backend, backend.level_of(state) // n).tensor(Channel.unitary(backend, U))
    return ch(state)


def uniqueness_unitary(backend, state, other, tol=None):
    """
    Reversible channel ``Ad_V`` on the purifying factor with ``(id x Ad_V)(state) = other``.

    With left polar decompositions ``M = P W`` and ``M' = P W'`` (equal marginals share ``P``),
    ``V = (W^dagger W')^T`` solves ``M' = M V^T``.
    """
    backend = _quantum(backend)
    tol = get_setting('CHECK_TOLERANCE') if tol is None else tol
    if backend.level_of(state) != backend.level_of(other):
        raise DimensionMismatch('Purifications live on different composites')
    if not marginal(backend, state).allclose(marginal(backend, other), tol):
        raise NoCommonMarginalError('The two pure states have different marginals')

    W, _ = linalg.polar(matricize(backend, state), side='left')
    W_other, _ = linalg.polar(matricize(backend, other), side='left')
    V = (W.conj().T @ W_other).T
    if backend.real:
        V = V.real

    if not rotate_purifier(backend, state, V).allclose(other, tol):
        raise PurificationError('Recovered unitary does not map one purification onto the other')
    return Channel.unitary(backend, V)


def purification_exists(backend, rho, tol=None):
    """
    Quantum states always purify; a classical state purifies only when it is pure, since the
    pure states of a classical composite are product deltas.
    """
    backend = get_backend(backend)
    tol = get_setting('TOLERANCE') if tol is None else tol
    if backend.kind == BackendKind.CLASSICAL:
        backend.level_of(rho)
        if not is_normalized(rho, tol) or not cone_member(ConeContext(rho.algebra, tol), rho):
            raise PurificationError('Only normalized states can be purified')
        return bool(np.max(rho.coords) >= 1 - tol)
    purify(backend, rho, tol)
    return True
