"""
Concrete operational-probabilistic theories: classical probability, real quantum theory and
complex quantum theory.

A system is named by its backend and its level ``n``. States are cone elements of the
backend's algebra for that level (the simplex as a direct sum of one-dimensional algebras,
real symmetric or complex Hermitian matrices), effects are their daggers, and every process
is a ``Channel``: a superoperator on ``n x n`` matrices stored as a tensor ``S[a, b, c, d]``
with ``f(X)[a, b] = sum_cd S[a, b, c, d] X[c, d]``. The trivial system is level 1, so
states are channels from level 1 and effects are channels to level 1.
"""
import enum
import functools
import logging
from dataclasses import dataclass

import numpy as np

from opt_foundry import eja
from opt_foundry.conf import get_setting
from opt_foundry.cones import ConeContext, LinearMap, cone_member, dagger, deterministic_effect, is_normalized
from opt_foundry.reports import CheckReport, Stopwatch, verdict_for
from opt_foundry.sampling import random_density, random_probabilities, random_vector

log = logging.getLogger(__name__)


class TheoryError(ValueError):
    pass


class BackendMismatch(TheoryError):
    pass


class DimensionMismatch(TheoryError):
    pass


class BackendKind(enum.Enum):
    CLASSICAL = 'classical'
    REAL = 'real'
    COMPLEX = 'complex'


@dataclass(frozen=True)
class SystemRef:
    kind: BackendKind
    level: int

    def __post_init__(self):
        if self.level < 1:
            raise TheoryError(f'System level must be at least 1, got {self.level}')

    def __str__(self):
        return f'{self.kind.value}:{self.level}'


@dataclass(frozen=True)
class SystemInfo:
    d: int
    n: int
    r: int


class TheoryBackend:
    """
    Base descriptor; subclasses fix the algebra of each level and the matrix picture.
    """
    kind = None
    label = None
    real = False

    def family(self, level):
        raise NotImplementedError

    def algebra(self, level):
        if level < 1:
            raise TheoryError(f'System level must be at least 1, got {level}')
        return eja.make_algebra(self.family(level))

    def system(self, level):
        return SystemRef(self.kind, level)

    def level_of(self, x):
        level = x.algebra.rank
        if x.algebra != self.algebra(level):
            raise BackendMismatch(f'{x.algebra.family} is not a {self.label} system')
        return level

    def to_matrix(self, x):
        self.level_of(x)
        return np.asarray(x.algebra.to_matrix(x.coords), dtype=complex)

    def from_matrix(self, level, M):
        alg = self.algebra(level)
        return eja.Element(alg, alg.from_matrix(np.asarray(M)))

    def system_info(self, level):
        alg = self.algebra(level)
        return SystemInfo(d=alg.dim, n=level, r=alg.rank)

    def matrix_unit_state(self, level, index):
        M = np.zeros((level, level))
        M[index, index] = 1.0
        return self.from_matrix(level, M)

    def maximally_mixed(self, level):
        return self.from_matrix(level, np.eye(level) / level)

    def random_state(self, level, rng, pure=False):
        raise NotImplementedError

    def __repr__(self):
        return f'<{self.label} backend>'


class ClassicalBackend(TheoryBackend):
    kind = BackendKind.CLASSICAL
    label = 'Classical'
    real = True

    def family(self, level):
        return eja.FamilyTag.direct_sum(*[eja.tag(eja.COMPLEX_HERM, 1)] * level)

    def to_matrix(self, x):
        self.level_of(x)
        return np.diag(x.coords).astype(complex)

    def from_matrix(self, level, M):
        return eja.Element(self.algebra(level), np.real(np.diag(np.asarray(M))))

    def random_state(self, level, rng, pure=False):
        if pure:
            return self.matrix_unit_state(level, int(rng.integers(level)))
        return eja.Element(self.algebra(level), random_probabilities(level, rng))


class QuantumBackend(TheoryBackend):

    def family(self, level):
        return eja.tag(eja.REAL_SYM if self.real else eja.COMPLEX_HERM, level)

    def random_state(self, level, rng, pure=False):
        if pure:
            v = random_vector(level, rng, real=self.real)
            return self.from_matrix(level, np.outer(v, v.conj()))
        return self.from_matrix(level, random_density(level, rng, real=self.real))


class RealQTBackend(QuantumBackend):
    kind = BackendKind.REAL
    label = 'RealQT'
    real = True


class ComplexQTBackend(QuantumBackend):
    kind = BackendKind.COMPLEX
    label = 'ComplexQT'
    real = False


_BACKENDS = {
    BackendKind.CLASSICAL: ClassicalBackend,
    BackendKind.REAL: RealQTBackend,
    BackendKind.COMPLEX: ComplexQTBackend,
}
BACKEND_NAMES = tuple(kind.value for kind in BackendKind)


@functools.lru_cache(maxsize=None)
def _backend(kind):
    return _BACKENDS[kind]()


def get_backend(kind):
    """
    Backend instance for a BackendKind, its value (``'complex'``) or its label (``'ComplexQT'``).
    """
    if isinstance(kind, TheoryBackend):
        return kind
    if isinstance(kind, str):
        for candidate in BackendKind:
            if kind in (candidate.value, _BACKENDS[candidate].label):
                kind = candidate
                break
        else:
            raise TheoryError(f'Unknown backend: {kind!r}')
    return _backend(kind)


class Channel:
    """
    A transformation from level ``n_in`` to level ``n_out`` of one backend.
    """

    def __init__(self, backend, superop):
        superop = np.array(superop, dtype=complex)
        if superop.ndim != 4 or superop.shape[0] != superop.shape[1] or superop.shape[2] != superop.shape[3]:
            raise DimensionMismatch(f'Superoperator must have shape (n, n, m, m), got {superop.shape}')
        superop.setflags(write=False)
        self.backend = get_backend(backend)
        self.superop = superop

    @property
    def n_out(self):
        return self.superop.shape[0]

    @property
    def n_in(self):
        return self.superop.shape[2]

    @property
    def domain(self):
        return self.backend.algebra(self.n_in)

    @property
    def codomain(self):
        return self.backend.algebra(self.n_out)

    def _check_backend(self, other):
        if other.backend.kind != self.backend.kind:
            raise BackendMismatch(f'{self.backend.label} vs {other.backend.label}')

    # construction

    @classmethod
    def identity(cls, backend, level):
        eye = np.eye(level)
        return cls(backend, np.einsum('ac,bd->abcd', eye, eye))

    @classmethod
    def zero(cls, backend, n_in, n_out):
        return cls(backend, np.zeros((n_out, n_out, n_in, n_in)))

    @classmethod
    def from_kraus(cls, backend, kraus):
        kraus = [np.asarray(K) for K in kraus]
        if not kraus:
            raise TheoryError('At least one Kraus operator is required')
        superop = sum(np.einsum('ac,bd->abcd', K, K.conj()) for K in kraus)
        return cls(backend, superop)

    @classmethod
    def unitary(cls, backend, U):
        return cls.from_kraus(backend, [U])

    @classmethod
    def stochastic(cls, backend, T):
        """
        Measure in the standard basis, then prepare according to the column-stochastic ``T``.
        """
        T = np.asarray(T, dtype=float)
        n_out, n_in = T.shape
        superop = np.zeros((n_out, n_out, n_in, n_in))
        a, c = np.meshgrid(np.arange(n_out), np.arange(n_in), indexing='ij')
        superop[a, a, c, c] = T
        return cls(backend, superop)

    @classmethod
    def state(cls, backend, rho):
        backend = get_backend(backend)
        M = backend.to_matrix(rho)
        return cls(backend, M[:, :, None, None])

    @classmethod
    def effect(cls, backend, E):
        backend = get_backend(backend)
        M = backend.to_matrix(E)
        return cls(backend, M.T[None, None, :, :])

    @classmethod
    def transpose_map(cls, backend, level):
        eye = np.eye(level)
        return cls(backend, np.einsum('ad,bc->abcd', eye, eye))

    @classmethod
    def discard_and_reprepare(cls, backend, tau, n_in):
        """
        ``tau`` after the deterministic effect of level ``n_in``.
        """
        backend = get_backend(backend)
        return cls(backend, np.einsum('ab,cd->abcd', backend.to_matrix(tau), np.eye(n_in)))

    @classmethod
    def random(cls, backend, n_in, n_out, rng, n_kraus=2):
        """
        A random channel: a random isometry split into Kraus operators, or a random
        stochastic matrix for the classical backend.
        """
        backend = get_backend(backend)
        if backend.kind == BackendKind.CLASSICAL:
            T = rng.random((n_out, n_in)) + 1e-3
            return cls.stochastic(backend, T / T.sum(axis=0))
        n_kraus = max(n_kraus, -(-n_in // n_out))
        G = rng.standard_normal((n_out * n_kraus, n_in))
        if not backend.real:
            G = G + 1j * rng.standard_normal((n_out * n_kraus, n_in))
        V, _ = np.linalg.qr(G)
        return cls.from_kraus(backend, [V[k * n_out:(k + 1) * n_out] for k in range(n_kraus)])

    # algebra of processes

    def apply_matrix(self, X):
        return np.einsum('abcd,cd->ab', self.superop, X)

    def __call__(self, x):
        return apply_channel(self, x)

    def compose(self, other):
        """
        ``self`` after ``other``.
        """
        self._check_backend(other)
        if other.n_out != self.n_in:
            raise DimensionMismatch(f'Cannot feed level {other.n_out} into level {self.n_in}')
        return Channel(self.backend, np.einsum('abcd,cdef->abef', self.superop, other.superop))

    __matmul__ = compose

    def tensor(self, other):
        self._check_backend(other)
        n1, m1 = self.n_out, self.n_in
        n2, m2 = other.n_out, other.n_in
        superop = np.einsum('abcd,efgh->aebfcgdh', self.superop, other.superop)
        return Channel(self.backend, superop.reshape(n1 * n2, n1 * n2, m1 * m2, m1 * m2))

    def __add__(self, other):
        self._check_backend(other)
        if self.superop.shape != other.superop.shape:
            raise DimensionMismatch('Cannot add channels of different types')
        return Channel(self.backend, self.superop + other.superop)

    def scale(self, factor):
        return Channel(self.backend, self.superop * factor)

    def superop_matrix(self):
        return self.superop.reshape(self.n_out ** 2, self.n_in ** 2)

    def choi(self):
        """
        Choi matrix indexed by (input, output) pairs: ``C[(c, a), (d, b)] = S[a, b, c, d]``.
        """
        size = self.n_in * self.n_out
        return self.superop.transpose(2, 0, 3, 1).reshape(size, size)

    @property
    def linear_map(self):
        return LinearMap.from_function(self.domain, self.codomain, self)

    def scalar(self):
        """
        The probability carried by a process from the trivial system to itself.
        """
        if self.n_in != 1 or self.n_out != 1:
            raise DimensionMismatch(f'Process of type {self.n_in} -> {self.n_out} is not a scalar')
        return float(self.superop[0, 0, 0, 0].real)

    # validation

    def is_deterministic(self, tol=None):
        tol = get_setting('CHECK_TOLERANCE') if tol is None else tol
        e_in = deterministic_effect(self.domain).covector
        e_out = deterministic_effect(self.codomain).covector
        return bool(np.allclose(e_out @ self.linear_map.matrix, e_in, rtol=0, atol=tol))

    def is_completely_positive(self, tol=None):
        tol = get_setting('CHECK_TOLERANCE') if tol is None else tol
        C = self.choi()
        C = (C + C.conj().T) / 2
        return bool(np.linalg.eigvalsh(C).min() >= -tol * (1 + np.linalg.norm(C)))

    def inverse(self):
        """
        The linear inverse as a process, or None when the process is not invertible.
        """
        if self.n_in != self.n_out:
            return None
        if self.backend.kind == BackendKind.CLASSICAL:
            matrix = np.real(np.einsum('aacc->ac', self.superop))
        else:
            matrix = self.superop_matrix()
        if np.linalg.matrix_rank(matrix) < matrix.shape[0]:
            return None
        inv = np.linalg.inv(matrix)
        if self.backend.kind == BackendKind.CLASSICAL:
            return Channel.stochastic(self.backend, inv)
        return Channel(self.backend, inv.reshape(self.superop.shape))

    def allclose(self, other, atol):
        return self.superop.shape == other.superop.shape and bool(
            np.allclose(self.superop, other.superop, rtol=0, atol=atol)
        )

    def __repr__(self):
        return f'<Channel {self.backend.label} {self.n_in} -> {self.n_out}>'


def apply_channel(ch, x):
    level = ch.backend.level_of(x)
    if level != ch.n_in:
        raise DimensionMismatch(f'Channel expects level {ch.n_in}, got level {level}')
    return ch.backend.from_matrix(ch.n_out, ch.apply_matrix(ch.backend.to_matrix(x)))


def is_channel(ch, tol=None):
    """
    Deterministic (preserves the deterministic effect) and completely positive.
    """
    return ch.is_deterministic(tol) and ch.is_completely_positive(tol)


def is_reversible(ch, tol=None):
    inverse = ch.inverse()
    return inverse is not None and is_channel(ch, tol) and is_channel(inverse, tol)


def system_info(backend, level):
    return get_backend(backend).system_info(level)


@dataclass(frozen=True)
class Composite:
    backend: TheoryBackend
    system: SystemRef
    factors: tuple

    @property
    def algebra(self):
        return self.backend.algebra(self.system.level)

    def product_state(self, x, y):
        M = np.kron(self.backend.to_matrix(x), self.backend.to_matrix(y))
        return self.backend.from_matrix(self.system.level, M)

    product_effect = product_state


def compose_systems(backend, A, B):
    backend = get_backend(backend)
    for system in (A, B):
        if system.kind != backend.kind:
            raise BackendMismatch(f'System {system} does not belong to {backend.label}')
    return Composite(backend, backend.system(A.level * B.level), (A, B))


def dimension_identity_check(backend, A, B):
    backend = get_backend(backend)
    watch = Stopwatch()
    composite = compose_systems(backend, A, B)
    d_a, d_b = backend.system_info(A.level).d, backend.system_info(B.level).d
    d_ab = backend.system_info(composite.system.level).d
    ok = d_ab == d_a * d_b
    witnesses = [] if ok else [{'d_A': d_a, 'd_B': d_b, 'd_AB': d_ab, 'deficit': d_ab - d_a * d_b}]
    if not ok:
        log.error('%s: d_AB = %s but d_A * d_B = %s', backend.label, d_ab, d_a * d_b)
    return CheckReport(
        check='dimension_identity',
        backend=backend.label,
        levels=[A.level, B.level],
        verdict=verdict_for(ok),
        witnesses=witnesses,
        runtime_ms=watch.elapsed_ms,
        details={
            'd_A': d_a, 'd_B': d_b, 'd_AB': d_ab,
            'n_A': A.level, 'n_B': B.level, 'n_AB': composite.system.level,
        },
    )


def product_effect_covectors(backend, A, B):
    """
    Rows: covectors on the composite of the products of basis effects of A and B.
    """
    backend = get_backend(backend)
    composite = compose_systems(backend, A, B)
    rows = []
    for a in backend.algebra(A.level).basis():
        for b in backend.algebra(B.level).basis():
            rows.append(dagger(composite.product_effect(a, b)).covector)
    return np.array(rows)


def product_effect_span_rank(backend, A, B):
    return int(np.linalg.matrix_rank(product_effect_covectors(backend, A, B)))


@dataclass(frozen=True)
class TomographyWitness:
    rho_plus: eja.Element
    rho_minus: eja.Element
    span_rank: int
    composite_dim: int


def _antisymmetric_unit(level):
    Y = np.zeros((level, level))
    Y[0, 1], Y[1, 0] = 1.0, -1.0
    return Y


def product_tomography_witness(backend, A, B, tol=None):
    """
    Two distinct composite states that no product effect tells apart, or None when the
    product effects span the dual of the composite.
    """
    backend = get_backend(backend)
    tol = get_setting('CHECK_TOLERANCE') if tol is None else tol
    composite = compose_systems(backend, A, B)
    covectors = product_effect_covectors(backend, A, B)
    rank = int(np.linalg.matrix_rank(covectors))
    dim = composite.algebra.dim
    if rank == dim:
        return None
    if backend.kind != BackendKind.REAL:
        raise TheoryError(f'No witness construction for {backend.label}')
    n = composite.system.level
    YY = np.kron(_antisymmetric_unit(A.level), _antisymmetric_unit(B.level))
    rho_plus = backend.from_matrix(n, (np.eye(n) + YY) / n)
    rho_minus = backend.from_matrix(n, (np.eye(n) - YY) / n)

    ctx = ConeContext(composite.algebra)
    if not (cone_member(ctx, rho_plus) and cone_member(ctx, rho_minus)):
        raise TheoryError('Constructed witness states are not positive')
    if not np.allclose(covectors @ rho_plus.coords, covectors @ rho_minus.coords, rtol=0, atol=tol):
        raise TheoryError('Product effects distinguish the constructed witness states')
    if rho_plus.allclose(rho_minus, tol):
        raise TheoryError('Constructed witness states coincide')
    return TomographyWitness(rho_plus, rho_minus, rank, dim)


@dataclass(frozen=True)
class DistinguishingFamily:
    n: int
    states: tuple
    effects: tuple

    def table(self):
        return np.array([[a(rho) for rho in self.states] for a in self.effects])


def informational_dimension(backend, A):
    """
    A maximal perfectly distinguishable family: the diagonal Jordan frame with its daggers.
    """
    backend = get_backend(backend)
    states = tuple(backend.matrix_unit_state(A.level, i) for i in range(A.level))
    effects = tuple(dagger(p) for p in states)
    return DistinguishingFamily(A.level, states, effects)


def is_measurement(backend, level, effects, tol=None):
    """
    Effects (as cone elements) that are each positive and resolve the unit.
    """
    backend = get_backend(backend)
    tol = get_setting('CHECK_TOLERANCE') if tol is None else tol
    alg = backend.algebra(level)
    if not effects:
        return False
    ctx = ConeContext(alg, tol)
    if not all(backend.level_of(a) == level and cone_member(ctx, a) for a in effects):
        return False
    total = sum(effects, alg.zero)
    return total.allclose(alg.unit, tol)


def random_measurement(backend, level, outcomes, rng):
    """
    A random resolution of the unit into ``outcomes`` effects.
    """
    backend = get_backend(backend)
    if backend.kind == BackendKind.CLASSICAL:
        weights = rng.random((outcomes, level)) + 1e-3
        weights = weights / weights.sum(axis=0)
        return [eja.Element(backend.algebra(level), row) for row in weights]
    blocks = [random_density(level, rng, real=backend.real) for _ in range(outcomes)]
    total = sum(blocks)
    w, V = np.linalg.eigh(total)
    root = (V / np.sqrt(w)) @ V.conj().T
    return [backend.from_matrix(level, root @ B @ root) for B in blocks]


def deterministic_effect_is_unique(backend, level, rng, tol=None):
    """
    Solve for every functional equal to one on a spanning sample of normalized states; the
    solution is unique and equals the dagger of the unit.
    """
    backend = get_backend(backend)
    tol = get_setting('CHECK_TOLERANCE') if tol is None else tol
    alg = backend.algebra(level)
    states = [backend.random_state(level, rng) for _ in range(2 * alg.dim)]
    if not all(is_normalized(s, tol) for s in states):
        raise TheoryError('Sampled states are not normalized')
    A = np.array([s.coords for s in states])
    if np.linalg.matrix_rank(A) < alg.dim:
        return False
    solution, *_ = np.linalg.lstsq(A, np.ones(len(states)), rcond=None)
    return bool(np.allclose(solution, deterministic_effect(alg).covector, rtol=0, atol=tol))


def _top_vector(backend, psi):
    M = backend.to_matrix(psi)
    if backend.real:
        M = M.real
    _, V = np.linalg.eigh(M)
    return V[:, -1]


def _unitary_with_first_column(v):
    n = len(v)
    Q, _ = np.linalg.qr(np.column_stack([v, np.eye(n, dtype=v.dtype)]))
    Q = Q[:, :n]
    Q[:, 0] = Q[:, 0] * (Q[:, 0].conj() @ v)
    return Q


def transport_unitary(backend, psi, phi):
    """
    A reversible channel mapping the pure state ``psi`` to the pure state ``phi``.
    """
    backend = get_backend(backend)
    level = backend.level_of(psi)
    if backend.level_of(phi) != level:
        raise DimensionMismatch('Pure states of different levels')
    if backend.kind == BackendKind.CLASSICAL:
        i, j = int(np.argmax(psi.coords)), int(np.argmax(phi.coords))
        perm = np.arange(level)
        perm[i], perm[j] = j, i
        return Channel.stochastic(backend, np.eye(level)[perm].T)
    u, v = _top_vector(backend, psi), _top_vector(backend, phi)
    if backend.real:
        u, v = u.real, v.real
    U = _unitary_with_first_column(v) @ _unitary_with_first_column(u).conj().T
    return Channel.unitary(backend, U)


def locally_equivalent(f, g, tol=None):
    """
    Whether two transformations give the same probability for every pair of basis state and
    basis effect; on spanning sets this decides equality of the maps.
    """
    tol = get_setting('CHECK_TOLERANCE') if tol is None else tol
    if (f.n_in, f.n_out) != (g.n_in, g.n_out):
        return False
    for rho in f.domain.basis():
        fx, gx = f(rho), g(rho)
        for a in f.codomain.basis():
            if abs(dagger(a)(fx) - dagger(a)(gx)) > tol:
                return False
    return True
