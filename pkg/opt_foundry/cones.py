"""
Predicates and maps over the positive cone of a Euclidean Jordan algebra.

States of a system are the cone elements; effects are identified with cone elements through
the trace inner product (``dagger``). Membership is decided spectrally.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from opt_foundry import eja
from opt_foundry.conf import get_setting
from opt_foundry.reports import CheckReport, Stopwatch, verdict_for
from opt_foundry.sampling import haar_orthogonal, haar_unitary, make_rng, resolve_seed

log = logging.getLogger(__name__)


class ConeError(ValueError):
    pass


class NotNormalizedError(ConeError):
    pass


class NotInternalError(ConeError):
    pass


@dataclass(frozen=True)
class ConeContext:
    algebra: eja.Algebra
    tol: float = field(default_factory=lambda: get_setting('CONE_TOLERANCE'))

    def __post_init__(self):
        if not self.tol > 0:
            raise ConeError(f'Cone tolerance must be positive, got {self.tol}')


class LinearMap:
    """
    A linear map between the coordinate spaces of two algebras.
    """

    def __init__(self, domain, codomain, matrix):
        matrix = np.array(matrix, dtype=float)
        if matrix.shape != (codomain.ambient_dim, domain.ambient_dim):
            raise ConeError(
                f'Matrix of shape {matrix.shape} does not map {domain.family} to {codomain.family}'
            )
        matrix.setflags(write=False)
        self.domain = domain
        self.codomain = codomain
        self.matrix = matrix

    @classmethod
    def from_function(cls, domain, codomain, func):
        columns = [func(e).coords for e in domain.basis()]
        return cls(domain, codomain, np.column_stack(columns))

    @classmethod
    def identity(cls, algebra):
        return cls(algebra, algebra, np.eye(algebra.ambient_dim))

    def __call__(self, x):
        if x.algebra != self.domain:
            raise eja.AlgebraMismatch(f'Map expects {self.domain.family}, got {x.algebra.family}')
        return eja.Element(self.codomain, self.matrix @ x.coords)

    def compose(self, other):
        """
        ``self`` after ``other``.
        """
        if other.codomain != self.domain:
            raise eja.AlgebraMismatch(f'Cannot compose {self.domain.family} after {other.codomain.family}')
        return LinearMap(other.domain, self.codomain, self.matrix @ other.matrix)

    __matmul__ = compose

    def inverse(self):
        return LinearMap(self.codomain, self.domain, np.linalg.inv(self.matrix))

    def adjoint(self):
        """
        Adjoint with respect to the trace inner products of domain and codomain.
        """
        matrix = (self.matrix.T * self.codomain.gram) / self.domain.gram[:, None]
        return LinearMap(self.codomain, self.domain, matrix)

    def condition_number(self):
        return float(np.linalg.cond(self.matrix))

    def allclose(self, other, atol):
        return bool(np.allclose(self.matrix, other.matrix, rtol=0, atol=atol))

    def __repr__(self):
        return f'<LinearMap {self.domain.family} -> {self.codomain.family}>'


@dataclass(frozen=True, eq=False)
class EffectFunctional:
    """
    A linear functional on an algebra, stored as its covector in algebra coordinates.
    """
    algebra: eja.Algebra
    covector: np.ndarray

    def __call__(self, x):
        if x.algebra != self.algebra:
            raise eja.AlgebraMismatch(f'Functional on {self.algebra.family} applied to {x.algebra.family}')
        return float(self.covector @ x.coords)

    def __add__(self, other):
        return EffectFunctional(self.algebra, self.covector + other.covector)

    def __sub__(self, other):
        return EffectFunctional(self.algebra, self.covector - other.covector)


def min_eigenvalue(x):
    return float(np.min(eja.spectral_decompose(x).eigenvalues))


def cone_member(ctx, x):
    return min_eigenvalue(x) >= -ctx.tol * (1 + x.norm())


def order_leq(ctx, x, y):
    return cone_member(ctx, y - x)


def is_normalized(x, tol=None):
    tol = get_setting('TOLERANCE') if tol is None else tol
    return abs(eja.jordan_trace(x) - 1) <= tol


def is_internal(ctx, rho):
    if not is_normalized(rho, ctx.tol):
        raise NotNormalizedError(f'State has trace {eja.jordan_trace(rho)}, expected 1')
    return min_eigenvalue(rho) > ctx.tol


def dagger(z):
    return EffectFunctional(z.algebra, z.algebra.gram * z.coords)


def undagger(f):
    return eja.Element(f.algebra, f.covector / f.algebra.gram)


def deterministic_effect(algebra):
    return dagger(algebra.unit)


def quadratic_map(y):
    """
    ``P_y`` as a LinearMap.
    """
    return LinearMap.from_function(y.algebra, y.algebra, lambda z: eja.quadratic_rep(y, z))


def _power(x, exponent):
    return eja.spectral_function(x, lambda w: np.power(np.clip(w, 0, None), exponent))


def homogeneity_map(ctx, tau, rho):
    """
    ``P_{rho^(1/2)} P_{tau^(-1/2)}``: a cone automorphism sending ``tau`` to ``rho``.
    """
    for name, state in (('tau', tau), ('rho', rho)):
        if not is_internal(ctx, state):
            raise NotInternalError(f'{name} lies on the boundary of the cone')
    gamma = quadratic_map(_power(rho, 0.5)) @ quadratic_map(_power(tau, -0.5))
    if not np.isfinite(gamma.condition_number()):
        raise NotInternalError('Homogeneity map is not invertible')
    return gamma


def random_automorphism(algebra, rng):
    """
    A random unit-preserving Jordan automorphism: conjugation by a random unitary over the
    base field, an orthogonal rotation of a spin factor's vector part, blockwise on sums.
    """
    if isinstance(algebra, eja.DirectSumAlgebra):
        blocks = [random_automorphism(part, rng).matrix for part in algebra.parts]
        return LinearMap(algebra, algebra, linalg.block_diag(*blocks))
    if isinstance(algebra, eja.SpinFactor):
        return LinearMap(algebra, algebra, linalg.block_diag([[1.0]], haar_orthogonal(algebra.dim - 1, rng)))
    if not algebra.supports_spectral:
        raise eja.UnsupportedOperation(f'No automorphism sampler for {algebra.family}')
    n = algebra.n
    if algebra.k == 1:
        U = haar_orthogonal(n, rng)
    elif algebra.k == 2:
        U = haar_unitary(n, rng)
    else:
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        b = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        Q = np.zeros((2 * n, 2 * n), dtype=complex)
        Q[0::2, 0::2], Q[0::2, 1::2] = a, b
        Q[1::2, 0::2], Q[1::2, 1::2] = -b.conj(), a.conj()
        U = linalg.expm(Q - Q.conj().T)

    def conjugate(x):
        return eja.Element(algebra, algebra.from_matrix(U @ algebra.to_matrix(x.coords) @ U.conj().T))
    return LinearMap.from_function(algebra, algebra, conjugate)


def _frame_probes(algebra, rng, count):
    probes = []
    for _ in range(count):
        probes.extend(eja.spectral_decompose(eja.random_element(algebra, rng)).frame)
    return probes


def self_duality_check(ctx, n_samples=None, seed=None, functionals=(), n_probes=None):
    """
    Sample evidence that the cone equals its dual.

    Random cone pairs must have nonnegative inner product. Random functionals built on the
    Jordan frames of random elements are probed on a frame-rich cone sample; those that are
    nonnegative on every probe must have Riesz vector in the cone. ``functionals`` adds
    caller-supplied functionals claimed to be effects: each must be nonnegative on the probes
    and on its own Riesz vector's frame, and must undagger into the cone.
    """
    alg = ctx.algebra
    n_samples = get_setting('SAMPLES') if n_samples is None else n_samples
    n_probes = get_setting('PROBES') if n_probes is None else n_probes
    seed = resolve_seed(seed)
    rng = make_rng(seed)
    watch = Stopwatch()
    log.info('Self-duality check on %s with %s samples (seed %s)', alg.family, n_samples, seed)

    witnesses = []
    worst_pair = np.inf
    for _ in range(n_samples):
        x, y = eja.random_state(alg, rng), eja.random_state(alg, rng)
        margin = eja.trace_inner(x, y)
        worst_pair = min(worst_pair, margin)
        if margin < -ctx.tol:
            witnesses.append({'kind': 'negative_pair', 'x': x, 'y': y, 'inner': margin})

    probes = _frame_probes(alg, rng, max(1, n_probes // max(1, alg.rank)))
    accepted = rejected = 0
    for _ in range(n_samples):
        frame = eja.spectral_decompose(eja.random_element(alg, rng)).frame
        coefficients = rng.uniform(-0.2, 1.0, size=len(frame))
        z = sum((c * p for c, p in zip(coefficients, frame)), alg.zero)
        g = dagger(z)
        values = [g(p) for p in list(frame) + probes]
        if min(values) < -ctx.tol:
            rejected += 1
            continue
        accepted += 1
        if not cone_member(ctx, undagger(g)):
            witnesses.append({'kind': 'dual_not_in_cone', 'functional': undagger(g)})

    for g in functionals:
        own_frame = list(eja.spectral_decompose(undagger(g)).frame)
        negative = [(g(p), p) for p in own_frame + probes if g(p) < -ctx.tol]
        if negative:
            value, probe = min(negative, key=lambda pair: pair[0])
            witnesses.append({'kind': 'negative_functional', 'functional': undagger(g), 'probe': probe,
                              'value': value})
        elif not cone_member(ctx, undagger(g)):
            witnesses.append({'kind': 'dual_not_in_cone', 'functional': undagger(g)})

    verdict = verdict_for(not witnesses)
    if witnesses:
        log.error('Self-duality check failed on %s: %s witnesses', alg.family, len(witnesses))
    return CheckReport(
        check='self_duality',
        backend=str(alg.family),
        levels=[alg.rank],
        verdict=verdict,
        witnesses=witnesses,
        tolerances={'cone': ctx.tol},
        seed=seed,
        samples=n_samples,
        runtime_ms=watch.elapsed_ms,
        details={
            'worst_pair_margin': float(worst_pair),
            'accepted_functionals': accepted,
            'rejected_functionals': rejected,
            'probes': len(probes),
        },
    )
