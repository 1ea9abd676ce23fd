"""
Euclidean Jordan algebras: the five simple families and their direct sums.

Coordinates are fixed per algebra and are the only representation an ``Element`` carries:

* ``Her_n(F)`` with ``k = dim_R F`` (RealSym k=1, ComplexHerm k=2, QuatHerm k=4,
  OctHerm3 k=8): the ``n`` real diagonal entries, then for every ``i < j`` in row-major
  order the ``k`` real components of the ``(i, j)`` entry. Hypercomplex components follow
  the Cayley-Dickson doubling ``(a, b)(c, d) = (ac - d*b, da + bc*)``.
* ``Spin(d)``: the pair ``(t, v)`` with ``t`` scalar and ``v`` a ``(d - 1)``-vector.
* ``DirectSum``: concatenation of the parts' coordinates.

Each algebra carries a diagonal Gram weight vector with ``trace_inner(x, y) = tr(x o y)``
equal to ``sum(gram * x * y)``: weight 1 on diagonal entries, 2 on off-diagonal
components, 2 on every spin-factor coordinate.
"""
import enum
import functools
import logging
import re
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from opt_foundry.conf import get_setting

log = logging.getLogger(__name__)

REAL_SYM = 'RealSym'
COMPLEX_HERM = 'ComplexHerm'
QUAT_HERM = 'QuatHerm'
SPIN = 'Spin'
OCT_HERM3 = 'OctHerm3'
DIRECT_SUM = 'DirectSum'

MATRIX_FAMILIES = {REAL_SYM: 1, COMPLEX_HERM: 2, QUAT_HERM: 4}


class EJAError(ValueError):
    pass


class AlgebraMismatch(EJAError):
    pass


class UnsupportedOperation(EJAError):
    pass


@dataclass(frozen=True)
class FamilyTag:
    """
    Names an algebra: a simple family with its size parameter, or a direct sum of tags.
    """
    name: str
    size: int = 0
    parts: tuple = ()

    def __str__(self):
        if self.name == OCT_HERM3:
            return OCT_HERM3
        if self.name == DIRECT_SUM:
            return '{}({})'.format(DIRECT_SUM, ', '.join(str(part) for part in self.parts))
        return f'{self.name}({self.size})'

    @classmethod
    def direct_sum(cls, *parts):
        return cls(DIRECT_SUM, 0, tuple(parts))

    @classmethod
    def parse(cls, text):
        """
        Parse tags such as ``ComplexHerm(3)``, ``Spin(5)``, ``OctHerm3`` or
        ``DirectSum(ComplexHerm(2), ComplexHerm(1))``.
        """
        tokens = re.findall(r'[A-Za-z]+\d*|\d+|[(),]', text)
        if ''.join(tokens) != re.sub(r'\s+', '', text):
            raise EJAError(f'Cannot parse algebra family: {text!r}')
        tag, rest = cls._parse_tokens(tokens)
        if rest:
            raise EJAError(f'Trailing input in algebra family: {text!r}')
        return tag

    @classmethod
    def _parse_tokens(cls, tokens):
        if not tokens:
            raise EJAError('Empty algebra family')
        name, rest = tokens[0], tokens[1:]
        if name == OCT_HERM3:
            return cls(OCT_HERM3, 3), rest
        if not rest or rest[0] != '(':
            raise EJAError(f'Expected "(" after {name}')
        rest = rest[1:]
        if name == DIRECT_SUM:
            parts = []
            while True:
                part, rest = cls._parse_tokens(rest)
                parts.append(part)
                if rest and rest[0] == ',':
                    rest = rest[1:]
                    continue
                break
            if not rest or rest[0] != ')':
                raise EJAError('Unterminated DirectSum')
            return cls.direct_sum(*parts), rest[1:]
        if name not in MATRIX_FAMILIES and name != SPIN:
            raise EJAError(f'Unknown algebra family: {name}')
        if len(rest) < 2 or not rest[0].isdigit() or rest[1] != ')':
            raise EJAError(f'Expected an integer size for {name}')
        return cls(name, int(rest[0])), rest[2:]


def tag(name, size=0):
    """
    Shorthand for ``FamilyTag(name, size)``.
    """
    if name == OCT_HERM3:
        return FamilyTag(OCT_HERM3, 3)
    return FamilyTag(name, size)


class IdempotentClass(enum.Enum):
    NOT_IDEMPOTENT = 'NotIdempotent'
    IDEMPOTENT = 'Idempotent'
    PRIMITIVE = 'PrimitiveIdempotent'


def _cd_conj(x):
    out = -x
    out[..., 0] = x[..., 0]
    return out


def cayley_dickson_product(x, y):
    """
    Multiply hypercomplex numbers stored along the last axis (length 1, 2, 4 or 8).
    """
    k = x.shape[-1]
    if k == 1:
        return x * y
    h = k // 2
    a, b = x[..., :h], x[..., h:]
    c, d = y[..., :h], y[..., h:]
    return np.concatenate([
        cayley_dickson_product(a, c) - cayley_dickson_product(_cd_conj(d), b),
        cayley_dickson_product(d, a) + cayley_dickson_product(b, _cd_conj(c)),
    ], axis=-1)


@functools.lru_cache(maxsize=None)
def structure_constants(k):
    """
    Return ``C`` with ``(xy)_c = sum_ab x_a y_b C[a, b, c]`` for the k-dimensional
    Cayley-Dickson algebra.
    """
    eye = np.eye(k)
    table = np.zeros((k, k, k))
    for a in range(k):
        for b in range(k):
            table[a, b] = cayley_dickson_product(eye[a], eye[b])
    table.setflags(write=False)
    return table


class Element:
    """
    An immutable vector in the coordinates of an algebra.
    """
    __slots__ = ('algebra', 'coords')

    def __init__(self, algebra, coords):
        coords = np.array(coords, dtype=float)
        if coords.shape != (algebra.ambient_dim,):
            raise EJAError(
                f'{algebra.family} expects {algebra.ambient_dim} coordinates, got shape {coords.shape}'
            )
        coords.setflags(write=False)
        object.__setattr__(self, 'algebra', algebra)
        object.__setattr__(self, 'coords', coords)

    def __setattr__(self, name, value):
        raise AttributeError('Element is immutable')

    def _same(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        if other.algebra != self.algebra:
            raise AlgebraMismatch(f'{self.algebra.family} vs {other.algebra.family}')
        return other

    def __add__(self, other):
        other = self._same(other)
        if other is NotImplemented:
            return other
        return Element(self.algebra, self.coords + other.coords)

    def __sub__(self, other):
        other = self._same(other)
        if other is NotImplemented:
            return other
        return Element(self.algebra, self.coords - other.coords)

    def __neg__(self):
        return Element(self.algebra, -self.coords)

    def __mul__(self, scalar):
        return Element(self.algebra, self.coords * float(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return Element(self.algebra, self.coords / float(scalar))

    def norm(self):
        return float(np.sqrt(trace_inner(self, self)))

    def allclose(self, other, atol=None):
        atol = get_setting('TOLERANCE') if atol is None else atol
        self._same(other)
        return bool(np.allclose(self.coords, other.coords, rtol=0, atol=atol))

    def __repr__(self):
        return f'Element({self.algebra.family}, {np.array2string(self.coords, precision=6)})'


class Algebra:
    """
    Base class for the concrete algebras; subclasses define the product and spectral data.
    """
    supports_spectral = True

    def __init__(self, family, rank, dim, gram):
        self.family = family
        self.rank = rank
        self.dim = dim
        self.gram = np.asarray(gram, dtype=float)
        self.gram.setflags(write=False)

    @property
    def ambient_dim(self):
        return self.dim

    def __eq__(self, other):
        return isinstance(other, Algebra) and other.family == self.family

    def __hash__(self):
        return hash(self.family)

    def __repr__(self):
        return f'<Algebra {self.family} rank={self.rank} dim={self.dim}>'

    def element(self, coords):
        return Element(self, coords)

    @property
    def unit(self):
        return Element(self, self.unit_coords())

    @property
    def zero(self):
        return Element(self, np.zeros(self.dim))

    def basis(self):
        return [Element(self, row) for row in np.eye(self.dim)]

    def product(self, a, b):
        raise NotImplementedError

    def unit_coords(self):
        raise NotImplementedError

    def primitive_idempotent_coords(self):
        raise NotImplementedError

    def spectral(self, coords):
        raise NotImplementedError


class HermitianMatrixAlgebra(Algebra):
    """
    Hermitian ``n x n`` matrices over the k-dimensional Cayley-Dickson algebra with the
    symmetrized product ``(XY + YX) / 2``.
    """

    def __init__(self, n, k):
        self.n = n
        self.k = k
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        self._rows = np.array([i for i, _ in pairs], dtype=int)
        self._cols = np.array([j for _, j in pairs], dtype=int)
        dim = n + k * len(pairs)
        gram = np.concatenate([np.ones(n), 2 * np.ones(k * len(pairs))])
        if k == 8:
            family = tag(OCT_HERM3)
        else:
            family = tag({v: name for name, v in MATRIX_FAMILIES.items()}[k], n)
        super().__init__(family, rank=n, dim=dim, gram=gram)

    @property
    def supports_spectral(self):
        return self.k <= 4

    def to_array(self, coords):
        """
        Return the ``(n, n, k)`` array of hypercomplex entries.
        """
        n, k = self.n, self.k
        coords = np.asarray(coords, dtype=float)
        X = np.zeros((n, n, k))
        diag = np.arange(n)
        X[diag, diag, 0] = coords[:n]
        off = coords[n:].reshape(len(self._rows), k)
        X[self._rows, self._cols] = off
        X[self._cols, self._rows] = _cd_conj(off)
        return X

    def from_array(self, X):
        diag = np.arange(self.n)
        return np.concatenate([X[diag, diag, 0], X[self._rows, self._cols].reshape(-1)])

    def product(self, a, b):
        X, Y = self.to_array(a), self.to_array(b)
        table = structure_constants(self.k)
        XY = np.einsum('ila,ljb,abc->ijc', X, Y, table)
        YX = np.einsum('ila,ljb,abc->ijc', Y, X, table)
        return self.from_array((XY + YX) / 2)

    def unit_coords(self):
        return np.concatenate([np.ones(self.n), np.zeros(self.dim - self.n)])

    def primitive_idempotent_coords(self):
        coords = np.zeros(self.dim)
        coords[0] = 1.0
        return coords

    def to_matrix(self, coords):
        """
        Real (k=1) or complex (k=2) matrix; quaternionic matrices map to ``2n x 2n``
        complex matrices with blocks ``[[a, b], [-conj(b), conj(a)]]``.
        """
        X = self.to_array(coords)
        if self.k == 1:
            return X[..., 0].copy()
        if self.k == 2:
            return X[..., 0] + 1j * X[..., 1]
        if self.k == 4:
            a = X[..., 0] + 1j * X[..., 1]
            b = X[..., 2] + 1j * X[..., 3]
            M = np.zeros((2 * self.n, 2 * self.n), dtype=complex)
            M[0::2, 0::2] = a
            M[0::2, 1::2] = b
            M[1::2, 0::2] = -b.conj()
            M[1::2, 1::2] = a.conj()
            return M
        raise UnsupportedOperation(f'{self.family} has no associative matrix representation')

    def from_matrix(self, M):
        M = np.asarray(M)
        if self.k == 1:
            X = np.real(M)[..., None]
        elif self.k == 2:
            X = np.stack([M.real, M.imag], axis=-1)
        elif self.k == 4:
            a, b = M[0::2, 0::2], M[0::2, 1::2]
            X = np.stack([a.real, a.imag, b.real, b.imag], axis=-1)
        else:
            raise UnsupportedOperation(f'{self.family} has no associative matrix representation')
        return self.from_array(X)

    def spectral(self, coords):
        if not self.supports_spectral:
            raise UnsupportedOperation(f'Spectral decomposition is not supported in {self.family}')
        H = self.to_matrix(coords)
        if self.k == 4:
            return self._quaternionic_spectral(H)
        w, V = np.linalg.eigh(H)
        order = np.argsort(-w, kind='stable')
        frame = [self.from_matrix(np.outer(V[:, i], V[:, i].conj())) for i in order]
        return w[order], frame

    def _quaternionic_spectral(self, H):
        # Deflate one quaternionic eigenline span{v, Jv} at a time; the remaining
        # subspace stays invariant under both H and J.
        Q = np.eye(2 * self.n, dtype=complex)
        eigenvalues, frame = [], []
        for _ in range(self.n):
            w, Y = np.linalg.eigh(Q.conj().T @ H @ Q)
            v = Q @ Y[:, -1]
            v = v / np.linalg.norm(v)
            jv = _quaternion_j(v)
            P = np.outer(v, v.conj()) + np.outer(jv, jv.conj())
            eigenvalues.append(w[-1])
            frame.append(self.from_matrix(P))
            U, _, _ = np.linalg.svd(Q - P @ Q, full_matrices=False)
            Q = U[:, :Q.shape[1] - 2]
        return np.array(eigenvalues), frame


def _quaternion_j(v):
    out = np.empty_like(v)
    out[0::2] = v[1::2].conj()
    out[1::2] = -v[0::2].conj()
    return out


class SpinFactor(Algebra):
    """
    ``R + R^(d-1)`` with ``(s, u) o (t, v) = (st + <u, v>, sv + tu)``.
    """

    def __init__(self, d):
        super().__init__(tag(SPIN, d), rank=2, dim=d, gram=2 * np.ones(d))

    def product(self, a, b):
        s, u = a[0], a[1:]
        t, v = b[0], b[1:]
        return np.concatenate([[s * t + u @ v], s * v + t * u])

    def unit_coords(self):
        coords = np.zeros(self.dim)
        coords[0] = 1.0
        return coords

    def primitive_idempotent_coords(self):
        coords = np.zeros(self.dim)
        coords[:2] = 0.5
        return coords

    def spectral(self, coords):
        t, v = coords[0], np.asarray(coords[1:])
        length = np.linalg.norm(v)
        if length > 0:
            direction = v / length
        else:
            direction = np.zeros(self.dim - 1)
            direction[0] = 1.0
        frame = [
            np.concatenate([[0.5], 0.5 * direction]),
            np.concatenate([[0.5], -0.5 * direction]),
        ]
        return np.array([t + length, t - length]), frame


class DirectSumAlgebra(Algebra):
    """
    Orthogonal direct sum of algebras, acting blockwise on concatenated coordinates.
    """

    def __init__(self, parts):
        self.parts = tuple(parts)
        self.offsets = np.cumsum([0] + [p.dim for p in self.parts])
        super().__init__(
            FamilyTag.direct_sum(*(p.family for p in self.parts)),
            rank=sum(p.rank for p in self.parts),
            dim=int(self.offsets[-1]),
            gram=np.concatenate([p.gram for p in self.parts]),
        )

    @property
    def supports_spectral(self):
        return all(p.supports_spectral for p in self.parts)

    def _blocks(self, coords):
        return [coords[self.offsets[i]:self.offsets[i + 1]] for i in range(len(self.parts))]

    def project(self, coords, index):
        """
        Coordinates of the component in part ``index``.
        """
        return np.array(self._blocks(np.asarray(coords))[index])

    def embed(self, coords, index):
        out = np.zeros(self.dim)
        out[self.offsets[index]:self.offsets[index + 1]] = coords
        return out

    def product(self, a, b):
        return np.concatenate([
            part.product(x, y) for part, x, y in zip(self.parts, self._blocks(a), self._blocks(b))
        ])

    def unit_coords(self):
        return np.concatenate([p.unit_coords() for p in self.parts])

    def primitive_idempotent_coords(self):
        return self.embed(self.parts[0].primitive_idempotent_coords(), 0)

    def spectral(self, coords):
        eigenvalues, frame = [], []
        for index, (part, block) in enumerate(zip(self.parts, self._blocks(coords))):
            w, members = part.spectral(block)
            eigenvalues.extend(w)
            frame.extend(self.embed(member, index) for member in members)
        order = np.argsort(-np.array(eigenvalues), kind='stable')
        return np.array(eigenvalues)[order], [frame[i] for i in order]


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    frame: tuple

    def reconstruct(self):
        return sum((lam * p for lam, p in zip(self.eigenvalues, self.frame)), self.frame[0].algebra.zero)


@dataclass(frozen=True)
class SimplicityResult:
    simple: bool
    ideal_basis: np.ndarray

    def __bool__(self):
        return self.simple


@functools.lru_cache(maxsize=None)
def make_algebra(family):
    """
    Construct the algebra named by ``family`` (a FamilyTag or its string form).
    """
    if isinstance(family, str):
        family = FamilyTag.parse(family)
    if family.name == DIRECT_SUM:
        if not family.parts:
            raise EJAError('A direct sum needs at least one part')
        return DirectSumAlgebra([make_algebra(part) for part in family.parts])
    if family.name == OCT_HERM3:
        return HermitianMatrixAlgebra(3, 8)
    if family.name == SPIN:
        if family.size < 2:
            raise EJAError(f'Spin(d) requires d >= 2, got {family.size}')
        return SpinFactor(family.size)
    if family.name in MATRIX_FAMILIES:
        if family.size < 1:
            raise EJAError(f'{family.name}(r) requires r >= 1, got {family.size}')
        return HermitianMatrixAlgebra(family.size, MATRIX_FAMILIES[family.name])
    raise EJAError(f'Unknown algebra family: {family.name}')


def _check_same(x, y):
    if x.algebra != y.algebra:
        raise AlgebraMismatch(f'Operands live in {x.algebra.family} and {y.algebra.family}')


def jordan_product(x, y):
    _check_same(x, y)
    return Element(x.algebra, x.algebra.product(x.coords, y.coords))


def trace_inner(x, y):
    _check_same(x, y)
    return float(np.sum(x.algebra.gram * x.coords * y.coords))


def jordan_trace(x):
    return trace_inner(x.algebra.unit, x)


def spectral_decompose(x):
    """
    Eigenvalues (descending) and a Jordan frame of primitive idempotents.
    """
    alg = x.algebra
    if not alg.supports_spectral:
        raise UnsupportedOperation(f'Spectral decomposition is not supported in {alg.family}')
    eigenvalues, frame = alg.spectral(x.coords)
    return SpectralDecomposition(np.asarray(eigenvalues, dtype=float), tuple(Element(alg, p) for p in frame))


def spectral_function(x, func):
    """
    Apply ``func`` to the eigenvalues of ``x``: ``sum func(lambda_i) p_i``.
    """
    decomposition = spectral_decompose(x)
    values = func(decomposition.eigenvalues)
    return sum((v * p for v, p in zip(values, decomposition.frame)), x.algebra.zero)


def quadratic_rep(y, z):
    """
    ``P_y(z) = 2 y o (y o z) - y^2 o z``.
    """
    _check_same(y, z)
    return 2 * jordan_product(y, jordan_product(y, z)) - jordan_product(jordan_product(y, y), z)


def idempotent_class(x, tol=None):
    tol = get_setting('TOLERANCE') if tol is None else tol
    scale = 1 + x.norm()
    if x.norm() <= tol:
        return IdempotentClass.NOT_IDEMPOTENT
    if (jordan_product(x, x) - x).norm() > tol * scale:
        return IdempotentClass.NOT_IDEMPOTENT
    if abs(jordan_trace(x) - 1) <= tol * scale:
        return IdempotentClass.PRIMITIVE
    return IdempotentClass.IDEMPOTENT


def is_simple(alg):
    """
    Grow the ideal generated by a primitive idempotent until it is closed under
    multiplication by the basis; the algebra is simple iff that ideal is everything.
    """
    span = linalg.orth(alg.primitive_idempotent_coords()[:, None])
    basis = np.eye(alg.dim)
    while True:
        products = [alg.product(b, span[:, j]) for b in basis for j in range(span.shape[1])]
        grown = linalg.orth(np.column_stack([span] + products), rcond=1e-10)
        if grown.shape[1] == span.shape[1]:
            break
        span = grown
    simple = span.shape[1] == alg.dim
    log.debug('Ideal generated in %s has dimension %s of %s', alg.family, span.shape[1], alg.dim)
    return SimplicityResult(simple, span)


def simple_dimensions(rank):
    """
    Dimensions of the simple algebras of the given rank, excluding spin factors.
    """
    out = [
        (rank * (rank + 1) // 2, tag(REAL_SYM, rank)),
        (rank * rank, tag(COMPLEX_HERM, rank)),
        (rank * (2 * rank - 1), tag(QUAT_HERM, rank)),
    ]
    if rank == 3:
        out.append((27, tag(OCT_HERM3)))
    return out


def classify_simple(rank, dim):
    """
    All simple families with the given rank and dimension.
    """
    if rank < 1 or dim < 1:
        return []
    found = [family for d, family in simple_dimensions(rank) if d == dim]
    if rank == 2 and dim >= 5 and dim != 6:
        found.append(tag(SPIN, dim))
    return found


def random_element(alg, rng):
    return Element(alg, rng.standard_normal(alg.dim))


def random_cone_element(alg, rng):
    x = random_element(alg, rng)
    return jordan_product(x, x)


def random_state(alg, rng):
    """
    A random normalized element of the positive cone (trace one).
    """
    x = random_cone_element(alg, rng)
    return x / jordan_trace(x)
