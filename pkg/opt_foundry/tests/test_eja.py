import ddt
import numpy as np
import pytest
from django.test import SimpleTestCase

from opt_foundry import eja
from opt_foundry.eja import (
    AlgebraMismatch,
    EJAError,
    FamilyTag,
    IdempotentClass,
    UnsupportedOperation,
    classify_simple,
    idempotent_class,
    is_simple,
    jordan_product,
    jordan_trace,
    make_algebra,
    quadratic_rep,
    spectral_decompose,
    trace_inner,
)

AXIOM_FAMILIES = [
    'RealSym(3)',
    'ComplexHerm(3)',
    'QuatHerm(3)',
    'OctHerm3',
    'Spin(5)',
    'Spin(2)',
    'DirectSum(ComplexHerm(2), Spin(4))',
]

SPECTRAL_FAMILIES = [
    'RealSym(4)',
    'ComplexHerm(3)',
    'QuatHerm(2)',
    'QuatHerm(3)',
    'Spin(6)',
    'DirectSum(ComplexHerm(2), ComplexHerm(1), Spin(3))',
]


def matrix_element(family, M):
    alg = make_algebra(family)
    return eja.Element(alg, alg.from_matrix(np.asarray(M)))


def assert_elements_close(x, y, atol=1e-9):
    scale = 1 + max(x.norm(), y.norm())
    assert np.allclose(x.coords, y.coords, rtol=0, atol=atol * scale), (x, y)


@ddt.ddt
class AlgebraConstructionTest(SimpleTestCase):

    @ddt.data(
        ('ComplexHerm(3)', 3, 9),
        ('Spin(5)', 2, 5),
        ('DirectSum(ComplexHerm(2), ComplexHerm(1))', 3, 5),
        ('RealSym(4)', 4, 10),
        ('QuatHerm(3)', 3, 15),
        ('OctHerm3', 3, 27),
    )
    @ddt.unpack
    def test_rank_and_dimension(self, family, rank, dim):
        alg = make_algebra(family)
        self.assertEqual(alg.rank, rank)
        self.assertEqual(alg.dim, dim)
        self.assertEqual(str(alg.family), family)

    @ddt.data('Spin(1)', 'RealSym(0)', 'Foo(2)', 'ComplexHerm', 'ComplexHerm(2', 'DirectSum()', 'Spin(3) x')
    def test_invalid_families(self, family):
        with self.assertRaises(EJAError):
            make_algebra(family)

    def test_simple_table(self):
        for r in range(1, 9):
            self.assertEqual(make_algebra(f'RealSym({r})').dim, r * (r + 1) // 2)
            self.assertEqual(make_algebra(f'ComplexHerm({r})').dim, r * r)
            self.assertEqual(make_algebra(f'QuatHerm({r})').dim, r * (2 * r - 1))
        for d in range(2, 13):
            alg = make_algebra(f'Spin({d})')
            self.assertEqual((alg.rank, alg.dim), (2, d))
        self.assertEqual((make_algebra('OctHerm3').rank, make_algebra('OctHerm3').dim), (3, 27))

    def test_tag_parse_round_trip(self):
        tag = FamilyTag.direct_sum(eja.tag(eja.COMPLEX_HERM, 2), eja.tag(eja.SPIN, 5), eja.tag(eja.OCT_HERM3))
        self.assertEqual(FamilyTag.parse(str(tag)), tag)
        self.assertEqual(make_algebra(str(tag)), make_algebra(tag))


def test_elements_are_immutable():
    x = make_algebra('ComplexHerm(2)').unit
    with pytest.raises(AttributeError):
        x.coords = np.zeros(4)
    with pytest.raises(ValueError):
        x.coords[0] = 2.0


def test_mixing_algebras_is_an_error():
    x = make_algebra('ComplexHerm(2)').unit
    y = make_algebra('RealSym(2)').unit
    with pytest.raises(AlgebraMismatch):
        jordan_product(x, y)
    with pytest.raises(AlgebraMismatch):
        trace_inner(x, y)
    with pytest.raises(AlgebraMismatch):
        x + y


def test_wrong_coordinate_count():
    with pytest.raises(EJAError):
        eja.Element(make_algebra('Spin(4)'), [1.0, 2.0])


@pytest.mark.parametrize('family', AXIOM_FAMILIES)
def test_jordan_axioms(family):
    alg = make_algebra(family)
    rng = np.random.default_rng(11)
    for _ in range(100):
        x, y, z = (eja.random_element(alg, rng) for _ in range(3))
        xx = jordan_product(x, x)
        assert_elements_close(jordan_product(alg.unit, x), x)
        assert_elements_close(jordan_product(x, y), jordan_product(y, x))
        assert_elements_close(jordan_product(jordan_product(x, y), xx), jordan_product(x, jordan_product(y, xx)))
        lhs = trace_inner(jordan_product(x, y), z)
        rhs = trace_inner(y, jordan_product(x, z))
        assert abs(lhs - rhs) <= 1e-9 * (1 + abs(lhs))
        assert abs(trace_inner(x, y) - jordan_trace(jordan_product(x, y))) <= 1e-9 * (1 + x.norm() * y.norm())


def test_spin_product_of_orthogonal_vectors():
    alg = make_algebra('Spin(3)')
    product = jordan_product(alg.element([0, 1, 0]), alg.element([0, 0, 1]))
    assert np.allclose(product.coords, 0)


def test_complex_product_matches_matrices():
    X = np.array([[1, 0], [0, 0]], dtype=complex)
    Y = np.array([[0, 1], [1, 0]], dtype=complex)
    product = jordan_product(matrix_element('ComplexHerm(2)', X), matrix_element('ComplexHerm(2)', Y))
    alg = product.algebra
    assert np.allclose(alg.to_matrix(product.coords), (X @ Y + Y @ X) / 2)


@pytest.mark.parametrize('family', ['RealSym(3)', 'ComplexHerm(3)', 'QuatHerm(2)'])
def test_product_and_trace_match_matrix_oracle(family):
    alg = make_algebra(family)
    rng = np.random.default_rng(3)
    for _ in range(100):
        x, y = eja.random_element(alg, rng), eja.random_element(alg, rng)
        X, Y = alg.to_matrix(x.coords), alg.to_matrix(y.coords)
        assert np.allclose(alg.to_matrix(jordan_product(x, y).coords), (X @ Y + Y @ X) / 2, atol=1e-10)
        # The quaternionic embedding doubles the complex trace.
        factor = 2 if family.startswith('QuatHerm') else 1
        assert np.isclose(trace_inner(x, y) * factor, np.trace(X @ Y).real)


def test_unit_inner_product_is_rank():
    for r in range(1, 6):
        alg = make_algebra(f'ComplexHerm({r})')
        assert trace_inner(alg.unit, alg.unit) == pytest.approx(r)


@ddt.ddt
class SpectralTest(SimpleTestCase):

    @ddt.data(*SPECTRAL_FAMILIES)
    def test_unit_has_unit_eigenvalues(self, family):
        alg = make_algebra(family)
        decomposition = spectral_decompose(alg.unit)
        self.assertEqual(len(decomposition.frame), alg.rank)
        self.assertTrue(np.allclose(decomposition.eigenvalues, 1.0))

    def test_spin_closed_form(self):
        x = make_algebra('Spin(4)').element([2, 1, 0, 0])
        self.assertTrue(np.allclose(spectral_decompose(x).eigenvalues, [3, 1]))

    def test_diagonal_state(self):
        x = matrix_element('ComplexHerm(2)', np.diag([0.7, 0.3]))
        decomposition = spectral_decompose(x)
        self.assertTrue(np.allclose(decomposition.eigenvalues, [0.7, 0.3]))
        first = decomposition.frame[0].algebra.to_matrix(decomposition.frame[0].coords)
        self.assertTrue(np.allclose(first, np.diag([1, 0])))

    @ddt.data(*SPECTRAL_FAMILIES)
    def test_reconstruction_and_frame(self, family):
        alg = make_algebra(family)
        rng = np.random.default_rng(5)
        for _ in range(100):
            x = eja.random_element(alg, rng)
            decomposition = spectral_decompose(x)
            self.assertTrue(np.all(np.diff(decomposition.eigenvalues) <= 1e-12))
            assert_elements_close(decomposition.reconstruct(), x, atol=1e-8)
            frame = decomposition.frame
            assert_elements_close(sum(frame, alg.zero), alg.unit, atol=1e-8)
            for i, p in enumerate(frame):
                self.assertEqual(idempotent_class(p, 1e-8), IdempotentClass.PRIMITIVE)
                for q in frame[i + 1:]:
                    self.assertLess(abs(trace_inner(p, q)), 1e-8)

    def test_octonions_are_unsupported(self):
        with self.assertRaises(UnsupportedOperation):
            spectral_decompose(make_algebra('OctHerm3').unit)

    def test_spectral_function_square_root(self):
        alg = make_algebra('QuatHerm(2)')
        x = eja.random_cone_element(alg, np.random.default_rng(8))
        root = eja.spectral_function(x, lambda w: np.sqrt(np.clip(w, 0, None)))
        assert_elements_close(jordan_product(root, root), x, atol=1e-8)


def test_quadratic_representation():
    alg = make_algebra('ComplexHerm(2)')
    rng = np.random.default_rng(21)
    for _ in range(100):
        y, z = eja.random_cone_element(alg, rng), eja.random_cone_element(alg, rng)
        assert_elements_close(quadratic_rep(alg.unit, z), z)
        assert_elements_close(quadratic_rep(y, alg.unit), jordan_product(y, y))
        Y, Z = alg.to_matrix(y.coords), alg.to_matrix(z.coords)
        assert np.allclose(alg.to_matrix(quadratic_rep(y, z).coords), Y @ Z @ Y, atol=1e-9)


def test_idempotent_classes():
    alg = make_algebra('ComplexHerm(3)')
    assert idempotent_class(alg.zero) == IdempotentClass.NOT_IDEMPOTENT
    assert idempotent_class(alg.unit / 2) == IdempotentClass.NOT_IDEMPOTENT
    assert idempotent_class(matrix_element('ComplexHerm(3)', np.diag([1, 1, 0]))) == IdempotentClass.IDEMPOTENT
    assert idempotent_class(alg.unit) == IdempotentClass.IDEMPOTENT
    assert idempotent_class(matrix_element('ComplexHerm(3)', np.diag([0, 1, 0]))) == IdempotentClass.PRIMITIVE
    spin = make_algebra('Spin(5)')
    assert idempotent_class(spin.element(spin.primitive_idempotent_coords())) == IdempotentClass.PRIMITIVE


@pytest.mark.parametrize('family,simple', [
    ('ComplexHerm(2)', True),
    ('Spin(5)', True),
    ('QuatHerm(2)', True),
    ('OctHerm3', True),
    ('DirectSum(ComplexHerm(1), ComplexHerm(1))', False),
    ('DirectSum(ComplexHerm(2), Spin(3))', False),
])
def test_simplicity(family, simple):
    assert bool(is_simple(make_algebra(family))) is simple


def test_non_simple_ideal_is_first_summand():
    result = is_simple(make_algebra('DirectSum(ComplexHerm(1), ComplexHerm(1))'))
    assert result.ideal_basis.shape == (2, 1)
    assert np.allclose(np.abs(result.ideal_basis[:, 0]), [1, 0])


@pytest.mark.parametrize('rank,dim,expected', [
    (9, 729, []),
    (4, 16, ['ComplexHerm(4)']),
    (4, 25, []),
    (2, 25, ['Spin(25)']),
    (2, 6, ['QuatHerm(2)']),
    (3, 27, ['OctHerm3']),
    (3, 6, ['RealSym(3)']),
    (1, 1, ['RealSym(1)', 'ComplexHerm(1)', 'QuatHerm(1)']),
])
def test_classify_simple(rank, dim, expected):
    assert [str(family) for family in classify_simple(rank, dim)] == expected


def test_direct_sum_projection_keeps_positivity():
    alg = make_algebra('DirectSum(ComplexHerm(2), Spin(4))')
    rng = np.random.default_rng(2)
    for _ in range(20):
        x = eja.random_cone_element(alg, rng)
        for index, part in enumerate(alg.parts):
            block = part.element(alg.project(x.coords, index))
            assert np.min(spectral_decompose(block).eigenvalues) >= -1e-9
            assert np.allclose(alg.project(alg.embed(block.coords, index), index), block.coords)


def test_orthogonality_of_positive_pairs():
    rng = np.random.default_rng(17)
    for family in ('ComplexHerm(3)', 'Spin(6)', 'RealSym(3)'):
        alg = make_algebra(family)
        for _ in range(50):
            frame = spectral_decompose(eja.random_element(alg, rng)).frame
            p, q = frame[0], frame[-1]
            assert abs(trace_inner(p, q)) < 1e-9
            assert jordan_product(p, q).norm() < 1e-9
            x, y = eja.random_state(alg, rng), eja.random_state(alg, rng)
            assert trace_inner(x, y) > 0
            assert jordan_product(x, y).norm() > 0
