import ddt
import numpy as np
import pytest
from django.test import SimpleTestCase

from opt_foundry import eja
from opt_foundry.cones import (
    ConeContext,
    ConeError,
    LinearMap,
    NotInternalError,
    NotNormalizedError,
    cone_member,
    dagger,
    deterministic_effect,
    homogeneity_map,
    is_internal,
    min_eigenvalue,
    order_leq,
    quadratic_map,
    random_automorphism,
    self_duality_check,
    undagger,
)
from opt_foundry.reports import FAIL, PASS


def ctx_for(family, tol=1e-9):
    return ConeContext(eja.make_algebra(family), tol)


def diag_element(family, values):
    alg = eja.make_algebra(family)
    return eja.Element(alg, alg.from_matrix(np.diag(values)))


def random_internal_state(alg, rng):
    x = eja.random_state(alg, rng)
    return (x + alg.unit / alg.rank) / 2


def test_context_needs_positive_tolerance():
    with pytest.raises(ConeError):
        ConeContext(eja.make_algebra('ComplexHerm(2)'), 0.0)


@ddt.ddt
class ConeMembershipTest(SimpleTestCase):

    @ddt.data('ComplexHerm(3)', 'RealSym(2)', 'QuatHerm(2)', 'Spin(5)', 'DirectSum(ComplexHerm(1), ComplexHerm(1))')
    def test_unit_and_squares_are_positive(self, family):
        ctx = ctx_for(family)
        self.assertTrue(cone_member(ctx, ctx.algebra.unit))
        rng = np.random.default_rng(4)
        for _ in range(50):
            self.assertTrue(cone_member(ctx, eja.random_cone_element(ctx.algebra, rng)))

    def test_spin_vector_longer_than_scalar(self):
        ctx = ctx_for('Spin(4)')
        x = ctx.algebra.element([1, 2, 0, 0])
        self.assertFalse(cone_member(ctx, x))
        self.assertAlmostEqual(min_eigenvalue(x), -1.0)

    def test_order(self):
        ctx = ctx_for('ComplexHerm(2)')
        x = eja.random_cone_element(ctx.algebra, np.random.default_rng(1))
        self.assertTrue(order_leq(ctx, ctx.algebra.zero, x))
        p = eja.spectral_decompose(x).frame[0]
        self.assertTrue(order_leq(ctx, p, ctx.algebra.unit))
        self.assertFalse(order_leq(ctx, diag_element('ComplexHerm(2)', [0.6, 0.5]),
                                   diag_element('ComplexHerm(2)', [0.5, 0.6])))

    def test_internal_states(self):
        ctx = ctx_for('ComplexHerm(3)')
        self.assertTrue(is_internal(ctx, ctx.algebra.unit / 3))
        self.assertFalse(is_internal(ctx, diag_element('ComplexHerm(3)', [1, 0, 0])))
        self.assertTrue(is_internal(ctx_for('ComplexHerm(2)'), diag_element('ComplexHerm(2)', [0.999, 0.001])))
        with self.assertRaises(NotNormalizedError):
            is_internal(ctx, ctx.algebra.unit)


def test_dagger():
    alg = eja.make_algebra('ComplexHerm(3)')
    rng = np.random.default_rng(6)
    rho = eja.random_state(alg, rng)
    assert dagger(alg.unit)(rho) == pytest.approx(1.0)
    assert deterministic_effect(alg)(rho) == pytest.approx(1.0)
    assert np.allclose(dagger(alg.zero).covector, 0)
    frame = eja.spectral_decompose(eja.random_element(alg, rng)).frame
    for i, p in enumerate(frame):
        for j, q in enumerate(frame):
            assert dagger(p)(q) == pytest.approx(1.0 if i == j else 0.0, abs=1e-9)
    x = eja.random_element(alg, rng)
    assert undagger(dagger(x)).allclose(x)


def test_dagger_preserves_order():
    ctx = ctx_for('Spin(5)')
    rng = np.random.default_rng(10)
    probes = [eja.random_cone_element(ctx.algebra, rng) for _ in range(20)]
    for _ in range(200):
        x = eja.random_cone_element(ctx.algebra, rng)
        y = x + eja.random_cone_element(ctx.algebra, rng)
        assert order_leq(ctx, x, y)
        assert all((dagger(y) - dagger(x))(z) >= -1e-9 for z in probes)


@ddt.ddt
class SelfDualityTest(SimpleTestCase):

    @ddt.data('ComplexHerm(3)', 'Spin(7)', 'RealSym(3)', 'QuatHerm(2)')
    def test_symmetric_cones_are_self_dual(self, family):
        report = self_duality_check(ctx_for(family), n_samples=500, seed=3, n_probes=60)
        self.assertEqual(report.verdict, PASS)
        self.assertEqual(report.witnesses, [])
        self.assertEqual(report.samples, 500)
        self.assertGreater(report.details['accepted_functionals'], 0)

    def test_indefinite_functional_is_caught(self):
        ctx = ctx_for('ComplexHerm(2)')
        functional = dagger(diag_element('ComplexHerm(2)', [1, -1]))
        report = self_duality_check(ctx, n_samples=20, seed=3, functionals=[functional])
        self.assertEqual(report.verdict, FAIL)
        kinds = [w['kind'] for w in report.witnesses]
        self.assertEqual(kinds, ['negative_functional'])
        self.assertLess(report.witnesses[0]['value'], 0)


def test_homogeneity_identity():
    ctx = ctx_for('ComplexHerm(3)')
    chi = ctx.algebra.unit / 3
    gamma = homogeneity_map(ctx, chi, chi)
    assert gamma.allclose(LinearMap.identity(ctx.algebra), 1e-9)


def test_homogeneity_doubles_for_maximally_mixed_qubit():
    ctx = ctx_for('ComplexHerm(2)')
    tau = ctx.algebra.unit / 2
    rho = diag_element('ComplexHerm(2)', [0.75, 0.25])
    gamma = homogeneity_map(ctx, tau, rho)
    assert gamma(tau).allclose(rho, 1e-9)
    root = eja.spectral_function(rho, np.sqrt)
    assert np.allclose(gamma.matrix, 2 * quadratic_map(root).matrix, atol=1e-9)


@pytest.mark.parametrize('family', ['Spin(5)', 'ComplexHerm(3)', 'RealSym(3)', 'QuatHerm(2)'])
def test_homogeneity_maps_tau_to_rho(family):
    ctx = ctx_for(family)
    rng = np.random.default_rng(12)
    for _ in range(100):
        tau, rho = random_internal_state(ctx.algebra, rng), random_internal_state(ctx.algebra, rng)
        gamma = homogeneity_map(ctx, tau, rho)
        assert gamma(tau).allclose(rho, 1e-8)
        assert (gamma @ gamma.inverse()).allclose(LinearMap.identity(ctx.algebra), 1e-7)
        assert np.isfinite(gamma.condition_number())
        x = eja.random_cone_element(ctx.algebra, rng)
        assert cone_member(ctx, gamma(x))


def test_homogeneity_rejects_boundary_states():
    ctx = ctx_for('ComplexHerm(2)')
    with pytest.raises(NotInternalError):
        homogeneity_map(ctx, diag_element('ComplexHerm(2)', [1, 0]), ctx.algebra.unit / 2)


def test_quadratic_map_is_self_adjoint_with_matching_spectrum():
    alg = eja.make_algebra('ComplexHerm(3)')
    rng = np.random.default_rng(14)
    for _ in range(100):
        P = quadratic_map(eja.random_cone_element(alg, rng))
        assert P.adjoint().allclose(P, 1e-7 * (1 + np.abs(P.matrix).max()))
        spectrum = np.sort(np.linalg.eigvals(P.matrix).real)
        adjoint_spectrum = np.sort(np.linalg.eigvals(P.adjoint().matrix).real)
        assert np.allclose(spectrum, adjoint_spectrum, atol=1e-7 * (1 + np.abs(spectrum).max()))


@ddt.ddt
class AdjointSpectrumTest(SimpleTestCase):
    """
    ``g = P_y h`` and its adjoint send the normalized unit to elements with one spectrum.
    """

    @ddt.data('RealSym(3)', 'ComplexHerm(3)', 'QuatHerm(2)', 'Spin(5)', 'DirectSum(ComplexHerm(2), Spin(3))')
    def test_adjoint_spectrum_of_automorphism_after_quadratic_map(self, family):
        alg = eja.make_algebra(family)
        rng = np.random.default_rng(17)
        chi = alg.unit / alg.rank
        for _ in range(100):
            g = quadratic_map(eja.random_cone_element(alg, rng)) @ random_automorphism(alg, rng)
            spectrum = np.sort(eja.spectral_decompose(g(chi)).eigenvalues)
            adjoint_spectrum = np.sort(eja.spectral_decompose(g.adjoint()(chi)).eigenvalues)
            self.assertTrue(np.allclose(spectrum, adjoint_spectrum, rtol=0,
                                        atol=1e-7 * (1 + np.abs(spectrum).max())))


def test_adjoint_with_respect_to_trace_inner_product():
    domain, codomain = eja.make_algebra('Spin(4)'), eja.make_algebra('ComplexHerm(2)')
    rng = np.random.default_rng(15)
    L = LinearMap(domain, codomain, rng.standard_normal((codomain.dim, domain.dim)))
    for _ in range(20):
        x, y = eja.random_element(domain, rng), eja.random_element(codomain, rng)
        assert eja.trace_inner(L(x), y) == pytest.approx(eja.trace_inner(x, L.adjoint()(y)))


def test_linear_map_shape_is_checked():
    alg = eja.make_algebra('ComplexHerm(2)')
    with pytest.raises(ConeError):
        LinearMap(alg, alg, np.eye(3))


@pytest.mark.parametrize('family', [
    'RealSym(3)', 'ComplexHerm(3)', 'QuatHerm(2)', 'Spin(5)', 'DirectSum(ComplexHerm(2), Spin(3))',
])
def test_random_automorphisms_preserve_the_product(family):
    alg = eja.make_algebra(family)
    rng = np.random.default_rng(16)
    for _ in range(10):
        alpha = random_automorphism(alg, rng)
        assert alpha(alg.unit).allclose(alg.unit, 1e-9)
        x, y = eja.random_element(alg, rng), eja.random_element(alg, rng)
        lhs = alpha(eja.jordan_product(x, y))
        rhs = eja.jordan_product(alpha(x), alpha(y))
        assert np.allclose(lhs.coords, rhs.coords, atol=1e-8)
