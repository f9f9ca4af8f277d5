from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from orientifold.clifford import MultiVector
from orientifold.dirac_lattice import (
    FiniteBundleModel,
    LatticeDiracModel,
    SectionMap,
    act_on_field,
    average_connection,
    average_metric,
    averaged_alpha_closed_form,
    clifford_mul_sections,
    connection_axiom_residuals,
    derivative_equivariance_residual,
    dirac_apply,
    dirac_left_equivariance_residual,
    dirac_right_equivariance_check,
    fourier_spectrum,
    lattice_action,
    links_from_connection,
    metric_identity_residual,
    operator_matrix,
    random_connection,
    right_clifford_action,
    spectrum,
    spectrum_symmetry,
    spinc_lie_basis,
)
from orientifold.errors import (
    ActionDoesNotLift,
    DimensionMismatch,
    IncompatibleFibers,
    NotPositiveDefinite,
    ReducedModelHasNoRightAction,
    TooLarge,
)
from orientifold.groups import preset_group
from orientifold.numbers import Exact
from orientifold.spin import SpincElement, SpinElement, finite_spinc_subgroup


def _model(d, N, group="z2", kind="antipodal", exact=False, links=None):
    return LatticeDiracModel(d, N, lattice_action(d, N, group, kind), links=links, exact=exact)


def _exact_mv(n, rng, denom=3):
    arr = np.empty(1 << n, dtype=object)
    for m in range(1 << n):
        arr[m] = Exact(Fraction(int(rng.integers(-denom, denom + 1)), denom), 0, Fraction(int(rng.integers(-denom, denom + 1)), denom))
    return MultiVector.from_array(n, arr, True)


def _float_mv(n, rng):
    return MultiVector.from_array(n, rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n), True)


# -- the flat operator against Fourier analysis -------------------------------------------------


@pytest.mark.parametrize("d,N", [(1, 4), (1, 8), (1, 64), (2, 4), (2, 8)])
def test_flat_spectrum_matches_fourier_oracle(d, N):
    ev = spectrum(_model(d, N))
    assert np.max(np.abs(ev - oracles.central_difference_spectrum(d, N))) < 1e-10
    assert np.max(np.abs(ev - fourier_spectrum(d, N))) < 1e-10


@pytest.mark.parametrize("k", range(8))
def test_plane_wave_is_an_eigenvector(k):
    # D(e^{2 pi i k x / N} v) = i sin(2 pi k / N) e_1 (e^{...} v)
    N = 8
    m = _model(1, N)
    E = m.gamma_matrix(0)
    vals, vecs = np.linalg.eig(E)
    for lam, v in zip(vals, vecs.T):
        psi = np.array([np.exp(2j * np.pi * k * x / N) * v for x in range(N)])
        expect = 1j * np.sin(2 * np.pi * k / N) * lam * psi
        assert np.max(np.abs(dirac_apply(m, psi) - expect)) < 1e-12


def test_constant_sections_are_harmonic():
    m = _model(2, 4, exact=True)
    psi = m.zero_field()
    psi[:] = Exact(Fraction(2, 3), 0, Fraction(-1, 5))
    assert all(v == 0 for v in dirac_apply(m, psi).flat)
    assert np.min(np.abs(spectrum(_model(1, 8)))) < 1e-12


def test_operator_is_linear():
    rng = np.random.default_rng(3)
    m = _model(2, 4)
    a, b = m.random_field(rng), m.random_field(rng)
    lhs = dirac_apply(m, 2.5 * a - 1j * b)
    assert np.max(np.abs(lhs - (2.5 * dirac_apply(m, a) - 1j * dirac_apply(m, b)))) < 1e-12


def test_operator_matrix_is_hermitian():
    M = operator_matrix(_model(2, 4))
    assert np.max(np.abs(M - M.conj().T)) < 1e-14


# -- equivariance ---------------------------------------------------------------------------


@pytest.mark.parametrize("d,N,group,kind", [(1, 8, "z2", "antipodal"), (2, 4, "z2", "antipodal"), (2, 4, "h4-q", "inversion"), (1, 8, "h4-q", "antipodal")])
def test_exact_equivariance_residuals_vanish(d, N, group, kind):
    rng = np.random.default_rng(0)
    m = _model(d, N, group, kind, exact=True)
    psi = m.random_field(rng)
    assert dirac_left_equivariance_residual(m, psi) == 0.0
    assert derivative_equivariance_residual(m, psi) == 0.0
    assert dirac_right_equivariance_check(m, psi, _exact_mv(d, rng)) == 0.0
    assert dirac_right_equivariance_check(m, psi, MultiVector.scalar(d, 1, complexified=True)) == 0.0


@pytest.mark.parametrize("N", [8, 64])
def test_float_equivariance_on_the_real_circle(N):
    rng = np.random.default_rng(N)
    m = _model(1, N)
    psi = m.random_field(rng)
    assert dirac_left_equivariance_residual(m, psi) < 1e-12
    assert dirac_right_equivariance_check(m, psi, _float_mv(1, rng)) < 1e-12


def test_real_involution_is_conjugation_composed_with_translation():
    m = _model(1, 8)
    rng = np.random.default_rng(1)
    psi = m.random_field(rng)
    g = m.action.group.index("-1")
    moved = act_on_field(m, g, psi)
    S = m.action.spinor_matrix(g)
    for x in range(8):
        assert np.allclose(moved[(x + 4) % 8], S @ np.conj(psi[x]))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([(1, 6), (2, 4)]))
def test_averaged_links_keep_left_equivariance(seed, shape):
    d, N = shape
    rng = np.random.default_rng(seed)
    act = lattice_action(d, N, "z2" if d == 1 else "h4-q", "antipodal" if d == 1 else "inversion")
    alpha = averaged_alpha_closed_form(random_connection(d, N, rng), act)
    m = LatticeDiracModel(d, N, act, links=links_from_connection(d, N, alpha))
    psi = m.random_field(rng)
    assert dirac_left_equivariance_residual(m, psi) < 1e-12
    assert dirac_right_equivariance_check(m, psi, _float_mv(d, rng)) < 1e-12


def test_random_links_break_equivariance():
    rng = np.random.default_rng(5)
    act = lattice_action(1, 6)
    m = LatticeDiracModel(1, 6, act, links=links_from_connection(1, 6, random_connection(1, 6, rng)))
    assert dirac_left_equivariance_residual(m, m.random_field(rng)) > 1e-6


def test_spectrum_is_symmetric_under_the_involution():
    for m in (_model(1, 8), _model(2, 4, "h4-q", "inversion")):
        sym = spectrum_symmetry(m)
        assert sym["commutator"] < 1e-12 and sym["pairing"] < 1e-10
        ev = spectrum(m)
        assert np.allclose(np.sort(ev), np.sort(-ev), atol=1e-10)


def test_unliftable_and_oversized_models():
    with pytest.raises(ActionDoesNotLift):
        lattice_action(1, 8, "z2", "inversion")
    with pytest.raises(ActionDoesNotLift):
        lattice_action(2, 4, "z2", "inversion")
    with pytest.raises(DimensionMismatch):
        lattice_action(1, 7, "z2", "antipodal")
    with pytest.raises(DimensionMismatch):
        lattice_action(3, 4)
    with pytest.raises(TooLarge):
        spectrum(_model(2, 64))


# -- metrics --------------------------------------------------------------------------------


def _rational_hermitian(rng, dim):
    A = np.empty((dim, dim), dtype=object)
    for i in range(dim):
        for j in range(dim):
            A[i, j] = Exact(Fraction(int(rng.integers(-3, 4)), 4), 0, Fraction(int(rng.integers(-3, 4)), 4))
    H = np.empty((dim, dim), dtype=object)
    for i in range(dim):
        for j in range(dim):
            H[i, j] = sum((A[k, i].conjugate() * A[k, j] for k in range(dim)), Exact(0)) + (Exact(dim) if i == j else Exact(0))
    return H


@pytest.mark.parametrize("d,N,group,kind", [(1, 8, "z2", "antipodal"), (2, 2, "h4-q", "inversion")])
def test_averaged_metric_is_an_orientifold_metric_exactly(d, N, group, kind):
    rng = np.random.default_rng(7)
    act = lattice_action(d, N, group, kind)
    h0 = [_rational_hermitian(rng, 1 << d) for _ in range(N**d)]
    h = average_metric(h0, act, exact=True)
    assert metric_identity_residual(h, act, exact=True) == 0.0
    assert metric_identity_residual(h0, act, exact=True) > 0


def test_standard_form_on_the_real_circle():
    act = lattice_action(1, 8)
    h0 = [np.eye(2, dtype=complex) for _ in range(8)]
    h = average_metric(h0, act)
    assert metric_identity_residual(h, act) < 1e-12
    # an invariant input comes back multiplied by |Gamma|
    assert all(np.allclose(H, 2 * np.eye(2)) for H in h)


def test_metric_must_be_positive():
    act = lattice_action(1, 4)
    with pytest.raises(NotPositiveDefinite):
        average_metric([np.diag([1.0, -1.0])] * 4, act)
    with pytest.raises(NotPositiveDefinite):
        average_metric([np.array([[1.0, 2.0], [0.0, 1.0]])] * 4, act)


# -- connections ----------------------------------------------------------------------------


def _samples(act, rng, count=10):
    d = act.d
    basis = spinc_lie_basis(d)
    from scipy.linalg import expm

    out = []
    for _ in range(count):
        x = int(rng.integers(len(act.perms[0])))
        g = expm(sum(rng.normal() * b for b in basis))
        h = expm(sum(rng.normal() * b for b in basis))
        v = list(rng.normal(size=d))
        xi = sum(rng.normal() * b for b in basis)
        A = sum(rng.normal() * b for b in basis)
        out.append((x, g, h, v, xi, A))
    return out


@pytest.mark.parametrize("d,N,group,kind", [(1, 6, "z2", "antipodal"), (2, 3, "h4-q", "inversion")])
def test_averaged_connection_axioms(d, N, group, kind):
    rng = np.random.default_rng(11)
    act = lattice_action(d, N, group, kind)
    omega = average_connection(random_connection(d, N, rng), act)
    res = connection_axiom_residuals(omega, _samples(act, rng))
    assert max(res.values()) < 1e-12
    assert np.max(np.abs(omega.alpha() - averaged_alpha_closed_form(random_connection(d, N, np.random.default_rng(11)), act))) < 1e-12


def test_unnormalized_average_scales_vertical_vectors():
    rng = np.random.default_rng(2)
    act = lattice_action(1, 4)
    omega = average_connection(random_connection(1, 4, rng), act, normalize=False)
    x, g, h, v, xi, A = _samples(act, rng, 1)[0]
    assert np.allclose(omega(x, g, [0.0], A), 2 * A)


def test_averaging_fixes_semi_equivariant_data():
    rng = np.random.default_rng(4)
    act = lattice_action(2, 3, "h4-q", "inversion")
    once = averaged_alpha_closed_form(random_connection(2, 3, rng), act)
    twice = averaged_alpha_closed_form(once, act)
    assert np.max(np.abs(once - twice)) < 1e-12


# -- finite associated bundles -----------------------------------------------------------------


def _finite_model(n=2, fiber="total"):
    G = preset_group("z2")
    elems = finite_spinc_subgroup(n)
    one = SpincElement.identity(n)
    return FiniteBundleModel(G, n, [[0, 1, 2, 3], [2, 3, 0, 1]], [one, one], elems, fiber)


def _random_sections(model, rng):
    n = model.n
    psi = SectionMap.from_base(model, lambda x: _exact_mv(n, rng))
    phi = SectionMap.from_base(model, lambda x: _exact_mv(n, rng), kind="clifford")
    return psi, phi


def test_sections_are_covariant_and_operations_preserve_it():
    rng = np.random.default_rng(0)
    m = _finite_model()
    psi, phi = _random_sections(m, rng)
    assert psi.is_covariant() and phi.is_covariant()
    assert clifford_mul_sections(phi, psi).is_covariant()
    c = _exact_mv(2, rng)
    assert right_clifford_action(psi, c).is_covariant()
    for g in m.group.elements:
        assert psi.act(g).is_covariant()


def test_product_equivariance_on_finite_model():
    rng = np.random.default_rng(1)
    m = _finite_model()
    psi, phi = _random_sections(m, rng)
    c = _exact_mv(2, rng)
    for g in m.group.elements:
        assert clifford_mul_sections(phi, psi).act(g).equals(clifford_mul_sections(phi.act(g), psi.act(g)))
        kc = c if m.group.eps(g) == 1 else c.conj_coefficients()
        assert right_clifford_action(psi, c).act(g).equals(right_clifford_action(psi.act(g), kc))


def test_identity_multipliers_and_associativity():
    rng = np.random.default_rng(2)
    m = _finite_model()
    psi, phi = _random_sections(m, rng)
    one = SectionMap.from_base(m, lambda x: MultiVector.scalar(2, 1, complexified=True), kind="clifford")
    assert clifford_mul_sections(one, psi).equals(psi)
    assert right_clifford_action(psi, MultiVector.scalar(2, 1, complexified=True)).equals(psi)
    c = _exact_mv(2, rng)
    assert right_clifford_action(clifford_mul_sections(phi, psi), c).equals(clifford_mul_sections(phi, right_clifford_action(psi, c)))


def test_finite_model_errors():
    G = preset_group("z2")
    one = SpincElement.identity(2)
    with pytest.raises(IncompatibleFibers):
        FiniteBundleModel(G, 2, [[0], [0]], [one, one], [one, SpincElement(SpinElement.identity(2), Fraction(1, 8))])
    with pytest.raises(DimensionMismatch):
        _finite_model(2, fiber="reduced")
    m = _finite_model()
    psi, phi = _random_sections(m, np.random.default_rng(0))
    with pytest.raises(IncompatibleFibers):
        clifford_mul_sections(psi, phi)


def test_reduced_fibre_has_no_right_action():
    G = preset_group("z2")
    n = 8
    elems = [SpincElement.identity(n), SpincElement(-SpinElement.identity(n)), SpincElement(SpinElement.identity(n), Fraction(1, 4)), SpincElement(-SpinElement.identity(n), Fraction(1, 4))]
    m = FiniteBundleModel(G, n, [[0], [0]], [elems[0], elems[0]], elems, fiber="reduced")
    v = np.array([Exact(k % 3, 0, 1) for k in range(16)], dtype=object)
    psi = SectionMap.from_base(m, lambda x: v)
    assert psi.is_covariant()
    with pytest.raises(ReducedModelHasNoRightAction):
        right_clifford_action(psi, MultiVector.scalar(8, 1, complexified=True))
