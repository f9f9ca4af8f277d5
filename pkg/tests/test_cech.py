import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from families import H4, KLEIN, Q8, Z2, named_covers, small_covers, swap_action, two_chart_point
from orientifold.cech import (
    Cochain,
    EquivariantCover,
    cells,
    coboundary,
    coboundary_matrix,
    cocycle_condition,
    cohomology,
    delta_exp,
    delta_s,
    delta_sc,
    delta_u,
    direct_sum,
    dual,
    gauge_transform,
    pullback,
    pullback_cover,
    spin_lift,
    tensor,
)
from orientifold.errors import CoverMismatch, DenominatorBoundExceeded, DomainMismatch, NonAbelianCoefficient
from orientifold.groups import CircleRational, GLGroup, IntegersTwisted, ZTwo, cyclic_group, direct_product
from orientifold.spin import SOGroup, SpinGroup
from orientifold.spinc_structures import enumerate_circle_cocycles


def _table(G):
    return tuple(tuple(int(G.mul(a, b)) for b in G.elements) for a in G.elements)


def _signs(G, twisted=True):
    return tuple(G.eps(g) if twisted else 1 for g in G.elements)


def _shape(H):
    return sorted(H.invariant_factors()), H.free_rank


# -- agreement with the bar-resolution oracle over a point ---------------------------------------

POINT_CASES = [(Z2, 4), (H4, 4), (KLEIN, 4), (Q8, 3)]


@pytest.mark.parametrize("G,top", POINT_CASES, ids=["z2", "h4q", "klein", "q8"])
@pytest.mark.parametrize("twisted", [True, False])
def test_point_cohomology_matches_bar_oracle(G, top, twisted):
    cover = EquivariantCover.point(G)
    Z = IntegersTwisted(G, twisted=twisted)
    for p in range(top):
        tors, free = oracles.bar_cohomology_z(_table(G), _signs(G, twisted), p)
        assert _shape(cohomology(cover, Z, p)) == (tors, free), p


@pytest.mark.parametrize("G,top", POINT_CASES, ids=["z2", "h4q", "klein", "q8"])
def test_point_z2_coefficients_match_bar_oracle(G, top):
    cover = EquivariantCover.point(G)
    for p in range(top):
        H = cohomology(cover, ZTwo(G), p)
        assert len(H.invariant_factors()) == oracles.bar_cohomology_z2_dim(_table(G), p)


def test_real_point_values():
    cover = EquivariantCover.point(Z2)
    got = [cohomology(cover, IntegersTwisted(Z2), p).describe() for p in range(4)]
    assert got == ["0", "Z/2", "0", "Z/2"]
    assert cohomology(cover, IntegersTwisted(Z2, twisted=False), 2).describe() == "Z/2"
    assert cohomology(cover, IntegersTwisted(Z2), 0).is_trivial


def test_h0_of_any_point_with_twisted_integers_is_zero():
    for G in (Z2, H4, KLEIN, Q8):
        assert cohomology(EquivariantCover.point(G), IntegersTwisted(G), 0).is_trivial


def test_free_action_sees_the_quotient():
    # a free Z2 orbit is equivariantly a point with trivial group
    cover = EquivariantCover.discrete(Z2, swap_action(Z2, 2, (1, 0)))
    Z = IntegersTwisted(Z2)
    assert cohomology(cover, Z, 0).free_rank == 1
    assert all(cohomology(cover, Z, p).is_trivial for p in (1, 2, 3))


# -- the coboundary ---------------------------------------------------------------------------------


def test_point_coboundary_of_integer():
    cover = EquivariantCover.point(Z2)
    Z = IntegersTwisted(Z2)
    c = Cochain(cover, 0, Z, {((), (0,), 0): 1})
    d = coboundary(c)
    assert d.at((1,), (0, 0), 0) == 2 and d.at((0,), (0, 0), 0) == 0


@pytest.mark.parametrize("name,cover", small_covers(1000, 3), ids=lambda v: v if isinstance(v, str) else "")
def test_delta_squared_vanishes_exhaustively(name, cover):
    for twisted in (True, False):
        signs = _signs(cover.group, twisted)
        for p in range(0, 4):
            if len(cells(cover, p + 2)) > 1000:
                break
            prod = coboundary_matrix(cover, p + 1, signs) @ coboundary_matrix(cover, p, signs)
            assert not prod.any(), (name, p, twisted)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([c for _, c in named_covers()]), st.integers(0, 1), st.data())
def test_delta_squared_on_circle_cochains(cover, p, data):
    T = CircleRational(cover.group, 8)
    vals = data.draw(st.lists(st.integers(0, 7), min_size=len(cells(cover, p)), max_size=len(cells(cover, p))))
    c = Cochain.from_vector(cover, p, T, [Fraction(v, 8) for v in vals])
    assert coboundary(coboundary(c)).is_identity()


def test_coboundary_of_identity_is_identity():
    for _, cover in named_covers():
        assert coboundary(Cochain.identity(cover, 1, ZTwo(cover.group))).is_identity()


def test_nonabelian_degree_two_is_refused():
    cover = EquivariantCover.point(Z2)
    c = Cochain.identity(cover, 2, SOGroup(Z2, 2))
    with pytest.raises(NonAbelianCoefficient):
        coboundary(c)


def test_wrong_domain_is_refused():
    cover = EquivariantCover.point(Z2)
    with pytest.raises(DomainMismatch):
        Cochain(cover, 1, ZTwo(Z2), {((1,), (0, 0), 0): 1})


# -- cocycle condition over a point versus brute force ---------------------------------------


def test_point_circle_cocycles_match_brute_force():
    cover = EquivariantCover.point(Z2)
    T = CircleRational(Z2, 8)
    oracle = set(oracles.brute_force_point_circle_cocycles(_table(Z2), _signs(Z2), 8))
    found = set()
    for vals in itertools.product(T.elements(), repeat=2):
        c = Cochain(cover, 1, T, {((0,), (0, 0), 0): vals[0], ((1,), (0, 0), 0): vals[1]})
        if cocycle_condition(c):
            found.add(vals)
    assert found == oracle


@pytest.mark.parametrize("value,expected", [(Fraction(0), True), (Fraction(1, 2), True), (Fraction(1, 4), True), (Fraction(3, 8), True)])
def test_real_point_circle_cocycle_examples(value, expected):
    # with the twisted action phi(1) = phi(-1) - phi(-1) = 0, so every value of phi(-1) is allowed
    cover = EquivariantCover.point(Z2)
    T = CircleRational(Z2, 8)
    c = Cochain(cover, 1, T, {((0,), (0, 0), 0): Fraction(0), ((1,), (0, 0), 0): value})
    assert cocycle_condition(c) is expected


def test_identity_cell_must_be_identity():
    cover = EquivariantCover.point(Z2)
    T = CircleRational(Z2, 8)
    c = Cochain(cover, 1, T, {((0,), (0, 0), 0): Fraction(1, 2), ((1,), (0, 0), 0): Fraction(0)})
    assert not cocycle_condition(c)


# -- cohomology groups as objects --------------------------------------------------------------


@pytest.mark.parametrize("name,cover", named_covers(), ids=lambda v: v if isinstance(v, str) else "")
def test_generators_and_coordinates(name, cover):
    G = cover.group
    for coeff in (IntegersTwisted(G), ZTwo(G), CircleRational(G, 16)):
        for p in (1, 2):
            H = cohomology(cover, coeff, p)
            gens = H.generators()
            assert len(gens) == len(H.invariant_factors())
            for k, g in enumerate(gens):
                assert coboundary(g).is_identity()
                coords = H.coordinates(g)
                assert [int(c) for c in coords[: len(gens)]] == [1 if j == k else 0 for j in range(len(gens))]
            if H.order() is not None and H.order() <= 64:
                classes = H.enumerate_classes()
                assert len(classes) == H.order()
                assert len({c.coords for c in classes}) == H.order()


def test_coboundaries_have_zero_class():
    cover = two_chart_point(Z2)
    T = CircleRational(Z2, 8)
    b = Cochain.from_vector(cover, 0, T, [Fraction(1, 8), Fraction(3, 8)])
    H = cohomology(cover, T, 1)
    assert H.is_coboundary(coboundary(b))
    assert H.class_of(coboundary(b)).is_zero()


def test_denominator_bound():
    cover = EquivariantCover.point(Z2)
    T = CircleRational(Z2, 4)
    c = Cochain(cover, 1, T, {((0,), (0, 0), 0): Fraction(0), ((1,), (0, 0), 0): Fraction(1, 8)})
    with pytest.raises(DenominatorBoundExceeded):
        cohomology(cover, T, 1).coordinates(c)
    with pytest.raises(DenominatorBoundExceeded):
        cohomology(EquivariantCover.point(Z2), CircleRational(Z2, 3), 2).generators()


# -- connecting maps: independence of choices and exactness ------------------------------------


def test_delta_exp_ignores_integer_shifts_of_the_lift():
    cover = EquivariantCover.point(H4)
    T = CircleRational(H4, 16)
    Z = IntegersTwisted(H4)
    H = cohomology(cover, T, 1)
    D = coboundary_matrix(cover, 1, _signs(H4))
    target = cohomology(cover, Z, 2)
    for cls in H.enumerate_classes():
        rep = cls.representative
        base = delta_exp(rep)
        vec = [Fraction(v) for v in rep.vector()]
        for shift in itertools.product((-1, 0, 1), repeat=len(vec)):
            img = [int(sum(int(D[r, j]) * (vec[j] + shift[j]) for j in range(len(vec)))) for r in range(D.shape[0])]
            assert target.class_of(Cochain.from_vector(cover, 2, Z, img)).coords == base.coords


def _so_problem_cochain(cover, n, table):
    coeff = SOGroup(cover.group, n)
    return Cochain(cover, 1, coeff, {cell: np.asarray(table[cell[0][0]]) for cell in cells(cover, 1)})


@pytest.mark.parametrize(
    "G,table",
    [
        (Z2, {0: np.eye(2, dtype=int), 1: -np.eye(2, dtype=int)}),
        (Z2, {0: np.eye(3, dtype=int), 1: np.diag([-1, -1, 1])}),
        (H4, {0: np.eye(2, dtype=int), 1: np.array([[0, -1], [1, 0]]), 2: -np.eye(2, dtype=int), 3: np.array([[0, 1], [-1, 0]])}),
    ],
)
def test_delta_s_and_delta_sc_independent_of_spin_lift(G, table):
    cover = EquivariantCover.point(G)
    n = table[0].shape[0]
    phi = _so_problem_cochain(cover, n, table)
    base = spin_lift(phi)
    ref_s, ref_sc = delta_s(phi, base).coords, delta_sc(phi, base).coords
    free = [c for c in cells(cover, 1) if not (c[0][0] == 0)]
    for flips in itertools.product((1, -1), repeat=len(free)):
        vals = dict(base.values)
        for cell, f in zip(free, flips):
            if f < 0:
                vals[cell] = -vals[cell]
        lift = Cochain(cover, 1, SpinGroup(G, n), vals)
        assert delta_s(phi, lift).coords == ref_s
        assert delta_sc(phi, lift).coords == ref_sc


@pytest.mark.parametrize("cover", [EquivariantCover.point(Z2), EquivariantCover.point(H4), two_chart_point(Z2)])
def test_delta_u_independent_of_half_lift(cover):
    G = cover.group
    Z2c = ZTwo(G)
    H2 = cohomology(cover, Z2c, 2)
    one = cells(cover, 1)
    for psi in list(enumerate_circle_cocycles(cover, 4))[:16]:
        ref = delta_u(psi).coords
        for flips in itertools.product((0, 1), repeat=min(len(one), 6)):
            half = {c: CircleRational.reduce(psi.values[c]) / 2 for c in one}
            for c, f in zip(one, flips):
                half[c] += Fraction(f, 2)
            d = coboundary(Cochain(cover, 1, CircleRational(G, 16), half))
            vals = {cell: (0 if CircleRational.reduce(v) == 0 else 1) for cell, v in d.values.items()}
            assert H2.class_of(Cochain(cover, 2, Z2c, vals)).coords == ref


@pytest.mark.parametrize(
    "cover",
    [EquivariantCover.point(Z2), EquivariantCover.point(H4), EquivariantCover.discrete(Z2, swap_action(Z2, 2, (1, 0)))],
)
def test_delta_u_kernel_is_squares(cover):
    doubles = set()
    for chi in enumerate_circle_cocycles(cover, 16):
        doubles.add(tuple(CircleRational.reduce(2 * v) for v in chi.vector()))
    for psi in enumerate_circle_cocycles(cover, 8):
        has_root = tuple(psi.vector()) in doubles
        assert delta_u(psi).is_zero() == has_root


# -- cocycle operations ----------------------------------------------------------------------------


def _h4_quaternionic_corep():
    # i -> J with J conj(J) = -1: the quaternionic corepresentation of {+-1, +-i}
    cover = EquivariantCover.point(H4)
    J = np.array([[0, -1], [1, 0]], dtype=complex)
    vals = {0: np.eye(2, dtype=complex), 1: J, 2: -np.eye(2, dtype=complex), 3: -J}
    return Cochain(cover, 1, GLGroup(H4, 2), {c: vals[c[0][0]] for c in cells(cover, 1)})


def _h4_phase_corep():
    # one-dimensional: i -> i? conj forces phi(-1) = phi(i) conj(phi(i)) = 1
    cover = EquivariantCover.point(H4)
    vals = {0: 1, 1: 1j, 2: 1, 3: 1j}
    return Cochain(cover, 1, GLGroup(H4, 1), {c: np.array([[vals[c[0][0]]]]) for c in cells(cover, 1)})


def test_cocycle_operations_preserve_cocycles():
    a, b = _h4_quaternionic_corep(), _h4_phase_corep()
    assert cocycle_condition(a) and cocycle_condition(b)
    for c in (dual(a), dual(b), direct_sum(a, b), tensor(a, b), tensor(b, a), direct_sum(a, a)):
        assert cocycle_condition(c)
    assert direct_sum(a, b).coeff.m == 3 and tensor(a, a).coeff.m == 4


def test_dual_of_identity_and_tensor_unit():
    cover = EquivariantCover.point(H4)
    one = Cochain.identity(cover, 1, GLGroup(H4, 2))
    assert dual(one) == one
    unit = Cochain.identity(cover, 1, GLGroup(H4, 1))
    a = _h4_quaternionic_corep()
    assert tensor(a, unit) == a and tensor(unit, a) == a


def test_operations_need_matching_covers():
    a = _h4_quaternionic_corep()
    other = EquivariantCover.discrete(H4, swap_action(H4, 2, (1, 0)))
    b = Cochain.identity(other, 1, GLGroup(H4, 1))
    with pytest.raises(CoverMismatch):
        direct_sum(a, b)
    with pytest.raises(CoverMismatch):
        tensor(a, b)


def test_gauge_transform_keeps_cocycles_and_class():
    cover = two_chart_point(Z2)
    T = CircleRational(Z2, 8)
    H = cohomology(cover, T, 1)
    g = Cochain.from_vector(cover, 0, T, [Fraction(1, 8), Fraction(5, 8)])
    for cls in H.enumerate_classes():
        moved = gauge_transform(cls.representative, g)
        assert cocycle_condition(moved)
        assert H.class_of(moved).coords == cls.coords


def test_pullback_along_quotient_map():
    H = cyclic_group(2)
    cover_h = EquivariantCover.point(H)
    phi = Cochain(cover_h, 1, SOGroup(H, 2), {((0,), (0, 0), 0): np.eye(2, dtype=int), ((1,), (0, 0), 0): -np.eye(2, dtype=int)})
    gamma = direct_product(Z2, H, "first")
    proj = [g % 2 for g in gamma.elements]
    cover = pullback_cover(cover_h, gamma, proj)
    pulled = pullback(phi, cover, hom=proj)
    assert cocycle_condition(pulled)
    for cell in cells(cover, 1):
        assert np.array_equal(pulled.values[cell], phi.values[((proj[cell[0][0]],), cell[1], 0)])


def test_pullback_rejects_non_equivariant_map():
    src = EquivariantCover.discrete(Z2, swap_action(Z2, 2, (1, 0)))
    dst = EquivariantCover.discrete(Z2, swap_action(Z2, 2, (0, 1)))
    c = Cochain.identity(src, 1, ZTwo(Z2))
    with pytest.raises(CoverMismatch):
        pullback(c, dst, point_map=[0, 1])


def test_cover_validation():
    with pytest.raises(CoverMismatch):
        EquivariantCover(Z2, 2, ((0, 1), (1, 0)), (frozenset({0}),))
    with pytest.raises(CoverMismatch):
        EquivariantCover(Z2, 3, ((0, 1, 2), (1, 0, 2)), (frozenset({0, 2}), frozenset({1})))
