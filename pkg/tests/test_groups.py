import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from orientifold.errors import EpsNotHomomorphism, EpsTrivial, InfiniteCarrier, NotAGroup
from orientifold.groups import (
    CircleRational,
    IntegersTwisted,
    TableGammaGroup,
    ZTwo,
    cyclic_group,
    direct_product,
    has_involution_in_minus,
    make_orientifold_group,
    preset_group,
    semidirect_orientifold,
)

Z2_TABLE = [[0, 1], [1, 0]]


def test_real_z2_splits_into_plus_and_minus():
    G = make_orientifold_group(Z2_TABLE, [1, -1], ["+1", "-1"])
    assert G.plus() == [0] and G.minus() == [1]
    assert has_involution_in_minus(G)


def test_trivial_eps_is_rejected():
    with pytest.raises(EpsTrivial):
        make_orientifold_group(Z2_TABLE, [1, 1])


def test_eps_must_be_a_homomorphism():
    Z3 = [[(a + b) % 3 for b in range(3)] for a in range(3)]
    with pytest.raises(EpsNotHomomorphism):
        make_orientifold_group(Z3, [1, -1, -1])


def test_non_latin_table_is_rejected():
    with pytest.raises(NotAGroup):
        make_orientifold_group([[0, 1], [1, 1]], [1, -1])


def test_non_associative_table_is_rejected():
    # a Latin square on 3 symbols that is not a group (identity 0, but 1*1 = 1 forces failure)
    with pytest.raises(NotAGroup):
        make_orientifold_group([[0, 1, 2], [1, 0, 2], [2, 2, 0]], [1, -1, 1])


def test_quaternionic_h4_has_no_involution_in_minus():
    H = preset_group("h4-q")
    assert [H.labels[g] for g in H.minus()] == ["i", "-i"]
    assert not has_involution_in_minus(H)


def test_q8_with_eps_on_j_k_has_no_involution_in_minus():
    # j^2 = k^2 = -1, so no element of the minus coset squares to 1
    Q = preset_group("q8")
    assert sorted(Q.labels[g] for g in Q.minus()) == ["-j", "-k", "j", "k"]
    assert not has_involution_in_minus(Q)


@pytest.mark.parametrize("name", ["z2", "h4-q", "q8"])
def test_presets_split_evenly_and_square_into_plus(name):
    G = preset_group(name)
    assert len(G.plus()) == len(G.minus()) == G.order // 2
    assert all(G.eps(G.mul(g, g)) == 1 for g in G.elements)


def test_semidirect_with_trivial_action_is_klein_four():
    z2 = preset_group("z2")
    K = semidirect_orientifold(z2, TableGammaGroup(z2, cyclic_group(2)))
    assert K.order == 4
    assert all(K.mul(g, g) == 0 for g in K.elements)
    assert [K.eps(g) for g in K.elements] == [1, 1, -1, -1]


def test_semidirect_contains_the_involution_minus_one_e():
    z2 = preset_group("z2")
    Z4 = cyclic_group(4)
    # theta_{-1} is inversion on Z/4
    act = [[0, 1, 2, 3], [0, 3, 2, 1]]
    S = semidirect_orientifold(z2, TableGammaGroup(z2, Z4, act))
    minus_e = next(g for g in S.elements if S.labels[g] == "(-1,0)")
    assert S.mul(minus_e, minus_e) == 0


def test_quaternionic_semidirect_has_no_involution_in_minus():
    H = preset_group("h4-q")
    S = semidirect_orientifold(H, TableGammaGroup(H, cyclic_group(3)))
    assert not has_involution_in_minus(S)
    for g in S.minus():
        assert S.labels[S.mul(g, g)].startswith("(-1,")


def test_semidirect_rejects_infinite_carrier():
    z2 = preset_group("z2")
    with pytest.raises(InfiniteCarrier):
        semidirect_orientifold(z2, IntegersTwisted(z2))


def test_semidirect_axioms_exhaustive_up_to_1e4():
    z2 = preset_group("z2")
    for m in (2, 3, 5, 8, 12):
        Zm = cyclic_group(m)
        act = [list(range(m)), [(-x) % m for x in range(m)]]
        S = semidirect_orientifold(z2, TableGammaGroup(z2, Zm, act))
        assert S.order ** 2 <= 10**4
        for a, b, c in itertools.product(S.elements, repeat=3):
            assert S.mul(S.mul(a, b), c) == S.mul(a, S.mul(b, c))


@pytest.mark.parametrize("name", ["z2", "h4-q", "q8"])
def test_coefficient_actions_satisfy_axioms(name):
    G = preset_group(name)
    ZTwo(G).verify_action()
    CircleRational(G, 8).verify_action()
    TableGammaGroup(G, cyclic_group(4), [[0, 1, 2, 3] if G.eps(g) == 1 else [0, 3, 2, 1] for g in G.elements]).verify_action()


def test_integers_twisted_and_circle_thetas():
    G = preset_group("z2")
    Z = IntegersTwisted(G)
    assert Z.theta(1, 5) == -5 and Z.theta(0, 5) == 5
    assert IntegersTwisted(G, twisted=False).theta(1, 5) == 5
    T = CircleRational(G, 16)
    assert T.theta(1, Fraction(1, 4)) == Fraction(3, 4)
    assert T.theta(0, Fraction(1, 4)) == Fraction(1, 4)
    assert ZTwo(G).theta(1, 1) == 1


def test_direct_product_ids_project_by_modulus():
    z2 = preset_group("z2")
    H = cyclic_group(3)
    P = direct_product(z2, H, "first")
    for g, h in itertools.product(P.elements, repeat=2):
        assert P.mul(g, h) % 3 == H.mul(g % 3, h % 3)
    assert [P.eps(g) for g in P.elements] == [1, 1, 1, -1, -1, -1]


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=6), st.data())
def test_twisted_cyclic_products_are_orientifold_groups(m, data):
    # Z2 x Z/m with eps from the first factor: plus and minus cosets of equal size
    P = direct_product(preset_group("z2"), cyclic_group(m), "first")
    g = data.draw(st.sampled_from(list(P.elements)))
    assert P.eps(P.mul(g, g)) == 1
    assert P.eps(P.inv(g)) == P.eps(g)
    assert len(P.plus()) == len(P.minus()) == m


def test_unknown_preset():
    with pytest.raises(KeyError):
        preset_group("nope")
