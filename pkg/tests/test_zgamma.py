from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from frobext.zgamma import (
    CofinTorsionGroup,
    FinGenAbGroup,
    GammaModule,
    GroupHom,
    PairAction,
    Presentation,
    gamma_cohomology,
    group_from_orders,
    invariants_coinvariants,
    standard_presentation,
    z_compose_check,
    z_det_formula,
    z_invariants_map,
    z_of_map,
)


def test_group_canonical_form():
    assert group_from_orders(0, [2, 3]) == FinGenAbGroup(0, (6,))
    assert group_from_orders(1, [4, 6]) == FinGenAbGroup(1, (2, 12))
    assert group_from_orders(2, [1, 1]) == FinGenAbGroup(2)
    with pytest.raises(ValueError):
        FinGenAbGroup(0, (4, 6))  # not a chain


def test_primary_part():
    g = FinGenAbGroup(1, (2, 12))
    assert g.primary_part(2) == FinGenAbGroup(1, (2, 4))
    assert g.primary_part(3) == FinGenAbGroup(1, (3,))
    assert g.primary_part(5) == FinGenAbGroup(1)


def test_z_of_map_examples():
    assert z_of_map(FinGenAbGroup(0, (4,)), FinGenAbGroup(0, (2,)), [[1]]) == 2
    assert z_of_map(FinGenAbGroup(1), FinGenAbGroup(1), [[0]]) is None
    assert z_of_map(FinGenAbGroup(2), FinGenAbGroup(2), [[2, 0], [0, 3]]) == Fraction(1, 6)


def test_z_det_formula_examples():
    assert z_det_formula(FinGenAbGroup(2), FinGenAbGroup(2),
                         [[2, 0], [0, 3]]) == Fraction(1, 6)
    assert z_det_formula(FinGenAbGroup(1, (2,)), FinGenAbGroup(1), [[1]]) == 2
    assert z_det_formula(FinGenAbGroup(1), FinGenAbGroup(1), [[3]],
                         mode="witt", p=3, witt_degree=1) == Fraction(1, 3)
    assert z_det_formula(FinGenAbGroup(1), FinGenAbGroup(1), [[0]]) is None


def test_z_compose_examples():
    z6 = FinGenAbGroup(0, (6,))
    assert z_compose_check(z6, z6, z6, [[1]], [[1]]) == (1, 1, 1)
    z = FinGenAbGroup(1)
    assert z_compose_check(z, z, z, [[2]], [[3]]) == (
        Fraction(1, 2), Fraction(1, 3), Fraction(1, 6))
    assert z_compose_check(FinGenAbGroup(0, (4,)), FinGenAbGroup(0, (2,)),
                           FinGenAbGroup(0, (2,)), [[1]], [[1]]) == (2, 1, 2)


small_groups = st.builds(
    lambda fr, orders: group_from_orders(fr, orders),
    st.integers(min_value=0, max_value=2),
    st.lists(st.sampled_from([2, 3, 4, 5, 8, 9]), max_size=2),
)


def _valid_hom_matrix(draw, dom, cod):
    """Random matrix defining a homomorphism dom -> cod with dense free block."""
    from math import gcd
    f, fd = cod.free_rank, dom.free_rank
    ents = st.integers(min_value=-5, max_value=5)
    rows = []
    for j in range(f + len(cod.torsion)):
        row = []
        for i in range(fd + len(dom.torsion)):
            x = draw(ents)
            if i >= fd:  # column from a torsion generator of the domain
                d = dom.torsion[i - fd]
                if j < f:
                    x = 0
                else:
                    e = cod.torsion[j - f]
                    x *= e // gcd(e, d)
            row.append(x)
        rows.append(row)
    return rows


@settings(max_examples=80)
@given(st.data(), st.integers(min_value=0, max_value=2),
       st.lists(st.sampled_from([2, 3, 4, 9]), max_size=2),
       st.lists(st.sampled_from([2, 3, 4, 9]), max_size=2))
def test_z_of_map_matches_det_formula(data, fr, tors_m, tors_n):
    dom = group_from_orders(fr, tors_m)
    cod = group_from_orders(fr, tors_n)
    mat = _valid_hom_matrix(data.draw, dom, cod)
    free_block = [row[:fr] for row in mat[:fr]]
    direct = z_of_map(dom, cod, mat)
    closed = z_det_formula(dom, cod, free_block)
    if closed is None:
        assert direct is None or not fr
    else:
        assert direct == closed


@settings(max_examples=60)
@given(st.data(), st.lists(st.sampled_from([2, 3, 4, 9]), max_size=2),
       st.lists(st.sampled_from([2, 3, 4, 9]), max_size=2),
       st.lists(st.sampled_from([2, 3, 4, 9]), max_size=2))
def test_z_multiplicative(data, t1, t2, t3):
    a, b, c = (group_from_orders(0, t) for t in (t1, t2, t3))
    f = _valid_hom_matrix(data.draw, a, b)
    g = _valid_hom_matrix(data.draw, b, c)
    zf, zg, zgf = z_compose_check(a, b, c, f, g)
    assert zf * zg == zgf  # all finite groups: always defined


def test_invariants_coinvariants_examples():
    inv, coinv, f0 = invariants_coinvariants(
        GammaModule(FinGenAbGroup(2), [[0, 1], [1, 0]]))
    assert inv == FinGenAbGroup(1) and coinv == FinGenAbGroup(1)
    inv, coinv, _ = invariants_coinvariants(GammaModule(FinGenAbGroup(1), [[5]]))
    assert inv == FinGenAbGroup(0) and coinv == FinGenAbGroup(0, (4,))
    inv, coinv, _ = invariants_coinvariants(
        GammaModule(FinGenAbGroup(0, (5,)), [[1]]))
    assert inv == coinv == FinGenAbGroup(0, (5,))


def test_z_invariants_map_examples():
    assert z_invariants_map(GammaModule(FinGenAbGroup(1), [[5]])) == Fraction(1, 4)
    assert z_invariants_map(GammaModule(FinGenAbGroup(3), [[1, 0, 0], [0, 1, 0], [0, 0, 1]])) == 1
    assert z_invariants_map(GammaModule(FinGenAbGroup(2), [[0, 1], [1, 0]])) == Fraction(1, 2)
    # 1 as a multiple root of the minimal polynomial: undefined
    assert z_invariants_map(GammaModule(FinGenAbGroup(2), [[1, 1], [0, 1]])) is None


@settings(max_examples=60)
@given(st.lists(st.integers(min_value=-4, max_value=4), min_size=1, max_size=9))
def test_z_invariants_map_identity_random(entries):
    n = 1 if len(entries) < 4 else (2 if len(entries) < 9 else 3)
    mat = [entries[i * n:(i + 1) * n] for i in range(n)]
    try:
        m = GammaModule(FinGenAbGroup(n), mat)
    except ValueError:
        return  # singular action
    z = z_invariants_map(m)  # the identity itself is asserted inside
    if z is not None:
        assert z > 0


def test_gamma_cohomology_trivial_action():
    h0, h1 = gamma_cohomology(GammaModule(FinGenAbGroup(1), [[1]]))
    assert h0 == FinGenAbGroup(1) and h1 == FinGenAbGroup(1)
    h0, h1 = gamma_cohomology(GammaModule(FinGenAbGroup(0, (5,)), [[1]]))
    assert h0 == h1 == FinGenAbGroup(0, (5,))


def test_gamma_cohomology_cofinite():
    # divisible group with gamma acting by q^r, q^r != 1
    g = CofinTorsionGroup(3, 1, action=[[2 ** 2]])
    h0, h1 = gamma_cohomology(g)
    assert h0 == FinGenAbGroup(0, (3,))  # 3-part of 2^2 - 1
    assert h1 == FinGenAbGroup(0)
    g = CofinTorsionGroup(2, 1, action=[[3 ** 2]])
    h0, h1 = gamma_cohomology(g)
    assert h0 == FinGenAbGroup(0, (8,))
    assert h1 == FinGenAbGroup(0)


def test_gamma_cohomology_cofinite_unit_denominator():
    # gamma = 9/5 at l = 3: same 3-part as gamma = 9 - wait, of 9/5 - 1 = 4/5
    g = CofinTorsionGroup(3, 1, action=[[Fraction(10, 7)]])
    h0, _ = gamma_cohomology(g)
    assert h0 == FinGenAbGroup(0, (3,))  # v_3(10/7 - 1) = v_3(3/7) = 1


@settings(max_examples=60)
@given(st.lists(st.sampled_from([2, 3, 4, 8, 9]), min_size=1, max_size=3),
       st.data())
def test_finite_module_h0_h1_same_order(tors, data):
    g = group_from_orders(0, tors)
    mat = _valid_hom_matrix(data.draw, g, g)
    pres = standard_presentation(g)
    pair = PairAction(pres, mat)
    h0, h1 = pair.cohomology()
    assert h0.order == h1.order


def test_cohomology_presentation_independent():
    # Z/6 with gamma = -1, presented two different ways
    one = PairAction(Presentation(1, [[6]]), [[5]])
    two = PairAction(Presentation(2, [[2, 0], [0, 3]]), [[1, 0], [0, 2]])
    assert one.cohomology() == two.cohomology()
    assert one.z_f0() == two.z_f0()


def test_pair_action_unit_denominator():
    # gamma = 3/5 on Z: at any prime away from 5 this behaves like the
    # honest map; kernel/cokernel of G - U = -2
    pair = PairAction(Presentation(1), [[3]], [[5]])
    assert pair.invariants() == FinGenAbGroup(0)
    assert pair.coinvariants() == FinGenAbGroup(0, (2,))
    assert pair.z_f0() == Fraction(1, 2)


def test_group_hom_validation():
    with pytest.raises(ValueError):
        # Z/4 -> Z/8 by 1 is not well defined
        GroupHom(Presentation(1, [[4]]), Presentation(1, [[8]]), [[1]])
    GroupHom(Presentation(1, [[4]]), Presentation(1, [[8]]), [[2]])  # x -> 2x is
