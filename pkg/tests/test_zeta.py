from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frobext.zeta import (
    chi_coherent,
    elliptic_curve,
    elliptic_point_count,
    motivic_cohomology,
    point_count,
    product,
    projective_space,
    variety_from_json,
    variety_to_json,
    verify_variety_identity,
    zeta_special_value,
)


def test_projective_space_polys():
    v = projective_space(4, 2)
    assert v.frobenius_polys == [[1, -1], [1], [1, -4], [1], [1, -16]]
    assert v.hodge == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]


def test_point_counts():
    assert point_count(projective_space(3, 1)) == 4
    assert point_count(projective_space(3, 2)) == 13
    assert point_count(projective_space(2, 3)) == 15
    # #P^n(F_{q^m}) = (q^m(n+1) - 1)/(q^m - 1)
    assert point_count(projective_space(2, 2), 3) == (8 ** 3 - 1) // 7


def test_elliptic_point_count_brute_force():
    # y^2 = x^3 + x + 1 over F_5 has 9 points
    assert elliptic_point_count(5, [1, 1]) == 9
    # char-2 curve needs the long Weierstrass form: y^2 + xy = x^3 + 1
    assert elliptic_point_count(2, [1, 0, 0, 0, 1]) == 4
    with pytest.raises(ValueError):
        elliptic_point_count(5, [0, 0])  # singular: y^2 = x^3
    with pytest.raises(ValueError):
        elliptic_curve(4, [1, 1])  # prime fields only


def test_zeta_descriptor_vs_brute_count():
    for p, coeffs in [(5, [1, 1]), (7, [2, 3]), (11, [1, 5]), (13, [4, 1]),
                      (3, [1, 2]), (2, [1, 0, 0, 0, 1])]:
        v = elliptic_curve(p, coeffs)
        assert point_count(v) == elliptic_point_count(p, coeffs)
        t = p + 1 - point_count(v)
        assert v.frobenius_polys[1] == [1, -t, p]


def test_special_value_anchors():
    assert zeta_special_value(projective_space(4, 1), 1) \
        == (-1, Fraction(4, 3))
    assert zeta_special_value(projective_space(2, 1), 0) \
        == (-1, Fraction(-1))
    order, lead = zeta_special_value(elliptic_curve(5, [1, 1]), 0)
    assert (order, abs(lead)) == (-1, Fraction(9, 4))


def test_chi_coherent():
    assert chi_coherent(projective_space(4, 1), 1) == 1
    assert chi_coherent(projective_space(4, 2), 1) == 1
    assert chi_coherent(elliptic_curve(5, [1, 1]), 0) == 0
    assert chi_coherent(projective_space(4, 1), 0) == 0


def test_product_kunneth():
    pp = product(projective_space(4, 1), projective_space(4, 1))
    assert pp.frobenius_polys == [[1, -1], [1], [1, -8, 16], [1], [1, -16]]
    assert pp.hodge[1][1] == 2  # h^11 of P1 x P1
    assert point_count(pp) == point_count(projective_space(4, 1)) ** 2


def test_motivic_ranks_p1():
    rep = motivic_cohomology(projective_space(4, 1), 1)
    assert rep.ranks == [0, 0, 1, 1, 0]
    assert rep.euler_rank == 0 and rep.vanishing_order == -1
    assert rep.chi_times == Fraction(1, 3) and rep.chi_o == 1


def test_identity_catalogue():
    for q in (2, 3, 4, 5):
        for r in (0, 1):
            for v in (projective_space(q, 1), projective_space(q, 2),
                      product(projective_space(q, 1),
                              projective_space(q, 1))):
                out = verify_variety_identity(v, r)
                assert out["equal"], (v.kind, q, r, out)


def test_identity_elliptic():
    out = verify_variety_identity(elliptic_curve(5, [1, 1]), 0)
    assert out["equal"] and out["order"] == -1
    assert out["chi_times"] == Fraction(9, 4) and out["chi_o"] == 0


def test_chi_times_formula_p2():
    # 1/(q-1)^2 for the plane at r = 1
    for q in (2, 3, 4, 5):
        out = verify_variety_identity(projective_space(q, 2), 1)
        assert out["chi_times"] == Fraction(1, (q - 1) ** 2)


def test_json_roundtrip():
    pp = product(projective_space(4, 1), projective_space(4, 2))
    text = variety_to_json(pp)
    again = variety_from_json(text)
    assert variety_to_json(again) == text
    assert again.frobenius_polys == pp.frobenius_polys
    with pytest.raises(ValueError):
        variety_from_json('{"kind": "abelian_surface", "q": 5}')


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([3, 5, 7, 11, 13]),
       st.integers(min_value=0, max_value=6),
       st.integers(min_value=0, max_value=6))
def test_random_curves_verify(p, a4, a6):
    try:
        v = elliptic_curve(p, [a4, a6])
    except ValueError:
        return  # singular choice
    out = verify_variety_identity(v, 0)
    assert out["equal"]
    n = point_count(v)
    assert (p + 1 - n) ** 2 <= 4 * p


@settings(max_examples=10, deadline=None)
@given(st.sampled_from([2, 3, 4, 5, 7]), st.integers(min_value=1, max_value=3),
       st.integers(min_value=0, max_value=2))
def test_projective_identity_random(q, n, r):
    out = verify_variety_identity(projective_space(q, n), r)
    assert out["equal"]
