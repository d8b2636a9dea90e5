from __future__ import annotations

from fractions import Fraction

from hypothesis import given, settings, strategies as st

from frobext.exact import poly_eval
from frobext.linalg import (
    bareiss_det,
    charpoly,
    companion,
    gcd_of_minors,
    identity,
    int_inverse,
    kernel_basis,
    mat_mul,
    mat_scale,
    mat_sub,
    minimal_polynomial,
    rational_rank,
    smith_normal_form,
    solve_exact,
)


def int_matrices(n_max=4, lo=-9, hi=9):
    return st.integers(min_value=1, max_value=n_max).flatmap(
        lambda n: st.lists(
            st.lists(st.integers(min_value=lo, max_value=hi), min_size=n, max_size=n),
            min_size=n, max_size=n,
        )
    )


def _cofactor_det(a):
    """Textbook cofactor expansion (test oracle)."""
    n = len(a)
    if n == 1:
        return a[0][0]
    total = 0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in a[1:]]
        total += (-1) ** j * a[0][j] * _cofactor_det(minor)
    return total


@given(int_matrices())
def test_bareiss_against_cofactor(a):
    assert bareiss_det(a) == _cofactor_det(a)


@given(int_matrices(), st.integers(min_value=-10, max_value=10))
def test_charpoly_matches_det(a, x):
    # char poly evaluated anywhere must equal det(xI - A), computed by an
    # entirely different elimination
    p = charpoly(a)
    n = len(a)
    xi_a = mat_sub(mat_scale(identity(n), x), a)
    assert poly_eval(p, x) == bareiss_det(xi_a)


def test_companion_roundtrip():
    p = [6, -5, -2, 1]
    assert charpoly(companion(p)) == p


def test_minimal_polynomial():
    assert minimal_polynomial([[1, 0], [0, 1]]) == [-1, 1]
    assert minimal_polynomial([[1, 1], [0, 1]]) == [1, -2, 1]
    p = [6, -5, -2, 1]
    assert minimal_polynomial(companion(p)) == p


@given(int_matrices(n_max=3, lo=-5, hi=5))
def test_minimal_divides_char(a):
    from frobext.exact import poly_divmod
    m = minimal_polynomial(a)
    c = charpoly(a)
    _, r = poly_divmod([Fraction(x) for x in c], [Fraction(x) for x in m])
    assert all(x == 0 for x in r)


def test_snf_example():
    s = smith_normal_form([[2, 0], [0, 3]])
    assert s.diagonal == [1, 6]


def test_snf_rectangular():
    s = smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    assert s.diagonal == [2, 6, 12]


def _check_snf(a):
    s = smith_normal_form(a)
    m, n = len(a), len(a[0])
    diag = s.diagonal
    # reassembly: L A R = D
    d = [[0] * n for _ in range(m)]
    for i, x in enumerate(diag):
        d[i][i] = x
    assert mat_mul(mat_mul(s.left, a), s.right) == d
    # transforms are unimodular
    assert mat_mul(s.left, s.left_inv) == identity(m)
    assert mat_mul(s.right, s.right_inv) == identity(n)
    assert abs(bareiss_det(s.left)) == 1
    assert abs(bareiss_det(s.right)) == 1
    # divisibility chain, nonnegative
    for i in range(len(diag) - 1):
        assert diag[i] >= 0
        if diag[i + 1] != 0:
            assert diag[i] != 0 and diag[i + 1] % diag[i] == 0
    # determinantal divisors: prod of first k entries = gcd of k-minors
    prod = 1
    for k in range(1, min(len(diag), 3) + 1):
        prod *= diag[k - 1]
        assert prod == gcd_of_minors(a, k)


@settings(max_examples=60)
@given(int_matrices(n_max=4, lo=-6, hi=6))
def test_snf_properties(a):
    _check_snf(a)


@given(st.lists(st.lists(st.integers(min_value=-6, max_value=6), min_size=4, max_size=4),
                min_size=2, max_size=2))
def test_snf_wide(a):
    _check_snf(a)


def test_kernel_basis_saturated():
    a = [[2, 4, 0], [1, 2, 0]]
    k = kernel_basis(a)
    # kernel of the rational map has dimension 2, basis must be primitive
    assert len(k[0]) == 2
    for col in range(2):
        v = [k[i][col] for i in range(3)]
        assert all(sum(row[i] * v[i] for i in range(3)) == 0 for row in a)
    s = smith_normal_form(k)
    assert s.diagonal == [1, 1]


def test_solve_and_inverse():
    a = [[3, 1], [2, 1]]
    inv = int_inverse(a)
    assert mat_mul(a, inv) == identity(2)
    x = solve_exact([[2, 0], [0, 5]], [[4], [10]])
    assert x == [[2], [2]]


def test_rational_rank():
    assert rational_rank([[1, 2], [2, 4]]) == 1
    assert rational_rank([[0, 0], [0, 0]]) == 0
    assert rational_rank([[1, 0], [0, 3]]) == 2
