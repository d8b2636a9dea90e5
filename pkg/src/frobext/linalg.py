"""Exact integer / rational matrix algebra.

Matrices are lists of rows; maps act on column vectors.  Integer routines
never leave Z; rational ones use Fraction.  Smith normal form tracks the
unimodular transforms on both sides (and their inverses) so callers can move
between coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

Matrix = list  # list[list[int]] or list[list[Fraction]]


def zeros(m: int, n: int) -> Matrix:
    return [[0] * n for _ in range(m)]


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_copy(a: Matrix) -> Matrix:
    return [row[:] for row in a]


def dims(a: Matrix) -> tuple[int, int]:
    return len(a), len(a[0]) if a else 0


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a: Matrix, s) -> Matrix:
    return [[s * x for x in row] for row in a]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    m, k = dims(a)
    k2, n = dims(b)
    assert k == k2, "shape mismatch"
    bt = list(zip(*b)) if b else []
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def mat_vec(a: Matrix, v: list) -> list:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def transpose(a: Matrix) -> Matrix:
    return [list(r) for r in zip(*a)] if a else []


def mat_pow(a: Matrix, k: int) -> Matrix:
    n = len(a)
    out = identity(n)
    base = mat_copy(a)
    while k:
        if k & 1:
            out = mat_mul(out, base)
        base = mat_mul(base, base)
        k >>= 1
    return out


def trace(a: Matrix):
    return sum(a[i][i] for i in range(len(a)))


def kron(a: Matrix, b: Matrix) -> Matrix:
    ma, na = dims(a)
    mb, nb = dims(b)
    out = zeros(ma * mb, na * nb)
    for i in range(ma):
        for j in range(na):
            for k in range(mb):
                for l in range(nb):
                    out[i * mb + k][j * nb + l] = a[i][j] * b[k][l]
    return out


def block_diag(*blocks: Matrix) -> Matrix:
    m = sum(len(b) for b in blocks)
    n = sum(dims(b)[1] for b in blocks)
    out = zeros(m, n)
    r = c = 0
    for b in blocks:
        bm, bn = dims(b)
        for i in range(bm):
            for j in range(bn):
                out[r + i][c + j] = b[i][j]
        r += bm
        c += bn
    return out


def hstack(a: Matrix, b: Matrix) -> Matrix:
    if not a:
        return mat_copy(b)
    if not b:
        return mat_copy(a)
    assert len(a) == len(b)
    return [ra + rb for ra, rb in zip(a, b)]


def vstack(a: Matrix, b: Matrix) -> Matrix:
    return mat_copy(a) + mat_copy(b)


# ---------------------------------------------------------------------------
# determinants, rank, solving


def bareiss_det(a: Matrix) -> int:
    """Exact determinant of an integer matrix by fraction-free elimination."""
    n = len(a)
    if n == 0:
        return 1
    m = [row[:] for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def rational_rank(a: Matrix) -> int:
    """Rank over Q by exact Gaussian elimination."""
    if not a or not a[0]:
        return 0
    m = [[Fraction(x) for x in row] for row in a]
    rows, cols = len(m), len(m[0])
    rank = 0
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        r += 1
        rank += 1
        if r == rows:
            break
    return rank


def solve_exact(a: Matrix, b: Matrix) -> Matrix:
    """Solve A X = B over Q for A with full column rank; raises if inconsistent."""
    m, n = dims(a)
    mb, k = dims(b)
    assert m == mb
    aug = [[Fraction(x) for x in ra] + [Fraction(y) for y in rb]
           for ra, rb in zip(a, b)]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if aug[i][c] != 0), None)
        if piv is None:
            raise ValueError("matrix does not have full column rank")
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [x * inv for x in aug[r]]
        for i in range(m):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    for i in range(r, m):
        if any(aug[i][n + j] != 0 for j in range(k)):
            raise ValueError("inconsistent system")
    return [[aug[i][n + j] for j in range(k)] for i in range(n)]


def mat_int(a: Matrix) -> Matrix:
    """Cast a rational matrix with integer entries back to int."""
    out = []
    for row in a:
        r = []
        for x in row:
            f = Fraction(x)
            if f.denominator != 1:
                raise ValueError("non-integer entry %s" % (x,))
            r.append(int(f))
        out.append(r)
    return out


def int_inverse(u: Matrix) -> Matrix:
    """Inverse of a unimodular integer matrix, as an integer matrix."""
    return mat_int(solve_exact(u, identity(len(u))))


# ---------------------------------------------------------------------------
# characteristic and minimal polynomials


def charpoly(a: Matrix) -> list[int]:
    """det(t*I - A) by the Faddeev-LeVerrier recursion, ascending coefficients.

    All divisions are exact; the input must be square over Z.
    """
    n = len(a)
    c = [0] * (n + 1)
    c[n] = 1
    m = identity(n)
    for k in range(1, n + 1):
        am = mat_mul(a, m)
        t = trace(am)
        assert t % k == 0
        c[n - k] = -t // k
        m = mat_add(am, mat_scale(identity(n), c[n - k]))
    return c


def minimal_polynomial(a: Matrix) -> list[Fraction]:
    """Monic minimal polynomial over Q via the first Krylov dependency."""
    n = len(a)
    dim = n * n
    basis: list[tuple[list[Fraction], list[Fraction]]] = []  # (reduced vec, tail)
    power = identity(n)
    for k in range(n + 1):
        vec = [Fraction(power[i][j]) for i in range(n) for j in range(n)]
        tail = [Fraction(1 if i == k else 0) for i in range(n + 1)]
        for red, rtail in basis:
            piv = next(i for i, x in enumerate(red) if x != 0)
            if vec[piv] != 0:
                f = vec[piv] / red[piv]
                vec = [x - f * y for x, y in zip(vec, red)]
                tail = [x - f * y for x, y in zip(tail, rtail)]
        if all(x == 0 for x in vec):
            from .exact import poly_monic, poly_trim
            return poly_monic(poly_trim(tail))
        basis.append((vec, tail))
        power = mat_mul(power, a)
    raise AssertionError("Cayley-Hamilton violated")


def companion(p: list) -> Matrix:
    """Companion matrix of a monic polynomial (ascending integer coefficients)."""
    from .exact import poly_monic
    mp = poly_monic(p)
    n = len(mp) - 1
    c = zeros(n, n)
    for i in range(1, n):
        c[i][i - 1] = 1
    for i in range(n):
        f = Fraction(-mp[i])
        assert f.denominator == 1
        c[i][n - 1] = int(f)
    return c


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass
class SNF:
    """L @ A @ R = D with L, R unimodular, D diagonal with a divisibility chain."""

    d: Matrix
    left: Matrix
    left_inv: Matrix
    right: Matrix
    right_inv: Matrix

    @property
    def diagonal(self) -> list[int]:
        m, n = dims(self.d)
        return [self.d[i][i] for i in range(min(m, n))]

    @property
    def rank(self) -> int:
        return sum(1 for x in self.diagonal if x != 0)


def smith_normal_form(a: Matrix) -> SNF:
    """Diagonalize over Z, smallest-pivot selection with intermediate reduction."""
    m, n = dims(a)
    d = mat_copy(a)
    left, left_inv = identity(m), identity(m)
    right, right_inv = identity(n), identity(n)

    def row_op(i, j, q):  # row_i -= q * row_j
        d[i] = [x - q * y for x, y in zip(d[i], d[j])]
        left[i] = [x - q * y for x, y in zip(left[i], left[j])]
        for r in range(m):  # left_inv: col_j += q * col_i
            left_inv[r][j] += q * left_inv[r][i]

    def col_op(i, j, q):  # col_i -= q * col_j
        for r in range(m):
            d[r][i] -= q * d[r][j]
        for r in range(n):
            right[r][i] -= q * right[r][j]
        right_inv[j] = [x + q * y for x, y in zip(right_inv[j], right_inv[i])]

    def row_swap(i, j):
        d[i], d[j] = d[j], d[i]
        left[i], left[j] = left[j], left[i]
        for r in range(m):
            left_inv[r][i], left_inv[r][j] = left_inv[r][j], left_inv[r][i]

    def col_swap(i, j):
        for r in range(m):
            d[r][i], d[r][j] = d[r][j], d[r][i]
        for r in range(n):
            right[r][i], right[r][j] = right[r][j], right[r][i]
        right_inv[i], right_inv[j] = right_inv[j], right_inv[i]

    t = 0
    while t < min(m, n):
        # locate the smallest nonzero entry of the trailing block
        piv = None
        for i in range(t, m):
            for j in range(t, n):
                if d[i][j] != 0 and (piv is None or abs(d[i][j]) < abs(d[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        row_swap(t, piv[0])
        col_swap(t, piv[1])
        while True:
            moved = False
            for i in range(t + 1, m):
                if d[i][t] != 0:
                    q = d[i][t] // d[t][t]
                    if q:
                        row_op(i, t, q)
                    moved = moved or d[i][t] != 0
            for j in range(t + 1, n):
                if d[t][j] != 0:
                    q = d[t][j] // d[t][t]
                    if q:
                        col_op(j, t, q)
                    moved = moved or d[t][j] != 0
            if any(d[i][t] for i in range(t + 1, m)) or any(d[t][j] for j in range(t + 1, n)):
                # leftover remainders are smaller than the pivot: re-pivot
                piv = None
                for i in range(t, m):
                    for j in range(t, n):
                        if d[i][j] != 0 and (piv is None or abs(d[i][j]) < abs(d[piv[0]][piv[1]])):
                            piv = (i, j)
                row_swap(t, piv[0])
                col_swap(t, piv[1])
                continue
            # pivot clears its row and column; enforce divisibility of the rest
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if d[i][j] % d[t][t] != 0:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_op(t, bad, -1)  # fold the offending row in and retry
        t += 1
    for i in range(min(m, n)):
        if d[i][i] < 0:
            d[i] = [-x for x in d[i]]
            left[i] = [-x for x in left[i]]
            for r in range(m):
                left_inv[r][i] = -left_inv[r][i]
    return SNF(d, left, left_inv, right, right_inv)


def kernel_basis(a: Matrix) -> Matrix:
    """Columns form a basis of the saturated integer kernel lattice of A."""
    m, n = dims(a)
    if n == 0:
        return [[] for _ in range(0)]
    s = smith_normal_form(a)
    r = s.rank
    cols = [[s.right[i][j] for j in range(r, n)] for i in range(n)]
    return cols


def column_lattice_basis(a: Matrix) -> Matrix:
    """Basis (as columns) of the lattice generated by the columns of A."""
    m, n = dims(a)
    s = smith_normal_form(a)
    basis = []
    for i, di in enumerate(s.diagonal):
        if di != 0:
            basis.append([di * s.left_inv[r][i] for r in range(m)])
    return transpose(basis) if basis else [[] for _ in range(m)]


def lattice_solve(a: Matrix, b: Matrix) -> Matrix | None:
    """Integer solutions X of A X = B, or None if some column has none.

    Solvability of each column is decided in the Smith coordinates of A, so
    A may be rank-deficient or rectangular.
    """
    m, n = dims(a)
    mb, k = dims(b)
    assert m == mb, "shape mismatch"
    if n == 0:
        return None if any(x for row in b for x in row) else [[] for _ in range(0)]
    s = smith_normal_form(a)
    r = s.rank
    c = mat_mul(s.left, b)
    y = zeros(n, k)
    for j in range(k):
        for i in range(m):
            if i < r and i < n:
                if c[i][j] % s.d[i][i] != 0:
                    return None
                y[i][j] = c[i][j] // s.d[i][i]
            elif c[i][j] != 0:
                return None
    return mat_mul(s.right, y)


def gcd_of_minors(a: Matrix, k: int) -> int:
    """gcd of all k x k minors (0 if none are nonzero).  Brute-force oracle."""
    from itertools import combinations
    from math import gcd as _gcd
    m, n = dims(a)
    g = 0
    for rows in combinations(range(m), k):
        for cols in combinations(range(n), k):
            sub = [[a[i][j] for j in cols] for i in rows]
            g = _gcd(g, bareiss_det(sub))
    return abs(g)
