"""Exact scalar and polynomial arithmetic.

Everything in this package runs on Python integers and fractions.Fraction;
no floating point is used anywhere.  Polynomials are lists of coefficients
in ascending degree order (index = degree), trimmed of trailing zeros.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


class PrecisionError(ArithmeticError):
    """The working precision cannot certify the requested quantity.

    `required` carries a precision exponent known to suffice, when one is
    known.
    """

    def __init__(self, message: str, required: int | None = None):
        super().__init__(message)
        self.required = required


# ---------------------------------------------------------------------------
# valuations and absolute values


def int_valuation(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of zero is undefined")
    v = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        v += 1
    return v


def valuation(x, p: int) -> int:
    """p-adic valuation of a nonzero int or Fraction."""
    x = Fraction(x)
    return int_valuation(x.numerator, p) - int_valuation(x.denominator, p)


def abs_at(p: int, x) -> Fraction:
    """p-adic absolute value |x|_p (normalized so |p|_p = 1/p); |0|_p = 0."""
    x = Fraction(x)
    if x == 0:
        return Fraction(0)
    return Fraction(1, p) ** valuation(x, p)


def l_primary(x, p: int) -> Fraction:
    """The p-primary part p^{v_p(x)} of a nonzero rational.

    >>> l_primary(Fraction(12, 5), 2)
    Fraction(4, 1)
    """
    return Fraction(p) ** valuation(x, p)


def unit_part(n: int, p: int) -> int:
    """n / p^{v_p(n)} for a nonzero integer n."""
    n0 = n
    while n0 % p == 0:
        n0 //= p
    return n0


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Sorted distinct prime factors of |n|, n nonzero."""
    n = abs(n)
    if n == 0:
        raise ValueError("prime_factors(0)")
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


def prime_power(q: int) -> tuple[int, int]:
    """(p, a) with q = p^a, a >= 1.

    >>> prime_power(27)
    (3, 3)
    """
    if q < 2:
        raise ValueError("not a prime power: %r" % (q,))
    fs = prime_factors(q)
    if len(fs) != 1:
        raise ValueError("not a prime power: %r" % (q,))
    p = fs[0]
    a = int_valuation(q, p)
    return p, a


def is_square_in_zp(x, p: int) -> bool:
    """Whether a nonzero rational is a square in the p-adic field."""
    x = Fraction(x)
    v = valuation(x, p)
    if v % 2 != 0:
        return False
    u = x / Fraction(p) ** v
    # reduce the unit mod p (odd p) or mod 8 (p = 2)
    if p == 2:
        num, den = u.numerator, u.denominator
        inv_den = pow(den, -1, 8)
        return (num * inv_den) % 8 == 1
    num, den = u.numerator % p, u.denominator % p
    r = num * pow(den, p - 2, p) % p
    return pow(r, (p - 1) // 2, p) == 1


# ---------------------------------------------------------------------------
# polynomials (ascending coefficients)


def poly_trim(c: list) -> list:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def poly_deg(c: list) -> int:
    """Degree, with deg 0 = -1 by convention."""
    return len(poly_trim(c)) - 1


def poly_add(a: list, b: list) -> list:
    n = max(len(a), len(b))
    return poly_trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
                      for i in range(n)])


def poly_sub(a: list, b: list) -> list:
    return poly_add(a, [-x for x in b])


def poly_scale(a: list, s) -> list:
    return poly_trim([s * x for x in a])


def poly_mul(a: list, b: list) -> list:
    a, b = poly_trim(a), poly_trim(b)
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return poly_trim(out)


def poly_eval(a: list, x):
    """Horner evaluation, exact."""
    acc = 0
    for c in reversed(poly_trim(a)):
        acc = acc * x + c
    return acc


def poly_deriv(a: list) -> list:
    return poly_trim([i * a[i] for i in range(1, len(a))])


def poly_divmod(a: list, b: list) -> tuple[list, list]:
    """Exact division with remainder over Q."""
    a, b = [Fraction(x) for x in poly_trim(a)], [Fraction(x) for x in poly_trim(b)]
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(0, len(a) - len(b) + 1)
    r = a[:]
    while len(r) >= len(b) and r:
        c = r[-1] / b[-1]
        d = len(r) - len(b)
        q[d] = c
        for i in range(len(b)):
            r[d + i] -= c * b[i]
        r = poly_trim(r)
    return poly_trim(q), r


def poly_monic(a: list) -> list:
    a = poly_trim(a)
    if not a:
        raise ValueError("cannot normalize the zero polynomial")
    lc = Fraction(a[-1])
    return [Fraction(x) / lc for x in a]


def poly_gcd(a: list, b: list) -> list:
    """Monic gcd over Q (constant 1 for coprime inputs)."""
    a, b = poly_trim(a), poly_trim(b)
    while b:
        a, b = b, poly_divmod(a, b)[1]
    if not a:
        return []
    return poly_monic(a)


def poly_int(a: list) -> list:
    """Cast exact-integer-valued coefficients back to int."""
    out = []
    for c in poly_trim(a):
        f = Fraction(c)
        if f.denominator != 1:
            raise ValueError("non-integer coefficient %s" % (c,))
        out.append(int(f))
    return out


def reversed_root_poly(p: list) -> list:
    """Monic polynomial whose roots are the inverses of p's roots.

    Requires p(0) != 0.  If p = prod (t - a_i) up to a scalar, the result is
    prod (t - 1/a_i), obtained by reversing the coefficients and normalizing.
    """
    p = poly_trim(p)
    if not p or p[0] == 0:
        raise ValueError("reversal needs a nonzero constant term")
    return poly_monic(list(reversed(p)))


def resultant(f: list, g: list):
    """Res(f, g) = lc(f)^deg g * prod g(alpha_i) over roots of f, exact over Q.

    Computed by the Euclidean recursion; never extracts roots.
    """
    f = [Fraction(x) for x in poly_trim(f)]
    g = [Fraction(x) for x in poly_trim(g)]
    if not f or not g:
        return Fraction(0)
    if len(f) == 1:
        return f[0] ** (len(g) - 1)
    if len(g) == 1:
        return g[0] ** (len(f) - 1)
    df, dg = len(f) - 1, len(g) - 1
    _, r = poly_divmod(f, g)
    if not r:
        return Fraction(0)
    dr = len(r) - 1
    sign = Fraction(-1) ** (df * dg)
    return sign * g[-1] ** (df - dr) * resultant(g, r)


def composed_product(u: list, v: list) -> list:
    """Monic polynomial with root multiset {u_i * v_j}.

    Implemented as the resultant Res_t(u(t), t^{deg v} v(x/t)) through
    evaluation at deg u * deg v + 1 integer points followed by exact Lagrange
    interpolation.  Both inputs must be monic.
    """
    u = poly_monic(u)
    v = poly_monic(v)
    du, dv = len(u) - 1, len(v) - 1
    n = du * dv
    if n == 0:
        return [Fraction(1)]
    xs = list(range(n + 1))
    ys = []
    for x0 in xs:
        # w(t) = t^dv * v(x0/t) = sum_m v_m x0^m t^(dv-m)
        w = [Fraction(0)] * (dv + 1)
        for m, vm in enumerate(v):
            w[dv - m] = Fraction(vm) * x0 ** m
        ys.append(resultant(u, poly_trim(w)))
    return _lagrange(xs, ys)


def _lagrange(xs: list[int], ys: list) -> list:
    out = []
    for xi, yi in zip(xs, ys):
        term = [Fraction(yi)]
        for xj in xs:
            if xj == xi:
                continue
            term = poly_mul(term, [Fraction(-xj, xi - xj), Fraction(1, xi - xj)])
        out = poly_add(out, term)
    # pad: poly_add trims, but the result is monic of degree len(xs)-1
    while len(out) < len(xs):
        out.append(Fraction(0))
    return out


def ratio_charpoly(p: list, q: list) -> list:
    """Monic polynomial with root multiset {b_j / a_i}, a_i roots of p, b_j of q.

    p(0) must be nonzero.  No roots are ever materialized: the inverse roots of
    p come from coefficient reversal and the products from a resultant.
    """
    p = poly_monic(p)
    q = poly_monic(q)
    if poly_deg(p) == 0 or poly_deg(q) == 0:
        return [Fraction(1)]
    return composed_product(reversed_root_poly(p), q)


def reversed_form(monic: list) -> list:
    """prod (1 - c_k t) from the monic prod (t - c_k): plain reversal."""
    m = poly_monic(monic)
    return list(reversed(m))


def limit_leading(rev: list) -> tuple[int, Fraction]:
    """Order and leading value of prod (1 - c_k t) at t = 1.

    Returns (rho, L) with rho the multiplicity of the root t=1 and
    L = lim_{t->1} rev(t) / (1-t)^rho = prod_{c_k != 1} (1 - c_k), exact.
    """
    cur = [Fraction(c) for c in poly_trim(rev)]
    if not cur:
        raise ValueError("zero polynomial has no leading value")
    rho = 0
    while poly_eval(cur, 1) == 0:
        cur, rem = poly_divmod(cur, [Fraction(1), Fraction(-1)])  # divide by (1 - t)
        assert not rem
        rho += 1
    return rho, Fraction(poly_eval(cur, 1))


def root_multiplicity(p: list, c) -> int:
    """Exact multiplicity of the rational root c in p."""
    cur = [Fraction(x) for x in poly_trim(p)]
    m = 0
    while cur and poly_eval(cur, c) == 0:
        cur, rem = poly_divmod(cur, [-Fraction(c), Fraction(1)])
        assert not rem
        m += 1
    return m


def power_sums(monic: list, n: int) -> list:
    """Power sums p_1..p_n of the roots of a monic polynomial (Newton's identities)."""
    m = poly_monic(monic)
    d = len(m) - 1
    # e_k with signs: m = x^d - e1 x^{d-1} + e2 x^{d-2} - ...
    e = [Fraction(1)] + [(-1) ** k * Fraction(m[d - k]) for k in range(1, d + 1)]
    ps: list[Fraction] = []
    for k in range(1, n + 1):
        acc = Fraction(0)
        for i in range(1, k):
            if i <= d:
                acc += (-1) ** (i - 1) * e[i] * ps[k - i - 1]
        if k <= d:
            acc += (-1) ** (k - 1) * Fraction(k) * e[k]
        ps.append(acc)
    return ps


def lcm(a: int, b: int) -> int:
    return abs(a * b) // gcd(a, b) if a and b else 0
