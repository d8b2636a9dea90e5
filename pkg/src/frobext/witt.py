"""Truncated Witt vectors of F_q and p-adic integer linear algebra.

W(F_q), q = p^a, is modeled as Z_p[x]/(h) with h monic of degree a and
irreducible mod p, all coefficients carried mod p^K.  Elements are length-a
coordinate vectors in the x-power basis.  The Frobenius lift sigma is the
unique ring automorphism with sigma(x) = x^p mod p; it is found by Hensel
iteration and represented by its coordinate matrix.

The mod-p^K model is exact within its precision: ring operations introduce
no further error, so a quantity whose valuation is certified below K is
known exactly.
"""

from __future__ import annotations

from itertools import product

from .exact import PrecisionError, int_valuation, is_prime


# ---------------------------------------------------------------------------
# polynomial helpers mod (h, p^m); coordinates are fixed-length int lists


def _pm_norm(u: list[int], a: int, ppow: int) -> list[int]:
    u = [c % ppow for c in u]
    return u + [0] * (a - len(u)) if len(u) < a else u[:a]


def _pm_add(u, v, ppow):
    return [(x + y) % ppow for x, y in zip(u, v)]


def _pm_mul(u, v, h, ppow):
    """Product of coordinate vectors mod (h, ppow); h monic, ascending."""
    a = len(h) - 1
    acc = [0] * (2 * a - 1 if a > 1 else 1)
    for i, x in enumerate(u):
        if x:
            for j, y in enumerate(v):
                acc[i + j] = (acc[i + j] + x * y) % ppow
    for k in range(len(acc) - 1, a - 1, -1):
        lead = acc[k]
        if lead:
            acc[k] = 0
            for i in range(a + 1):
                acc[k - a + i] = (acc[k - a + i] - lead * h[i]) % ppow
    return acc[:a]


def _pm_eval(poly: list[int], y: list[int], h, ppow) -> list[int]:
    """Evaluate an integer polynomial at the element y, Horner style."""
    a = len(h) - 1
    out = [0] * a
    for c in reversed(poly):
        out = _pm_mul(out, y, h, ppow)
        out[0] = (out[0] + c) % ppow
    return out


def _fp_poly_divmod(f, g, p):
    f = f[:]
    ginv = pow(g[-1], -1, p)
    quot = [0] * max(0, len(f) - len(g) + 1)
    for k in range(len(f) - len(g), -1, -1):
        c = (f[k + len(g) - 1] * ginv) % p
        quot[k] = c
        if c:
            for i in range(len(g)):
                f[k + i] = (f[k + i] - c * g[i]) % p
    while f and f[-1] % p == 0:
        f.pop()
    return quot, f


def _fp_inv(u: list[int], h: list[int], p: int) -> list[int]:
    """Inverse of u mod (h, p) by the extended Euclidean algorithm."""
    u = [c % p for c in u]
    while u and u[-1] == 0:
        u.pop()
    if not u:
        raise ZeroDivisionError("not a unit")
    r0, r1 = h[:], u
    s0, s1 = [], [1]
    while r1:
        q, r = _fp_poly_divmod(r0, r1, p)
        s = s0[:]
        s += [0] * (len(q) + len(s1) - 1 - len(s))
        for i, qi in enumerate(q):
            if qi:
                for j, sj in enumerate(s1):
                    s[i + j] = (s[i + j] - qi * sj) % p
        r0, r1, s0, s1 = r1, r, s1, s
    if len(r0) != 1:
        raise ZeroDivisionError("not a unit")
    c = pow(r0[0], -1, p)
    return [(c * x) % p for x in s0]


def _pm_inv(u, h, p, ppow):
    """Unit inverse mod (h, ppow): F_q inverse refined by Newton doubling."""
    a = len(h) - 1
    v = _pm_norm(_fp_inv(u, h, p), a, ppow)
    m = p
    while m < ppow:
        m = min(m * m, ppow)
        uv = _pm_mul(u, v, h, m)
        two_minus = [(-c) % m for c in uv]
        two_minus[0] = (two_minus[0] + 2) % m
        v = _pm_mul(v, two_minus, h, m)
    return _pm_norm(v, a, ppow)


def _is_irreducible(h: list[int], p: int) -> bool:
    """h monic: irreducible over F_p iff x^{p^a} = x and gcd tests pass."""
    a = len(h) - 1
    if a < 1:
        return False

    def frob_power(times):
        y = [0, 1] if a > 1 else [0]
        y = _pm_norm(y, a, p)
        for _ in range(times):
            y = _pm_pow(y, p, h, p)
        return y

    x = _pm_norm([0, 1] if a > 1 else [0], a, p)
    if frob_power(a) != x:
        return False
    for ell in {d for d in range(2, a + 1) if a % d == 0 and is_prime(d)}:
        y = frob_power(a // ell)
        diff = [(yc - xc) % p for yc, xc in zip(y, x)]
        while diff and diff[-1] == 0:
            diff.pop()
        if not diff:
            return False
        g = _fp_gcd(h, diff, p)
        if len(g) != 1:
            return False
    return True


def _fp_gcd(f, g, p):
    f = [c % p for c in f]
    g = [c % p for c in g]
    while g and g[-1] == 0:
        g.pop()
    while g:
        _, r = _fp_poly_divmod(f, g, p)
        f, g = g, r
    c = pow(f[-1], -1, p)
    return [(c * x) % p for x in f]


def _pm_pow(u, e, h, ppow):
    out = _pm_norm([1], len(h) - 1, ppow)
    base = u[:]
    while e:
        if e & 1:
            out = _pm_mul(out, base, h, ppow)
        base = _pm_mul(base, base, h, ppow)
        e >>= 1
    return out


def first_irreducible(p: int, a: int) -> list[int]:
    """Lexicographically first monic degree-a polynomial irreducible mod p."""
    if a == 1:
        return [0, 1]
    for low in product(range(p), repeat=a):
        h = list(low) + [1]
        if _is_irreducible(h, p):
            return h
    raise RuntimeError("unreachable: irreducibles exist in every degree")


# ---------------------------------------------------------------------------
# the ring and its elements


class WittElem:
    """Element of a WittRing: coordinates in the x-power basis, mod p^K."""

    __slots__ = ("ring", "c")

    def __init__(self, ring: "WittRing", coords):
        self.ring = ring
        self.c = tuple(x % ring.pK for x in coords)

    def _coerce(self, other) -> "WittElem":
        if isinstance(other, WittElem):
            if other.ring is not self.ring:
                raise ValueError("elements of different rings")
            return other
        return self.ring.from_int(other)

    def __add__(self, other):
        o = self._coerce(other)
        return WittElem(self.ring, [x + y for x, y in zip(self.c, o.c)])

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return WittElem(self.ring, [x - y for x, y in zip(self.c, o.c)])

    def __rsub__(self, other):
        return self._coerce(other).__sub__(self)

    def __neg__(self):
        return WittElem(self.ring, [-x for x in self.c])

    def __mul__(self, other):
        o = self._coerce(other)
        r = self.ring
        return WittElem(r, _pm_mul(list(self.c), list(o.c), r.modulus, r.pK))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        r = self.ring
        return WittElem(r, _pm_pow(list(self.c), e, r.modulus, r.pK))

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except (ValueError, TypeError):
            return NotImplemented
        return self.c == o.c

    def __hash__(self):
        return hash(self.c)

    def __bool__(self):
        return any(self.c)

    def __repr__(self):
        terms = []
        for i, x in enumerate(self.c):
            if x:
                half = self.ring.pK // 2
                v = x - self.ring.pK if x > half else x
                terms.append("%d*x^%d" % (v, i) if i else str(v))
        return " + ".join(terms) if terms else "0"

    def valuation(self) -> int | None:
        """min p-valuation of the coordinates; None means 0 mod p^K."""
        vals = [int_valuation(x, self.ring.p) for x in self.c if x]
        return min(vals) if vals else None

    def constant_lift(self) -> int:
        """Balanced integer lift, requiring all non-constant coordinates to
        vanish mod p^K (i.e. the element lies in Z_p)."""
        if any(self.c[1:]):
            raise ValueError("element is not in Z_p: %r" % (self,))
        x = self.c[0]
        return x - self.ring.pK if x > self.ring.pK // 2 else x


class WittRing:
    """W(F_q) truncated mod p^K, with the Frobenius lift sigma."""

    def __init__(self, p: int, a: int, precision: int = 20,
                 modulus: list[int] | None = None):
        if not is_prime(p):
            raise ValueError("p must be prime")
        if a < 1 or precision < 3:
            raise ValueError("need a >= 1 and precision >= 3")
        self.p, self.a, self.K = p, a, precision
        self.q = p**a
        self.pK = p**precision
        self.modulus = list(modulus) if modulus else first_irreducible(p, a)
        if len(self.modulus) != a + 1 or self.modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree a")
        if not _is_irreducible([c % p for c in self.modulus], p):
            raise ValueError("modulus must be irreducible mod p")
        self.sigma_image = self._hensel_sigma()
        self.sigma_matrix = self._sigma_matrix()
        self._check_sigma()

    # -- construction internals

    def _hensel_sigma(self) -> list[int]:
        h, p, a = self.modulus, self.p, self.a
        if a == 1:
            return [0]
        y = _pm_pow(_pm_norm([0, 1], a, p), p, h, p)
        dh = [i * c for i, c in enumerate(h)][1:]
        m = 1
        while m < self.K:
            m = min(2 * m, self.K)
            ppow = p**m
            err = _pm_eval(h, y, h, ppow)
            inv = _pm_inv(_pm_eval(dh, y, h, ppow), h, p, ppow)
            step = _pm_mul(err, inv, h, ppow)
            y = [(u - s) % ppow for u, s in zip(y, step)]
        return y

    def _sigma_matrix(self):
        cols = []
        power = _pm_norm([1], self.a, self.pK)
        for _ in range(self.a):
            cols.append(power)
            power = _pm_mul(power, self.sigma_image, self.modulus, self.pK)
        return [[cols[j][i] for j in range(self.a)] for i in range(self.a)]

    def _check_sigma(self):
        h, p = self.modulus, self.p
        assert _pm_eval(h, self.sigma_image, h, self.pK) == [0] * self.a, \
            "sigma image must be a root of the modulus"
        xp = _pm_pow(_pm_norm([0, 1] if self.a > 1 else [0], self.a, p), p, h, p)
        assert [c % p for c in self.sigma_image] == xp, \
            "sigma must reduce to the p-power map"
        y = self.x()
        for _ in range(self.a):
            y = self.sigma(y)
        assert y == self.x(), "sigma^a must be the identity"

    # -- elements

    def elem(self, coords) -> WittElem:
        return WittElem(self, list(coords) + [0] * (self.a - len(coords)))

    def from_int(self, n: int) -> WittElem:
        return self.elem([n])

    def zero(self) -> WittElem:
        return self.from_int(0)

    def one(self) -> WittElem:
        return self.from_int(1)

    def x(self) -> WittElem:
        return self.elem([0, 1]) if self.a > 1 else self.zero()

    def coerce(self, v) -> WittElem:
        if isinstance(v, WittElem):
            if v.ring is not self:
                raise ValueError("element of a different ring")
            return v
        if isinstance(v, int):
            return self.from_int(v)
        return self.elem(v)

    # -- operations

    def sigma(self, w: WittElem) -> WittElem:
        out = [0] * self.a
        for j, c in enumerate(w.c):
            if c:
                for i in range(self.a):
                    out[i] += self.sigma_matrix[i][j] * c
        return WittElem(self, out)

    def sigma_iter(self, w: WittElem, k: int) -> WittElem:
        for _ in range(k % self.a if self.a > 1 else 1):
            w = self.sigma(w)
        return w

    def unit_inverse(self, w: WittElem) -> WittElem:
        return WittElem(self, _pm_inv(list(w.c), self.modulus, self.p, self.pK))

    def mul_matrix(self, w: WittElem):
        """Integer matrix of multiplication by w in the x-power basis."""
        cols = []
        for j in range(self.a):
            basis = [0] * self.a
            basis[j] = 1
            cols.append(_pm_mul(list(w.c), basis, self.modulus, self.pK))
        return [[cols[j][i] for j in range(self.a)] for i in range(self.a)]

    def at_precision(self, precision: int) -> "WittRing":
        """The same ring carried to another working precision."""
        return WittRing(self.p, self.a, precision, self.modulus)

    def __repr__(self):
        return "WittRing(p=%d, a=%d, K=%d)" % (self.p, self.a, self.K)


# ---------------------------------------------------------------------------
# p-adic Smith normal form


def padic_smith(mat: list[list[int]], p: int, K: int) -> list[int | None]:
    """Elementary divisor p-valuations of an integer matrix read mod p^K.

    Returns min(m, n) entries sorted ascending, None meaning the divisor is
    0 mod p^K (valuation at least K, possibly infinite).  Valuations below K
    are exact: they are determined by the matrix mod p^K.
    """
    work = [[x % p**K for x in row] for row in mat]
    ppow = p**K
    m = len(work)
    n = len(work[0]) if work else 0
    vals: list[int | None] = []
    top = 0
    while top < min(m, n):
        best, bi, bj = None, None, None
        for i in range(top, m):
            for j in range(top, n):
                x = work[i][j]
                if x:
                    v = int_valuation(x, p)
                    if best is None or v < best:
                        best, bi, bj = v, i, j
                        if v == 0:
                            break
            if best == 0:
                break
        if best is None:
            vals.extend([None] * (min(m, n) - top))
            break
        work[top], work[bi] = work[bi], work[top]
        for row in work:
            row[top], row[bj] = row[bj], row[top]
        pivot = work[top][top]
        unit_inv = pow(pivot // p**best, -1, ppow)
        for i in range(top + 1, m):
            x = work[i][top]
            if x:
                f = (x // p**best) * unit_inv % ppow
                for j in range(top, n):
                    work[i][j] = (work[i][j] - f * work[top][j]) % ppow
        for j in range(top + 1, n):
            x = work[top][j]
            if x:
                f = (x // p**best) * unit_inv % ppow
                for i in range(top, m):
                    work[i][j] = (work[i][j] - f * work[i][top]) % ppow
        vals.append(best)
        top += 1
    finite = sorted(v for v in vals if v is not None)
    return finite + [None] * (len(vals) - len(finite))


def padic_det_valuation(mat: list[list[int]], p: int, K: int) -> int:
    """Exact p-valuation of det for a square matrix known mod p^K.

    Raises PrecisionError when the determinant vanishes mod p^K, since then
    its valuation is not determined by the data.
    """
    vals = padic_smith(mat, p, K)
    if any(v is None for v in vals):
        raise PrecisionError("determinant valuation not determined mod p^%d" % K,
                             required=2 * K)
    return sum(vals)
