"""Finite fields GF(p^k) with elements stored as plain ints.

An element ``a`` of GF(p^k) is the integer whose base-p digits (least
significant first) are the coefficients of its polynomial representative
modulo the reduction polynomial.  Multiplication goes through exp/log tables
built from the designated primitive element, so the constructor is the only
expensive call.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import FieldTooLarge, NoPrimitiveFound, NotPrime, ReduciblePolynomial

MAX_FIELD_SIZE = 2**20


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime divisors of ``n`` in increasing order."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization of ``n`` as ``[(p, e), ...]`` with p increasing."""
    out = []
    for p in prime_factors(n):
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out.append((p, e))
    return out


# -- polynomial helpers over GF(p); polys are little-endian coefficient lists

def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a, m, p):
    a = list(a)
    inv_lead = pow(m[-1], p - 2, p)
    dm = len(m) - 1
    while len(_trim(a)) - 1 >= dm:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, mc in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mc) % p
    return a


def _poly_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return out


def _monic_polys(p, degree):
    """All monic polynomials of the given degree over GF(p)."""
    for n in range(p**degree):
        coeffs = []
        for _ in range(degree):
            coeffs.append(n % p)
            n //= p
        yield coeffs + [1]


def is_irreducible(poly, p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    poly = _trim(list(poly))
    k = len(poly) - 1
    if k < 1:
        return False
    if k == 1:
        return True
    for d in range(1, k // 2 + 1):
        for cand in _monic_polys(p, d):
            if not _trim(_poly_mod(poly, cand, p)):
                return False
    return True


@dataclass(frozen=True)
class FiniteField:
    p: int
    k: int
    reduction: tuple
    omega: int
    q: int = field(init=False)
    _exp: tuple = field(init=False, repr=False, compare=False)
    _log: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "q", self.p**self.k)
        exp = []
        x = 1
        for _ in range(self.q - 1):
            exp.append(x)
            x = self._slow_mul(x, self.omega)
        if x != 1 or len(set(exp)) != self.q - 1:
            raise NoPrimitiveFound(f"{self.omega} is not primitive in GF({self.q})")
        object.__setattr__(self, "_exp", tuple(exp))
        object.__setattr__(self, "_log", {v: i for i, v in enumerate(exp)})

    # conversions

    def coeffs(self, a: int) -> list[int]:
        out = []
        for _ in range(self.k):
            out.append(a % self.p)
            a //= self.p
        return out

    def from_coeffs(self, coeffs) -> int:
        a = 0
        for c in reversed(list(coeffs)):
            a = a * self.p + (c % self.p)
        return a

    def scalar(self, n: int) -> int:
        """Image of the integer ``n`` in the prime subfield."""
        return n % self.p

    def _slow_mul(self, a: int, b: int) -> int:
        prod = _poly_mul(self.coeffs(a), self.coeffs(b), self.p)
        rem = _poly_mod(prod, list(self.reduction), self.p)
        return self.from_coeffs((rem + [0] * self.k)[: self.k])

    # arithmetic

    def add(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        p = self.p
        out, place = 0, 1
        while a or b:
            out += ((a % p + b % p) % p) * place
            a //= p
            b //= p
            place *= p
        return out

    def neg(self, a: int) -> int:
        if self.k == 1:
            return -a % self.p
        return self.from_coeffs([-c for c in self.coeffs(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return self._exp[-self._log[a] % (self.q - 1)]

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            return 0 if e > 0 else 1
        return self._exp[(self._log[a] * e) % (self.q - 1)]

    def omega_pow(self, e: int) -> int:
        return self._exp[e % (self.q - 1)]

    def log(self, a: int) -> int:
        return self._log[a]

    def multiplicative_order(self, a: int) -> int:
        from math import gcd

        return (self.q - 1) // gcd(self._log[a], self.q - 1)

    def elements(self):
        return range(self.q)


def ff_make(p: int, k: int, reduction=None, max_size: int = MAX_FIELD_SIZE) -> FiniteField:
    """Build GF(p^k) from a reduction polynomial given little-endian.

    ``reduction`` must be monic of degree ``k``; for ``k == 1`` it may be
    omitted (``x`` is used).  The primitive element is the smallest integer
    code of multiplicative order ``p^k - 1``.
    """
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if k < 1:
        raise ValueError("extension degree must be >= 1")
    if p**k > max_size:
        raise FieldTooLarge(f"GF({p}^{k}) exceeds the cap of {max_size} elements")
    if reduction is None:
        if k != 1:
            raise ReduciblePolynomial("a reduction polynomial is required for k > 1")
        reduction = [0, 1]
    reduction = [c % p for c in reduction]
    if len(_trim(list(reduction))) != k + 1:
        raise ReduciblePolynomial(f"reduction polynomial must have degree {k}")
    if reduction[-1] != 1:
        raise ReduciblePolynomial("reduction polynomial must be monic")
    if not is_irreducible(reduction, p):
        raise ReduciblePolynomial(f"{reduction} is reducible over GF({p})")
    q = p**k
    if q == 2:
        return FiniteField(p, k, tuple(reduction), 1)
    probe = _Probe(p, k, tuple(reduction))
    needed = [(q - 1) // r for r in prime_factors(q - 1)]
    for cand in range(2, q):
        if all(probe.pow(cand, e) != 1 for e in needed):
            return FiniteField(p, k, tuple(reduction), cand)
    raise NoPrimitiveFound(f"no primitive element found in GF({q})")


class _Probe:
    """Table-free arithmetic used only while searching for omega."""

    def __init__(self, p, k, reduction):
        self.p, self.k, self.reduction = p, k, list(reduction)

    def _coeffs(self, a):
        out = []
        for _ in range(self.k):
            out.append(a % self.p)
            a //= self.p
        return out

    def _mul(self, a, b):
        prod = _poly_mul(a, b, self.p)
        return (_poly_mod(prod, self.reduction, self.p) + [0] * self.k)[: self.k]

    def pow(self, a, e):
        base = self._coeffs(a)
        acc = [1] + [0] * (self.k - 1)
        while e:
            if e & 1:
                acc = self._mul(acc, base)
            base = self._mul(base, base)
            e >>= 1
        return sum(c * self.p**i for i, c in enumerate(acc))
