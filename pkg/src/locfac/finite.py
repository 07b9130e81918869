"""Polynomials over F_p and the residue fields F_q = F_p[t]/(P)."""

from __future__ import annotations

from functools import lru_cache
from itertools import product

from sympy import factorint

Poly = tuple[int, ...]  # low degree first


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mulmod(a: Poly, b: Poly, m: Poly, p: int) -> Poly:
    """a*b mod (m, p) for monic m."""
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return poly_mod(tuple(out), m, p)


def poly_mod(a: Poly, m: Poly, p: int) -> Poly:
    a = [x % p for x in a]
    d = len(m) - 1
    for i in range(len(a) - 1, d - 1, -1):
        c = a[i]
        if c:
            for j in range(d + 1):
                a[i - d + j] = (a[i - d + j] - c * m[j]) % p
    return tuple(_trim(a[:d] if len(a) > d else a))


def poly_divmod(a: Poly, b: Poly, p: int) -> tuple[Poly, Poly]:
    a = [x % p for x in a]
    b = list(_trim([x % p for x in b]))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv = pow(b[-1], -1, p)
    db = len(b) - 1
    q = [0] * max(len(a) - db, 1)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i] * inv % p
        if c:
            q[i - db] = c
            for j in range(db + 1):
                a[i - db + j] = (a[i - db + j] - c * b[j]) % p
    return tuple(_trim(q)), tuple(_trim(a[:db]))


def poly_gcd(a: Poly, b: Poly, p: int) -> Poly:
    a = tuple(_trim([x % p for x in a]))
    b = tuple(_trim([x % p for x in b]))
    while b:
        a, b = b, poly_divmod(a, b, p)[1]
    if a:
        inv = pow(a[-1], -1, p)
        a = tuple(x * inv % p for x in a)
    return a


def poly_powmod(a: Poly, e: int, m: Poly, p: int) -> Poly:
    result: Poly = (1,)
    base = poly_mod(a, m, p)
    while e:
        if e & 1:
            result = poly_mulmod(result, base, m, p)
        e >>= 1
        if e:
            base = poly_mulmod(base, base, m, p)
    return result


def is_irreducible(m: Poly, p: int) -> bool:
    """Rabin's test for a monic polynomial over F_p."""
    n = len(m) - 1
    if n <= 0:
        return False
    if n == 1:
        return True
    x: Poly = (0, 1)
    xp = x
    for i in range(1, n // 2 + 1):
        xp = poly_powmod(xp, p, m, p)
        diff = list(xp) + [0] * (2 - len(xp))
        diff[1] = (diff[1] - 1) % p
        if len(poly_gcd(m, tuple(_trim(diff)), p)) > 1:
            return False
    return True


@lru_cache(maxsize=None)
def conway_like_polynomial(p: int, f: int) -> Poly:
    """Smallest monic irreducible of degree f, ordering by sum c_i p^i."""
    if f == 1:
        return (0, 1)
    for low in product(range(p), repeat=f):
        cand = tuple(reversed(low)) + (1,)
        # reversed(low) puts the product's last (fastest) digit at degree 0
        if cand[0] and is_irreducible(cand, p):
            return cand
    raise ValueError(f"no irreducible polynomial of degree {f} mod {p}")


class ResidueField:
    """F_q with q = p^f, elements are coefficient tuples of length f."""

    def __init__(self, p: int, f: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.f = f
        self.q = p**f
        self.modulus = conway_like_polynomial(p, f)
        self._generator = None
        self._log = None

    def elem(self, coeffs) -> tuple[int, ...]:
        c = [x % self.p for x in coeffs] + [0] * self.f
        return tuple(c[: self.f])

    @property
    def zero(self):
        return (0,) * self.f

    @property
    def one(self):
        return self.elem([1])

    def elements(self):
        for c in product(range(self.p), repeat=self.f):
            yield tuple(reversed(c))

    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def neg(self, a):
        return tuple(-x % self.p for x in a)

    def mul(self, a, b):
        return self.elem(poly_mulmod(a, b, self.modulus, self.p))

    def pow(self, a, e: int):
        if e < 0:
            a, e = self.inv(a), -e
        return self.elem(poly_powmod(a, e, self.modulus, self.p))

    def inv(self, a):
        if not any(a):
            raise ZeroDivisionError("inverse of zero in residue field")
        return self.pow(a, self.q - 2)

    def trace(self, a) -> int:
        """Absolute trace to F_p."""
        s = self.zero
        x = a
        for _ in range(self.f):
            s = self.add(s, x)
            x = self.pow(x, self.p)
        return s[0]

    def order(self, a) -> int:
        n = self.q - 1
        for prime in factorint(n):
            while n % prime == 0 and self.pow(a, n // prime) == self.one:
                n //= prime
        return n

    @property
    def generator(self):
        """Smallest (in enumeration order) primitive element."""
        if self._generator is None:
            for a in self.elements():
                if any(a) and self.order(a) == self.q - 1:
                    self._generator = a
                    break
        return self._generator

    def log_table(self) -> dict:
        if self._log is None:
            g = self.generator
            table = {}
            x = self.one
            for k in range(self.q - 1):
                table[x] = k
                x = self.mul(x, g)
            self._log = table
        return self._log

    def dlog(self, a) -> int:
        return self.log_table()[self.elem(a)]

    def quadratic_character(self, a) -> int:
        if not any(a):
            return 0
        return 1 if self.dlog(a) % 2 == 0 else -1

    def __repr__(self):
        return f"ResidueField(p={self.p}, f={self.f})"
