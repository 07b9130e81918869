"""Exact arithmetic in cyclotomic fields.

A :class:`CycloNumber` is a rational combination of powers of a primitive
``N``-th root of unity.  Numbers with different moduli are combined by lifting
both to the least common multiple, so callers never have to fix an ambient
field up front.  Equality is decided exactly by reducing modulo the ``N``-th
cyclotomic polynomial; :meth:`CycloNumber.embed` is for diagnostics only.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

Rational = int | Fraction


class CycloError(ValueError):
    """Raised for modulus mismatches and unsupported operations."""


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def _mobius(n: int) -> int:
    result, m, d = 1, n, 2
    while d * d <= m:
        if m % d == 0:
            m //= d
            if m % d == 0:
                return 0
            result = -result
        d += 1
    if m > 1:
        result = -result
    return result


def _poly_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_exact_div(a: list[int], b: list[int]) -> list[int]:
    # b monic
    a = list(a)
    q = [0] * (len(a) - len(b) + 1)
    for i in range(len(q) - 1, -1, -1):
        c = a[i + len(b) - 1]
        q[i] = c
        if c:
            for j, y in enumerate(b):
                a[i + j] -= c * y
    return q


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients (low degree first) of the n-th cyclotomic polynomial."""
    num, den = [1], [1]
    for d in range(1, n + 1):
        if n % d:
            continue
        mu = _mobius(n // d)
        factor = [-1] + [0] * (d - 1) + [1]
        if mu == 1:
            num = _poly_mul(num, factor)
        elif mu == -1:
            den = _poly_mul(den, factor)
    return tuple(_poly_exact_div(num, den))


def _as_fraction(x: Rational) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class CycloNumber:
    """Immutable element ``sum c_k zeta_N^k`` of the N-th cyclotomic field."""

    __slots__ = ("modulus", "coeffs", "_canon")

    def __init__(self, modulus: int, coeffs: Mapping[int, Rational] | None = None):
        if modulus < 1:
            raise CycloError(f"modulus must be positive, got {modulus}")
        clean: dict[int, Fraction] = {}
        for k, c in (coeffs or {}).items():
            c = _as_fraction(c)
            if c:
                k %= modulus
                v = clean.get(k, Fraction(0)) + c
                if v:
                    clean[k] = v
                else:
                    clean.pop(k, None)
        self.modulus = modulus
        self.coeffs = clean
        self._canon: tuple | None = None

    # -- constructors -------------------------------------------------
    @classmethod
    def rational(cls, value: Rational, modulus: int = 1) -> CycloNumber:
        return cls(modulus, {0: value})

    @classmethod
    def zero(cls, modulus: int = 1) -> CycloNumber:
        return cls(modulus)

    @classmethod
    def one(cls, modulus: int = 1) -> CycloNumber:
        return cls(modulus, {0: 1})

    @classmethod
    def root_of_unity(cls, angle: Fraction) -> CycloNumber:
        """exp(2 pi i angle) for a rational angle."""
        angle = Fraction(angle) % 1
        return cls(angle.denominator, {angle.numerator: 1})

    @classmethod
    def from_angle_counts(cls, counts: Mapping[Fraction, Rational]) -> CycloNumber:
        """Build ``sum m_a exp(2 pi i a)`` from a map angle -> multiplicity."""
        n = 1
        for a in counts:
            n = _lcm(n, Fraction(a).denominator)
        terms: dict[int, Fraction] = {}
        for a, m in counts.items():
            a = Fraction(a) % 1
            k = a.numerator * (n // a.denominator)
            terms[k] = terms.get(k, Fraction(0)) + _as_fraction(m)
        return cls(n, terms)

    # -- modulus handling ---------------------------------------------
    def lift(self, modulus: int) -> CycloNumber:
        if modulus % self.modulus:
            raise CycloError(f"cannot lift modulus {self.modulus} to {modulus}")
        s = modulus // self.modulus
        return CycloNumber(modulus, {k * s: c for k, c in self.coeffs.items()})

    def _common(self, other: CycloNumber) -> tuple[CycloNumber, CycloNumber]:
        if self.modulus == other.modulus:
            return self, other
        n = _lcm(self.modulus, other.modulus)
        return self.lift(n), other.lift(n)

    @staticmethod
    def _coerce(x) -> CycloNumber:
        if isinstance(x, CycloNumber):
            return x
        if isinstance(x, (int, Fraction)):
            return CycloNumber.rational(x)
        return NotImplemented

    # -- ring operations ----------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._common(other)
        terms = dict(a.coeffs)
        for k, c in b.coeffs.items():
            terms[k] = terms.get(k, 0) + c
        return CycloNumber(a.modulus, terms)

    __radd__ = __add__

    def __neg__(self) -> CycloNumber:
        return CycloNumber(self.modulus, {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloNumber(self.modulus, {k: c * other for k, c in self.coeffs.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._common(other)
        n = a.modulus
        if len(a.coeffs) * len(b.coeffs) > 64:
            a, b = a.normalize(), b.normalize()
        da, ia = a._integer_terms()
        db, ib = b._integer_terms()
        acc: dict[int, int] = {}
        for i, x in ia:
            for j, y in ib:
                k = (i + j) % n
                acc[k] = acc.get(k, 0) + x * y
        den = da * db
        return CycloNumber(n, {k: Fraction(v, den) for k, v in acc.items() if v})

    def _integer_terms(self) -> tuple[int, list[tuple[int, int]]]:
        den = 1
        for c in self.coeffs.values():
            den = _lcm(den, c.denominator)
        return den, [(k, c.numerator * (den // c.denominator)) for k, c in self.coeffs.items()]

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, e: int) -> CycloNumber:
        if e < 0:
            return self.inverse() ** (-e)
        result = CycloNumber.one(self.modulus)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def conj(self) -> CycloNumber:
        n = self.modulus
        return CycloNumber(n, {(-k) % n: c for k, c in self.coeffs.items()})

    def inverse(self) -> CycloNumber:
        """Inverse of ``r * zeta^k`` (rational r); other elements are unsupported."""
        canon = self.normalize()
        if len(canon.coeffs) == 1:
            (k, c), = canon.coeffs.items()
            return CycloNumber(canon.modulus, {-k: 1 / c})
        angle = self.as_root_of_unity()
        if angle is not None:
            return CycloNumber.root_of_unity(-angle)
        # rational multiple of a root of unity in disguise: x * conj(x) rational
        norm = (self * self.conj()).rational_value()
        if norm is not None and norm != 0:
            return self.conj() / norm
        raise CycloError("inverse is only supported for rational multiples of roots of unity")

    # -- canonical form -----------------------------------------------
    def _canonical(self) -> tuple:
        if self._canon is None:
            n = self.modulus
            phi = cyclotomic_polynomial(n)
            deg = len(phi) - 1
            # integer arithmetic over a common denominator
            den = 1
            for c in self.coeffs.values():
                den = _lcm(den, c.denominator)
            dense = [0] * n
            for k, c in self.coeffs.items():
                dense[k] += c.numerator * (den // c.denominator)
            support = [(j, phi[j]) for j in range(deg) if phi[j]]
            for i in range(n - 1, deg - 1, -1):
                c = dense[i]
                if c:
                    shift = i - deg
                    for j, pj in support:
                        dense[shift + j] -= c * pj
                    dense[i] = 0
            self._canon = tuple(Fraction(x, den) for x in dense[:deg])
        return self._canon

    def normalize(self) -> CycloNumber:
        """Representative in the basis zeta^k, 0 <= k < phi(N)."""
        return CycloNumber(self.modulus, dict(enumerate(self._canonical())))

    def reduce_modulus(self) -> CycloNumber:
        """Same number over the smallest modulus dividing N that holds it."""
        n = self.modulus
        best = self
        for d in sorted(_divisors(n)):
            if d == n:
                break
            s = n // d
            if all(k % s == 0 for k in self.coeffs):
                return CycloNumber(d, {k // s: c for k, c in self.coeffs.items()})
        # equal after normalization?  try candidates via the canonical form
        return best

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self._common(other)
        return a._canonical() == b._canonical()

    def __hash__(self) -> int:
        # consistent with __eq__ only through the embedding rounding
        z = self.embed()
        return hash((round(z.real, 6), round(z.imag, 6)))

    def is_zero(self) -> bool:
        return not any(self._canonical())

    def rational_value(self) -> Fraction | None:
        canon = self._canonical()
        if all(c == 0 for c in canon[1:]):
            return canon[0] if canon else Fraction(0)
        return None

    def is_rational(self) -> bool:
        return self.rational_value() is not None

    def as_root_of_unity(self) -> Fraction | None:
        """The angle a with self == exp(2 pi i a), or None."""
        z = self.embed()
        if abs(abs(z) - 1.0) > 1e-6:
            return None
        n = self.modulus
        k = round(cmath.phase(z) / (2 * math.pi) * n) % n
        # roots of unity of order 2N live here when N is odd
        for cand in (Fraction(k, n), Fraction(2 * k + 1, 2 * n), Fraction(2 * k - 1, 2 * n)):
            if self == CycloNumber.root_of_unity(cand):
                return cand % 1
        return None

    # -- diagnostics / serialization ----------------------------------
    def embed(self) -> complex:
        n = self.modulus
        return sum(
            (float(c) * cmath.exp(2j * math.pi * k / n) for k, c in self.coeffs.items()),
            0j,
        )

    def to_json(self, approx: bool = True) -> dict:
        canon = self.normalize()
        while True:
            smaller = canon.reduce_modulus().normalize()
            if smaller.modulus == canon.modulus:
                break
            canon = smaller
        out = {
            "modulus": canon.modulus,
            "terms": [[k, f"{c.numerator}/{c.denominator}"] for k, c in sorted(canon.coeffs.items())],
        }
        if approx:
            z = self.embed()
            out["approx"] = [round(z.real, 12) + 0.0, round(z.imag, 12) + 0.0]
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> CycloNumber:
        return cls(int(data["modulus"]), {int(k): Fraction(c) for k, c in data["terms"]})

    def __repr__(self) -> str:
        if not self.coeffs:
            return f"CycloNumber({self.modulus}, 0)"
        terms = " + ".join(f"{c}*z^{k}" for k, c in sorted(self.coeffs.items()))
        return f"CycloNumber({self.modulus}: {terms})"


@lru_cache(maxsize=None)
def _divisors(n: int) -> tuple[int, ...]:
    return tuple(d for d in range(1, n + 1) if n % d == 0)


def zeta(order: int, power: int = 1, modulus: int | None = None) -> CycloNumber:
    """zeta_order ** power, optionally expressed over a multiple ``modulus``."""
    if order < 1:
        raise CycloError(f"order must be positive, got {order}")
    if modulus is None:
        modulus = order
    if modulus % order:
        raise CycloError(f"order {order} does not divide modulus {modulus}")
    return CycloNumber(modulus, {(modulus // order) * power: 1})


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def quadratic_gauss_sum(p: int) -> CycloNumber:
    """sum_{a mod p} (a/p) zeta_p^a."""
    return CycloNumber(p, {a: legendre(a, p) for a in range(1, p)})


@lru_cache(maxsize=None)
def sqrt_prime(p: int) -> CycloNumber:
    """The positive square root of an odd prime p, inside Q(zeta_{4p})."""
    if p == 2 or p < 2 or any(p % d == 0 for d in range(2, math.isqrt(p) + 1)):
        raise CycloError(f"sqrt_prime needs an odd prime, got {p}")
    g = quadratic_gauss_sum(p).lift(4 * p)
    if p % 4 == 1:
        return g
    # g = i*sqrt(p)
    return g * zeta(4, 3)


def sqrt_q_power(p: int, half_exponent: int) -> CycloNumber:
    """p ** (half_exponent / 2) as an exact cyclotomic number."""
    whole, half = divmod(half_exponent, 2)
    value = CycloNumber.rational(Fraction(p) ** whole)
    if half:
        value = value * sqrt_prime(p)
    return value


def sum_of(values: Iterable[CycloNumber]) -> CycloNumber:
    total = CycloNumber.zero()
    for v in values:
        total = total + v
    return total
