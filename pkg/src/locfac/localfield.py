"""Truncated p-adic fields.

Every field node is modelled as ``U[x]/(g)`` where ``U`` is the unramified
extension of degree ``f`` of Z_p (``Z_p[t]/(P)`` with ``P`` the fixed lift of
the residue modulus) and ``g`` is an Eisenstein polynomial of degree ``e``
over ``U``.  An unramified node uses ``g = x - p`` so the uniformizer is p.

Elements are ``p^-shift * sum c_{j,i} t^i x^j`` with integer coordinates that
are known modulo ``p^prec``.  Operations track ``prec`` and refuse to report a
valuation that the stored digits cannot certify.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import cached_property

from .finite import ResidueField, is_prime
from .intlinalg import inverse_mod_matrix

DEFAULT_PRECISION = 24
DEFAULT_GUARD = 400_000

Raw = tuple[tuple[int, ...], ...]  # e rows of f coordinates


class FieldError(ValueError):
    """Invalid field construction or unsupported configuration."""


class PrecisionError(ArithmeticError):
    """The working precision cannot certify the requested quantity."""


class InstanceTooLarge(RuntimeError):
    """An enumeration would exceed the configured guard limit."""


def vp_int(x: int, p: int, cap: int) -> int:
    if x == 0:
        return cap
    v = 0
    while x % p == 0 and v < cap:
        x //= p
        v += 1
    return v


class LocalField:
    """A finite extension of Q_p given as an Eisenstein extension of U_f."""

    _counter = itertools.count()

    def __init__(self, p: int, f: int, eisenstein: list[tuple[int, ...]], precision: int,
                 name: str | None = None, parent: LocalField | None = None):
        if not is_prime(p):
            raise FieldError(f"{p} is not prime")
        if precision < 2:
            raise FieldError("precision must be at least 2")
        self.p = p
        self.f = f
        self.e = len(eisenstein)
        self.n = self.e * self.f
        self.M = precision
        self.mod = p**precision
        self.res = ResidueField(p, f)
        self.q = self.res.q
        self.P = tuple(self.res.modulus)  # lifted residue modulus, monic, degree f
        self.g = tuple(tuple(c % self.mod for c in row) + (0,) * (f - len(row)) for row in eisenstein)
        self.uid = next(LocalField._counter)
        self.name = name or f"L{self.uid}"
        self.parent = parent
        self.sources: list[Embedding] = []
        self._check_eisenstein()

    def _check_eisenstein(self):
        p = self.p
        for j, row in enumerate(self.g):
            if any(c % p for c in row):
                raise FieldError(f"coefficient of x^{j} in {self.name} is not divisible by p")
        c0 = self.g[0]
        if all(c % (p * p) == 0 for c in c0):
            raise FieldError(f"constant term of {self.name} has valuation > 1")

    # -- U arithmetic (tuples of length f) -------------------------------
    def u_mul(self, a, b, mod):
        f = self.f
        if f == 1:
            return ((a[0] * b[0]) % mod,)
        out = [0] * (2 * f - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        P = self.P
        for i in range(2 * f - 2, f - 1, -1):
            c = out[i]
            if c:
                for j in range(f):
                    out[i - f + j] -= c * P[j]
        return tuple(x % mod for x in out[:f])

    def u_add(self, a, b, mod):
        return tuple((x + y) % mod for x, y in zip(a, b))

    # -- raw (integral) arithmetic -----------------------------------------
    @cached_property
    def _pi_powers_high(self):
        """x^(e+k) for k < e-1 reduced to the basis, modulo p^M."""
        e, f, mod = self.e, self.f, self.mod
        zero = (0,) * f
        cur = [tuple((-c) % mod for c in row) for row in self.g]  # x^e
        out = [tuple(cur)]
        for _ in range(e - 2):
            top = cur[-1]
            shifted = [zero] + cur[:-1]
            cur = [self.u_add(shifted[j], self.u_mul(top, out[0][j], mod), mod) for j in range(e)]
            out.append(tuple(cur))
        return out

    def raw_mul(self, a: Raw, b: Raw, mod: int) -> Raw:
        e, f = self.e, self.f
        zero = (0,) * f
        if e == 1:
            return (self.u_mul(a[0], b[0], mod),)
        prod = [zero] * (2 * e - 1)
        for i, x in enumerate(a):
            if not any(x):
                continue
            for j, y in enumerate(b):
                if any(y):
                    prod[i + j] = self.u_add(prod[i + j], self.u_mul(x, y, mod), mod)
        high = self._pi_powers_high
        out = prod[:e]
        for k in range(e - 1):
            c = prod[e + k]
            if any(c):
                red = high[k]
                out = [self.u_add(out[j], self.u_mul(c, red[j], mod), mod) for j in range(e)]
        return tuple(out)

    def raw_one(self) -> Raw:
        zero = (0,) * self.f
        return ((1,) + (0,) * (self.f - 1),) + (zero,) * (self.e - 1)

    def raw_reduce(self, a: Raw, mod: int) -> Raw:
        return tuple(tuple(x % mod for x in row) for row in a)

    def key(self, a: Raw, level: int) -> tuple:
        """Hashable class of an integral raw element modulo P^level."""
        e, p = self.e, self.p
        return tuple(
            tuple(x % p ** max(0, -(-(level - j) // e)) for x in row) for j, row in enumerate(a)
        )

    def raw_pow(self, a: Raw, k: int, mod: int) -> Raw:
        result = self.raw_one()
        base = a
        while k:
            if k & 1:
                result = self.raw_mul(result, base, mod)
            k >>= 1
            if k:
                base = self.raw_mul(base, base, mod)
        return result

    # -- element constructors ------------------------------------------------
    def element(self, rows, shift: int = 0, prec: int | None = None) -> FieldElement:
        f = self.f
        clean = []
        for j in range(self.e):
            row = list(rows[j]) if j < len(rows) else []
            row = row + [0] * (f - len(row))
            clean.append(tuple(row[:f]))
        return FieldElement(self, tuple(clean), shift, self.M if prec is None else prec)

    def from_raw(self, raw: Raw, prec: int | None = None) -> FieldElement:
        return FieldElement(self, raw, 0, self.M if prec is None else prec)

    def from_rational(self, x) -> FieldElement:
        x = Fraction(x)
        num, den = x.numerator, x.denominator
        s = 0
        while den % self.p == 0:
            den //= self.p
            s += 1
        val = num * pow(den, -1, self.mod) % self.mod
        return self.element([[val]], shift=s)

    def __call__(self, x) -> FieldElement:
        if isinstance(x, FieldElement):
            if x.field is not self:
                return embed(x, self)
            return x
        return self.from_rational(x)

    @property
    def zero(self) -> FieldElement:
        return self.element([])

    @property
    def one(self) -> FieldElement:
        return self.element([[1]])

    @cached_property
    def uniformizer(self) -> FieldElement:
        if self.e == 1:
            return self.from_rational(self.p)
        return self.element([[0], [1]])

    @cached_property
    def t(self) -> FieldElement:
        """Generator of the unramified part U (residue is the chosen t)."""
        if self.f == 1:
            return self.zero
        return self.element([[0, 1]])

    def basis_element(self, i: int, j: int) -> FieldElement:
        """t^i * x^j in the standard Z_p basis."""
        rows = [[0] * self.f for _ in range(self.e)]
        rows[j][i] = 1
        return self.element(rows)

    @cached_property
    def _pi_inverse(self) -> FieldElement:
        if self.e == 1:
            return self.from_rational(Fraction(1, self.p))
        # x^e = p * u0, u0 = -(g_0 + g_1 x + ...)/p
        u0_rows = [tuple((-(c // self.p)) % self.mod for c in row) for row in self.g]
        u0 = FieldElement(self, tuple(u0_rows), 0, self.M - 1)
        xe1 = self.uniformizer ** (self.e - 1)
        return xe1 * u0.inverse() * self.from_rational(Fraction(1, self.p))

    def pi_power(self, k: int) -> FieldElement:
        if k >= 0:
            return self.uniformizer**k
        return self._pi_inverse ** (-k)

    # -- residue field bridge -----------------------------------------------
    def teichmuller_raw(self, r) -> tuple[int, ...]:
        """Teichmuller lift of a residue (as U coordinates modulo p^M)."""
        cache = self.__dict__.setdefault("_teich_cache", {})
        r = self.res.elem(r)
        if r in cache:
            return cache[r]
        if not any(r):
            cache[r] = (0,) * self.f
            return cache[r]
        y = tuple(r)
        q = self.q
        for _ in range(self.M + 1):
            z = y
            acc = (1,) + (0,) * (self.f - 1)
            e = q
            base = z
            while e:
                if e & 1:
                    acc = self.u_mul(acc, base, self.mod)
                e >>= 1
                if e:
                    base = self.u_mul(base, base, self.mod)
            if acc == y:
                break
            y = acc
        cache[r] = y
        return y

    def teichmuller(self, r) -> FieldElement:
        return self.element([self.teichmuller_raw(r)])

    # -- trace / additive character ------------------------------------------
    @cached_property
    def _basis_traces(self) -> list[int]:
        """Tr_{L/Q_p} of each standard basis vector t^i x^j, modulo p^M."""
        e, f, mod = self.e, self.f, self.mod
        traces = []
        for j in range(e):
            for i in range(f):
                b = self.basis_element(i, j).raw
                tr = 0
                for jj in range(e):
                    for ii in range(f):
                        prod = self.raw_mul(b, self.basis_element(ii, jj).raw, mod)
                        tr += prod[jj][ii]
                traces.append(tr % mod)
        return traces

    def abs_trace(self, x: FieldElement) -> tuple[int, int, int]:
        """(T, shift, prec) with Tr_{L/Q_p}(x) = p^-shift * T, T known mod p^prec."""
        tr = self._basis_traces
        f = self.f
        total = 0
        for j, row in enumerate(x.raw):
            for i, c in enumerate(row):
                if c:
                    total += c * tr[j * f + i]
        return total % self.p**x.prec, x.shift, x.prec

    def psi_angle(self, x: FieldElement) -> Fraction:
        """psi_L(x) = exp(2 pi i angle) for the level-one base character composed with trace."""
        T, s, prec = self.abs_trace(x)
        if prec < s + 1:
            raise PrecisionError(f"trace of element not certified modulo p (shift {s}, prec {prec})")
        m = self.p ** (s + 1)
        return Fraction(T % m, m)

    @cached_property
    def absolute_different(self) -> int:
        """v_L of the different of L/Q_p."""
        if self.e == 1:
            return 0
        # g'(x)
        rows = []
        for j in range(1, self.e):
            rows.append(tuple(j * c for c in self.g[j]))
        rows.append((self.e,) + (0,) * (self.f - 1))
        return self.element(rows).valuation()

    @property
    def psi_level(self) -> int:
        """Least m with psi_L trivial on P_L^m."""
        return self.e - self.absolute_different

    @property
    def is_wild(self) -> bool:
        return self.e % self.p == 0

    def __repr__(self):
        return f"LocalField({self.name}: p={self.p}, f={self.f}, e={self.e})"

    def describe(self) -> dict:
        return {
            "name": self.name, "p": self.p, "f": self.f, "e": self.e, "q": self.q,
            "precision": self.M,
            "residue_modulus": list(self.P),
            "eisenstein": [list(r) for r in self.g],
        }


class FieldElement:
    """Immutable element of a :class:`LocalField`."""

    __slots__ = ("field", "raw", "shift", "prec")

    def __init__(self, field: LocalField, raw: Raw, shift: int, prec: int):
        prec = min(prec, field.M)
        p = field.p
        mod = p**prec if prec > 0 else 1
        raw = tuple(tuple(x % mod for x in row) for row in raw)
        # strip common powers of p from the denominator
        while shift > 0 and prec > 0 and all(x % p == 0 for row in raw for x in row):
            if all(x == 0 for row in raw for x in row):
                break
            raw = tuple(tuple(x // p for x in row) for row in raw)
            shift -= 1
            prec -= 1
        self.field = field
        self.raw = raw
        self.shift = shift
        self.prec = prec

    # arithmetic -------------------------------------------------------------
    def _coerce(self, other) -> FieldElement:
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise FieldError("elements belong to different fields; embed first")
            return other
        return self.field.from_rational(other)

    def _min_vp(self) -> int:
        p = self.field.p
        return min((vp_int(x, p, self.prec) for row in self.raw for x in row), default=self.prec)

    def __add__(self, other):
        other = self._coerce(other)
        F = self.field
        s = max(self.shift, other.shift)
        pa = self.prec + (s - self.shift)
        pb = other.prec + (s - other.shift)
        prec = min(pa, pb, F.M)
        ka, kb = F.p ** (s - self.shift), F.p ** (s - other.shift)
        raw = tuple(
            tuple(x * ka + y * kb for x, y in zip(ra, rb)) for ra, rb in zip(self.raw, other.raw)
        )
        return FieldElement(F, raw, s, prec)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, tuple(tuple(-x for x in row) for row in self.raw), self.shift, self.prec)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        F = self.field
        prec = min(self.prec + other._min_vp(), other.prec + self._min_vp(), F.M)
        raw = F.raw_mul(self.raw, other.raw, F.p ** max(prec, 1))
        return FieldElement(F, raw, self.shift + other.shift, prec)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.one
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def inverse(self) -> FieldElement:
        F = self.field
        v = self.valuation()
        u = self * F.pi_power(-v) if v else self
        if u.shift:
            raise PrecisionError("unit part not certified at this precision")
        return _unit_inverse(u) * F.pi_power(-v)

    # valuation -------------------------------------------------------------
    def valuation(self) -> int:
        F = self.field
        best = None
        for j, row in enumerate(self.raw):
            vp = min(vp_int(x, F.p, self.prec) for x in row)
            if vp < self.prec:
                cand = F.e * vp + j
                if best is None or cand < best:
                    best = cand
        if best is None:
            raise PrecisionError("element is indistinguishable from zero at this precision")
        return best - F.e * self.shift

    def is_zero(self) -> bool:
        """True when all stored digits vanish (zero at working precision)."""
        return all(x == 0 for row in self.raw for x in row)

    @property
    def absprec(self) -> int:
        """Element is known modulo P^absprec."""
        return self.field.e * (self.prec - self.shift)

    def is_integral(self) -> bool:
        return self.is_zero() or self.valuation() >= 0

    def integral_raw(self) -> Raw:
        """Coordinates of an integral element (shift removed)."""
        if self.shift == 0:
            return self.raw
        if self.valuation() < 0:
            raise FieldError("element is not integral")
        p = self.field.p
        k = p**self.shift
        if any(x % k for row in self.raw for x in row):
            # integral but written over x-powers with p-denominators: re-express
            raise PrecisionError("integral element has p-denominators in its coordinates")
        return tuple(tuple(x // k for x in row) for row in self.raw)

    def residue(self):
        """Image in the residue field (element must be integral)."""
        v = self.valuation() if not self.is_zero() else 1
        if v > 0:
            return self.field.res.zero
        raw = self.integral_raw()
        return self.field.res.elem(raw[0])

    def __eq__(self, other) -> bool:
        try:
            other = self._coerce(other)
        except FieldError:
            return False
        return (self - other).is_zero()

    def __hash__(self):
        return hash((self.field.uid, self.shift, self.raw))

    def coordinates(self) -> list[list[int]]:
        return [list(r) for r in self.raw]

    def to_json(self) -> dict:
        return {"field": self.field.name, "shift": self.shift, "prec": self.prec, "coords": self.coordinates()}

    def __repr__(self):
        return f"FieldElement({self.field.name}, shift={self.shift}, {self.coordinates()})"


def _unit_inverse(u: FieldElement) -> FieldElement:
    F = u.field
    r = F.res.elem(u.raw[0])
    if not any(r):
        raise FieldError("not a unit")
    rinv = F.res.inv(r)
    y = F.element([rinv])
    two = F.from_rational(2)
    # Newton: y <- y(2 - u y); each step doubles the p-adic precision
    for _ in range(max(1, math.ceil(math.log2(F.e * F.M + 1)) + 2)):
        y = y * (two - u * y)
        y = FieldElement(F, y.raw, y.shift, u.prec)
    return FieldElement(F, y.raw, y.shift, u.prec)


# ---------------------------------------------------------------------------
# embeddings between fields

class Embedding:
    """Z_p-linear field embedding determined by images of t and the uniformizer."""

    def __init__(self, src: LocalField, dst: LocalField, img_t: FieldElement, img_pi: FieldElement):
        self.src = src
        self.dst = dst
        self.img_t = img_t
        self.img_pi = img_pi
        imgs = []
        tp = [dst.one]
        for _ in range(1, src.f):
            tp.append(tp[-1] * img_t)
        pp = [dst.one]
        for _ in range(1, src.e):
            pp.append(pp[-1] * img_pi)
        for j in range(src.e):
            for i in range(src.f):
                imgs.append(tp[i] * pp[j])
        self.basis_images = imgs

    def __call__(self, x: FieldElement) -> FieldElement:
        if x.field is not self.src:
            raise FieldError("element is not in the embedding's source field")
        dst = self.dst
        f = self.src.f
        p = dst.p
        acc_raw = [[0] * dst.f for _ in range(dst.e)]
        prec = min(x.prec, min(b.prec for b in self.basis_images))
        for j, row in enumerate(x.raw):
            for i, c in enumerate(row):
                if c:
                    b = self.basis_images[j * f + i]
                    kb = p ** b.shift
                    for jj in range(dst.e):
                        for ii in range(dst.f):
                            acc_raw[jj][ii] += c * b.raw[jj][ii]
        # basis images here are integral (shift 0) by construction
        return FieldElement(dst, tuple(tuple(r) for r in acc_raw), x.shift, prec)

    def then(self, other: Embedding) -> Embedding:
        if other.src is not self.dst:
            raise FieldError("cannot compose embeddings")
        return Embedding(self.src, other.dst, other(self.img_t), other(self.img_pi))


def find_embedding(src: LocalField, dst: LocalField) -> Embedding | None:
    if src is dst:
        return None
    stack = [(dst, None)]
    seen = set()
    while stack:
        node, chain = stack.pop()
        if node.uid in seen:
            continue
        seen.add(node.uid)
        for emb in node.sources:
            c = emb if chain is None else emb.then(chain)
            if emb.src is src:
                return c
            stack.append((emb.src, c))
    raise FieldError(f"{src.name} is not a known subfield of {dst.name}")


def embed(x: FieldElement, dst: LocalField) -> FieldElement:
    if x.field is dst:
        return x
    key = (x.field.uid, dst.uid)
    cache = _EMB_CACHE
    if key not in cache:
        cache[key] = find_embedding(x.field, dst)
    return cache[key](x)


_EMB_CACHE: dict = {}


def is_subfield(small: LocalField, big: LocalField) -> bool:
    if small is big:
        return True
    try:
        find_embedding(small, big)
        return True
    except FieldError:
        return False


# ---------------------------------------------------------------------------
# construction

def make_base(p: int, f: int = 1, precision: int = DEFAULT_PRECISION, name: str = "F") -> LocalField:
    """The unramified extension of Q_p of degree f; uniformizer p."""
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    return LocalField(p, f, [(-p,)], precision, name=name)


def _residue_root(src_res: ResidueField, dst: LocalField):
    """A root in k_dst of the residue modulus of src (src.f divides dst.f)."""
    res = dst.res
    P = src_res.modulus
    if src_res.f == 1:
        return res.zero
    k = (res.q - 1) // (src_res.q - 1)
    g = res.generator
    base = res.pow(g, k)
    x = res.one
    for _ in range(src_res.q - 1):
        acc = res.zero
        power = res.one
        for c in P:
            acc = res.add(acc, tuple(c * y % res.p for y in power))
            power = res.mul(power, x)
        if not any(acc):
            return x
        x = res.mul(x, base)
    raise FieldError("residue modulus has no root in the target residue field")


def _hensel_root_of_P(src: LocalField, dst: LocalField) -> FieldElement:
    """Image of t_src in U_dst: Hensel lift of a residue root of P_src."""
    r = _residue_root(src.res, dst)
    y = dst.element([r])
    P = src.P
    for _ in range(dst.M + 2):
        val = dst.zero
        der = dst.zero
        power = dst.one
        for k, c in enumerate(P):
            val = val + power * c
            if k + 1 < len(P):
                der = der + power * (P[k + 1] * (k + 1))
            power = power * y
        if val.is_zero():
            break
        y = y - val / der
        y = FieldElement(dst, y.integral_raw(), 0, dst.M)
    return y


def _u_image(src: LocalField, dst: LocalField) -> FieldElement:
    if src.f == 1:
        return dst.zero
    return _hensel_root_of_P(src, dst)


def _map_u_row(row, img_t: FieldElement, dst: LocalField) -> FieldElement:
    acc = dst.zero
    power = dst.one
    for c in row:
        if c:
            acc = acc + power * c
        power = power * img_t
    return acc


def extend_unramified(base: LocalField, d: int, name: str | None = None) -> LocalField:
    if d < 1:
        raise FieldError("degree must be positive")
    # temporary field to compute the image of t_base in U_{f d}
    probe = LocalField(base.p, base.f * d, [(-base.p,)], base.M)
    img_t_u = _u_image(base, probe)
    g_rows = []
    for row in base.g:
        g_rows.append(_map_u_row(row, img_t_u, probe).raw[0])
    new = LocalField(base.p, base.f * d, g_rows, base.M, name=name, parent=base)
    img_t = new.element([img_t_u.raw[0]])
    new.sources.append(Embedding(base, new, img_t, new.uniformizer if base.e > 1 else new.from_rational(base.p)))
    new.relative_kind = ("unramified", d)
    return new


def parse_poly(text: str) -> list[int]:
    """Integer polynomial in x from text such as 'x^3 - 3' (low degree first)."""
    from sympy import Poly as SPoly, symbols, sympify

    x = symbols("x")
    poly = SPoly(sympify(text.replace("^", "**")), x)
    coeffs = [int(c) for c in reversed(poly.all_coeffs())]
    return coeffs


def extend_eisenstein(base: LocalField, poly, name: str | None = None) -> LocalField:
    """Adjoin a root of an Eisenstein polynomial with coefficients in Z (or U_base)."""
    if base.e != 1:
        raise FieldError("Eisenstein steps are only supported over unramified nodes; use compositum")
    if isinstance(poly, str):
        poly = parse_poly(poly)
    coeffs = list(poly)
    if len(coeffs) < 2:
        raise FieldError("polynomial must have positive degree")
    lead = coeffs[-1]
    lead = lead if isinstance(lead, int) else lead[0]
    if lead != 1:
        raise FieldError("Eisenstein polynomial must be monic")
    rows = []
    for c in coeffs[:-1]:
        rows.append((c,) if isinstance(c, int) else tuple(c))
    p = base.p
    if any(x % p for r in rows for x in r):
        raise FieldError("not Eisenstein: a coefficient is not divisible by p")
    if all(x % (p * p) == 0 for x in rows[0]):
        raise FieldError("not Eisenstein: constant term divisible by p^2")
    new = LocalField(p, base.f, rows, base.M, name=name, parent=base)
    new.sources.append(Embedding(base, new, new.t, new.from_rational(p)))
    new.relative_kind = ("eisenstein", len(rows))
    return new


def _pure_constant(L: LocalField) -> FieldElement | None:
    """c with g = x^e - c when L's Eisenstein polynomial is pure."""
    if any(any(r) for r in L.g[1:]):
        return None
    return L.element([tuple(-x for x in L.g[0])])


def compositum(E: LocalField, K: LocalField, name: str | None = None) -> LocalField:
    """The compositum EK of two extensions of a common unramified base with coprime degrees."""
    base = E.parent if E.parent is not None else E
    if K.parent is not base and K is not base:
        raise FieldError("compositum needs two extensions of the same base field")
    if base.e != 1:
        raise FieldError("compositum base must be unramified over Q_p")
    fE, fK = E.f // base.f, K.f // base.f
    if math.gcd(fE, fK) != 1 or math.gcd(E.e, K.e) != 1:
        raise FieldError("compositum requires coprime residue degrees and coprime ramification indices")
    p, M = base.p, base.M
    f = base.f * (E.f // base.f) * (K.f // base.f)
    e = E.e * K.e
    probe = LocalField(p, f, [(-p,)], M)
    tE_u = _u_image(E, probe)
    tK_u = _u_image(K, probe)

    if E.e == 1 and K.e == 1:
        g_rows = [(-p,)]
    elif K.e == 1:
        g_rows = [_map_u_row(r, tE_u, probe).raw[0] for r in E.g]
    elif E.e == 1:
        g_rows = [_map_u_row(r, tK_u, probe).raw[0] for r in K.g]
    else:
        cE, cK = _pure_constant(E), _pure_constant(K)
        if cE is None or cK is None:
            raise FieldError("compositum of two ramified steps needs pure polynomials x^e - c")
        uE = _map_u_row(cE.raw[0], tE_u, probe) * probe.from_rational(Fraction(1, p))
        uK = _map_u_row(cK.raw[0], tK_u, probe) * probe.from_rational(Fraction(1, p))
        uE = FieldElement(probe, uE.integral_raw(), 0, M - 1)
        uK = FieldElement(probe, uK.integral_raw(), 0, M - 1)
        a, b = _bezout(K.e, E.e)  # a*eK + b*eE = 1
        C = (uE ** (a * K.e)) * (uK ** (b * E.e)) * p
        g_rows = [tuple(-x for x in C.integral_raw()[0])] + [(0,)] * (e - 1)
    EK = LocalField(p, f, g_rows, M, name=name or f"{E.name}{K.name}", parent=base)

    tE = EK.element([tE_u.raw[0]])
    tK = EK.element([tK_u.raw[0]])
    pi = EK.uniformizer
    if E.e == 1:
        piE = EK.from_rational(p)
    elif K.e == 1:
        piE = pi
    else:
        piE = None
    if K.e == 1:
        piK = EK.from_rational(p)
    elif E.e == 1:
        piK = pi
    else:
        piK = None
    if piE is None:
        uE_EK = EK.element([uE.raw[0]])
        uK_EK = EK.element([uK.raw[0]])
        # pi_E = pi^{eK} (uE/uK)^b, pi_K = pi^{eE} (uK/uE)^a
        piE = pi ** K.e * (uE_EK / uK_EK) ** b
        piK = pi ** E.e * (uK_EK / uE_EK) ** a
    EK.sources.append(Embedding(E, EK, tE, piE))
    EK.sources.append(Embedding(K, EK, tK, piK))
    EK.relative_kind = ("compositum", (E.name, K.name))
    return EK


def _bezout(x: int, y: int) -> tuple[int, int]:
    """(a, b) with a*x + b*y = 1."""
    old_r, r = x, y
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        qq = old_r // r
        old_r, r = r, old_r - qq * r
        old_s, s = s, old_s - qq * s
        old_t, t = t, old_t - qq * t
    if old_r != 1:
        raise FieldError("degrees are not coprime")
    return old_s, old_t


# ---------------------------------------------------------------------------
# relative structure: norms and traces

class Relative:
    """A as a vector space over a subfield B via the basis t_A^i x_A^j."""

    _cache: dict = {}

    def __new__(cls, A: LocalField, B: LocalField):
        key = (A.uid, B.uid)
        if key not in cls._cache:
            obj = super().__new__(cls)
            obj._setup(A, B)
            cls._cache[key] = obj
        return cls._cache[key]

    def _setup(self, A: LocalField, B: LocalField):
        if A.e % B.e or A.f % B.f:
            raise FieldError(f"{B.name} is not a subfield of {A.name}")
        self.A, self.B = A, B
        self.er = A.e // B.e
        self.fr = A.f // B.f
        self.degree = self.er * self.fr
        self.emb = None if A is B else find_embedding(B, A)
        self.rel_basis = []
        for j in range(self.er):
            for i in range(self.fr):
                self.rel_basis.append(A.t**i * A.uniformizer**j if (i or j) else A.one)
        # columns: coordinates of w * emb(b) for w in rel_basis, b in B's basis
        cols = []
        for w in self.rel_basis:
            for jb in range(B.e):
                for ib in range(B.f):
                    b = B.basis_element(ib, jb)
                    img = self.emb(b) if self.emb else b
                    v = w * img
                    cols.append([x for row in v.integral_raw() for x in row])
        n = A.n
        mat = [[cols[c][r] for c in range(n)] for r in range(n)]
        self.inverse = inverse_mod_matrix(mat, A.mod)

    def coordinates(self, y: FieldElement) -> list[FieldElement]:
        """B-coordinates of y in the relative basis."""
        A, B = self.A, self.B
        flat = [x for row in y.raw for x in row]
        sol = [sum(r[k] * flat[k] for k in range(len(flat))) % A.mod for r in self.inverse]
        out = []
        nb = B.n
        for k in range(self.degree):
            chunk = sol[k * nb:(k + 1) * nb]
            rows = [chunk[jb * B.f:(jb + 1) * B.f] for jb in range(B.e)]
            out.append(FieldElement(B, tuple(tuple(r) for r in rows), y.shift, y.prec))
        return out

    def matrix(self, x: FieldElement) -> list[list[FieldElement]]:
        cols = [self.coordinates(x * w) for w in self.rel_basis]
        d = self.degree
        return [[cols[c][r] for c in range(d)] for r in range(d)]

    def norm(self, x: FieldElement) -> FieldElement:
        if self.degree == 1:
            return self._down(x)
        return _det(self.matrix(x), self.B)

    def trace(self, x: FieldElement) -> FieldElement:
        m = self.matrix(x)
        acc = self.B.zero
        for i in range(self.degree):
            acc = acc + m[i][i]
        return acc

    def _down(self, x):
        return self.coordinates(x)[0]


def _det(m: list[list[FieldElement]], B: LocalField) -> FieldElement:
    m = [row[:] for row in m]
    n = len(m)
    det = B.one
    for c in range(n):
        best, bv = None, None
        for r in range(c, n):
            if not m[r][c].is_zero():
                try:
                    v = m[r][c].valuation()
                except PrecisionError:
                    continue
                if bv is None or v < bv:
                    best, bv = r, v
        if best is None:
            raise PrecisionError("determinant not certified: singular at working precision")
        if best != c:
            m[c], m[best] = m[best], m[c]
            det = -det
        piv = m[c][c]
        det = det * piv
        inv = piv.inverse()
        for r in range(c + 1, n):
            if not m[r][c].is_zero():
                factor = m[r][c] * inv
                m[r] = [m[r][k] - factor * m[c][k] for k in range(n)]
    return det


def norm(x: FieldElement, down_to: LocalField) -> FieldElement:
    return Relative(x.field, down_to).norm(x)


def trace(x: FieldElement, down_to: LocalField) -> FieldElement:
    return Relative(x.field, down_to).trace(x)


def relative_degrees(A: LocalField, B: LocalField) -> tuple[int, int]:
    """(e(A/B), f(A/B))."""
    return A.e // B.e, A.f // B.f


def different_exponent(A: LocalField, B: LocalField) -> int:
    """v_A of the different of A/B."""
    er = A.e // B.e
    return A.absolute_different - er * B.absolute_different


# ---------------------------------------------------------------------------
# Hilbert symbol

def hilbert2(a: FieldElement, b: FieldElement) -> int:
    """Tame quadratic Hilbert symbol (a, b) for odd residue characteristic."""
    F = a.field
    if F.p == 2:
        raise FieldError("quadratic Hilbert symbol for p = 2 is not supported")
    va, vb = a.valuation(), b.valuation()
    # unit parts first, so large valuations do not exhaust the precision
    ua, ub = a * F.pi_power(-va), b * F.pi_power(-vb)
    u = ua**vb * ub ** (-va)
    if (va * vb) % 2:
        u = -u
    return F.res.quadratic_character(u.residue())


# ---------------------------------------------------------------------------
# unit groups (O/P^n)^x

class UnitGroup:
    """Independent generators and discrete logs for (O_L / P_L^n)^x.

    The first generator is a Teichmuller lift of a primitive residue (order
    q - 1).  The 1-units are handled through the filtration: level i carries
    the elements 1 + p^(i // e) x^(i % e) t^j, a unit is peeled level by level
    into these, and the Smith form of their p-th power relations gives an
    independent generating set.  Nothing of size q^n is tabulated.
    """

    def __init__(self, field: LocalField, n: int):
        if n < 0:
            raise ValueError("level must be nonnegative")
        self.field = field
        self.n = n
        self.order = (field.q - 1) * field.q ** (n - 1) if n else 1
        self.mod = field.p ** max(1, -(-n // field.e))
        if n == 0:
            self.gens, self.orders = [], []
            return
        F = field
        self.teich = F.teichmuller_raw(F.res.generator)
        self.gens = [F.raw_reduce((self.teich,) + ((0,) * F.f,) * (F.e - 1), self.mod)]
        self.orders = [F.q - 1]
        one = F.raw_one()
        self._levels = [(i, j) for i in range(1, n) for j in range(F.f)]
        self._filt, self._filt_inv = [], []
        for i, j in self._levels:
            cand = [list(r) for r in one]
            cand[i % F.e][j] = (cand[i % F.e][j] + F.p ** (i // F.e)) % self.mod
            g = tuple(tuple(r) for r in cand)
            self._filt.append(g)
            self._filt_inv.append(self._pow(g, self._exponent_bound() - 1))
        self._reduce()

    def _exponent_bound(self) -> int:
        # p^(n) kills every 1-unit modulo P^n
        return self.field.p ** self.n

    def _mul(self, a, b):
        return self.field.raw_mul(a, b, self.mod)

    def _pow(self, a, k):
        return self.field.raw_pow(a, k, self.mod)

    def _peel(self, x) -> list[int]:
        """Exponents of a 1-unit against the filtration elements."""
        F, p = self.field, self.field.p
        vec = [0] * len(self._levels)
        for idx, (i, j) in enumerate(self._levels):
            r, k = i % F.e, i // F.e
            c = x[r][j] - (1 if r == 0 and j == 0 else 0)
            d = (c // p**k) % p
            if d:
                x = self._mul(x, self._pow(self._filt_inv[idx], d))
                vec[idx] += d
        if F.key(x, self.n) != F.key(F.raw_one(), self.n):
            raise PrecisionError("1-unit not exhausted by the filtration")
        return vec

    def _reduce(self) -> None:
        from .intlinalg import inverse_unimodular, smith_normal_form

        p = self.field.p
        rows = []
        for idx, g in enumerate(self._filt):
            rel = [-c for c in self._peel(self._pow(g, p))]
            rel[idx] += p
            rows.append(rel)
        if not rows:
            self._V, self._keep = [], []
            return
        _, S, V = smith_normal_form(rows)
        Vinv = inverse_unimodular(V)
        bound = self._exponent_bound()
        self._V = V
        self._keep = []
        for k in range(len(rows)):
            d = S[k][k]
            if d == 1:
                continue
            h = self.field.raw_one()
            for i, g in enumerate(self._filt):
                c = Vinv[k][i] % bound
                if c:
                    h = self._mul(h, self._pow(g, c))
            self.gens.append(h)
            self.orders.append(d)
            self._keep.append(k)
        if math.prod(self.orders[1:]) != self.field.q ** (self.n - 1):
            raise PrecisionError("1-unit generators do not span the expected group")

    def dlog(self, u: FieldElement) -> tuple[int, ...]:
        """Exponent vector of a unit against the generators."""
        F, n = self.field, self.n
        if n == 0:
            return ()
        if u.field is not F:
            u = embed(u, F)
        if u.valuation() != 0:
            raise FieldError("dlog needs a unit")
        if u.absprec < n:
            raise PrecisionError("unit not known modulo P^n")
        raw = u.integral_raw()
        r = F.res.elem(raw[0])
        k = F.res.dlog(r)
        tinv = F.teichmuller_raw(F.res.inv(r))
        tinv_raw = (tinv,) + ((0,) * F.f,) * (F.e - 1)
        one_unit = self._mul(F.raw_reduce(raw, self.mod), F.raw_reduce(tinv_raw, self.mod))
        vec = self._peel(one_unit)
        coords = [sum(x * self._V[i][k] for i, x in enumerate(vec)) for k in self._keep]
        return (k,) + tuple(c % d for c, d in zip(coords, self.orders[1:]))

    def element(self, exps) -> FieldElement:
        F = self.field
        x = F.raw_one()
        for g, k, d in zip(self.gens, exps, self.orders):
            if k % d:
                x = self._mul(x, self._pow(g, k % d))
        return F.from_raw(x, prec=-(-self.n // F.e))

    def generators(self) -> list[FieldElement]:
        F = self.field
        prec = -(-self.n // F.e)
        return [F.from_raw(g, prec=prec) for g in self.gens]

    def representatives(self) -> list[FieldElement]:
        """Generators as exact representatives at full working precision."""
        return [self.field.from_raw(g) for g in self.gens]

    def one_unit(self, k: int, j: int) -> FieldElement:
        """1 + pi^k t^j."""
        F = self.field
        rows = [[0] * F.f for _ in range(F.e)]
        rows[0][0] = 1
        rows[k % F.e][j] += F.p ** (k // F.e)
        return F.element(rows)

    def __repr__(self):
        return f"UnitGroup({self.field.name}, n={self.n}, orders={self.orders})"


_UG_CACHE: dict = {}


def unit_group(field: LocalField, n: int) -> UnitGroup:
    key = (field.uid, n)
    if key not in _UG_CACHE:
        _UG_CACHE[key] = UnitGroup(field, n)
    return _UG_CACHE[key]
