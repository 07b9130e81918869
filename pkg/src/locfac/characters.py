"""Additive and multiplicative characters of local fields.

Character values are handled as rational angles (value = exp(2 pi i angle))
together with an integer half-power of p for the value at the uniformizer.
They are converted to :class:`CycloNumber` only at the boundary.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from functools import cached_property

from .cyclo import CycloNumber, sqrt_q_power
from .intlinalg import solve_mod
from .localfield import (
    FieldElement,
    FieldError,
    LocalField,
    PrecisionError,
    Relative,
    embed,
    hilbert2,
    unit_group,
)

HALF = Fraction(1, 2)


def cyclo_value(p: int, angle: Fraction, half: int = 0) -> CycloNumber:
    value = CycloNumber.root_of_unity(angle)
    return value * sqrt_q_power(p, half) if half else value


def sign_angle(s: int) -> Fraction:
    return Fraction(0) if s == 1 else HALF


class AdditiveCharacter:
    """psi_L = psi_{Q_p} o Tr_{L/Q_p} where psi_{Q_p}(x) = exp(2 pi i {x})."""

    def __init__(self, field: LocalField):
        self.field = field

    @property
    def level(self) -> int:
        """Least m with psi trivial on P^m."""
        return self.field.psi_level

    def angle(self, x: FieldElement) -> Fraction:
        if x.field is not self.field:
            x = embed(x, self.field)
        return self.field.psi_angle(x)

    def __call__(self, x: FieldElement) -> CycloNumber:
        return CycloNumber.root_of_unity(self.angle(x))

    def __repr__(self):
        return f"AdditiveCharacter({self.field.name}, level={self.level})"


def psi_standard(F: LocalField) -> AdditiveCharacter:
    if F.e != 1:
        raise FieldError("standard additive character is defined on the unramified base")
    return AdditiveCharacter(F)


def psi_lift(psi: AdditiveCharacter, E: LocalField) -> AdditiveCharacter:
    """psi o Tr_{E/F}; the trace is transitive, so this is the trace-to-Q_p character of E."""
    return AdditiveCharacter(E)


class QuasiCharacter:
    """A character of L^x given by its values on unit_group(L, level) and on the uniformizer.

    ``images[i]`` is the angle of the value on the i-th generator; the value on
    the uniformizer is ``exp(2 pi i pi_angle) * p^(pi_half/2)``.
    """

    def __init__(self, field: LocalField, level: int, images, pi_angle=0, pi_half: int = 0):
        group = unit_group(field, level)
        images = tuple(Fraction(a) % 1 for a in images)
        if len(images) != len(group.gens):
            raise ValueError("wrong number of generator images")
        for a, d in zip(images, group.orders):
            if (a * d).denominator != 1:
                raise ValueError(f"image angle {a} incompatible with generator order {d}")
        self.field = field
        self.level = level
        self.images = images
        self.pi_angle = Fraction(pi_angle) % 1
        self.pi_half = int(pi_half)

    # construction helpers ---------------------------------------------------
    @classmethod
    def trivial(cls, field: LocalField) -> QuasiCharacter:
        return cls(field, 0, ())

    @classmethod
    def unramified(cls, field: LocalField, pi_angle=0, pi_half: int = 0) -> QuasiCharacter:
        return cls(field, 0, (), pi_angle, pi_half)

    @classmethod
    def from_unit_function(cls, field, level, fn, pi_angle=0, pi_half=0) -> QuasiCharacter:
        """Build from a function giving the angle on units (must be a character of level <= level)."""
        group = unit_group(field, level)
        images = [fn(u) for u in group.representatives()]
        return cls(field, level, images, pi_angle, pi_half)

    @classmethod
    def random(cls, field: LocalField, conductor: int, rng: random.Random,
               pi_angle=None, max_tries: int = 200) -> QuasiCharacter:
        """A random unitary character of exact conductor."""
        group = unit_group(field, conductor)
        for _ in range(max_tries):
            imgs = [Fraction(rng.randrange(d), d) for d in group.orders]
            pa = Fraction(rng.randrange(12), 12) if pi_angle is None else pi_angle
            chi = cls(field, conductor, imgs, pa)
            if chi.conductor == conductor:
                return chi
        raise ValueError(f"no character of conductor {conductor} found")

    # evaluation -----------------------------------------------------------------
    @property
    def group(self):
        return unit_group(self.field, self.level)

    def unit_angle(self, u: FieldElement) -> Fraction:
        if self.level == 0:
            return Fraction(0)
        vec = self.group.dlog(u)
        return sum((k * a for k, a in zip(vec, self.images)), Fraction(0)) % 1

    def angle_half(self, x: FieldElement) -> tuple[Fraction, int]:
        """(angle, half power of p) of theta(x)."""
        F = self.field
        if x.field is not F:
            x = embed(x, F)
        v = x.valuation()
        u = x * F.pi_power(-v) if v else x
        a = (self.unit_angle(u) + v * self.pi_angle) % 1
        return a, v * self.pi_half

    def __call__(self, x: FieldElement) -> CycloNumber:
        a, h = self.angle_half(x)
        return cyclo_value(self.field.p, a, h)

    @property
    def pi_value(self) -> CycloNumber:
        return cyclo_value(self.field.p, self.pi_angle, self.pi_half)

    @property
    def is_unitary(self) -> bool:
        return self.pi_half == 0

    # conductor -----------------------------------------------------------------
    @cached_property
    def conductor(self) -> int:
        if self.level == 0:
            return 0
        F = self.field
        g = self.group
        for k in range(self.level - 1, 0, -1):
            for j in range(F.f):
                if self.unit_angle(g.one_unit(k, j)) != 0:
                    return k + 1
        return 1 if self.images[0] != 0 else 0

    def is_generic(self, l: int) -> bool:
        return is_generic(self, l)

    # algebra ----------------------------------------------------------------------
    def at_level(self, n: int) -> QuasiCharacter:
        """The same character described against unit_group(field, n)."""
        if n == self.level:
            return self
        if n < self.conductor:
            raise ValueError("level below conductor")
        return QuasiCharacter.from_unit_function(self.field, n, self.unit_angle, self.pi_angle, self.pi_half)

    def _aligned(self, other: QuasiCharacter):
        if other.field is not self.field:
            raise FieldError("characters of different fields")
        n = max(self.level, other.level)
        return self.at_level(n), other.at_level(n)

    def __mul__(self, other: QuasiCharacter) -> QuasiCharacter:
        a, b = self._aligned(other)
        return QuasiCharacter(
            a.field, a.level, [x + y for x, y in zip(a.images, b.images)],
            a.pi_angle + b.pi_angle, a.pi_half + b.pi_half,
        )

    def inverse(self) -> QuasiCharacter:
        return QuasiCharacter(self.field, self.level, [-x for x in self.images], -self.pi_angle, -self.pi_half)

    def __truediv__(self, other: QuasiCharacter) -> QuasiCharacter:
        return self * other.inverse()

    def __pow__(self, k: int) -> QuasiCharacter:
        return QuasiCharacter(self.field, self.level, [k * x for x in self.images], k * self.pi_angle, k * self.pi_half)

    def minimal(self) -> QuasiCharacter:
        """Re-expressed at level = conductor."""
        return self.at_level(self.conductor)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QuasiCharacter) or other.field is not self.field:
            return False
        a, b = self._aligned(other)
        return a.images == b.images and a.pi_angle == b.pi_angle and a.pi_half == b.pi_half

    def __hash__(self):
        m = self.minimal()
        return hash((self.field.uid, m.images, m.pi_angle, m.pi_half))

    def to_json(self) -> dict:
        m = self.minimal()
        return {
            "field": self.field.name,
            "conductor": m.conductor,
            "generator_orders": list(m.group.orders),
            "images": [[a.denominator, a.numerator] for a in m.images],
            "uniformizer": {"root": [m.pi_angle.denominator, m.pi_angle.numerator], "p_half_power": m.pi_half},
        }

    def __repr__(self):
        return f"QuasiCharacter({self.field.name}, a={self.conductor}, images={[str(x) for x in self.images]}, pi={self.pi_angle}, half={self.pi_half})"


def is_generic(theta: QuasiCharacter, l: int) -> bool:
    return theta.conductor % l != 1


# ---------------------------------------------------------------------------
# characters attached to elements

def from_beta(beta: FieldElement, psi: AdditiveCharacter | None = None, tame_angle=0,
              pi_angle=0, pi_half: int = 0) -> QuasiCharacter:
    """A character theta with theta(1+x) = psi(beta x) for v(x) >= [(n+1)/2], n = 1 - v(beta).

    The values on the remaining units are fixed deterministically; ``tame_angle``
    prescribes the value on the Teichmuller generator.
    """
    E = beta.field
    psi = psi or AdditiveCharacter(E)
    n = 1 - beta.valuation()
    if n < 2:
        raise ValueError("beta must have valuation <= -1")
    m = (n + 1) // 2
    level = max(psi.level - beta.valuation(), m, 1)
    group = unit_group(E, level)
    orders = group.orders
    N = math.lcm(*orders)
    rows, rhs = [], []
    pi = E.uniformizer
    for k in range(m, level):
        for j in range(E.f):
            u = group.one_unit(k, j)
            x = u - 1
            rows.append(list(group.dlog(u)))
            rhs.append(int(psi.angle(beta * x) * N) % N)
    for i, d in enumerate(orders):
        r = [0] * len(orders)
        r[i] = d
        rows.append(r)
        rhs.append(0)
    r = [0] * len(orders)
    r[0] = 1
    rows.append(r)
    rhs.append(int(Fraction(tame_angle) * N) % N)
    sol = solve_mod(rows, rhs, N)
    if sol is None:
        raise ValueError("no character matches beta on the prescribed range")
    return QuasiCharacter(E, level, [Fraction(y, N) for y in sol], pi_angle, pi_half)


def beta_of_theta(theta: QuasiCharacter, psi: AdditiveCharacter | None = None) -> FieldElement:
    """Canonical beta_theta: Teichmuller digits on pi^(L-a) .. pi^(L-1-[(a+1)/2])."""
    E = theta.field
    psi = psi or AdditiveCharacter(E)
    a = theta.conductor
    if a < 2:
        raise ValueError("beta_theta needs conductor >= 2")
    L = psi.level
    m = (a + 1) // 2
    group = unit_group(E, max(theta.level, a))
    beta = E.zero
    for k in range(L - a, L - m):
        xs = []
        for j in range(E.f):
            u = group.one_unit(L - 1 - k, j)
            xs.append((u, u - 1))
        targets = [(theta.unit_angle(u) - psi.angle(beta * x)) % 1 for u, x in xs]
        # d x lies in P^(L-1), where psi is additive in the residue of d: solve mod p
        pk = E.pi_power(k)
        cols = [[psi.angle(E.basis_element(i, 0) * pk * x) for _, x in xs] for i in range(E.f)]
        rows = [[int(cols[i][j] * E.p) % E.p for i in range(E.f)] for j in range(E.f)]
        rhs = [(t * E.p) for t in targets]
        if any(r.denominator != 1 for r in rhs):
            raise PrecisionError("no digit reproduces the character; precision or input error")
        sol = solve_mod(rows, [int(r) % E.p for r in rhs], E.p)
        if sol is None:
            raise PrecisionError("no digit reproduces the character; precision or input error")
        digit = E.teichmuller(E.res.elem(sol)) * pk
        if [psi.angle(digit * x) for _, x in xs] != targets:
            raise PrecisionError("digit check failed")
        beta = beta + digit
    if beta.is_zero():
        raise ValueError("character is not of the expected form")
    return beta


def c_of_chi(chi: QuasiCharacter, psi: AdditiveCharacter | None = None) -> FieldElement:
    if chi.conductor <= 1:
        return chi.field.zero
    return beta_of_theta(chi, psi)


def is_minimal(beta: FieldElement, base: LocalField) -> bool:
    E = beta.field
    e = E.e // base.e
    fr = E.f // base.f
    v = beta.valuation()
    if math.gcd(v, e) != 1:
        return False
    y = beta**e * embed(base.pi_power(-v), E)
    r = y.residue()
    res = E.res
    qF = base.q
    x = r
    for d in range(1, fr + 1):
        x = res.pow(x, qF)
        if x == r:
            return d == fr
    return False


# ---------------------------------------------------------------------------
# functoriality

def compose_norm(theta: QuasiCharacter, L: LocalField) -> QuasiCharacter:
    """theta o N_{L/E} for an extension L of E = theta.field."""
    E = theta.field
    rel = Relative(L, E)
    er = L.e // E.e
    a = theta.conductor
    level = 0 if a == 0 else er * (a - 1) + 1
    fn = lambda u: theta.unit_angle(rel.norm(u))  # noqa: E731
    pa, ph = theta.angle_half(rel.norm(L.uniformizer))
    chi = QuasiCharacter.from_unit_function(L, level, fn, pa, ph)
    return chi.minimal()


def restrict(theta: QuasiCharacter, F: LocalField) -> QuasiCharacter:
    """theta restricted to a subfield F."""
    E = theta.field
    er = E.e // F.e
    a = theta.conductor
    level = 0 if a == 0 else -(-a // er)
    fn = lambda u: theta.unit_angle(embed(u, E))  # noqa: E731
    pa, ph = theta.angle_half(embed(F.uniformizer, E))
    return QuasiCharacter.from_unit_function(F, level, fn, pa, ph).minimal()


def twist_value(chi: QuasiCharacter, E: LocalField) -> QuasiCharacter:
    """chi_E = chi o N_{E/F}."""
    return compose_norm(chi, E)


# ---------------------------------------------------------------------------
# quadratic characters

def quadratic_generator(E: LocalField, F: LocalField) -> FieldElement:
    er, fr = E.e // F.e, E.f // F.f
    if er * fr != 2:
        raise FieldError("not a quadratic extension")
    return E.t if fr == 2 else E.uniformizer


def quadratic_discriminant(E: LocalField, F: LocalField) -> FieldElement:
    w = quadratic_generator(E, F)
    rel = Relative(E, F)
    tr, nm = rel.trace(w), rel.norm(w)
    return tr * tr - nm * 4


def sgn(E: LocalField, F: LocalField) -> QuasiCharacter:
    """The quadratic character of F^x with kernel N(E^x)."""
    D = quadratic_discriminant(E, F)
    fn = lambda u: sign_angle(hilbert2(u, D))  # noqa: E731
    return QuasiCharacter.from_unit_function(F, 1, fn, sign_angle(hilbert2(F.uniformizer, D))).minimal()


def sgn_value(E: LocalField, F: LocalField, x: FieldElement) -> int:
    return hilbert2(x, quadratic_discriminant(E, F))


def delta_K_discriminant(K: LocalField, F: LocalField) -> FieldElement:
    """Discriminant (up to squares) of K/F from its Eisenstein polynomial: (-1)^(d(d-1)/2) N(g'(pi))."""
    d = K.e // F.e
    rows = [tuple(j * c for c in K.g[j]) for j in range(1, K.e)]
    rows.append((K.e,) + (0,) * (K.f - 1))
    gprime = K.element(rows)
    disc = Relative(K, F).norm(gprime)
    return -disc if (d * (d - 1) // 2) % 2 else disc


def Delta_K(K: LocalField, F: LocalField) -> QuasiCharacter:
    """det of the permutation representation Ind_{W_K}^{W_F} 1, as a character of F^x."""
    er, fr = K.e // F.e, K.f // F.f
    d = er * fr
    if K.p == 2 or d % K.p == 0:
        raise FieldError("Delta_K needs a tame extension and odd p")
    if er == 1:
        return QuasiCharacter.unramified(F, sign_angle((-1) ** (d - 1)))
    if fr != 1:
        raise FieldError("Delta_K is implemented for prime-degree steps")
    if K.parent is not F:
        raise FieldError("Delta_K expects K to be an Eisenstein step over F")
    D = delta_K_discriminant(K, F)
    fn = lambda u: sign_angle(hilbert2(u, D))  # noqa: E731
    return QuasiCharacter.from_unit_function(F, 1, fn, sign_angle(hilbert2(F.uniformizer, D))).minimal()


def delta_E(E: LocalField, F: LocalField, beta: FieldElement | None = None, lam: CycloNumber | None = None) -> QuasiCharacter:
    """The rectifying character: lambda^v(x) when e != 2; for e = 2 it is trivial on
    1 + P_E, agrees with sgn_{E/F} on F^x and takes the value lambda at beta."""
    from .epsilon import lambda_tame

    er = E.e // F.e
    lam = lambda_tame(E, F) if lam is None else lam
    lam_angle = lam.as_root_of_unity()
    if lam_angle is None:
        raise ValueError("lambda is not a root of unity")
    if er != 2:
        return QuasiCharacter.unramified(E, lam_angle)
    if beta is None:
        raise ValueError("delta_E for a ramified quadratic step needs beta")
    D = quadratic_discriminant(E, F)
    res = E.res
    g = res.generator
    # the Teichmuller generator lies in F; sgn there decides its image
    omega_F = None
    for r in F.res.elements():
        if any(r):
            cand = F.teichmuller(r)
            if embed(cand, E).residue() == g:
                omega_F = cand
                break
    s_omega = sign_angle(hilbert2(omega_F, D))
    v = beta.valuation()
    if v % 2 == 0:
        raise ValueError("beta must have odd valuation in a ramified quadratic step")
    k = res.dlog(((beta * E.pi_power(-v)).residue()))
    u = embed(F.uniformizer, E) * E.pi_power(-2)
    j = res.dlog(u.residue())
    s1 = (lam_angle - k * s_omega) % 1
    s2 = (sign_angle(hilbert2(F.uniformizer, D)) - j * s_omega) % 1
    r = (v - 1) // 2
    z = (s1 - r * s2) % 1
    if (2 * z - s2) % 1 != 0:
        raise ValueError("no such character: constraints for delta_E are inconsistent")
    return QuasiCharacter(E, 1, [s_omega], z)


def random_minimal(E: LocalField, F: LocalField, conductor: int, rng: random.Random,
                   pi_angle=None, max_tries: int = 200) -> QuasiCharacter:
    """A random character of the given conductor >= 2 whose beta_theta is E/F-minimal."""
    for _ in range(max_tries):
        theta = QuasiCharacter.random(E, conductor, rng, pi_angle)
        if is_minimal(beta_of_theta(theta), F):
            return theta
    raise ValueError("no character with minimal beta found")
