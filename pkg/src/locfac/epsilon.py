"""Gauss sums, lambda-factors and epsilon factors.

Conventions used throughout:

* ``EpsilonValue(c, k, q)`` stands for ``s -> c * q^(-(s - 1/2) k)``; ``c`` is the
  value at s = 1/2 and is unimodular for unitary data.
* Additive characters are the trace characters psi_L; ``psi.level`` is the least
  m with psi trivial on P^m (1 for every tame field).
* The abelian epsilon factor is the Tate sum with c of valuation level - a(theta).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .characters import (
    AdditiveCharacter,
    QuasiCharacter,
    beta_of_theta,
    c_of_chi,
    compose_norm,
    cyclo_value,
    is_minimal,
    sgn_value,
)
from .cyclo import CycloNumber, legendre, sqrt_q_power
from .localfield import FieldElement, FieldError, LocalField, embed

SIGN_CONVENTION = "-"


class OracleRequired(ValueError):
    """A wild lambda-factor is needed but was not supplied."""


@dataclass(frozen=True)
class EpsilonValue:
    constant: CycloNumber
    s_exponent: Fraction
    base_q: int

    def __post_init__(self):
        object.__setattr__(self, "s_exponent", Fraction(self.s_exponent))

    def rebase(self, q: int) -> EpsilonValue:
        """Express the s-dependence in powers of q (q and base_q powers of one prime)."""
        if q == self.base_q:
            return self
        p, a = _prime_power(self.base_q)
        p2, b = _prime_power(q)
        if p != p2:
            raise ValueError("bases must be powers of the same prime")
        return EpsilonValue(self.constant, self.s_exponent * a / b, q)

    def __mul__(self, other):
        if isinstance(other, EpsilonValue):
            o = other.rebase(self.base_q)
            return EpsilonValue(self.constant * o.constant, self.s_exponent + o.s_exponent, self.base_q)
        return EpsilonValue(self.constant * other, self.s_exponent, self.base_q)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> EpsilonValue:
        return EpsilonValue(self.constant**k, self.s_exponent * k, self.base_q)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EpsilonValue):
            return NotImplemented
        o = other.rebase(self.base_q)
        return self.constant == o.constant and self.s_exponent == o.s_exponent

    def to_json(self) -> dict:
        return {
            "constant": self.constant.to_json(),
            "s_exponent": f"{self.s_exponent.numerator}/{self.s_exponent.denominator}",
            "base_q": self.base_q,
            "sign_convention": SIGN_CONVENTION,
        }


def _prime_power(q: int) -> tuple[int, int]:
    p = 2
    while q % p:
        p += 1
    k = 0
    while q > 1:
        q //= p
        k += 1
    return p, k


def _q_half(F: LocalField, k: int) -> CycloNumber:
    """q_F^(k/2)."""
    return sqrt_q_power(F.p, k * F.f)


def _psi(psi, L):
    return psi if psi is not None and psi.field is L else AdditiveCharacter(L)


# ---------------------------------------------------------------------------
# Gauss sums

def _residue_digits(E: LocalField):
    return list(E.res.elements())


def gauss_sum(theta: QuasiCharacter, psi: AdditiveCharacter | None = None,
              beta: FieldElement | None = None) -> CycloNumber:
    """Normalized Gauss sum of a character of odd conductor.

    For conductor 2m+1 > 1 the additive side is paired through beta_theta, so
    that epsilon(theta) = psi(beta) theta(beta)^-1 G(theta) holds exactly.
    beta_theta is only fixed mod P^-m; pass ``beta`` to pin the digit that the
    prefactor uses.
    """
    E = theta.field
    psi = _psi(psi, E)
    a = theta.conductor
    if a % 2 == 0:
        raise ValueError("no Gauss sum for even conductor")
    if psi.level != 1:
        raise FieldError("Gauss sums are defined here for additive characters of level one")
    counts: dict[Fraction, int] = {}
    if a == 1:
        for r in _residue_digits(E):
            if any(r):
                x = E.teichmuller(r)
                ang = (psi.angle(x) - theta.unit_angle(x)) % 1
                counts[ang] = counts.get(ang, 0) + 1
    else:
        m = (a - 1) // 2
        if beta is None:
            beta = beta_of_theta(theta, psi)
        pim = E.pi_power(m)
        for r in _residue_digits(E):
            y = pim * E.teichmuller(r)
            ang = (psi.angle(beta * y) - theta.unit_angle(E.one + y)) % 1
            counts[ang] = counts.get(ang, 0) + 1
    return CycloNumber.from_angle_counts(counts) / _q_half(E, 1)


def gauss_sum_literal(theta: QuasiCharacter, psi: AdditiveCharacter | None = None) -> CycloNumber:
    """The odd-conductor sum with psi(pi^m x) taken verbatim (a diagnostic: it degenerates)."""
    E = theta.field
    psi = _psi(psi, E)
    a = theta.conductor
    m = (a - 1) // 2
    counts: dict[Fraction, int] = {}
    for r in _residue_digits(E):
        y = E.pi_power(m) * E.teichmuller(r)
        ang = (psi.angle(y) - theta.unit_angle(E.one + y)) % 1
        counts[ang] = counts.get(ang, 0) + 1
    return CycloNumber.from_angle_counts(counts) / _q_half(E, 1)


def g0(p: int) -> CycloNumber:
    """p^(-1/2) sum_a (a/p) zeta_p^a."""
    counts = {Fraction(a, p): legendre(a, p) for a in range(1, p)}
    return CycloNumber.from_angle_counts(counts) / sqrt_q_power(p, 1)


def g_beta(beta: FieldElement, base: LocalField) -> CycloNumber:
    """Quadratic Gauss sum of a minimal element in a wildly ramified step."""
    E = beta.field
    p = E.p
    if p == 2:
        raise FieldError("p = 2 is not supported")
    if (E.e // base.e) % p:
        raise FieldError("g_beta needs a wildly ramified step")
    n = 1 - beta.valuation()
    if n % 2 == 0:
        raise ValueError("g_beta needs odd n = 1 - v(beta)")
    m = (n + 1) // 2
    sign = -1 if ((p + 1) // 2) % 2 else 1
    y = beta * E.pi_power(2 * (m - 1)) * E.from_rational(Fraction(sign, 2))
    c = y.residue()
    res = E.res
    counts: dict[Fraction, int] = {}
    for x in res.elements():
        z = res.mul(c, res.mul(x, x))
        ang = Fraction(res.trace(z) % p, p)
        counts[ang] = counts.get(ang, 0) + 1
    return CycloNumber.from_angle_counts(counts) / _q_half(base, 1)


# ---------------------------------------------------------------------------
# lambda-factors of tame prime-degree steps

def lambda_tame(E: LocalField, F: LocalField, psi: AdditiveCharacter | None = None) -> CycloNumber:
    er, fr = E.e // F.e, E.f // F.f
    l = er * fr
    if l % E.p == 0:
        raise OracleRequired("lambda for wild extensions must be supplied as oracle input")
    if er == 1:
        return CycloNumber.rational((-1) ** (l - 1))
    if l != 2:
        return CycloNumber.rational(legendre(F.q, l))
    return lambda_quadratic_sum(E, F)


def lambda_quadratic_sum(E: LocalField, F: LocalField, literal: bool = False) -> CycloNumber:
    """q^(-1/2) sum_{x in k^x} sgn_{E/F}(x) psi(x) for a ramified quadratic step.

    By default psi is psi_F, which makes the value equal to
    epsilon(Ind 1) / epsilon(1_E).  With ``literal=True`` the sum uses
    psi_E(x) = psi_F(2x) instead; the two differ by the factor (2 | q).
    """
    psi = AdditiveCharacter(E if literal else F)
    counts: dict[Fraction, int] = {}
    for r in F.res.elements():
        if any(r):
            x = F.teichmuller(r)
            s = sgn_value(E, F, x)
            ang = (psi.angle(x) + (0 if s == 1 else Fraction(1, 2))) % 1
            counts[ang] = counts.get(ang, 0) + 1
    return CycloNumber.from_angle_counts(counts) / _q_half(F, 1)


# ---------------------------------------------------------------------------
# abelian (Tate) epsilon factors

def _unit_representatives(E: LocalField, a: int):
    """Raw coordinate representatives of (O_E / P_E^a)^x."""
    e, f, p = E.e, E.f, E.p
    ranges = []
    for j in range(e):
        depth = max(0, -(-(a - j) // e))
        ranges.append(depth)
    slots = [(j, i, p ** ranges[j]) for j in range(e) for i in range(f) if ranges[j] > 0]
    for values in itertools.product(*(range(m) for _, _, m in slots)):
        rows = [[0] * f for _ in range(e)]
        for (j, i, _), v in zip(slots, values):
            rows[j][i] = v
        if any(x % p for x in rows[0]):
            yield rows


def tate_epsilon(theta: QuasiCharacter, psi: AdditiveCharacter | None = None) -> EpsilonValue:
    """epsilon(theta, s, psi) by direct summation over (O/P^a)^x."""
    E = theta.field
    psi = _psi(psi, E)
    a = theta.conductor
    L = psi.level
    c = E.pi_power(L - a)
    tc_angle, tc_half = theta.angle_half(c)
    if a == 0:
        const = cyclo_value(E.p, (psi.angle(c) - tc_angle) % 1, -tc_half)
        return EpsilonValue(const, Fraction(a - L), E.q)
    theta_min = theta.at_level(a) if theta.level > a else theta
    # psi(c x) is linear in the coordinates of x
    coord_angles = []
    for j in range(E.e):
        for i in range(E.f):
            coord_angles.append(psi.angle(c * E.basis_element(i, j)))
    counts: dict[Fraction, int] = {}
    group = theta_min.group
    imgs = theta_min.images
    for rows in _unit_representatives(E, a):
        x = E.element(rows)
        vec = group.dlog(x)
        th = sum((k * g for k, g in zip(vec, imgs)), Fraction(0))
        ps = sum((v * ca for row_j, row in enumerate(rows) for v, ca in
                  zip(row, coord_angles[row_j * E.f:(row_j + 1) * E.f]) if v), Fraction(0))
        ang = (ps - th) % 1
        counts[ang] = counts.get(ang, 0) + 1
    total = CycloNumber.from_angle_counts(counts)
    const = total * cyclo_value(E.p, -tc_angle, -tc_half) / _q_half(E, a)
    return EpsilonValue(const, Fraction(a - L), E.q)


# ---------------------------------------------------------------------------
# GL_l parameters and their epsilon factors

@dataclass
class GLParam:
    """chi * pi_F(beta, theta) (or chi * pi_F(theta) at level one) for a degree-l step E/F."""

    E: LocalField
    F: LocalField
    theta: QuasiCharacter
    beta: FieldElement | None = None
    chi: QuasiCharacter | None = None
    level1: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.chi is None:
            self.chi = QuasiCharacter.trivial(self.F)
        if self.level1:
            if self.E.e != self.F.e:
                raise ValueError("level-one parameters need an unramified step")
            if self.theta.conductor > 1:
                raise ValueError("level-one parameters need theta trivial on 1 + P_E")
        elif self.beta is None:
            raise ValueError("beta is required unless level1")
        elif not is_minimal(self.beta, self.F):
            raise ValueError("beta is not minimal")

    @property
    def degree(self) -> int:
        return (self.E.e // self.F.e) * (self.E.f // self.F.f)

    @property
    def e(self) -> int:
        return self.E.e // self.F.e

    @property
    def f(self) -> int:
        return self.E.f // self.F.f

    @property
    def n(self) -> int:
        if self.level1:
            return self.theta.conductor
        return 1 - self.beta.valuation()

    @property
    def is_wild(self) -> bool:
        return self.degree % self.E.p == 0 and self.e > 1

    def twisted(self, mu: QuasiCharacter) -> GLParam:
        return GLParam(self.E, self.F, self.theta, self.beta, self.chi * mu, self.level1, dict(self.meta))

    def n_chi(self) -> int:
        a = self.chi.conductor
        return max(self.n, self.e * (a - 1) + 1) if a >= 1 else self.n

    def to_json(self) -> dict:
        return {
            "E": self.E.name, "F": self.F.name, "degree": self.degree, "e": self.e, "f": self.f,
            "level1": self.level1, "n": self.n,
            "beta": None if self.beta is None else self.beta.to_json(),
            "theta": self.theta.to_json(), "chi": self.chi.to_json(),
        }


def conductor_pi(param: GLParam) -> int:
    """Conductor exponent of chi * pi, chi absorbed through n(chi)."""
    l = param.degree
    nchi = param.n_chi()
    if param.level1 and nchi <= 1:
        return l * nchi
    return param.f * (nchi - 1) + l


def gl_epsilon(param: GLParam, psi: AdditiveCharacter | None = None,
               wild_lambda: CycloNumber | None = None, trace: list | None = None,
               variant: str = "corrected") -> EpsilonValue:
    """epsilon(chi * pi, s, psi_F) for a supercuspidal parameter.

    ``variant="paper"`` applies the three-case formula literally.  The default
    ``"corrected"`` differs in three places.  The tame odd branch over a totally
    ramified E of odd degree carries an extra lambda_E, and its Gauss sum is
    taken of chi_E * theta (the two agree unless a(chi_E) = n).  The tame
    twist branch drops lambda_E, with the Gauss factor taken to be 1 for
    even a(chi).
    """
    if variant not in ("paper", "corrected"):
        raise ValueError(f"unknown variant {variant!r}")
    E, F = param.E, param.F
    psiF = _psi(psi, F)
    psiE = AdditiveCharacter(E)
    l = param.degree
    chi = param.chi
    n = param.n
    nchi = param.n_chi()
    chiE = compose_norm(chi, E)
    xi = chiE * param.theta
    record = {"n": n, "n_chi": nchi, "degree": l, "e": param.e, "f": param.f}
    corrected = variant == "corrected"

    if param.level1 and nchi <= 1:
        tate = tate_epsilon(xi, psiE)
        sign = (-1) ** (l - 1)
        out = EpsilonValue(tate.constant * sign, tate.s_exponent * param.f, F.q)
        record["branch"] = "level-one"
    else:
        c = c_of_chi(chi, psiF)
        beta = param.beta if param.beta is not None else E.zero
        beta_chi = beta + embed(c, E)
        ang, half = xi.angle_half(beta_chi)
        const = cyclo_value(E.p, (psiE.angle(beta_chi) - ang) % 1, -half)
        s_exp = Fraction(-param.f * beta_chi.valuation())
        if nchi % 2 == 0:
            record["branch"] = "even"
        elif nchi == n:
            if param.is_wild:
                G = g_beta(param.beta, F)
                record["branch"] = "odd-wild"
            else:
                # chi_E may reach level n; the sum must see the twisted character
                G = gauss_sum(xi, psiE, beta_chi) if corrected else gauss_sum(param.theta, psiE)
                record["branch"] = "odd-tame"
                if corrected and param.e == l and l % 2:
                    G = G * lambda_tame(E, F, psiF)
            const = const * G
        else:
            record["branch"] = "odd-twist"
            if corrected and not param.is_wild:
                if chi.conductor % 2:
                    const = const * gauss_sum(chi, psiF) ** l
            else:
                if param.is_wild:
                    if wild_lambda is None:
                        raise OracleRequired("wild lambda-factor required for the n(chi) > n branch")
                    lam = wild_lambda
                else:
                    lam = lambda_tame(E, F, psiF)
                const = const * lam * gauss_sum_twist(chi, psiF) ** l
        out = EpsilonValue(const, s_exp, F.q)
    record["s_exponent"] = str(out.s_exponent)
    if trace is not None:
        trace.append(record)
    return out


def gauss_sum_twist(chi: QuasiCharacter, psi: AdditiveCharacter | None = None) -> CycloNumber:
    """G(chi, psi_F) as used in the n(chi) > n branch; undefined for even conductor."""
    if chi.conductor % 2 == 0:
        raise ValueError("no Gauss sum for even conductor")
    return gauss_sum(chi, psi)
