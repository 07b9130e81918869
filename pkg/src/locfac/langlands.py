"""Parameter-level correspondence, tame base change and epsilon factors of pairs.

A monomial parameter ``(E/F, xi, chi)`` stands for the Weil-group
representation ``chi * Ind_{E}^{F} xi``.  Under the correspondence it goes to
the GL parameter ``chi * pi_F(beta, theta)`` with ``theta = delta_E^{-1} xi``:
the rectifier sits on the Galois side only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .characters import (
    AdditiveCharacter,
    QuasiCharacter,
    Delta_K,
    beta_of_theta,
    compose_norm,
    delta_E,
    is_generic,
    restrict,
)
from .cyclo import CycloNumber
from .epsilon import EpsilonValue, GLParam, OracleRequired, gl_epsilon, lambda_tame, tate_epsilon
from .localfield import (
    FieldElement,
    FieldError,
    LocalField,
    compositum,
    embed,
    relative_degrees,
)


class ConfigurationError(ValueError):
    """Unsupported tower or parameter combination."""


@dataclass
class MonomialParam:
    """chi * Ind_{W_E}^{W_F} xi for a prime-degree step E/F."""

    E: LocalField
    F: LocalField
    xi: QuasiCharacter
    chi: QuasiCharacter | None = None

    def __post_init__(self):
        if self.chi is None:
            self.chi = QuasiCharacter.trivial(self.F)
        if self.xi.field is not self.E or self.chi.field is not self.F:
            raise ConfigurationError("characters live on the wrong fields")

    @property
    def degree(self) -> int:
        e, f = relative_degrees(self.E, self.F)
        return e * f

    @property
    def e(self) -> int:
        return relative_degrees(self.E, self.F)[0]

    def to_json(self) -> dict:
        return {"E": self.E.name, "F": self.F.name, "xi": self.xi.to_json(), "chi": self.chi.to_json()}


def _is_tame(E: LocalField, F: LocalField) -> bool:
    e, f = relative_degrees(E, F)
    return (e * f) % E.p != 0


def _rectifier(E: LocalField, F: LocalField, beta: FieldElement | None) -> QuasiCharacter:
    if relative_degrees(E, F)[0] == 2:
        return delta_E(E, F, beta)
    return delta_E(E, F)


def phi_forward(m: MonomialParam) -> GLParam:
    """The GL parameter attached to chi * Ind(xi)."""
    E, F = m.E, m.F
    if not _is_tame(E, F):
        raise ConfigurationError("phi_forward needs a tame step")
    l = m.degree
    a = m.xi.conductor
    if not is_generic(m.xi, l):
        raise ValueError(f"xi is not generic: conductor {a} = 1 mod {l}")
    if a <= 1:
        if relative_degrees(E, F)[0] != 1:
            raise ConfigurationError("level-one parameters need an unramified step")
        theta = m.xi / delta_E(E, F)
        return GLParam(E, F, theta, None, m.chi, level1=True)
    beta = beta_of_theta(m.xi)
    theta = m.xi / _rectifier(E, F, beta)
    return GLParam(E, F, theta, beta, m.chi)


def phi_inverse(g: GLParam) -> MonomialParam:
    if g.level1:
        xi = g.theta * delta_E(g.E, g.F)
    else:
        xi = g.theta * _rectifier(g.E, g.F, g.beta)
    return MonomialParam(g.E, g.F, xi, g.chi)


def det_induced(m: MonomialParam) -> QuasiCharacter:
    """det(chi * Ind xi) = Delta_{E/F} * xi|_F * chi^l."""
    if not _is_tame(m.E, m.F):
        raise ConfigurationError("det_induced needs a tame step")
    return Delta_K(m.E, m.F) * restrict(m.xi, m.F) * m.chi ** m.degree


def central_char(g: GLParam) -> QuasiCharacter:
    return restrict(g.theta, g.F) * g.chi ** g.degree


# ---------------------------------------------------------------------------
# base change

def _check_lift(E: LocalField, F: LocalField, K: LocalField):
    eK, fK = relative_degrees(K, F)
    eE, fE = relative_degrees(E, F)
    if math.gcd(eK * fK, eE * fE) != 1:
        raise ConfigurationError("K and E must have coprime degrees over F")
    if (eK * fK) % F.p == 0:
        raise ConfigurationError("K/F must be tame")


def lift_field(E: LocalField, K: LocalField) -> LocalField:
    """EK, cached on E so repeated lifts share one field object."""
    cache = E.__dict__.setdefault("_composita", {})
    if K.uid not in cache:
        try:
            cache[K.uid] = compositum(E, K, name=f"{E.name}{K.name}")
        except FieldError as exc:
            raise ConfigurationError(str(exc)) from exc
    return cache[K.uid]


def base_change(g: GLParam, K: LocalField) -> GLParam:
    """The lift of chi * pi_F(beta, theta) to GL_l(K)."""
    E, F = g.E, g.F
    _check_lift(E, F, K)
    EK = lift_field(E, K)
    theta = compose_norm(g.theta, EK)
    if g.e == 2:
        theta = theta * compose_norm(Delta_K(K, F), EK)
    chi = compose_norm(g.chi, K)
    beta = None if g.level1 else embed(g.beta, EK)
    return GLParam(EK, K, theta, beta, chi, level1=g.level1)


def mackey_restrict(m: MonomialParam, K: LocalField) -> MonomialParam:
    """(chi * Ind_E^F xi) restricted to W_K = chi_K * Ind_{EK}^{K} (xi o N_{EK/E})."""
    _check_lift(m.E, m.F, K)
    EK = lift_field(m.E, K)
    return MonomialParam(EK, K, compose_norm(m.xi, EK), compose_norm(m.chi, K))


def same_param(a: GLParam, b: GLParam) -> bool:
    """Exact equality of GL parameters: fields, characters and beta up to what theta sees."""
    if a.E is not b.E or a.F is not b.F or a.level1 != b.level1:
        return False
    if a.theta != b.theta or a.chi != b.chi:
        return False
    if a.level1:
        return True
    n = a.n
    m = (n + 1) // 2
    diff = a.beta - b.beta
    if diff.is_zero():
        return True
    return diff.valuation() >= AdditiveCharacter(a.E).level - m


def filtration_generators(L: LocalField, n: int) -> list[tuple[str, FieldElement]]:
    """A generating set of (O_L / P_L^n)^x: a Teichmuller generator and the 1 + pi^k t^j."""
    if n < 1:
        return []
    gens = [("teichmuller", L.teichmuller(L.res.generator))]
    for k in range(1, n):
        for j in range(L.f):
            rows = [[0] * L.f for _ in range(L.e)]
            rows[0][0] = 1
            rows[k % L.e][j] += L.p ** (k // L.e)
            gens.append((f"1+pi^{k}t^{j}", L.element(rows)))
    return gens


def identity_32(E: LocalField, K: LocalField, F: LocalField, beta: FieldElement, n: int) -> list[dict]:
    """Compare both sides of delta_{EK/K} (Delta_K o N_{EK/F})^(e-1) = delta_E o N_{EK/E}.

    Returns one row per generator of (O_EK / P^n)^x and one for the uniformizer.
    """
    EK = lift_field(E, K)
    e = relative_degrees(E, F)[0]
    beta_K = embed(beta, EK)
    lhs = _rectifier(EK, K, beta_K) * compose_norm(Delta_K(K, F), EK) ** (e - 1)
    rhs = compose_norm(_rectifier(E, F, beta), EK)
    rows = []
    for label, u in filtration_generators(EK, n):
        rows.append({"generator": label, "lhs": lhs.angle_half(u), "rhs": rhs.angle_half(u)})
    pi = EK.uniformizer
    rows.append({"generator": "uniformizer", "lhs": lhs.angle_half(pi), "rhs": rhs.angle_half(pi)})
    for r in rows:
        r["ok"] = r["lhs"] == r["rhs"]
    return rows


def remark_36(K: LocalField, F: LocalField) -> bool:
    """Delta_K o N_{K/F} equals delta_K (odd ramification index)."""
    lhs = compose_norm(Delta_K(K, F), K)
    rhs = delta_E(K, F)
    return lhs == rhs


# ---------------------------------------------------------------------------
# epsilon factors of pairs

@dataclass
class PairInput:
    """pi1 of degree l, pi2 = phi_forward(m2) of degree l' with l' not in {l, p}."""

    pi1: GLParam
    m2: MonomialParam
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        l, l2 = self.pi1.degree, self.m2.degree
        p = self.pi1.F.p
        if l == l2 or l2 == p:
            raise ConfigurationError("pair epsilon needs l' different from l and p")
        if self.pi1.F is not self.m2.F:
            raise ConfigurationError("both parameters must share the base field")


def pair_epsilon(inp: PairInput, w: int | None = None, wild_lambda: CycloNumber | None = None,
                 trace: list | None = None, variant: str = "corrected",
                 calls: list | None = None) -> EpsilonValue:
    """epsilon(pi1 x pi2, s, psi_F) reduced to a GL_l epsilon factor over E2.

    ``w`` is the exponent of lambda_{E2}; it defaults to l = dim pi1.
    """
    pi1, m2 = inp.pi1, inp.m2
    E2, F = m2.E, m2.F
    l = pi1.degree
    w = l if w is None else w
    lifted = base_change(pi1, E2)
    twist = compose_norm(m2.chi, E2) * m2.xi
    inner = lifted.twisted(twist)
    records: list = []
    eps = gl_epsilon(inner, wild_lambda=wild_lambda, trace=records, variant=variant)
    if calls is not None:
        calls.append((inner, eps, records))
    lam = lambda_tame(E2, F)
    f2 = relative_degrees(E2, F)[1]
    out = EpsilonValue(eps.constant * lam**w, eps.s_exponent * f2, F.q)
    if trace is not None:
        trace.append({
            "route": E2.name,
            "tower": [F.name, E2.name, lifted.E.name],
            "lambda": lam.to_json(approx=True),
            "lambda_exponent": w,
            "gl_epsilon": records,
            "inner_conductor": inner.theta.conductor,
        })
    return out


def pair_epsilon_galois(m1: MonomialParam, m2: MonomialParam) -> EpsilonValue:
    """epsilon(sigma1 x sigma2) = lambda_{E1E2/F} epsilon(xi1 xi2 chi1 chi2 over E1E2).

    Both degrees coprime, so sigma1 x sigma2 is induced from the compositum.
    """
    E1, E2, F = m1.E, m2.E, m1.F
    M = lift_field(E2, E1)
    xi = compose_norm(m1.xi, M) * compose_norm(m2.xi, M) * compose_norm(m1.chi * m2.chi, M)
    lam_M_E1 = lambda_tame(M, E1)
    lam_E1 = lambda_tame(E1, F)
    l2 = m2.degree
    lam = lam_M_E1 * lam_E1**l2
    tate = tate_epsilon(xi)
    fM = relative_degrees(M, F)[1]
    return EpsilonValue(tate.constant * lam, tate.s_exponent * fM, F.q)


__all__ = [
    "ConfigurationError", "MonomialParam", "PairInput", "phi_forward", "phi_inverse",
    "det_induced", "central_char", "base_change", "mackey_restrict", "same_param",
    "identity_32", "remark_36", "pair_epsilon", "pair_epsilon_galois", "lift_field",
    "OracleRequired",
]
