import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from locfac.characters import (
    AdditiveCharacter,
    QuasiCharacter,
    beta_of_theta,
    compose_norm,
    cyclo_value,
    from_beta,
    random_minimal,
)
from locfac.cyclo import legendre, zeta
from locfac.epsilon import (
    EpsilonValue,
    GLParam,
    OracleRequired,
    conductor_pi,
    g0,
    g_beta,
    gauss_sum,
    gl_epsilon,
    lambda_tame,
    tate_epsilon,
)
from locfac.langlands import MonomialParam, phi_forward
from locfac.localfield import extend_eisenstein, extend_unramified, make_base

Q3 = make_base(3, 1, 12, "Q3")
Q5 = make_base(5, 1, 12)
Q7 = make_base(7, 1, 12, "Q7")
U2 = extend_unramified(Q5, 2, "U2")
U3 = extend_unramified(Q5, 3, "U3")
R2 = extend_eisenstein(Q5, "x^2-5", "R2")
R3 = extend_eisenstein(Q5, "x^3-5", "R3")


def _quadratic(F):
    return QuasiCharacter.from_unit_function(
        F, 1, lambda u: Fraction(1 - F.res.quadratic_character(u.residue()), 4))


def test_gauss_sum_examples():
    assert gauss_sum(_quadratic(Q3)) == zeta(4, 1)
    with pytest.raises(ValueError):
        gauss_sum(QuasiCharacter.unramified(Q5, Fraction(1, 2)))


def test_g0():
    assert g0(5) == 1
    assert g0(3) == zeta(4, 1)
    for p in (3, 5, 7, 11, 13):
        assert g0(p) ** 2 == (-1) ** ((p - 1) // 2)


def test_g_beta_unimodular():
    Q3w = extend_eisenstein(Q3, "x^3-3", "W3")
    for k in (2, 4, 8):
        g = g_beta(Q3w.pi_power(-k), Q3)
        assert g * g.conj() == 1


def test_lambda_examples():
    assert lambda_tame(U3, Q5) == 1
    assert lambda_tame(extend_eisenstein(Q7, "x^3-7"), Q7) == 1
    lam = lambda_tame(extend_eisenstein(Q3, "x^2-3"), Q3)
    assert lam * lam == -1
    assert lambda_tame(U2, Q5) == -1
    assert lambda_tame(R3, Q5) == legendre(5, 3)


def test_tate_unramified_and_twist():
    rng = random.Random(2)
    # psi has level 1, so an unramified theta has exponent a - level = -1 and constant theta(pi)^-1
    eps = tate_epsilon(QuasiCharacter.unramified(Q5, Fraction(1, 3)))
    assert eps.s_exponent == -1 and eps.constant == zeta(3, -1)
    for a in (1, 2, 3):
        th = QuasiCharacter.random(U2, a, rng)
        mu = QuasiCharacter.unramified(U2, Fraction(1, 6))
        lhs = tate_epsilon(th * mu)
        rhs = tate_epsilon(th)
        # s-exponent a - level = a - 1; the constant scales by mu(pi)^(a - 1)
        assert lhs.s_exponent == rhs.s_exponent == a - 1
        assert lhs.constant == rhs.constant * zeta(6, a - 1)


def test_conductor_pi_examples():
    rng = random.Random(5)
    th = random_minimal(U2, Q5, 3, rng)
    assert conductor_pi(GLParam(U2, Q5, th, beta_of_theta(th), None)) == 6
    th = random_minimal(R3, Q5, 2, rng)
    assert conductor_pi(GLParam(R3, Q5, th, beta_of_theta(th), None)) == 4
    th = QuasiCharacter.random(U3, 1, rng)
    assert conductor_pi(GLParam(U3, Q5, th, None, None, level1=True)) == 3


def test_level_one_branch():
    rng = random.Random(6)
    th = QuasiCharacter.random(U2, 1, rng)
    chi = QuasiCharacter.unramified(Q5, Fraction(1, 4))
    g = GLParam(U2, Q5, th, None, chi, level1=True)
    trace = []
    eps = gl_epsilon(g, trace=trace)
    ref = tate_epsilon(compose_norm(chi, U2) * th)
    assert trace[0]["branch"] == "level-one"
    assert eps == EpsilonValue(-ref.constant, ref.s_exponent * 2, 5)


def test_even_branch_closed_form():
    rng = random.Random(7)
    th = random_minimal(U2, Q5, 2, rng)
    beta = beta_of_theta(th)
    trace = []
    eps = gl_epsilon(GLParam(U2, Q5, th, beta, None), trace=trace)
    assert trace[0]["branch"] == "even"
    ang, half = th.angle_half(beta)
    assert eps.constant == cyclo_value(5, (AdditiveCharacter(U2).angle(beta) - ang) % 1, -half)
    assert eps.s_exponent == 2 * (2 - 1)


def test_wild_twist_needs_oracle():
    W = extend_eisenstein(Q3, "x^3-3", "W3")
    beta = W.pi_power(-1)
    th = from_beta(beta)
    chi = QuasiCharacter.random(Q3, 3, random.Random(1))
    with pytest.raises(OracleRequired):
        gl_epsilon(GLParam(W, Q3, th, beta, chi))


def test_literal_variant_even_twist_raises():
    rng = random.Random(11)
    xi = random_minimal(R2, Q5, 2, rng)
    chi = QuasiCharacter.random(Q5, 2, rng)
    g = phi_forward(MonomialParam(R2, Q5, xi, chi))
    with pytest.raises(ValueError, match="even conductor"):
        gl_epsilon(g, variant="paper")
    gl_epsilon(g)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from(["U2", "R2", "R3"]), st.sampled_from([1, 3, 5]))
def test_gauss_unimodular(seed, name, a):
    E = {"U2": U2, "R2": R2, "R3": R3}[name]
    if E.q ** max(a - 1, 0) > 700:
        a = 3
    th = QuasiCharacter.random(E, a, random.Random(seed))
    g = gauss_sum(th)
    assert g * g.conj() == 1


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from(["U2", "R2", "R3", "U3"]), st.sampled_from([2, 3, 5]),
       st.sampled_from([0, 1, 2, 3]))
def test_s_exponent_matches_conductor(seed, name, a, ca):
    E = {"U2": U2, "R2": R2, "R3": R3, "U3": U3}[name]
    l = E.e * E.f
    if a % l == 1:
        return
    rng = random.Random(seed)
    xi = random_minimal(E, Q5, a, rng)
    chi = QuasiCharacter.random(Q5, ca, rng) if ca else None
    g = phi_forward(MonomialParam(E, Q5, xi, chi))
    eps = gl_epsilon(g)
    assert abs(eps.s_exponent) == conductor_pi(g) - l
    assert eps.constant * eps.constant.conj() == 1
