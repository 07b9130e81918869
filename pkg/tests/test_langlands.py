import random

import pytest
from hypothesis import given, settings, strategies as st

from locfac.characters import Delta_K, QuasiCharacter, compose_norm, random_minimal
from locfac.epsilon import gl_epsilon, lambda_tame, tate_epsilon
from locfac.langlands import (
    ConfigurationError,
    MonomialParam,
    PairInput,
    base_change,
    central_char,
    det_induced,
    identity_32,
    lift_field,
    mackey_restrict,
    pair_epsilon,
    phi_forward,
    phi_inverse,
    remark_36,
    same_param,
)
from locfac.localfield import extend_eisenstein, extend_unramified, make_base

Q5 = make_base(5, 1, 16)
U2 = extend_unramified(Q5, 2, "U2")
U3 = extend_unramified(Q5, 3, "U3")
R2 = extend_eisenstein(Q5, "x^2-5", "R2")
R3 = extend_eisenstein(Q5, "x^3-5", "R3")
FIELDS = {"U2": U2, "U3": U3, "R2": R2, "R3": R3}


def test_unramified_odd_has_trivial_rectifier():
    xi = random_minimal(U3, Q5, 2, random.Random(1))
    assert phi_forward(MonomialParam(U3, Q5, xi)).theta == xi


def test_det_examples():
    triv = QuasiCharacter.trivial
    assert det_induced(MonomialParam(R2, Q5, triv(R2))) == Delta_K(R2, Q5)
    assert det_induced(MonomialParam(U3, Q5, triv(U3))) == triv(Q5)


def test_base_change_twist_rule():
    rng = random.Random(2)
    xi = random_minimal(R3, Q5, 2, rng)
    g = phi_forward(MonomialParam(R3, Q5, xi))
    lifted = base_change(g, U2)
    assert lifted.theta == compose_norm(g.theta, lift_field(R3, U2))
    xi = random_minimal(R2, Q5, 2, rng)
    g = phi_forward(MonomialParam(R2, Q5, xi))
    EK = lift_field(R2, U3)
    lifted = base_change(g, U3)
    assert lifted.theta == compose_norm(g.theta, EK) * compose_norm(Delta_K(U3, Q5), EK)


def test_lift_needs_coprime_degrees():
    xi = random_minimal(U2, Q5, 2, random.Random(3))
    with pytest.raises(ConfigurationError):
        base_change(phi_forward(MonomialParam(U2, Q5, xi)), R2)


def test_identity_32_rows():
    beta = R2.pi_power(-1)
    rows = identity_32(R2, U3, Q5, beta, 3)
    assert rows and all(r["ok"] for r in rows)
    assert rows[-1]["generator"] == "uniformizer"


def test_remark_36():
    Q7 = make_base(7, 1, 12, "Q7")
    assert remark_36(extend_eisenstein(Q7, "x^3-7"), Q7)


def test_pair_rejects_equal_degrees():
    rng = random.Random(4)
    g = phi_forward(MonomialParam(U2, Q5, random_minimal(U2, Q5, 2, rng)))
    with pytest.raises(ConfigurationError):
        PairInput(g, MonomialParam(R2, Q5, random_minimal(R2, Q5, 2, rng)))


def test_pair_factorization_invariance():
    rng = random.Random(9)
    m1 = MonomialParam(R2, Q5, random_minimal(R2, Q5, 2, rng))
    xi2 = random_minimal(U3, Q5, 2, rng)
    chi2 = QuasiCharacter.random(Q5, 1, rng)
    mu = QuasiCharacter.random(Q5, 2, rng)
    pi1 = phi_forward(m1)
    a = pair_epsilon(PairInput(pi1, MonomialParam(U3, Q5, xi2, chi2)))
    b = pair_epsilon(PairInput(pi1, MonomialParam(U3, Q5, xi2 * compose_norm(mu, U3), chi2 / mu)))
    assert a == b


def test_pair_trace_and_exponent():
    rng = random.Random(10)
    m1 = MonomialParam(U2, Q5, random_minimal(U2, Q5, 2, rng))
    m2 = MonomialParam(U3, Q5, random_minimal(U3, Q5, 2, rng))
    trace = []
    eps = pair_epsilon(PairInput(phi_forward(m1), m2), trace=trace)
    t = trace[0]
    assert t["route"] == "U3" and t["lambda_exponent"] == 2
    assert t["gl_epsilon"][0]["branch"] in ("even", "odd-tame", "odd-twist")
    inner = int(t["gl_epsilon"][0]["s_exponent"])
    assert eps.s_exponent == inner * 3


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from(list(FIELDS)), st.sampled_from([2, 3, 5]),
       st.sampled_from([0, 1, 2]))
def test_roundtrip_and_determinant(seed, name, a, ca):
    E = FIELDS[name]
    l = E.e * E.f
    if a % l == 1 or E.q ** (a - 1) > 20000:
        return
    rng = random.Random(seed)
    chi = QuasiCharacter.random(Q5, ca, rng)
    m = MonomialParam(E, Q5, random_minimal(E, Q5, a, rng), chi)
    g = phi_forward(m)
    back = phi_inverse(g)
    assert back.xi == m.xi and back.chi == m.chi
    assert det_induced(m) == central_char(g)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([("R2", "U3"), ("U3", "R2"), ("R3", "U2"), ("U2", "U3")]),
       st.sampled_from([2, 3]))
def test_compatibility_square(seed, names, a):
    E, K = FIELDS[names[0]], FIELDS[names[1]]
    l = E.e * E.f
    if a % l == 1:
        return
    rng = random.Random(seed)
    m = MonomialParam(E, Q5, random_minimal(E, Q5, a, rng), QuasiCharacter.random(Q5, rng.randint(0, 2), rng))
    assert same_param(phi_forward(mackey_restrict(m, K)), base_change(phi_forward(m), K))


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from(["U2", "R2"]), st.sampled_from([0, 1, 2, 3]))
def test_epsilon_preservation(seed, name, ca):
    E = FIELDS[name]
    rng = random.Random(seed)
    chi = QuasiCharacter.random(Q5, ca, rng)
    xi = random_minimal(E, Q5, 2, rng)
    gl = gl_epsilon(phi_forward(MonomialParam(E, Q5, xi, chi)))
    assert gl == tate_epsilon(compose_norm(chi, E) * xi) * lambda_tame(E, Q5)
