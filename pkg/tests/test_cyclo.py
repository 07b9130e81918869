from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from locfac.cyclo import CycloError, CycloNumber, legendre, quadratic_gauss_sum, sqrt_prime, sqrt_q_power, zeta


def test_zeta_basics():
    assert zeta(4, 1) * zeta(4, 1) == zeta(2, 1) == -1
    for n in (1, 3, 12, 35):
        assert zeta(n, 0) == 1
    for p in (3, 5, 7, 11):
        total = CycloNumber.zero()
        for k in range(p):
            total = total + zeta(p, k)
        assert total == 0


def test_ring_examples():
    assert zeta(8, 1).conj() == zeta(8, 7)
    assert 1 + zeta(3, 1) + zeta(3, 2) == 0
    assert zeta(5, 2) * zeta(5, 4) == zeta(5, 1)
    assert zeta(6, 1) != zeta(6, 5)


def test_sqrt_prime_values():
    assert abs(sqrt_prime(5).embed() - 5 ** 0.5) < 1e-9
    s3 = sqrt_prime(3)
    assert s3 == -zeta(4, 1) * (zeta(3, 1) - zeta(3, 2))
    assert abs(s3.embed() - 3 ** 0.5) < 1e-9
    for p in (3, 5, 7, 11, 13):
        assert sqrt_prime(p) ** 2 == p
    assert abs((sqrt_prime(7) ** 2).embed() - 7) < 1e-9
    with pytest.raises(CycloError):
        sqrt_prime(9)


def test_embed_examples():
    assert abs(zeta(4, 1).embed() - 1j) < 1e-12
    assert abs((1 + zeta(2, 1)).embed()) < 1e-12


def test_quadratic_gauss_sum_square():
    for p in (3, 5, 7, 11):
        g = quadratic_gauss_sum(p)
        assert g * g == legendre(-1, p) * p


def test_sqrt_q_power():
    assert sqrt_q_power(5, 2) == 5
    assert sqrt_q_power(7, 3) ** 2 == 343


roots = st.tuples(st.sampled_from([1, 2, 3, 4, 5, 6, 8, 10, 12, 15]), st.integers(-40, 40))
elements = st.lists(st.tuples(roots, st.fractions(max_denominator=6)), max_size=4).map(
    lambda terms: sum((c * zeta(n, k) for (n, k), c in terms), CycloNumber.zero())
)


@settings(max_examples=60, deadline=None)
@given(elements, elements, elements)
def test_ring_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    assert (a - a).is_zero()
    assert (a * b).conj() == a.conj() * b.conj()


@settings(max_examples=60, deadline=None)
@given(elements)
def test_json_roundtrip(a):
    assert CycloNumber.from_json(a.to_json()) == a
    assert abs(complex(*a.to_json()["approx"]) - a.embed()) < 1e-9


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 40), st.integers(-100, 100))
def test_root_of_unity_identification(n, k):
    z = zeta(n, k)
    assert z.as_root_of_unity() == Fraction(k, n) % 1
    assert z * z.conj() == 1
    assert z.inverse() == z.conj()
