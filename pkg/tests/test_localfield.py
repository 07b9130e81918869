import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from locfac.localfield import (
    different_exponent,
    embed,
    extend_eisenstein,
    extend_unramified,
    hilbert2,
    make_base,
    norm,
    relative_degrees,
    trace,
    unit_group,
)

Q5 = make_base(5, 1, 8)
U2 = extend_unramified(Q5, 2, "U2")
U3 = extend_unramified(Q5, 3, "U3")
R2 = extend_eisenstein(Q5, "x^2-5", "R2")
Q3 = make_base(3, 1, 8, "Q3")
W3 = extend_eisenstein(Q3, "x^3-3", "W3")


def test_base_fields():
    assert Q5(5).valuation() == 1
    F = make_base(3, 2, 6)
    assert F.q == 9
    k = make_base(7, 2).res
    assert k.q == 49 and k.order(k.generator) == 48


def test_extensions():
    assert (U3.e, U3.f, U3.q) == (1, 3, 125)
    assert (R2.e, R2.f) == (2, 1)
    assert R2.uniformizer ** 2 == embed(Q5(5), R2)
    assert W3.e == 3 and W3.is_wild


def test_valuations():
    pi = R2.uniformizer
    u = R2(3) + pi
    assert (pi ** 2 * u).valuation() == 2
    assert embed(Q5(5), R2).valuation() == 2
    assert (pi + pi ** 3).valuation() == 1


def test_norm_trace():
    g = U2.teichmuller(U2.res.generator)
    ng = norm(g, Q5)
    assert ng == g ** 6 or ng == embed(Q5.teichmuller(ng.residue()), Q5)
    assert Q5.res.order(ng.residue()) == 4
    for L in (U2, U3, R2):
        l = relative_degrees(L, Q5)[0] * relative_degrees(L, Q5)[1]
        assert trace(L.one, Q5) == Q5(l)
    n = norm(R2.uniformizer, Q5)
    assert n.valuation() == 1 and n == Q5(-5)


def test_different_exponent():
    assert different_exponent(U3, Q5) == 0
    assert different_exponent(R2, Q5) == 1
    assert different_exponent(W3, Q3) == 5


def test_unit_group_examples():
    g = unit_group(Q5, 2)
    prod = 1
    for d in g.orders:
        prod *= d
    assert prod == 20
    assert unit_group(make_base(3, 2), 1).orders == [8]
    for L in (Q5, U2, R2, W3):
        assert unit_group(L, 1).orders == [L.q - 1]
    big = unit_group(U3, 6)
    assert math.prod(big.orders) == 124 * 125 ** 5


def test_hilbert_examples():
    assert hilbert2(Q3(3), Q3(2)) == -1
    assert hilbert2(Q3(3), Q3(3)) == -1
    assert hilbert2(Q5(2), Q5(3)) == 1


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_dlog_roundtrip(seed):
    rng = random.Random(seed)
    L = rng.choice([Q5, U2, R2, W3])
    n = rng.randint(1, 3)
    grp = unit_group(L, n)
    exps = [rng.randrange(d) for d in grp.orders]
    u = grp.element(exps)
    assert list(grp.dlog(u)) == exps


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_field_arithmetic(seed):
    rng = random.Random(seed)
    L = rng.choice([U2, R2, W3])

    def rand():
        rows = [[rng.randrange(L.p) for _ in range(L.f)] for _ in range(L.e)]
        x = L.element(rows, rng.randint(-2, 2))
        return x if not x.is_zero() else L.one

    a, b = rand(), rand()
    assert (a * b).valuation() == a.valuation() + b.valuation()
    assert (a * b) / b == a
    base = Q3 if L is W3 else Q5
    assert norm(a * b, base) == norm(a, base) * norm(b, base)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_hilbert_bilinear(seed):
    rng = random.Random(seed)

    def rand():
        return Q5(rng.randint(1, 24)) * Q5(5) ** rng.randint(0, 2)

    a, b, c = rand(), rand(), rand()
    assert hilbert2(a, b * c) == hilbert2(a, b) * hilbert2(a, c)
    assert hilbert2(a, b) == hilbert2(b, a)
