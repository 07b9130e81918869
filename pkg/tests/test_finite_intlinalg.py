import random

from hypothesis import given, settings, strategies as st

from locfac.finite import ResidueField, is_irreducible, is_prime
from locfac.intlinalg import inverse_unimodular, matmul, smith_normal_form, solve_mod


def test_residue_field_7_2():
    k = ResidueField(7, 2)
    elems = list(k.elements())
    assert len(elems) == 49
    g = k.generator
    assert k.order(g) == 48
    assert is_irreducible(list(k.modulus), 7)


def test_trace_and_quadratic_character():
    k = ResidueField(5, 2)
    for a in k.elements():
        if any(a):
            assert k.quadratic_character(a) in (1, -1)
            assert k.pow(a, 24) == k.one
    assert k.trace(k.one) == 2


def test_is_prime():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_field_axioms(seed):
    rng = random.Random(seed)
    p, f = rng.choice([(3, 2), (5, 1), (5, 3), (7, 2)])
    k = ResidueField(p, f)
    a, b = (k.elem([rng.randrange(p) for _ in range(f)]) for _ in range(2))
    assert k.mul(a, b) == k.mul(b, a)
    if any(a):
        assert k.mul(a, k.inv(a)) == k.one
        assert k.pow(k.generator, k.dlog(a)) == a


matrices = st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=1, max_size=4))


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_smith_normal_form(a):
    u, d, v = smith_normal_form(a)
    assert matmul(matmul(u, a), v) == d
    diag = [d[i][i] for i in range(min(len(d), len(d[0])))]
    for i, row in enumerate(d):
        for j, x in enumerate(row):
            if i != j:
                assert x == 0
    nz = [x for x in diag if x]
    assert all(x > 0 for x in nz)
    assert all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1))
    n = len(u)
    assert matmul(u, inverse_unimodular(u)) == [[int(i == j) for j in range(n)] for i in range(n)]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(0, 6), min_size=3, max_size=3), min_size=3, max_size=3),
       st.lists(st.integers(0, 6), min_size=3, max_size=3))
def test_solve_mod(a, x):
    b = [sum(r * c for r, c in zip(row, x)) % 7 for row in a]
    sol = solve_mod(a, b, 7)
    assert sol is not None
    assert [sum(r * c for r, c in zip(row, sol)) % 7 for row in a] == b
