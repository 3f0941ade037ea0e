import random

import pytest

from cubjord.errors import NotIrreducible, NotPrime
from cubjord.fields import (
    GF,
    ExtensionField,
    PrimeField,
    Rationals,
    TowerExtension,
    extension_of_size,
    is_prime,
    smallest_irreducible,
)
from fractions import Fraction


def test_is_prime_small():
    primes = [2, 3, 5, 7, 11, 13, 2**31 - 1]
    composites = [1, 0, 4, 9, 15, 2**31, 561, 341550071728321 * 3]
    assert all(is_prime(p) for p in primes)
    assert not any(is_prime(c) for c in composites)


def test_prime_field_rejects_composite():
    with pytest.raises(NotPrime):
        PrimeField(10)


def test_extension_rejects_reducible_modulus():
    with pytest.raises(NotIrreducible):
        ExtensionField(2, 2, (1, 0, 1))  # t^2 + 1 = (t+1)^2 over GF(2)


def test_rationals_arithmetic():
    Q = Rationals()
    a = Q.coerce("3/4")
    b = Q.coerce(2)
    assert Q.add(a, b) == Fraction(11, 4)
    assert Q.inv(a) == Fraction(4, 3)
    assert Q.is_square(Fraction(9, 4))
    assert not Q.is_square(Fraction(-1))
    assert not Q.is_square(Fraction(2))
    assert Q.to_json(a) == "3/4"
    assert Q.from_json("3/4") == a


def test_rationals_canonical_order():
    Q = Rationals()
    it = Q.canonical_iter()
    first = [next(it) for _ in range(6)]
    assert first == [1, -1, 2, -2, 3, -3]


def test_prime_field_ops():
    F = GF(7)
    assert F.inv(3) == 5
    assert F.pow(3, -2) == F.inv(F.mul(3, 3))
    assert set(F.elements()) == set(range(7))
    assert F.is_square(2) and not F.is_square(3)  # squares mod 7: 1,2,4


@pytest.mark.parametrize("p,k", [(2, 3), (2, 5), (3, 2), (5, 2), (3, 4)])
def test_extension_field_is_a_field(p, k):
    F = GF(p, k)
    rng = random.Random(11)
    assert F.order == p**k
    for _ in range(40):
        a = F.random_element(rng)
        b = F.random_element(rng)
        c = F.random_element(rng)
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
        assert F.mul(a, b) == F.mul(b, a)
        if a != F.zero:
            assert F.mul(a, F.inv(a)) == F.one
    # multiplicative group order
    a = F.gen()
    assert F.pow(a, F.order - 1) == F.one


def test_gf8_default_modulus():
    F8 = GF(2, 3)
    assert F8.modulus == (1, 1, 0, 1)  # t^3 + t + 1
    t = F8.gen()
    assert F8.pow(t, 7) == F8.one


def test_frobenius_trace_gf4():
    F4 = GF(2, 2)
    traces = [F4.frobenius_trace(a) for a in F4.elements()]
    assert sorted(traces) == [0, 0, 1, 1]
    assert F4.artin_schreier_solvable(F4.zero)
    # beta = 1 embeds an element of trace... two elements solve z^2+z=0
    one = F4.one
    assert not F4.artin_schreier_solvable(one) or any(
        F4.add(F4.mul(z, z), z) == one for z in F4.elements()
    )


def test_extension_of_size_prime_base():
    E, emb = extension_of_size(GF(2), 2**31)
    assert E.order >= 2**31
    assert emb(1) == E.one
    E5, emb5 = extension_of_size(GF(5), 2**31)
    assert E5.order >= 2**31
    assert E5.order % 5 == 0


def test_extension_of_size_tower():
    F4 = GF(2, 2)
    E, emb = extension_of_size(F4, 10**4)
    assert isinstance(E, TowerExtension)
    assert E.order >= 10**4
    rng = random.Random(0)
    a = E.random_element(rng)
    while a == E.zero:
        a = E.random_element(rng)
    assert E.mul(a, E.inv(a)) == E.one
    assert emb(F4.one) == E.one


def test_smallest_irreducible_large_degree():
    f = smallest_irreducible(2, 31)
    assert f[-1] == 1 and f[0] == 1  # monic with nonzero constant term


def test_finite_field_json_roundtrip():
    F = GF(3, 2)
    a = F.coerce((2, 1))
    assert F.from_json(F.to_json(a)) == a
