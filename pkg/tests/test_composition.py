import itertools
from fractions import Fraction

import pytest

from cubjord.errors import DimensionTooLarge, PreconditionError
from cubjord.fields import GF, Rationals
from cubjord.composition import (
    CompositionAlgebra,
    cayley_dickson,
    ground_field_algebra,
    preset,
    split_binarion,
    split_quaternion,
    zorn,
)
from cubjord.polys import Poly

Q = Rationals()


@pytest.mark.parametrize("F", [GF(2), GF(3), GF(5), Q], ids=["GF2", "GF3", "GF5", "Q"])
def test_zorn_constructs_and_validates(F):
    # the constructor itself verifies the composition law, conjugation
    # identities, the rank equation and nondegeneracy, all formally
    C = zorn(F)
    assert C.dim == 8
    assert F.is_one(C.norm(C.unit))
    assert C.trace(C.unit) == F.from_int(2)


def test_zorn_is_split():
    C = zorn(GF(5))
    e1 = C._basis(0)
    assert C.field.is_zero(C.norm(e1))  # diagonal idempotent is a zero divisor
    assert C.mul(e1, e1) == e1


def test_zorn_mat2_subalgebra_closed():
    C = zorn(GF(3))
    idx = [0, 1, 2, 5]  # e1, e2, u1, v1
    for i in idx:
        for j in idx:
            prod = C.mul(C._basis(i), C._basis(j))
            assert all(C.field.is_zero(prod[k]) for k in range(8) if k not in idx)


def test_cayley_dickson_split_double():
    B = cayley_dickson(ground_field_algebra(Q), 1)
    # norm a^2 - b^2 is isotropic
    assert B.norm([Fraction(1), Fraction(1)]) == 0


def test_cayley_dickson_anisotropic_over_q():
    A = cayley_dickson(ground_field_algebra(Q), -1)
    # norm a^2 + b^2 is positive definite on nonzero vectors
    for x in [[Fraction(1), Fraction(0)], [Fraction(2), Fraction(3)], [Fraction(0), Fraction(-1)]]:
        assert A.norm(x) > 0


def test_split_quaternion_has_zero_divisors():
    H = split_quaternion(GF(3))
    found = None
    for tup in itertools.product(range(3), repeat=4):
        x = list(tup)
        if H.mul(x, x) == x and x != H.unit and any(x):
            found = x
            break
    assert found is not None  # nontrivial idempotent: the algebra is split


def test_cayley_dickson_rejects_octonions_and_zero_lambda():
    C = zorn(Q)
    with pytest.raises(DimensionTooLarge):
        cayley_dickson(C, 1)
    with pytest.raises(PreconditionError):
        cayley_dickson(ground_field_algebra(Q), 0)


def test_conjugation_identities_numeric():
    C = split_quaternion(GF(5))
    F = C.field
    for x in [[1, 2, 3, 4], [0, 1, 0, 1], [2, 2, 2, 2]]:
        xbar = C.conj(x)
        tx = C.trace(x)
        assert [F.add(a, b) for a, b in zip(x, xbar)] == [F.mul(tx, u) for u in C.unit]
        assert C.mul(x, xbar) == [F.mul(C.norm(x), u) for u in C.unit]


def test_degenerate_table_rejected():
    F = GF(3)
    # F x F with the *additive* norm a^2 (degenerate polar and radical norm 0)
    xs = Poly.variables(F, 2)
    z, o = F.zero, F.one
    mult = [[[o, z], [z, z]], [[z, z], [z, o]]]
    with pytest.raises(PreconditionError):
        CompositionAlgebra(F, mult, [o, o], xs[0] * xs[0])


def test_char2_dimension_one_allowed():
    # n(x) = x^2 has identically zero polar form in characteristic 2, but a
    # one-dimensional anisotropic radical is the allowed degenerate shape
    C = ground_field_algebra(GF(2))
    assert C.dim == 1


def test_presets():
    for name in ["zorn", "split-quaternion", "split-binarion", "ground"]:
        C = preset(name, GF(5))
        assert C.dim in (1, 2, 4, 8)
    with pytest.raises(PreconditionError):
        preset("octonion-division", GF(5))
