from fractions import Fraction

import pytest

from cubjord.errors import NotSeparable, NotAssociative
from cubjord.fields import GF, Rationals
from cubjord.commalg import (
    CommAlgebra,
    EtaleTensor,
    cubic_disc,
    discriminant_algebra,
    etale_from_poly,
    quadratic_etale_from_poly,
    split_cubic,
    split_quadratic,
    star_compose,
)
from cubjord.polys import Poly


Q = Rationals()


def test_structure_constant_validation():
    F = GF(3)
    # a deliberately non-associative commutative table:
    # e1 e1 = e2, e1 e2 = 0, e2 e2 = e1
    z, o = F.zero, F.one
    e0, e1, e2 = [o, z, z], [z, o, z], [z, z, o]
    zero = [z, z, z]
    mult = [
        [e0, e1, e2],
        [e1, e2, zero],
        [e2, zero, e1],
    ]
    with pytest.raises(NotAssociative):
        CommAlgebra(F, mult, e0)


def test_split_cubic_norm_factors():
    E = etale_from_poly(Q, (0, -1, 0))  # t^3 - t, roots 0, 1, -1
    x = [Fraction(2), Fraction(3), Fraction(5)]

    def ev(r):
        return x[0] + x[1] * r + x[2] * r * r

    assert E.norm(x) == ev(Fraction(0)) * ev(Fraction(1)) * ev(Fraction(-1))


def test_unit_norm_trace_adjoint():
    for coeffs in [(0, -1, 0), (1, 2, -7)]:
        E = etale_from_poly(Q, coeffs)
        assert E.norm(E.unit) == 1
        assert E.trace(E.unit) == 3
        assert E.sharp(E.unit) == E.unit


def test_gf8_norm_of_generator():
    F = GF(2)
    E = etale_from_poly(F, (0, 1, 1))  # t^3 + t + 1
    assert E.norm([0, 1, 0]) == F.one  # det of mult-by-t is the constant term


def test_adjoint_identity_formal():
    for F, coeffs in [(Q, (0, -1, 0)), (GF(2), (0, 1, 1)), (GF(5), (1, 1, 1))]:
        E = etale_from_poly(F, coeffs)
        xs = E.alg.symbolic_element()
        prod = E.alg.mul_polyvec(xs, E.adjoint)
        for got, want in zip(prod, E.alg.scalar_polyvec(E.norm_poly)):
            assert (got - want).is_zero()


def test_middle_characteristic_coefficient_is_trace_of_sharp():
    E = etale_from_poly(GF(7), (0, 1, 1))
    # T(x#) equals the middle coefficient of the characteristic polynomial
    sharp_trace = Poly.zero(E.field, 3)
    for t, q in zip([E.trace(b) for b in E.alg.basis()], E.adjoint):
        sharp_trace = sharp_trace + q.scale(t)
    # compare against s(x) recovered from x# = x^2 - T(x) x + s(x) 1
    xs = E.alg.symbolic_element()
    x2 = E.alg.mul_polyvec(xs, xs)
    tx = [E.trace_poly * xi for xi in xs]
    s_vec = [E.adjoint[k] - x2[k] + tx[k] for k in range(3)]
    # s_vec should be s(x) * unit
    for k in range(3):
        want = s_vec[0].scale(E.alg.unit[k]) if E.alg.unit[0] == E.field.one else None
        assert want is not None
        assert (s_vec[k] - want).is_zero()
    assert (sharp_trace - s_vec[0]).is_zero()


def test_inseparable_rejected():
    with pytest.raises(NotSeparable):
        etale_from_poly(GF(2), (1, 0, 0))  # t^3 + t^2 = t^2(t+1)
    with pytest.raises(NotSeparable):
        quadratic_etale_from_poly(GF(2), 0, 1)  # s^2 + 1 = (s+1)^2


def test_etale_gram_nondegenerate():
    for F, coeffs in [(Q, (0, -1, 0)), (GF(2), (0, 1, 1)), (GF(3), (0, 1, 2))]:
        E = etale_from_poly(F, coeffs)
        assert E.alg.is_etale()


def test_discriminant_split_cases():
    E = etale_from_poly(Q, (0, -1, 0))
    assert cubic_disc(Q, *E.defining_poly) == 4
    assert discriminant_algebra(E).is_split()
    assert discriminant_algebra(split_cubic(Q)).is_split()
    assert discriminant_algebra(split_cubic(GF(2))).is_split()


def test_discriminant_char2_berlekamp():
    F = GF(2)
    # irreducible cubic: cyclic Galois group, split discriminant algebra
    assert discriminant_algebra(etale_from_poly(F, (0, 1, 1))).is_split()
    assert discriminant_algebra(etale_from_poly(F, (1, 0, 1))).is_split()
    # t(t^2+t+1): order-2 Galois action, discriminant algebra is GF(4)
    D = discriminant_algebra(etale_from_poly(F, (1, 1, 0)))
    assert not D.is_split()


def test_discriminant_char3():
    F = GF(3)
    # t^3 - t - 1 is irreducible over GF(3) (Artin-Schreier), disc is a square
    E = etale_from_poly(F, (0, 2, 2))
    assert discriminant_algebra(E).is_split()


def test_quadratic_conjugation():
    K = quadratic_etale_from_poly(Q, 0, -2)  # Q(sqrt 2)
    s = [Fraction(0), Fraction(1)]
    sbar = K.conj(s)
    assert sbar == [Fraction(0), Fraction(-1)]
    assert K.norm(s) == -2
    assert K.trace(s) == 0
    sp = split_quadratic(GF(2))
    assert sp.conj([1, 0]) == [0, 1]


def test_star_compose_group_law():
    K2 = quadratic_etale_from_poly(Q, 0, -2)
    K3 = quadratic_etale_from_poly(Q, 0, -3)
    K6 = quadratic_etale_from_poly(Q, 0, -6)
    assert star_compose(K2, K3).isomorphic_to(K6)
    assert star_compose(K2, split_quadratic(Q)).isomorphic_to(K2)
    assert star_compose(K2, K2).is_split()


def test_star_compose_commutative_associative_on_test_set():
    F = GF(5)
    algs = [split_quadratic(F), quadratic_etale_from_poly(F, 0, 2), quadratic_etale_from_poly(F, 1, 1)]
    for A in algs:
        for B in algs:
            assert star_compose(A, B).isomorphic_to(star_compose(B, A))
            for C in algs:
                left = star_compose(star_compose(A, B), C)
                right = star_compose(A, star_compose(B, C))
                assert left.isomorphic_to(right)


def test_star_compose_char2():
    F = GF(2)
    K = quadratic_etale_from_poly(F, 1, 1)  # GF(4)
    assert star_compose(K, K).is_split()
    assert star_compose(K, split_quadratic(F)).isomorphic_to(K)


class TestEtaleTensor:
    def setup_method(self):
        self.F = GF(2)
        self.E = etale_from_poly(self.F, (0, 1, 1))
        self.L = quadratic_etale_from_poly(self.F, 1, 1)
        self.T = EtaleTensor(self.E, self.L)

    def test_tensor_is_gf64(self):
        # x^9 = n_L(x) (the Galois norm to the cubic subfield) on all elements
        T = self.T
        for x in T.alg.elements():
            assert T.alg.pow(x, 9) == T.from_E(T.n_L(x))

    def test_norm_on_embedded_e(self):
        T = self.T
        e = [0, 1, 0]
        assert T.n_L(T.from_E(e)) == self.E.mul(e, e)

    def test_fixed_algebra_is_e(self):
        T = self.T
        for x in T.alg.elements():
            fixed = T.conj(x) == x
            in_e = all(x[2 * a + 1] == 0 for a in range(3)) if self.L.alg.unit == [1, 0] else None
            if fixed:
                # must be expressible in E-coordinates
                T.to_E(x)

    def test_norm_compatibility_formal(self):
        # n_L(N_E(y)) = N_E(n_L(y)) as polynomials in six variables
        T, F, L, E = self.T, self.F, self.L, self.E
        zs = [Poly.variable(F, 2, i) for i in range(2)]
        from cubjord.commalg import matrix_apply_polys

        zbar = matrix_apply_polys(F, L.conj_matrix, zs)
        prod = L.alg.mul_polyvec(zs, zbar)
        # n(z) * unit = prod; extract the scalar against the unit's support
        m = next(i for i in range(2) if not F.is_zero(L.alg.unit[i]))
        n_of = prod[m].scale(F.inv(L.alg.unit[m]))
        lhs = n_of.subst(T.norm_L_polys)
        rhs = E.norm_poly.subst(T.n_L_polys)
        assert (lhs - rhs).is_zero()

    def test_norm_over_l_lands_in_l(self):
        T = self.T
        for y in [[1, 0, 1, 1, 0, 1], [0, 1, 1, 0, 1, 1]]:
            val = T.norm_over_L(y)
            assert len(val) == 2
