import itertools
from fractions import Fraction

import pytest

from cubjord.errors import ProductNotOne, PsiInvalid, PreconditionError
from cubjord.fields import GF, Rationals
from cubjord import linalg
from cubjord.composition import zorn
from cubjord.constructions import her3
from cubjord.structure_group import (
    _mat_mul_idx,
    outer_from_antiauto,
    special_unitary_group,
    sym3_operator,
    transpose_anti_automorphism,
    uw_operator,
)
from cubjord.commalg import quadratic_etale_from_poly, split_quadratic

Q = Rationals()


@pytest.fixture(scope="module")
def albert_gf5():
    return her3(zorn(GF(5)))


class TestSym3:
    def test_identity(self, albert_gf5):
        cert = sym3_operator((0, 1, 2), albert_gf5)
        assert cert.order == 1
        assert cert.matrix == linalg.identity(GF(5), 27)

    def test_three_cycle(self, albert_gf5):
        cert = sym3_operator((1, 2, 0), albert_gf5)
        assert cert.in_str and cert.fixes_norm and cert.fixes_unit
        assert cert.normalizes_diagonal
        assert cert.order == 3

    def test_transposition(self, albert_gf5):
        cert = sym3_operator((1, 0, 2), albert_gf5)
        assert cert.order == 2
        # swaps the first two diagonal cells
        F = GF(5)
        e11 = [F.one] + [F.zero] * 26
        img = linalg.mat_vec(F, cert.matrix, e11)
        assert img[1] == F.one and all(F.is_zero(c) for i, c in enumerate(img) if i != 1)

    def test_all_permutations_certify(self, albert_gf5):
        for sigma in itertools.permutations((0, 1, 2)):
            cert = sym3_operator(sigma, albert_gf5)
            assert cert.automorphism

    def test_group_closure_recertifies(self, albert_gf5):
        # products of certified elements certify again
        from cubjord.cns import certify_map

        F = GF(5)
        a = sym3_operator((1, 0, 2), albert_gf5).matrix
        b = sym3_operator((1, 2, 0), albert_gf5).matrix
        u = uw_operator([1, 2, 3], albert_gf5).matrix
        for m1 in (a, b, u):
            for m2 in (a, b, u):
                prod = linalg.mat_mul(F, m1, m2)
                cert = certify_map(albert_gf5, albert_gf5, prod)
                assert cert.verified and F.is_one(cert.multiplier)

    def test_requires_unit_gamma(self):
        X = her3(zorn(GF(5)), [1, 2, 3])
        with pytest.raises(PreconditionError):
            sym3_operator((1, 0, 2), X)


class TestUw:
    def test_identity(self, albert_gf5):
        cert = uw_operator([1, 1, 1], albert_gf5)
        assert cert.matrix == linalg.identity(GF(5), 27)

    def test_diagonal_squares_action(self):
        X = her3(zorn(Q))
        cert = uw_operator([Fraction(1), Fraction(2), Fraction(1, 2)], X)
        e22 = [Q.zero] * 27
        e22[1] = Q.one
        img = linalg.mat_vec(Q, cert.matrix, e22)
        assert img[1] == 4
        e33 = [Q.zero] * 27
        e33[2] = Q.one
        assert linalg.mat_vec(Q, cert.matrix, e33)[2] == Fraction(1, 4)
        assert cert.fixes_norm and not cert.fixes_unit

    def test_sign_triple_fixes_unit_but_not_identity(self):
        X = her3(zorn(Q))
        cert = uw_operator([Fraction(1), Fraction(-1), Fraction(-1)], X)
        assert cert.fixes_unit
        assert cert.matrix != linalg.identity(Q, 27)

    def test_product_constraint(self, albert_gf5):
        with pytest.raises(ProductNotOne):
            uw_operator([1, 2, 2], albert_gf5)

    def test_multiplicativity_sample(self, albert_gf5):
        F = GF(5)
        triples = [(1, 2, 3), (2, 2, 4), (4, 4, 1)]
        mats = {t: uw_operator(list(t), albert_gf5).matrix for t in triples}
        for a in triples:
            for b in triples:
                prod = tuple(F.mul(x, y) for x, y in zip(a, b))
                want = uw_operator(list(prod), albert_gf5).matrix
                assert linalg.mat_mul(F, mats[a], mats[b]) == want


class TestSpecialUnitary:
    def test_su3_2_order(self):
        K = quadratic_etale_from_poly(GF(2), 1, 1)
        T, group, conj = special_unitary_group(K)
        assert len(group) == 216
        # closure under multiplication on a sample
        gset = set(group)
        for g in group[:10]:
            for h in group[:10]:
                assert _mat_mul_idx(T, g, h) in gset

    def test_su_split_k(self):
        # split K: tau(g) g = 1 makes the group a copy of SL3(F)
        F = GF(2)
        K = split_quadratic(F)
        T, group, conj = special_unitary_group(K)
        # |SL3(2)| = 168; the split unitary group is {(g, (g^t)^{-1})} = SL3
        assert len(group) == 168


class TestOuterCheck:
    def test_transpose_gives_outer(self):
        K = quadratic_etale_from_poly(GF(2), 1, 1)
        rep = outer_from_antiauto(K)
        assert rep.group_order == 216
        assert rep.is_automorphism
        assert rep.verdict == "outer"
        assert rep.involutive  # psi^2 = id forces phi^2 = id

    def test_scalar_action_inverts_center(self):
        # phi(z 1) = z^{-1} 1 for central scalars z
        K = quadratic_etale_from_poly(GF(2), 1, 1)
        T, group, conj = special_unitary_group(K)
        psi = transpose_anti_automorphism(K)
        omega = None
        for e in range(T.q):
            elem = T.elems[e]
            if elem != T.F.zero and elem != T.F.one:
                # omega: nontrivial cube root of 1 in GF(4)
                if T.mul[T.mul[e][e]][e] == T.index[T.F.one]:
                    omega = e
                    break
        assert omega is not None
        z1 = tuple(omega if i in (0, 4, 8) else T.zero for i in range(9))
        assert z1 in set(group)
        # psi fixes scalars, so phi(z 1) = (z 1)^{-1} = z^2 1
        pg = psi(z1)
        assert pg == z1

    def test_invalid_psi_rejected(self):
        K = quadratic_etale_from_poly(GF(2), 1, 1)

        def bogus(g):  # swaps two entries: not anti-multiplicative
            out = list(g)
            out[1], out[2] = out[2], out[1]
            return tuple(out)

        with pytest.raises(PsiInvalid):
            outer_from_antiauto(K, psi=bogus)
