"""Commutative associative algebras by structure constants; quadratic and
cubic etale algebras with norm / trace / conjugation / adjoint derived from
the regular representation.

All derived structure is symbolic (polynomials over the base field), so
identities about it can be decided formally.
"""

import itertools

from .errors import (
    FixedSpaceDimensionUnexpected,
    NoGenerator,
    NotAssociative,
    NotCommutative,
    NotEtale,
    NotSeparable,
    PreconditionError,
)
from . import linalg
from .polys import Poly, linear_polys_from_matrix


class CommAlgebra:
    """Commutative associative unital algebra over F by structure constants.

    mult[i][j] is the coordinate vector of e_i * e_j; unit is the
    coordinate vector of 1.  Construction validates commutativity,
    associativity on all basis triples, and the unit law.
    """

    def __init__(self, field, mult, unit, label="", check=True):
        self.field = field
        self.dim = len(mult)
        self.mult = mult
        self.unit = list(unit)
        self.label = label
        if check:
            self._validate()

    def _validate(self):
        F, n = self.field, self.dim
        for i in range(n):
            for j in range(i, n):
                if self.mult[i][j] != self.mult[j][i]:
                    raise NotCommutative(f"{self.label}: e{i}*e{j} != e{j}*e{i}")
        for i in range(n):
            ei = [F.one if k == i else F.zero for k in range(n)]
            if self.mul(self.unit, ei) != ei:
                raise PreconditionError(f"{self.label}: unit law fails on e{i}")
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    left = self.mul(self.mult[i][j], self._basis(k))
                    right = self.mul(self._basis(i), self.mult[j][k])
                    if left != right:
                        raise NotAssociative(f"{self.label}: (e{i}e{j})e{k} != e{i}(e{j}e{k})")

    def _basis(self, i):
        F = self.field
        return [F.one if k == i else F.zero for k in range(self.dim)]

    def basis(self):
        return [self._basis(i) for i in range(self.dim)]

    # -- arithmetic on coordinate vectors -------------------------------

    def mul(self, x, y):
        F, n = self.field, self.dim
        out = [F.zero] * n
        for i in range(n):
            xi = x[i]
            if F.is_zero(xi):
                continue
            row = self.mult[i]
            for j in range(n):
                yj = y[j]
                if F.is_zero(yj):
                    continue
                c = F.mul(xi, yj)
                for k, m in enumerate(row[j]):
                    if not F.is_zero(m):
                        out[k] = F.add(out[k], F.mul(c, m))
        return out

    def lmul_matrix(self, x):
        """Matrix of left multiplication by x (columns L_x e_j)."""
        cols = [self.mul(x, self._basis(j)) for j in range(self.dim)]
        return linalg.transpose(cols)

    def scalar(self, c):
        F = self.field
        return [F.mul(c, u) for u in self.unit]

    def trace_linear(self, x):
        """Trace of the regular representation."""
        F = self.field
        M = self.lmul_matrix(x)
        acc = F.zero
        for i in range(self.dim):
            acc = F.add(acc, M[i][i])
        return acc

    def trace_gram(self):
        """Gram matrix of the bilinear trace form T(x, y) = tr L_{xy}."""
        return [
            [self.trace_linear(self.mul(self._basis(i), self._basis(j))) for j in range(self.dim)]
            for i in range(self.dim)
        ]

    def is_etale(self):
        return not self.field.is_zero(linalg.det(self.field, self.trace_gram()))

    def is_unit(self, x):
        return not self.field.is_zero(linalg.det(self.field, self.lmul_matrix(x)))

    def inv(self, x):
        sol = linalg.solve(self.field, self.lmul_matrix(x), self.unit)
        if sol is None:
            raise ZeroDivisionError("element is not invertible")
        return sol

    def pow(self, x, n):
        if n < 0:
            return self.pow(self.inv(x), -n)
        acc, base = self.unit, x
        while n:
            if n & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            n >>= 1
        return acc

    # -- enumeration (finite base field) ---------------------------------

    def elements(self):
        elems = list(self.field.canonical_iter())
        for tup in itertools.product(elems, repeat=self.dim):
            yield list(tup)

    def units(self):
        for x in self.elements():
            if self.is_unit(x):
                yield x

    # -- symbolic --------------------------------------------------------

    def mul_polyvec(self, xs, ys):
        """Product of two algebra elements whose coordinates are Polys."""
        F, n = self.field, self.dim
        nv, bits = xs[0].nvars, xs[0].bits
        out = [Poly.zero(F, nv, bits) for _ in range(n)]
        for i in range(n):
            if xs[i].is_zero():
                continue
            for j in range(n):
                if ys[j].is_zero():
                    continue
                prod = xs[i] * ys[j]
                for k, m in enumerate(self.mult[i][j]):
                    if not F.is_zero(m):
                        out[k] = out[k] + prod.scale(m)
        return out

    def scalar_polyvec(self, p):
        """Embed a Poly-valued scalar: p * 1."""
        F = self.field
        return [p.scale(u) for u in self.unit]

    def symbolic_element(self, nvars=None, offset=0, bits=4):
        """Coordinate variables as a Poly vector."""
        nv = nvars if nvars is not None else self.dim
        return [Poly.variable(self.field, nv, offset + i, bits) for i in range(self.dim)]

    def lmul_matrix_symbolic(self, xs):
        """L_x with polynomial entries, x symbolic with coordinates xs."""
        cols = [self.mul_polyvec(xs, self.scalar_polyvec_basis(j, xs)) for j in range(self.dim)]
        return [list(row) for row in zip(*cols)]

    def scalar_polyvec_basis(self, j, template):
        F = self.field
        nv, bits = template[0].nvars, template[0].bits
        return [
            Poly.const(F, nv, F.one, bits) if k == j else Poly.zero(F, nv, bits)
            for k in range(self.dim)
        ]


def bilinear_eval(F, gram, x, y):
    acc = F.zero
    for i, xi in enumerate(x):
        if F.is_zero(xi):
            continue
        row = gram[i]
        for j, yj in enumerate(y):
            if not F.is_zero(yj) and not F.is_zero(row[j]):
                acc = F.add(acc, F.mul(xi, F.mul(row[j], yj)))
    return acc


def matrix_apply_polys(F, M, polys):
    """Rows of M contracted against a vector of Polys."""
    nv, bits = polys[0].nvars, polys[0].bits
    out = []
    for row in M:
        acc = Poly.zero(F, nv, bits)
        for c, p in zip(row, polys):
            if not F.is_zero(c) and not p.is_zero():
                acc = acc + p.scale(c)
        out.append(acc)
    return out


def _symbolic_det3(F, M):
    """Determinant of a 3x3 matrix of Polys."""
    def m(i, j):
        return M[i][j]

    return (
        m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
        - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
        + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
    )


# ---------------------------------------------------------------------------
# quadratic etale algebras


class QuadraticEtale:
    """Two-dimensional etale algebra with its canonical conjugation
    iota(x) = t(x) 1 - x (t = linear trace of the regular representation).
    """

    def __init__(self, alg, label=""):
        if alg.dim != 2:
            raise PreconditionError("quadratic etale algebra must have dimension 2")
        if not alg.is_etale():
            raise NotEtale(f"{label or alg.label}: degenerate trace form")
        self.alg = alg
        self.field = alg.field
        self.label = label or alg.label
        F = self.field
        # conjugation matrix: columns iota(e_j) = t(e_j) 1 - e_j
        cols = []
        for j in range(2):
            ej = alg._basis(j)
            t = alg.trace_linear(ej)
            cols.append([F.sub(F.mul(t, alg.unit[k]), ej[k]) for k in range(2)])
        self.conj_matrix = linalg.transpose(cols)
        assert linalg.mat_mul(F, self.conj_matrix, self.conj_matrix) == linalg.identity(F, 2)

    @property
    def dim(self):
        return 2

    @property
    def unit(self):
        return self.alg.unit

    def conj(self, x):
        return linalg.mat_vec(self.field, self.conj_matrix, x)

    def norm(self, x):
        """n(x) = x * iota(x), returned as a base-field scalar."""
        prod = self.alg.mul(x, self.conj(x))
        return self._scalar_part(prod)

    def trace(self, x):
        return self._scalar_part([self.field.add(a, b) for a, b in zip(x, self.conj(x))])

    def _scalar_part(self, v):
        coords = linalg.coordinates_in_basis(self.field, [self.alg.unit], v)
        if coords is None:
            raise PreconditionError(f"{self.label}: value not in F*1")
        return coords[0]

    def mul(self, x, y):
        return self.alg.mul(x, y)

    def inv(self, x):
        return self.alg.inv(x)

    def is_unit(self, x):
        return self.alg.is_unit(x)

    def elements(self):
        return self.alg.elements()

    def units(self):
        return self.alg.units()

    # -- classification ---------------------------------------------------

    def disc_class(self):
        """("square", d) in char != 2, ("artin-schreier", beta) in char 2.

        Quadratic etale algebras are classified by d mod squares
        (resp. beta mod p(F) = {z^2+z}); the trivial class is split.
        """
        F = self.field
        s, minpoly = self._generator()
        b, c = minpoly  # s^2 + b s + c = 0
        if F.char != 2:
            disc = F.sub(F.mul(b, b), F.mul(F.from_int(4), c))
            return ("square", disc)
        beta = F.div(c, F.mul(b, b))
        return ("artin-schreier", beta)

    def _generator(self):
        """An element s with basis {1, s} and its monic minimal polynomial
        s^2 + b s + c = 0, returned as (s, (b, c))."""
        F = self.field
        for j in range(2):
            s = self.alg._basis(j)
            if linalg.rank(F, [self.alg.unit, s]) == 2:
                break
        s2 = self.alg.mul(s, s)
        coords = linalg.solve(F, linalg.transpose([self.alg.unit, s]), s2)
        c0, c1 = coords  # s^2 = c0 * 1 + c1 * s
        return s, (F.neg(c1), F.neg(c0))

    def is_split(self):
        kind, v = self.disc_class()
        F = self.field
        if kind == "square":
            return F.is_square(v)
        if F.order is None:
            raise PreconditionError("artin-schreier class over infinite field")
        return F.artin_schreier_solvable(v) if hasattr(F, "artin_schreier_solvable") else v in {
            F.add(F.mul(z, z), z) for z in F.elements()
        }

    def splitting_idempotents(self):
        """(f0, f1) with f0 + f1 = 1, f0 f1 = 0, f0 != 0, 1 for split algebras."""
        F = self.field
        if not self.is_split():
            return None
        if F.is_finite:
            for x in self.elements():
                if self.alg.mul(x, x) == x and x != self.alg.unit and any(not F.is_zero(c) for c in x):
                    f0 = x
                    f1 = [F.sub(a, b) for a, b in zip(self.alg.unit, f0)]
                    return f0, f1
            raise PreconditionError("split algebra without idempotent?")  # pragma: no cover
        # char 0: solve via the square root of the discriminant
        s, (b, c) = self._generator()
        disc = F.sub(F.mul(b, b), F.mul(F.from_int(4), c))
        r = F.sqrt(disc)
        # roots of t^2 + b t + c
        r1 = F.div(F.sub(r, b), F.from_int(2))
        r2 = F.div(F.sub(F.neg(r), b), F.from_int(2))
        # f0 = (s - r2)/(r1 - r2)
        denom = F.inv(F.sub(r1, r2))
        f0 = [F.mul(denom, F.sub(si, F.mul(r2, ui))) for si, ui in zip(s, self.alg.unit)]
        f1 = [F.sub(a, b2) for a, b2 in zip(self.alg.unit, f0)]
        assert self.alg.mul(f0, f0) == f0
        return f0, f1

    def isomorphic_to(self, other):
        """Same isomorphism class?  Decided by discriminant classes."""
        F = self.field
        k1, v1 = self.disc_class()
        k2, v2 = other.disc_class()
        assert k1 == k2
        if k1 == "square":
            return F.is_square(F.mul(v1, v2))
        diff = F.add(v1, v2)
        if hasattr(F, "artin_schreier_solvable"):
            return F.artin_schreier_solvable(diff)
        return diff in {F.add(F.mul(z, z), z) for z in F.elements()}


def quadratic_etale_from_poly(F, b, c, label=None):
    """F[s]/(s^2 + b s + c); requires separability."""
    b, c = F.coerce(b), F.coerce(c)
    if F.char != 2:
        disc = F.sub(F.mul(b, b), F.mul(F.from_int(4), c))
        if F.is_zero(disc):
            raise NotSeparable("quadratic polynomial has zero discriminant")
    else:
        if F.is_zero(b):
            raise NotSeparable("s^2 + c is inseparable in characteristic 2")
    # basis {1, s}: s*s = -c - b s
    z, o = F.zero, F.one
    mult = [
        [[o, z], [z, o]],
        [[z, o], [F.neg(c), F.neg(b)]],
    ]
    alg = CommAlgebra(F, mult, [o, z], label=label or f"F[s]/(s^2+{b}s+{c})")
    return QuadraticEtale(alg)


def split_quadratic(F, label="FxF"):
    z, o = F.zero, F.one
    mult = [
        [[o, z], [z, z]],
        [[z, z], [z, o]],
    ]
    alg = CommAlgebra(F, mult, [o, o], label=label)
    return QuadraticEtale(alg)


# ---------------------------------------------------------------------------
# cubic etale algebras


class CubicEtale:
    """Three-dimensional etale algebra with symbolic norm, trace, adjoint.

    The cubic norm N(x) = det L_x, the linear trace T(x) = tr L_x, the
    middle characteristic coefficient s(x) = sum of principal 2x2 minors
    of L_x, and the adjoint x# = x^2 - T(x) x + s(x) 1 are all computed
    from the regular representation, uniformly across characteristics and
    across field/split cases.
    """

    def __init__(self, alg, label="", split_product=False, defining_poly=None):
        if alg.dim != 3:
            raise PreconditionError("cubic etale algebra must have dimension 3")
        self.alg = alg
        self.field = alg.field
        self.label = label or alg.label
        self.split_product = split_product
        self.defining_poly = defining_poly  # (a, b, c) for t^3+a t^2+b t+c, if monogenic
        F = self.field
        xs = alg.symbolic_element()
        L = alg.lmul_matrix_symbolic(xs)
        self.norm_poly = _symbolic_det3(F, L)
        self.trace_poly = L[0][0] + L[1][1] + L[2][2]
        s_poly = (
            (L[0][0] * L[1][1] - L[0][1] * L[1][0])
            + (L[0][0] * L[2][2] - L[0][2] * L[2][0])
            + (L[1][1] * L[2][2] - L[1][2] * L[2][1])
        )
        x2 = alg.mul_polyvec(xs, xs)
        tx = [self.trace_poly * xi for xi in xs]
        s1 = alg.scalar_polyvec(s_poly)
        self.adjoint = [x2[k] - tx[k] + s1[k] for k in range(3)]
        self.gram = alg.trace_gram()
        if F.is_zero(linalg.det(F, self.gram)):
            raise NotEtale(f"{self.label}: degenerate trace form")

    @property
    def dim(self):
        return 3

    @property
    def unit(self):
        return self.alg.unit

    def mul(self, x, y):
        return self.alg.mul(x, y)

    def inv(self, x):
        return self.alg.inv(x)

    def is_unit(self, x):
        return self.alg.is_unit(x)

    def elements(self):
        return self.alg.elements()

    def units(self):
        return self.alg.units()

    def norm(self, x):
        return self.norm_poly.eval(x)

    def trace(self, x):
        return self.trace_poly.eval(x)

    def trace_bilinear(self, x, y):
        return bilinear_eval(self.field, self.gram, x, y)

    def sharp(self, x):
        return [p.eval(x) for p in self.adjoint]

    def generator(self):
        """A primitive element u (basis {1, u, u^2}) in canonical order."""
        F = self.field
        candidates = self.elements() if F.is_finite else self._rational_candidates()
        for u in candidates:
            u2 = self.alg.mul(u, u)
            if linalg.rank(F, [self.alg.unit, u, u2]) == 3:
                return u
        raise NoGenerator(f"{self.label}: no primitive element (tiny split case)")

    def _rational_candidates(self):
        # small integer coordinate vectors, deterministic order
        for bound in range(1, 5):
            for tup in itertools.product(range(-bound, bound + 1), repeat=3):
                if max(abs(t) for t in tup) == bound:
                    yield [self.field.from_int(t) for t in tup]

    def min_poly_of(self, u):
        """(a, b, c) with u^3 + a u^2 + b u + c = 0, for a generator u."""
        F = self.field
        u2 = self.alg.mul(u, u)
        u3 = self.alg.mul(u2, u)
        coords = linalg.solve(F, linalg.transpose([self.alg.unit, u, u2]), u3)
        if coords is None:
            raise NoGenerator("element does not generate")
        c0, c1, c2 = coords
        return (F.neg(c2), F.neg(c1), F.neg(c0))


def cubic_disc(F, a, b, c):
    """Discriminant of t^3 + a t^2 + b t + c."""
    # 18abc - 4a^3 c + a^2 b^2 - 4 b^3 - 27 c^2
    n = F.from_int
    return F.add(
        F.add(
            F.sub(F.mul(F.mul(n(18), F.mul(a, b)), c), F.mul(F.mul(n(4), F.pow(a, 3)), c)),
            F.sub(F.mul(F.mul(a, a), F.mul(b, b)), F.mul(n(4), F.pow(b, 3))),
        ),
        F.neg(F.mul(n(27), F.mul(c, c))),
    )


def etale_from_poly(F, coeffs, label=None):
    """F[t]/(t^3 + a t^2 + b t + c) with basis {1, t, t^2}.

    coeffs is (a, b, c); the polynomial must be separable.
    """
    a, b, c = (F.coerce(x) for x in coeffs)
    if F.is_zero(cubic_disc(F, a, b, c)):
        raise NotSeparable("cubic has zero discriminant")
    z, o = F.zero, F.one
    # t^3 = -c - b t - a t^2 ; t^4 = -c t - b t^2 - a t^3
    t3 = [F.neg(c), F.neg(b), F.neg(a)]
    t4 = [
        F.mul(F.neg(a), t3[0]),
        F.sub(F.mul(F.neg(a), t3[1]), c),
        F.sub(F.mul(F.neg(a), t3[2]), b),
    ]
    e0 = [o, z, z]
    e1 = [z, o, z]
    e2 = [z, z, o]
    mult = [
        [e0, e1, e2],
        [e1, e2, t3],
        [e2, t3, t4],
    ]
    alg = CommAlgebra(F, mult, e0, label=label or f"F[t]/(t^3+{a}t^2+{b}t+{c})")
    return CubicEtale(alg, split_product=False, defining_poly=(a, b, c))


def split_cubic(F, label="FxFxF"):
    z, o = F.zero, F.one
    basis = [[o, z, z], [z, o, z], [z, z, o]]
    mult = [[[F.mul(basis[i][k], basis[j][k]) for k in range(3)] for j in range(3)] for i in range(3)]
    alg = CommAlgebra(F, mult, [o, o, o], label=label)
    return CubicEtale(alg, split_product=True)


def discriminant_algebra(E):
    """The discriminant algebra of a cubic etale algebra, as quadratic etale.

    char != 2: F[s]/(s^2 - disc f), presented split when disc is a square.
    char 2: F[s]/(s^2 + s + beta) with the Artin-Schreier (Berlekamp)
    invariant beta = (b^3 + a^3 c + c^2)/(ab + c)^2 of the defining cubic,
    presented split when beta is in the image of z -> z^2 + z.
    Split input products short-circuit to the split quadratic algebra.
    """
    F = E.field
    if E.split_product:
        return split_quadratic(F)
    if E.defining_poly is not None:
        a, b, c = E.defining_poly
    else:
        u = E.generator()
        a, b, c = E.min_poly_of(u)
    if F.char != 2:
        disc = cubic_disc(F, a, b, c)
        if F.is_square(disc):
            return split_quadratic(F)
        return quadratic_etale_from_poly(F, F.zero, F.neg(disc), label="Delta")
    denom = F.add(F.mul(a, b), c)
    if F.is_zero(denom):  # pragma: no cover - excluded by separability
        raise NotSeparable("inseparable cubic")
    beta = F.div(F.add(F.add(F.pow(b, 3), F.mul(F.pow(a, 3), c)), F.mul(c, c)), F.mul(denom, denom))
    solvable = F.artin_schreier_solvable(beta) if hasattr(F, "artin_schreier_solvable") else beta in {
        F.add(F.mul(z, z), z) for z in F.elements()
    }
    if solvable:
        return split_quadratic(F)
    return quadratic_etale_from_poly(F, F.one, beta, label="Delta")


# ---------------------------------------------------------------------------
# the *-composition of quadratic etale algebras


def star_compose(K, L):
    """The fixed algebra of conj_K (x) conj_L inside K (x) L.

    Realizes the abelian group operation on isomorphism classes of
    quadratic etale algebras.
    """
    F = K.field
    if F != L.field:
        raise PreconditionError("star_compose needs a common base field")
    dimT = 4
    # basis (i,j) -> 2*i + j
    mult = [[None] * dimT for _ in range(dimT)]
    for i1 in range(2):
        for j1 in range(2):
            for i2 in range(2):
                for j2 in range(2):
                    ki = K.alg.mult[i1][i2]
                    lj = L.alg.mult[j1][j2]
                    vec = [F.zero] * dimT
                    for a in range(2):
                        for b in range(2):
                            vec[2 * a + b] = F.mul(ki[a], lj[b])
                    mult[2 * i1 + j1][2 * i2 + j2] = vec
    unitT = [F.mul(K.alg.unit[a], L.alg.unit[b]) for a in range(2) for b in range(2)]
    T = CommAlgebra(F, mult, unitT, label=f"{K.label}(x){L.label}")
    # involution conj_K (x) conj_L
    M = [[F.zero] * dimT for _ in range(dimT)]
    for a in range(2):
        for b in range(2):
            for c in range(2):
                for d in range(2):
                    M[2 * a + b][2 * c + d] = F.mul(K.conj_matrix[a][c], L.conj_matrix[b][d])
    MmI = [[F.sub(M[i][j], F.one if i == j else F.zero) for j in range(dimT)] for i in range(dimT)]
    fixed = linalg.kernel_basis(F, MmI)
    if len(fixed) != 2:
        raise FixedSpaceDimensionUnexpected(f"fixed space has dimension {len(fixed)}")
    # restrict multiplication to the fixed subspace
    B = fixed
    Bmat = linalg.transpose(B)
    submult = [[None] * 2 for _ in range(2)]
    for i in range(2):
        for j in range(2):
            prod = T.mul(B[i], B[j])
            coords = linalg.solve(F, Bmat, prod)
            if coords is None:
                raise FixedSpaceDimensionUnexpected("fixed space not closed under product")
            submult[i][j] = coords
    unit_coords = linalg.solve(F, Bmat, unitT)
    if unit_coords is None:
        raise FixedSpaceDimensionUnexpected("unit not in fixed space")
    alg = CommAlgebra(F, submult, unit_coords, label=f"{K.label}*{L.label}")
    return QuadraticEtale(alg)


# ---------------------------------------------------------------------------
# E (x) L with its two structures


class EtaleTensor:
    """E (x) L for a cubic etale E and quadratic etale L over F.

    Carries the cubic structure over L (norm, trace, adjoint with
    L-coefficients) and the quadratic structure over E (n_L, t_L, iota_L
    with E-values).  Basis: e_i (x) l_j at index 2*i + j.  The fixed
    algebra of iota_L is the embedded copy of E.
    """

    def __init__(self, E, L):
        F = E.field
        if F != L.field:
            raise PreconditionError("tensor needs a common base field")
        self.E, self.L, self.field = E, L, F
        dimT = 6
        mult = [[None] * dimT for _ in range(dimT)]
        for i1 in range(3):
            for j1 in range(2):
                for i2 in range(3):
                    for j2 in range(2):
                        ei = E.alg.mult[i1][i2]
                        lj = L.alg.mult[j1][j2]
                        vec = [F.zero] * dimT
                        for a in range(3):
                            for b in range(2):
                                vec[2 * a + b] = F.mul(ei[a], lj[b])
                        mult[2 * i1 + j1][2 * i2 + j2] = vec
        unitT = [F.mul(E.alg.unit[a], L.alg.unit[b]) for a in range(3) for b in range(2)]
        self.alg = CommAlgebra(F, mult, unitT, label=f"{E.label}(x){L.label}")
        # embeddings (columns = images of basis vectors)
        self.embed_E = [[F.zero] * 3 for _ in range(6)]
        for a in range(3):
            for b in range(2):
                self.embed_E[2 * a + b][a] = L.alg.unit[b]
        self.embed_L = [[F.zero] * 2 for _ in range(6)]
        for a in range(3):
            for b in range(2):
                for j in range(2):
                    self.embed_L[2 * a + b][j] = F.mul(E.alg.unit[a], F.one if b == j else F.zero)
        # iota_L = id (x) conj_L
        self.iota = [[F.zero] * 6 for _ in range(6)]
        for a in range(3):
            for b in range(2):
                for d in range(2):
                    self.iota[2 * a + b][2 * a + d] = L.conj_matrix[b][d]
        self._left_inv_E = self._left_inverse(self.embed_E)
        self._left_inv_L = self._left_inverse(self.embed_L)
        self._build_quadratic_structure()
        self._build_cubic_structure()

    def _left_inverse(self, emb):
        """P with P * emb = I, rows chosen from independent rows of emb."""
        F = self.field
        cols = len(emb[0])
        rows = []
        idxs = []
        for i, row in enumerate(emb):
            if linalg.rank(F, rows + [row]) > len(rows):
                rows.append(row)
                idxs.append(i)
            if len(rows) == cols:
                break
        inv = linalg.inverse(F, rows)
        P = [[F.zero] * len(emb) for _ in range(cols)]
        for r, i in enumerate(idxs):
            for c in range(cols):
                P[c][i] = inv[c][r]
        return P

    def to_E(self, v):
        """E-coordinates of a vector lying in the embedded E (checked)."""
        F = self.field
        coords = linalg.mat_vec(F, self._left_inv_E, v)
        if linalg.mat_vec(F, self.embed_E, coords) != list(v):
            raise PreconditionError("value not in the embedded copy of E")
        return coords

    def to_L(self, v):
        F = self.field
        coords = linalg.mat_vec(F, self._left_inv_L, v)
        if linalg.mat_vec(F, self.embed_L, coords) != list(v):
            raise PreconditionError("value not in the embedded copy of L")
        return coords

    def from_E(self, e):
        return linalg.mat_vec(self.field, self.embed_E, e)

    def from_L(self, l):
        return linalg.mat_vec(self.field, self.embed_L, l)

    def conj(self, v):
        return linalg.mat_vec(self.field, self.iota, v)

    def _build_quadratic_structure(self):
        """n_L, t_L : E(x)L -> E as polynomial maps (E-coordinates)."""
        F = self.field
        xs = self.alg.symbolic_element()
        xbar = matrix_apply_polys(F, self.iota, xs)
        prod = self.alg.mul_polyvec(xs, xbar)
        self.n_L_polys = self._project_E_polys(prod)
        tsum = [a + b for a, b in zip(xs, xbar)]
        self.t_L_polys = self._project_E_polys(tsum)

    def _project_E_polys(self, polys):
        F = self.field
        coords = matrix_apply_polys(F, self._left_inv_E, polys)
        recon = matrix_apply_polys(F, self.embed_E, coords)
        for a, b in zip(recon, polys):
            if not (a - b).is_zero():
                raise PreconditionError("polynomial map does not land in E")
        return coords

    def _build_cubic_structure(self):
        """Cubic norm / adjoint / trace of E(x)L over L, in F-coordinates.

        An element x has L-module coordinates lambda_i = (x_{2i}, x_{2i+1})
        relative to the basis e_i (x) 1; the E-structure polynomials are
        evaluated on these symbolic L-values using L's multiplication.
        """
        F = self.field
        L = self.L
        nv = 6
        lam = [[Poly.variable(F, nv, 2 * i + j) for j in range(2)] for i in range(3)]
        # cubic norm: evaluate E.norm_poly monomially in L
        self.norm_L_polys = self._eval_form_in_L(self.E.norm_poly, lam)
        # adjoint: three L-valued coordinates -> 6 F-polynomials
        sharp = []
        for k in range(3):
            sharp.extend(self._eval_form_in_L(self.E.adjoint[k], lam))
        self.sharp_polys = sharp  # length 6, index 2*k + j
        # linear trace over L: T(x) = sum over i of trace-gram contraction
        self.trace_L_polys = self._eval_form_in_L(self.E.trace_poly, lam)
        # bilinear trace gram over L: entries are L-elements (embedded F-scalars)
        self.gram_L = [[[F.mul(self.E.gram[i][j], u) for u in L.alg.unit] for j in range(3)] for i in range(3)]

    def _eval_form_in_L(self, form, lam):
        """Evaluate an F-coefficient form at symbolic L-valued arguments."""
        F, L = self.field, self.L
        nv = 6
        acc = [Poly.zero(F, nv) for _ in range(2)]
        for exps, c in form.items_decoded():
            val = None
            for i, e in enumerate(exps):
                for _ in range(e):
                    val = lam[i] if val is None else L.alg.mul_polyvec(val, lam[i])
            if val is None:
                val = [Poly.const(F, nv, u) for u in L.alg.unit]
            acc = [a + v.scale(c) for a, v in zip(acc, val)]
        return acc

    def n_L(self, v):
        """Norm to E (E-coordinates)."""
        return [p.eval(v) for p in self.n_L_polys]

    def t_L(self, v):
        return [p.eval(v) for p in self.t_L_polys]

    def norm_over_L(self, v):
        """Cubic norm, an element of L (L-coordinates)."""
        return [p.eval(v) for p in self.norm_L_polys]

    def sharp(self, v):
        return [p.eval(v) for p in self.sharp_polys]

    def mul(self, x, y):
        return self.alg.mul(x, y)

    def units(self):
        return self.alg.units()
