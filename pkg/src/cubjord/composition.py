"""Composition algebras of dimension 1, 2, 4, 8.

Constructible: the split octonions as Zorn vector matrices, and
Cayley-Dickson doubles of lower-dimensional algebras.  Arbitrary
multiplication tables are accepted but fully re-validated: the norm must
compose formally, conjugation must satisfy its identities formally, and
the norm must be nondegenerate in the characteristic-2 sense (radical of
the polar form carries an anisotropic form of dimension <= 1).
"""

from .errors import DimensionTooLarge, PreconditionError
from . import linalg
from .polys import Poly, polar_pairs
from .commalg import bilinear_eval, matrix_apply_polys


class CompositionAlgebra:
    """Unital algebra with a multiplicative quadratic form.

    mult[i][j]: coordinate vector of e_i e_j (not necessarily commutative
    or associative).  norm_poly: the quadratic form n as a Poly in dim
    variables.  trace and conjugation are derived: t(v) = polar(v, 1),
    conj(v) = t(v) 1 - v.
    """

    def __init__(self, field, mult, unit, norm_poly, label="", check=True):
        self.field = field
        self.dim = len(mult)
        self.mult = mult
        self.unit = list(unit)
        self.norm_poly = norm_poly
        self.label = label
        F = field
        pairs = polar_pairs(norm_poly)
        gram = [[F.zero] * self.dim for _ in range(self.dim)]
        for i, j, c in pairs:
            gram[i][j] = F.add(gram[i][j], c)
            if i != j:
                gram[j][i] = F.add(gram[j][i], c)
        self.polar_gram = gram  # b(x,y) = n(x+y)-n(x)-n(y)
        self.trace_vec = linalg.mat_vec(F, gram, self.unit)
        cols = []
        for j in range(self.dim):
            ej = self._basis(j)
            t = self.trace_vec[j]
            cols.append([F.sub(F.mul(t, self.unit[k]), ej[k]) for k in range(self.dim)])
        self.conj_matrix = linalg.transpose(cols)
        if check:
            self._validate()

    def _basis(self, i):
        F = self.field
        return [F.one if k == i else F.zero for k in range(self.dim)]

    def basis(self):
        return [self._basis(i) for i in range(self.dim)]

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

    def mul_polyvec(self, xs, ys):
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

    def norm(self, x):
        return self.norm_poly.eval(x)

    def trace(self, x):
        F = self.field
        acc = F.zero
        for t, xi in zip(self.trace_vec, x):
            acc = F.add(acc, F.mul(t, xi))
        return acc

    def conj(self, x):
        return linalg.mat_vec(self.field, self.conj_matrix, x)

    def polar(self, x, y):
        return bilinear_eval(self.field, self.polar_gram, x, y)

    def _validate(self):
        F, n = self.field, self.dim
        if n not in (1, 2, 4, 8):
            raise PreconditionError("composition algebras have dimension 1, 2, 4 or 8")
        for j in range(n):
            ej = self._basis(j)
            if self.mul(self.unit, ej) != ej or self.mul(ej, self.unit) != ej:
                raise PreconditionError(f"{self.label}: unit law fails on e{j}")
        if not F.is_one(self.norm(self.unit)):
            raise PreconditionError(f"{self.label}: n(1) != 1")
        # formal identities in 2*dim symbolic coordinates
        nv = 2 * n
        xs = [Poly.variable(F, nv, i) for i in range(n)]
        ys = [Poly.variable(F, nv, n + i) for i in range(n)]
        prod = self.mul_polyvec(xs, ys)
        n_of_prod = self.norm_poly.subst(prod)
        nx = self.norm_poly.subst(xs)
        ny = self.norm_poly.subst(ys)
        if not (n_of_prod - nx * ny).is_zero():
            raise PreconditionError(f"{self.label}: norm does not compose")
        xbar = matrix_apply_polys(F, self.conj_matrix, xs)
        xxbar = self.mul_polyvec(xs, xbar)
        n_unit = [nx.scale(u) for u in self.unit]
        if any(not (a - b).is_zero() for a, b in zip(xxbar, n_unit)):
            raise PreconditionError(f"{self.label}: x xbar != n(x) 1")
        # degree-2 Cayley-Hamilton: x^2 - t(x) x + n(x) 1 = 0
        xsq = self.mul_polyvec(xs, xs)
        tx = Poly.zero(F, nv)
        for t, xi in zip(self.trace_vec, xs):
            tx = tx + xi.scale(t)
        for k in range(n):
            lhs = xsq[k] - tx * xs[k] + nx.scale(self.unit[k])
            if not lhs.is_zero():
                raise PreconditionError(f"{self.label}: rank equation fails at coordinate {k}")
        self._check_nondegenerate()

    def _check_nondegenerate(self):
        """Nondegenerate in the char-2 sense: the polar form's radical is at
        most 1-dimensional and carries an anisotropic restriction of n."""
        F = self.field
        radical = linalg.kernel_basis(F, self.polar_gram)
        if not radical:
            return
        if len(radical) > 1 or F.char != 2:
            raise PreconditionError(f"{self.label}: norm is degenerate")
        v = radical[0]
        if F.is_zero(self.norm(v)):
            raise PreconditionError(f"{self.label}: norm vanishes on the radical")


def zorn(F):
    """Split octonions as Zorn vector matrices [[a, u], [v, b]] with
    u, v in F^3; norm is the 'determinant' a b - u . v.

    Basis order: e1 = diag(1,0), e2 = diag(0,1), u1, u2, u3 (upper
    vector slots), v1, v2, v3 (lower vector slots).
    """
    z, o = F.zero, F.one

    def vec(a, b, u, v):
        return [a, b] + list(u) + list(v)

    def cross(p, q):
        return [
            F.sub(F.mul(p[1], q[2]), F.mul(p[2], q[1])),
            F.sub(F.mul(p[2], q[0]), F.mul(p[0], q[2])),
            F.sub(F.mul(p[0], q[1]), F.mul(p[1], q[0])),
        ]

    def dot(p, q):
        return F.add(F.add(F.mul(p[0], q[0]), F.mul(p[1], q[1])), F.mul(p[2], q[2]))

    def product(x, y):
        a1, b1, u1, v1 = x[0], x[1], x[2:5], x[5:8]
        a2, b2, u2, v2 = y[0], y[1], y[2:5], y[5:8]
        a = F.add(F.mul(a1, a2), dot(u1, v2))
        b = F.add(F.mul(b1, b2), dot(v1, u2))
        u = [
            F.sub(F.add(F.mul(a1, u2[k]), F.mul(b2, u1[k])), cross(v1, v2)[k])
            for k in range(3)
        ]
        v = [
            F.add(F.add(F.mul(a2, v1[k]), F.mul(b1, v2[k])), cross(u1, u2)[k])
            for k in range(3)
        ]
        return vec(a, b, u, v)

    basis = []
    for i in range(8):
        e = [z] * 8
        e[i] = o
        basis.append(e)
    mult = [[product(basis[i], basis[j]) for j in range(8)] for i in range(8)]
    unit = vec(o, o, [z] * 3, [z] * 3)
    xs = Poly.variables(F, 8)
    # n = x0 x1 - (x2 x5 + x3 x6 + x4 x7)
    norm_poly = xs[0] * xs[1] - (xs[2] * xs[5] + xs[3] * xs[6] + xs[4] * xs[7])
    return CompositionAlgebra(F, mult, unit, norm_poly, label="Zorn")


def ground_field_algebra(F):
    """F itself as the dimension-1 composition algebra (n(x) = x^2)."""
    xs = Poly.variables(F, 1)
    return CompositionAlgebra(F, [[[F.one]]], [F.one], xs[0] * xs[0], label="F")


def cayley_dickson(C, lam, label=None):
    """Double C: (a, b)(c, d) = (a c + lam dbar b, d a + b cbar);
    n(a, b) = n_C(a) - lam n_C(b).  Requires dim(C) <= 4 and lam != 0.
    """
    F = C.field
    lam = F.coerce(lam)
    if F.is_zero(lam):
        raise PreconditionError("cayley_dickson needs lam != 0")
    if C.dim == 8:
        raise DimensionTooLarge("cannot double an octonion algebra")
    n = C.dim
    dim = 2 * n

    def product(x, y):
        a, b = x[:n], x[n:]
        c, d = y[:n], y[n:]
        dbar = C.conj(d)
        cbar = C.conj(c)
        first = [F.add(p, F.mul(lam, q)) for p, q in zip(C.mul(a, c), C.mul(dbar, b))]
        second = [F.add(p, q) for p, q in zip(C.mul(d, a), C.mul(b, cbar))]
        return first + second

    basis = []
    for i in range(dim):
        e = [F.zero] * dim
        e[i] = F.one
        basis.append(e)
    mult = [[product(basis[i], basis[j]) for j in range(dim)] for i in range(dim)]
    unit = list(C.unit) + [F.zero] * n
    xs = Poly.variables(F, dim)
    na = C.norm_poly.subst(xs[:n])
    nb = C.norm_poly.subst(xs[n:])
    norm_poly = na - nb.scale(lam)
    return CompositionAlgebra(F, mult, unit, norm_poly, label=label or f"CD({C.label},{lam})")


def split_binarion(F):
    """F x F with norm a^2 - b^2 presented as a Cayley-Dickson double."""
    return cayley_dickson(ground_field_algebra(F), F.one, label="split-binarion")


def split_quaternion(F):
    """Mat2(F)-like algebra: double the split binarions."""
    return cayley_dickson(split_binarion(F), F.one, label="split-quaternion")


PRESETS = {
    "zorn": zorn,
    "split-quaternion": split_quaternion,
    "split-binarion": split_binarion,
    "ground": ground_field_algebra,
}


def preset(name, F):
    try:
        builder = PRESETS[name]
    except KeyError:
        raise PreconditionError(f"unknown composition algebra preset {name!r}") from None
    return builder(F)
