"""Cubic norm structures and their quadratic Jordan algebras.

A cubic norm structure is stored symbolically: the base point as a
coordinate vector, the adjoint as n quadratic polynomials, the norm as a
cubic polynomial.  The defining identities are then *formal* polynomial
identities, whose validity is equivalent to validity in all scalar
extensions, and the verifier below decides them by exact expansion (or,
past a work budget, by seeded evaluation over a large scalar extension
with the standard Schwartz-Zippel failure bound).
"""

from dataclasses import dataclass, field as dc_field
import random

from .errors import (
    AxiomFailure,
    InternalVerificationError,
    NotInvertible,
    SingularStructure,
)
from . import linalg
from .commalg import bilinear_eval, matrix_apply_polys
from .fields import Rationals, extension_of_size
from .polys import Poly, polar_pairs


@dataclass
class CheckConfig:
    """Knobs for identity checking.

    identity_mode: 'formal', 'randomized' or 'auto'.  Auto expands fully
    when the predicted term-product work is at most `budget`, otherwise
    falls back to seeded evaluation at `points` points with coordinates
    from a scalar-extension domain of at least `min_domain` elements.
    """

    identity_mode: str = "auto"
    budget: int = 10**6
    seed: int = 0
    points: int = 200
    min_domain: int = 2**31


DEFAULT_CONFIG = CheckConfig()


@dataclass
class CheckResult:
    name: str
    passed: bool
    mode: str
    details: str = ""
    seed: int = None
    points: int = 0

    def as_dict(self):
        d = {"name": self.name, "passed": self.passed, "mode": self.mode}
        if self.details:
            d["details"] = self.details
        if self.mode == "randomized":
            d["seed"] = self.seed
            d["points"] = self.points
        return d


class AxiomReport:
    """Outcome of the four cubic-norm-structure axioms plus nondegeneracy."""

    def __init__(self, results, nondegenerate):
        self.results = results
        self.nondegenerate = nondegenerate

    @property
    def passed(self):
        return all(r.passed for r in self.results)

    def failures(self):
        return [r.name for r in self.results if not r.passed]

    def as_dict(self):
        return {
            "passed": self.passed,
            "nondegenerate": self.nondegenerate,
            "axioms": [r.as_dict() for r in self.results],
        }


def _gradient_and_hessian_at(poly, point):
    """Formal gradient and Hessian of a polynomial, evaluated at a point,
    in one pass over the terms (binomial-coefficient multiplicities, so
    valid in every characteristic)."""
    F = poly.field
    n = poly.nvars
    grad = [F.zero] * n
    hess = [[F.zero] * n for _ in range(n)]
    bits, mask = poly.bits, (1 << poly.bits) - 1
    for key, c in poly.terms.items():
        exps = []
        k = key
        i = 0
        while k:
            e = k & mask
            if e:
                exps.append((i, e))
            k >>= bits
            i += 1
        full = c
        for i, e in exps:
            full = F.mul(full, F.pow(point[i], e))
        for i, e in exps:
            if F.is_zero(point[i]):
                # recompute without dividing
                val = F.mul(c, F.from_int(e))
                for j, ej in exps:
                    pw = ej - 1 if j == i else ej
                    if pw:
                        val = F.mul(val, F.pow(point[j], pw))
                grad[i] = F.add(grad[i], val)
            else:
                grad[i] = F.add(
                    grad[i], F.div(F.mul(full, F.from_int(e)), point[i])
                )
        for ai in range(len(exps)):
            i, ei = exps[ai]
            for aj in range(ai, len(exps)):
                j, ej = exps[aj]
                if i == j:
                    mult = ei * (ei - 1)
                else:
                    mult = ei * ej
                if not mult:
                    continue
                val = F.mul(c, F.from_int(mult))
                for t, et in exps:
                    pw = et - (1 if t == i else 0) - (1 if t == j else 0)
                    if pw:
                        val = F.mul(val, F.pow(point[t], pw))
                hess[i][j] = F.add(hess[i][j], val)
                if i != j:
                    hess[j][i] = F.add(hess[j][i], val)
    return grad, hess


class CubicNormStructure:
    """(V, c, #, N): base point, quadratic adjoint map, cubic norm.

    The bilinear trace is derived from the norm and base point:
    T(y, z) = (dN at c in direction y)(dN at c in direction z)
              - (second directional derivative of N at c).
    """

    def __init__(self, field, dim, basepoint, adjoint, norm, label="", datum=None):
        self.field = field
        self.dim = dim
        self.c = list(basepoint)
        self.adjoint = list(adjoint)
        self.norm = norm
        self.label = label
        self.datum = datum  # provenance (construction parameters), optional
        F = field
        dN_c, hess_c = _gradient_and_hessian_at(norm, self.c)
        self.gram = [
            [F.sub(F.mul(dN_c[i], dN_c[j]), hess_c[i][j]) for j in range(dim)]
            for i in range(dim)
        ]
        self.trace_vec = [
            F.sum(F.mul(self.gram[i][j], self.c[j]) for j in range(dim)) for i in range(dim)
        ]
        # cross[k]: polarization pairs of adjoint[k]; (i, j, coeff) with i < j
        # contributes coeff*(x_i y_j + x_j y_i), (i, i, coeff) contributes
        # coeff * x_i y_i
        self.cross = [polar_pairs(q) for q in self.adjoint]

    # -- numeric operations ---------------------------------------------

    def N(self, x):
        return self.norm.eval(x)

    def sharp(self, x):
        return [q.eval(x) for q in self.adjoint]

    def cross_vec(self, x, y):
        F = self.field
        out = [F.zero] * self.dim
        for k, pairs in enumerate(self.cross):
            acc = F.zero
            for i, j, c in pairs:
                if i == j:
                    acc = F.add(acc, F.mul(c, F.mul(x[i], y[i])))
                else:
                    acc = F.add(acc, F.mul(c, F.add(F.mul(x[i], y[j]), F.mul(x[j], y[i]))))
            out[k] = acc
        return out

    def T(self, x, y):
        return bilinear_eval(self.field, self.gram, x, y)

    def T_lin(self, x):
        F = self.field
        return F.sum(F.mul(t, xi) for t, xi in zip(self.trace_vec, x))

    def is_invertible(self, x):
        return not self.field.is_zero(self.N(x))

    def inv(self, x):
        F = self.field
        n = self.N(x)
        if F.is_zero(n):
            raise NotInvertible("norm vanishes")
        ninv = F.inv(n)
        return [F.mul(ninv, s) for s in self.sharp(x)]

    def u_apply(self, x, y):
        """U_x y = T(x, y) x - x# x y."""
        F = self.field
        t = self.T(x, y)
        s = self.sharp(x)
        cr = self.cross_vec(s, y)
        return [F.sub(F.mul(t, xi), ci) for xi, ci in zip(x, cr)]

    def u_matrix(self, x):
        """Matrix of U_x (columns U_x e_m)."""
        F = self.field
        s = self.sharp(x)
        cols = []
        for m in range(self.dim):
            em = [F.one if i == m else F.zero for i in range(self.dim)]
            t = self.T(x, em)
            cr = self.cross_vec(s, em)
            cols.append([F.sub(F.mul(t, xi), ci) for xi, ci in zip(x, cr)])
        return linalg.transpose(cols)

    def is_nonsingular(self):
        return not self.field.is_zero(linalg.det(self.field, self.gram))

    # -- symbolic helpers -------------------------------------------------

    def sharp_polys(self, nvars=None, bits=None):
        """Adjoint as polynomials, optionally widened to nvars variables."""
        out = self.adjoint
        if bits is not None:
            out = [p.repack(bits) for p in out]
        if nvars is not None:
            out = [Poly(p.field, nvars, p.terms, p.bits, p.maxdeg) for p in out]
        return out

    def cross_apply_polys(self, a_polys, b_polys):
        """(a x b) with polynomial coordinate vectors."""
        F = self.field
        nv, bits = a_polys[0].nvars, a_polys[0].bits
        out = []
        for pairs in self.cross:
            acc = Poly.zero(F, nv, bits)
            for i, j, c in pairs:
                if i == j:
                    acc = acc + (a_polys[i] * b_polys[i]).scale(c)
                else:
                    acc = acc + (a_polys[i] * b_polys[j] + a_polys[j] * b_polys[i]).scale(c)
            out.append(acc)
        return out


def _work_estimate_subst(outer_polys, inner_sizes):
    """Rough term-product count of substituting polys of the given sizes
    into quadratic forms."""
    total = 0
    avg = sum(inner_sizes) / max(1, len(inner_sizes))
    for q in outer_polys:
        total += len(q.terms) * avg * avg
    return total


def verify_cns_axioms(X, config=DEFAULT_CONFIG):
    """Check the four defining identities formally (or randomized past the
    work budget) and report nondegeneracy of the bilinear trace."""
    F = X.field
    n = X.dim
    results = []

    # base point identities: c# = c, N(c) = 1
    bapo = X.sharp(X.c) == list(X.c) and F.is_one(X.N(X.c))
    results.append(CheckResult("base-point", bapo, "exact"))

    # unit identity: c x x = T(x) c - x, linear in x, done formally
    xs = Poly.variables(F, n)
    c_polys = [Poly.const(F, n, ci) for ci in X.c]
    lhs = X.cross_apply_polys(c_polys, xs)
    tx = Poly.zero(F, n)
    for t, xi in zip(X.trace_vec, xs):
        tx = tx + xi.scale(t)
    unid = all(
        (lhs[k] - (tx.scale(X.c[k]) - xs[k])).is_zero() for k in range(n)
    )
    results.append(CheckResult("unit-identity", unid, "formal"))

    # gradient identity: d_j N = T(x#, e_j) for every basis direction
    grid = True
    for j in range(n):
        rhs = Poly.zero(F, n)
        for i in range(n):
            g = X.gram[i][j]
            if not F.is_zero(g):
                rhs = rhs + X.adjoint[i].scale(g)
        if not (X.norm.deriv(j) - rhs).is_zero():
            grid = False
            break
    results.append(CheckResult("gradient-identity", grid, "formal"))

    # adjoint identity: x## = N(x) x
    sizes = [len(q.terms) for q in X.adjoint]
    work = _work_estimate_subst(X.adjoint, sizes)
    mode = config.identity_mode
    if mode == "auto":
        mode = "formal" if work <= config.budget else "randomized"
    if mode == "formal":
        sharp2 = [q.subst(X.adjoint) for q in X.adjoint]
        adid = all((sharp2[k] - X.norm * xs[k]).is_zero() for k in range(n))
        results.append(CheckResult("adjoint-identity", adid, "formal"))
    else:
        ok = _randomized_adjoint_identity(X, config)
        results.append(
            CheckResult("adjoint-identity", ok, "randomized", seed=config.seed, points=config.points)
        )

    nondeg = X.is_nonsingular()
    return AxiomReport(results, nondeg)


class _ScalarScope:
    """Evaluation scope over a scalar extension E of the base field F:
    values are single E-elements, coefficients embed from F.

    Over the rationals, E = Q and points are integers below min_domain,
    giving the same Schwartz-Zippel bound over the integer grid.
    """

    def __init__(self, F, config):
        self.rng = random.Random(config.seed)
        self.F = F
        if F.is_finite:
            self.E, self.emb = extension_of_size(F, config.min_domain)
            self._sample = lambda: self.E.random_element(self.rng)
        else:
            assert isinstance(F, Rationals)
            self.E, self.emb = F, lambda a: a
            self._sample = lambda: F.from_int(self.rng.randrange(config.min_domain))
        E = self.E
        self.add, self.sub, self.mul = E.add, E.sub, E.mul

    def zero(self):
        return self.E.zero

    def one(self):
        return self.E.one

    def smul(self, c, a):
        """Multiply by a base-field coefficient."""
        return self.E.mul(self.emb(c), a)

    def point(self, n):
        return [self._sample() for _ in range(n)]

    def eq_vec(self, u, v):
        return u == v


class _BatchScope:
    """Same interface, but a value is a numpy int64 array of shape
    (points, k) holding all sample points of one coordinate at once, over
    E = GF(p^k) for the prime base field GF(p).  Exact: residues stay far
    below 2**63."""

    def __init__(self, F, config):
        import numpy as np

        self.np = np
        self.rng = random.Random(config.seed)
        self.F = F
        self.p = F.p
        E, _ = extension_of_size(F, config.min_domain)
        self.k = getattr(E, "k", 1)
        self.npoints = config.points
        if self.k > 1:
            self.red = np.array([list(r) for r in E._red], dtype=np.int64)  # (k-1, k)
        else:
            self.red = None
        k = self.k
        idx = np.arange(k)
        self.conv_idx = (idx[:, None] + idx[None, :]).ravel()

    def zero(self):
        return self.np.zeros((self.npoints, self.k), dtype=self.np.int64)

    def one(self):
        out = self.zero()
        out[:, 0] = 1
        return out

    def point(self, n):
        rng, p = self.rng, self.p
        out = []
        for _ in range(n):
            arr = self.np.fromiter(
                (rng.randrange(p) for _ in range(self.npoints * self.k)), self.np.int64
            ).reshape(self.npoints, self.k)
            out.append(arr)
        return out

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def smul(self, c, a):
        return (int(c) * a) % self.p

    def mul(self, a, b):
        np, k = self.np, self.k
        if k == 1:
            return (a * b) % self.p
        prod = np.einsum("ni,nj->nij", a, b).reshape(a.shape[0], k * k)
        out = np.zeros((a.shape[0], 2 * k - 1), dtype=np.int64)
        np.add.at(out, (slice(None), self.conv_idx), prod)
        acc = out[:, :k] + out[:, k:] @ self.red
        return acc % self.p

    def eq_vec(self, u, v):
        return all(self.np.array_equal(a, b) for a, b in zip(u, v))


def _make_scope(F, config):
    from .fields import PrimeField

    if isinstance(F, PrimeField):
        return _BatchScope(F, config)
    return _ScalarScope(F, config)


class _ScopedStructure:
    """A cubic norm structure compiled for scope evaluation: decoded term
    lists instead of packed polynomials."""

    def __init__(self, X):
        F = X.field
        self.X = X
        self.sharp_terms = [self._form_terms(q) for q in X.adjoint]
        self.norm_terms = self._form_terms(X.norm)
        self.gram_nz = [
            (i, j, g)
            for i, row in enumerate(X.gram)
            for j, g in enumerate(row)
            if not F.is_zero(g)
        ]

    @staticmethod
    def _form_terms(poly):
        out = []
        for exps, c in poly.items_decoded():
            vars_ = []
            for i, e in enumerate(exps):
                vars_.extend([i] * e)
            out.append((vars_, c))
        return out

    def eval_form(self, scope, terms, x):
        acc = scope.zero()
        for vars_, c in terms:
            val = None
            for i in vars_:
                val = x[i] if val is None else scope.mul(val, x[i])
            if val is None:
                val = scope.one()
            acc = scope.add(acc, scope.smul(c, val))
        return acc

    def sharp(self, scope, x):
        return [self.eval_form(scope, t, x) for t in self.sharp_terms]

    def norm(self, scope, x):
        return self.eval_form(scope, self.norm_terms, x)

    def cross(self, scope, x, y):
        out = []
        for pairs in self.X.cross:
            acc = scope.zero()
            for i, j, c in pairs:
                if i == j:
                    acc = scope.add(acc, scope.smul(c, scope.mul(x[i], y[i])))
                else:
                    s = scope.add(scope.mul(x[i], y[j]), scope.mul(x[j], y[i]))
                    acc = scope.add(acc, scope.smul(c, s))
            out.append(acc)
        return out

    def T(self, scope, x, y):
        acc = scope.zero()
        for i, j, g in self.gram_nz:
            acc = scope.add(acc, scope.smul(g, scope.mul(x[i], y[j])))
        return acc

    def u_apply(self, scope, x, y):
        t = self.T(scope, x, y)
        s = self.sharp(scope, x)
        cr = self.cross(scope, s, y)
        return [scope.sub(scope.mul(t, xi), ci) for xi, ci in zip(x, cr)]


def _randomized_adjoint_identity(X, config):
    scope = _make_scope(X.field, config)
    S = _ScopedStructure(X)
    reps = 1 if isinstance(scope, _BatchScope) else config.points
    for _ in range(reps):
        x = scope.point(X.dim)
        lhs = S.sharp(scope, S.sharp(scope, x))
        nx = S.norm(scope, x)
        rhs = [scope.mul(nx, xi) for xi in x]
        if not scope.eq_vec(lhs, rhs):
            return False
    return True


# ---------------------------------------------------------------------------
# quadratic Jordan algebras


class QuadraticJordan:
    """U-operator presentation: u_polys[k] is (U_x y)_k as a polynomial in
    2n variables (x = vars 0..n-1, y = vars n..2n-1), quadratic in x and
    linear in y."""

    def __init__(self, field, dim, unit, u_polys, cns=None, label=""):
        self.field = field
        self.dim = dim
        self.unit = list(unit)
        self.u_polys = u_polys
        self.cns = cns
        self.label = label

    def u_apply(self, x, y):
        if self.cns is not None:
            return self.cns.u_apply(x, y)
        point = list(x) + list(y)
        return [p.eval(point) for p in self.u_polys]

    def u_matrix(self, x):
        if self.cns is not None:
            return self.cns.u_matrix(x)
        F, n = self.field, self.dim
        assign = {i: x[i] for i in range(n)}
        cols = [[F.zero] * n for _ in range(n)]
        for k, p in enumerate(self.u_polys):
            lin = p.eval_partial(assign)
            for exps, c in lin.items_decoded():
                nz = [(i, e) for i, e in enumerate(exps) if e]
                if len(nz) != 1 or nz[0][1] != 1 or nz[0][0] < n:
                    raise InternalVerificationError("U polynomial not linear in y")
                cols[nz[0][0] - n][k] = c
        return linalg.transpose(cols)

    def is_invertible(self, x):
        if self.cns is not None:
            return self.cns.is_invertible(x)
        return not self.field.is_zero(linalg.det(self.field, self.u_matrix(x)))

    def inverse(self, x):
        """x^{-1} = U_x^{-1} x; for norm structures N(x)^{-1} x#."""
        if self.cns is not None:
            return self.cns.inv(x)
        sol = linalg.solve(self.field, self.u_matrix(x), list(x))
        if sol is None or not self.is_invertible(x):
            raise NotInvertible("U_x is singular")
        return sol

    def power(self, x, n):
        """x^0 = 1, x^1 = x, x^(n+2) = U_x x^n; negative via the inverse."""
        if n < 0:
            return self.power(self.inverse(x), -n)
        if n == 0:
            return list(self.unit)
        if n == 1:
            return list(x)
        return self.u_apply(x, self.power(x, n - 2))


def jordan_from_cns(X, config=DEFAULT_CONFIG, verify=True):
    """The Jordan algebra with U_x y = T(x, y) x - x# x y and unit c."""
    if verify:
        report = verify_cns_axioms(X, config)
        if not report.passed:
            raise AxiomFailure(f"{X.label}: axioms failed: {report.failures()}")
    F, n = X.field, X.dim
    nv = 2 * n
    xs = [Poly.variable(F, nv, i) for i in range(n)]
    ys = [Poly.variable(F, nv, n + i) for i in range(n)]
    txy = Poly.zero(F, nv)
    for i in range(n):
        row = X.gram[i]
        for j in range(n):
            if not F.is_zero(row[j]):
                txy = txy + (xs[i] * ys[j]).scale(row[j])
    sharp_x = [Poly(F, nv, q.terms, q.bits, q.maxdeg) for q in X.adjoint]
    cross_sy = X.cross_apply_polys(sharp_x, ys)
    u_polys = [txy * xs[k] - cross_sy[k] for k in range(n)]
    return QuadraticJordan(F, n, X.c, u_polys, cns=X, label=X.label)


def norm_composition_check(X, config=DEFAULT_CONFIG):
    """N(U_x y) = N(x)^2 N(y), the norm-composition law of the associated
    algebra.  Work-budgeted: formal when cheap enough, else randomized."""
    F, n = X.field, X.dim
    J = jordan_from_cns(X, config, verify=False)
    sizes = [len(p.terms) for p in J.u_polys]
    avg = sum(sizes) / len(sizes)
    work = len(X.norm.terms) * avg**3
    mode = config.identity_mode
    if mode == "auto":
        mode = "formal" if work <= config.budget else "randomized"
    if mode == "formal":
        nv = 2 * n
        lhs = X.norm.subst(J.u_polys)
        nx = X.norm.subst([Poly.variable(F, nv, i) for i in range(n)])
        ny = X.norm.subst([Poly.variable(F, nv, n + i) for i in range(n)])
        ok = (lhs - nx * nx * ny).is_zero()
        return CheckResult("norm-composition", ok, "formal")
    scope = _make_scope(F, config)
    S = _ScopedStructure(X)
    reps = 1 if isinstance(scope, _BatchScope) else config.points
    for _ in range(reps):
        x = scope.point(n)
        y = scope.point(n)
        lhs = S.norm(scope, S.u_apply(scope, x, y))
        nx = S.norm(scope, x)
        rhs = scope.mul(scope.mul(nx, nx), S.norm(scope, y))
        if not scope.eq_vec([lhs], [rhs]):
            return CheckResult("norm-composition", False, "randomized", seed=config.seed, points=config.points)
    return CheckResult("norm-composition", True, "randomized", seed=config.seed, points=config.points)


def _u_entry_matrix(J, arg):
    """U_x (arg='x') or U_y (arg='y') as an n x n matrix of Polys in the
    2n-variable space; entry [k][m] multiplies the m-th coordinate of the
    other argument."""
    F, n = J.field, J.dim
    bits = J.u_polys[0].bits
    nv = 2 * n
    M = [[Poly.zero(F, nv, bits) for _ in range(n)] for _ in range(n)]
    for k, p in enumerate(J.u_polys):
        mask = (1 << bits) - 1
        for key, c in p.terms.items():
            # find the y-variable (index >= n) in this term
            yvar = None
            rest = 0
            kk, i = key, 0
            while kk:
                e = kk & mask
                if e:
                    if i >= n:
                        yvar = i - n
                    else:
                        rest |= e << (bits * i)
                kk >>= bits
                i += 1
            if yvar is None:
                raise InternalVerificationError("U polynomial has a y-free term")
            M[k][yvar] = M[k][yvar] + Poly(F, nv, {rest: c}, bits)
    if arg == "x":
        return M
    # swap variable roles: entries become quadratics in y
    return [[_swap_xy(p, n) for p in row] for row in M]


def _swap_xy(p, n):
    F = p.field
    bits = p.bits
    mask = (1 << bits) - 1
    terms = {}
    for key, c in p.terms.items():
        nk = 0
        i = 0
        while key:
            e = key & mask
            if e:
                j = i + n if i < n else i - n
                nk |= e << (bits * j)
            key >>= bits
            i += 1
        terms[nk] = c
    return Poly(F, p.nvars, terms, bits, p.maxdeg)


def _poly_mat_mul(Fld, A, B):
    n = len(A)
    r = len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(r):
            acc = None
            for k in range(len(B)):
                if A[i][k].is_zero() or B[k][j].is_zero():
                    continue
                term = A[i][k] * B[k][j]
                acc = term if acc is None else acc + term
            row.append(acc if acc is not None else Poly.zero(Fld, A[i][0].nvars, A[i][0].bits))
        out.append(row)
    return out


def fundamental_formula_check(J, config=DEFAULT_CONFIG, third_axiom=True):
    """U_{U_x y} = U_x U_y U_x.

    Formal for dim <= 9 (exact matrix identity in 2n variables);
    randomized with >= config.points seeded points over a scalar-extension
    domain of >= config.min_domain elements otherwise.  Optionally also
    checks U_x V_{y,x} = V_{x,y} U_x the same way.
    """
    F, n = J.field, J.dim
    mode = config.identity_mode
    if mode == "auto":
        mode = "formal" if n <= 9 else "randomized"
    results = []
    if mode == "formal":
        # repack to 3 bits/variable so int64 kernels apply up to 2n = 20 vars
        bits = 3 if 2 * n * 3 <= 63 else J.u_polys[0].bits
        u_polys = [p.repack(bits) for p in J.u_polys]
        Jp = QuadraticJordan(F, n, J.unit, u_polys, cns=None, label=J.label)
        Mx = _u_entry_matrix(Jp, "x")
        My = _u_entry_matrix(Jp, "y")
        rhs = _poly_mat_mul(F, Mx, _poly_mat_mul(F, My, Mx))
        # LHS via a = U_x y: (U_a)_{k,m} = (sum_i T[i][m] a_i) a_k - (a# x e_m)_k
        a = u_polys
        X = J.cns
        if X is None:
            raise AxiomFailure("formal fundamental-formula check needs norm-structure data")
        sharp_a = [q.repack(bits).subst(a) for q in X.adjoint]
        S = []
        for m in range(n):
            acc = Poly.zero(F, 2 * n, bits)
            for i in range(n):
                g = X.gram[i][m]
                if not F.is_zero(g):
                    acc = acc + a[i].scale(g)
            S.append(acc)
        ok = True
        for k in range(n):
            cross_k = X.cross[k]
            for m in range(n):
                entry = S[m] * a[k]
                for i, j, c in cross_k:
                    if i == j:
                        if i == m:
                            entry = entry - sharp_a[i].scale(c)
                    else:
                        if j == m:
                            entry = entry - sharp_a[i].scale(c)
                        elif i == m:
                            entry = entry - sharp_a[j].scale(c)
                if not (entry - rhs[k][m]).is_zero():
                    ok = False
                    break
            if not ok:
                break
        results.append(CheckResult("fundamental-formula", ok, "formal"))
        if third_axiom:
            # V_{x,y} entries: formal partials of the U polynomials in x
            Vxy = [[_partial_entry(u_polys[k], m, bits) for m in range(n)] for k in range(n)]
            Vyx = [[_swap_xy(p, n) for p in row] for row in Vxy]
            lhs3 = _poly_mat_mul(F, Mx, Vyx)
            rhs3 = _poly_mat_mul(F, Vxy, Mx)
            ok3 = all(
                (lhs3[k][m] - rhs3[k][m]).is_zero() for k in range(n) for m in range(n)
            )
            results.append(CheckResult("u-v-commutation", ok3, "formal"))
    else:
        X = J.cns
        scope = _make_scope(F, config)
        S = _ScopedStructure(X)
        ok = True
        ok3 = True
        reps = 1 if isinstance(scope, _BatchScope) else config.points

        def triple(u, v, w):
            # {u v w} = U_{u+w} v - U_u v - U_w v
            s = [scope.add(ui, wi) for ui, wi in zip(u, w)]
            t1 = S.u_apply(scope, s, v)
            t2 = S.u_apply(scope, u, v)
            t3 = S.u_apply(scope, w, v)
            return [scope.sub(scope.sub(p, q), r) for p, q, r in zip(t1, t2, t3)]

        for _ in range(reps):
            x = scope.point(n)
            y = scope.point(n)
            z = scope.point(n)
            a = S.u_apply(scope, x, y)
            lhs = S.u_apply(scope, a, z)
            rhs = S.u_apply(scope, x, S.u_apply(scope, y, S.u_apply(scope, x, z)))
            if not scope.eq_vec(lhs, rhs):
                ok = False
                break
            if third_axiom:
                lhs3v = S.u_apply(scope, x, triple(y, x, z))
                rhs3v = triple(x, y, S.u_apply(scope, x, z))
                if not scope.eq_vec(lhs3v, rhs3v):
                    ok3 = False
                    break
        results.append(
            CheckResult("fundamental-formula", ok, "randomized", seed=config.seed, points=config.points)
        )
        if third_axiom:
            results.append(
                CheckResult("u-v-commutation", ok3, "randomized", seed=config.seed, points=config.points)
            )
    return results


def _partial_entry(p, m, bits):
    return p.deriv(m)


# ---------------------------------------------------------------------------
# isotopes


def isotope_cns(X, p):
    """The p-isotope: base point p^{-1}, adjoint N(p) U_p^{-1} (x#),
    norm N(p) N.  Verifies the isotope trace rule T'(y,z) = T(U_p y, z)."""
    F = X.field
    Np = X.N(p)
    if F.is_zero(Np):
        raise NotInvertible("isotope needs an invertible p")
    Up = X.u_matrix(p)
    Up_inv = linalg.inverse(F, Up)
    new_c = X.inv(p)
    scaled = [[F.mul(Np, e) for e in row] for row in Up_inv]
    new_adjoint = matrix_apply_polys(F, scaled, X.adjoint)
    new_norm = X.norm.scale(Np)
    label = f"{X.label}^({p})" if X.label else "isotope"
    Xp = CubicNormStructure(F, X.dim, new_c, new_adjoint, new_norm, label=label, datum=X.datum)
    # T^{(p)}(y, z) = T(U_p y, z): Gram' = (U_p)^t G
    expected = linalg.mat_mul(F, linalg.transpose(Up), X.gram)
    if Xp.gram != expected:
        raise InternalVerificationError("isotope trace rule failed")
    return Xp


# ---------------------------------------------------------------------------
# certificates


ISOMORPHISM = "Isomorphism"
ISOTOPY = "Isotopy"
REJECTED = "Rejected"


@dataclass
class IsotopyCertificate:
    source: object
    target: object
    matrix: list
    multiplier: object = None
    kind: str = REJECTED
    reason: str = ""
    structural_checked: bool = False

    @property
    def verified(self):
        return self.kind in (ISOMORPHISM, ISOTOPY)

    def as_dict(self):
        F = self.source.field
        return {
            "kind": self.kind,
            "multiplier": None if self.multiplier is None else F.to_json(self.multiplier)
            if hasattr(F, "to_json")
            else str(self.multiplier),
            "reason": self.reason,
            "structural_checked": self.structural_checked,
        }


def certify_map(X, Y, M, structural="formal"):
    """Classify the linear map M (source coords -> target coords) between
    cubic norm structures.

    Isotopy: N_Y(M x) = mu N_X(x) formally for a nonzero scalar mu and M
    bijective.  Isomorphism: additionally M c_X = c_Y (forcing mu = 1).
    With structural="formal" the operator identity
    U^Y_{Mx} = M U^X_x M# (M# the trace-form adjoint of M) is verified
    formally; it must hold whenever the norm test passed, so its failure
    raises InternalVerificationError.
    """
    F = X.field
    n = X.dim
    if Y.dim != n or len(M) != n or any(len(row) != n for row in M):
        return IsotopyCertificate(X, Y, M, kind=REJECTED, reason="dimension mismatch")
    if not X.is_nonsingular() or not Y.is_nonsingular():
        raise SingularStructure("norm-similarity criterion needs nondegenerate traces")
    if F.is_zero(linalg.det(F, M)):
        return IsotopyCertificate(X, Y, M, kind=REJECTED, reason="matrix not bijective")
    # N_Y composed with M
    rows = [Poly.variables(F, n)]
    lin = matrix_apply_polys(F, M, rows[0])
    NM = Y.norm.subst(lin)
    mu = None
    for key, c in X.norm.terms.items():
        got = NM.terms.get(key)
        if got is None:
            return IsotopyCertificate(X, Y, M, kind=REJECTED, reason="norms not proportional")
        cand = F.div(got, c)
        if mu is None:
            mu = cand
        elif mu != cand:
            return IsotopyCertificate(X, Y, M, kind=REJECTED, reason="norms not proportional")
    if mu is None or F.is_zero(mu):
        return IsotopyCertificate(X, Y, M, kind=REJECTED, reason="zero norm multiplier")
    if not (NM - X.norm.scale(mu)).is_zero():
        return IsotopyCertificate(X, Y, M, kind=REJECTED, reason="norms not proportional")
    maps_base = linalg.mat_vec(F, M, X.c) == list(Y.c)
    kind = ISOMORPHISM if (maps_base and F.is_one(mu)) else ISOTOPY
    cert = IsotopyCertificate(X, Y, M, multiplier=mu, kind=kind)
    if structural == "formal":
        _structural_check(X, Y, M, cert)
        cert.structural_checked = True
    return cert


def _structural_check(X, Y, M, cert):
    """U^Y_{Mx} = M U^X_x M# with M# = G_X^{-1} M^t G_Y."""
    F, n = X.field, X.dim
    Msharp = linalg.mat_mul(
        F, linalg.inverse(F, X.gram), linalg.mat_mul(F, linalg.transpose(M), Y.gram)
    )
    nv = 2 * n
    xs = [Poly.variable(F, nv, i) for i in range(n)]
    ws = [Poly.variable(F, nv, n + i) for i in range(n)]
    z = matrix_apply_polys(F, M, xs)  # M x, in target coordinates
    z_sharp = [q.subst(z) for q in Y.adjoint]
    t_zw = Poly.zero(F, nv)
    for i in range(n):
        row = Y.gram[i]
        for j in range(n):
            if not F.is_zero(row[j]):
                t_zw = t_zw + (z[i] * ws[j]).scale(row[j])
    lhs = [t_zw * z[k] - c for k, c in enumerate(Y.cross_apply_polys(z_sharp, ws))]
    v = matrix_apply_polys(F, Msharp, ws)  # M# w, in source coordinates
    x_sharp = [Poly(F, nv, q.terms, q.bits, q.maxdeg) for q in X.adjoint]
    t_xv = Poly.zero(F, nv)
    for i in range(n):
        row = X.gram[i]
        for j in range(n):
            if not F.is_zero(row[j]):
                t_xv = t_xv + (xs[i] * v[j]).scale(row[j])
    inner = [t_xv * xs[m] - c for m, c in enumerate(X.cross_apply_polys(x_sharp, v))]
    rhs = matrix_apply_polys(F, M, inner)
    for k in range(n):
        if not (lhs[k] - rhs[k]).is_zero():
            if cert.verified:
                raise InternalVerificationError(
                    "certified map violates the structural identity (bug)"
                )
            cert.kind = REJECTED
            cert.reason = "structural identity failed"
            return


def compose_certificates(c2, c1):
    """Certificate for the composite map (c2 after c1); multipliers multiply."""
    F = c1.source.field
    M = linalg.mat_mul(F, c2.matrix, c1.matrix)
    if not (c1.verified and c2.verified):
        return IsotopyCertificate(c1.source, c2.target, M, kind=REJECTED, reason="composing unverified maps")
    mu = F.mul(c1.multiplier, c2.multiplier)
    maps_base = linalg.mat_vec(F, M, c1.source.c) == list(c2.target.c)
    kind = ISOMORPHISM if (maps_base and F.is_one(mu)) else ISOTOPY
    return IsotopyCertificate(c1.source, c2.target, M, multiplier=mu, kind=kind)
