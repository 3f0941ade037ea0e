"""Sparse multivariate polynomials over an exact field.

A polynomial is a dict from packed exponent keys to nonzero coefficients.
Exponent vectors are packed into a single int, `bits` bits per variable,
so a monomial product is one integer addition.  Keys grow into Python
big ints past 63 bits; products whose keys fit in int64 over GF(p) (or
over the integers) are routed through the kernels module.

All identity verification in the library reduces to exact equality of
such polynomials, which is what makes "holds in all scalar extensions"
decidable.
"""

from fractions import Fraction

import numpy as np

from . import kernels
from .fields import PrimeField, Rationals

_ARRAY_THRESHOLD = 2000  # term-product count below which dict loops win


class Poly:
    __slots__ = ("field", "nvars", "bits", "terms", "maxdeg")

    def __init__(self, field, nvars, terms, bits=4, maxdeg=None):
        self.field = field
        self.nvars = nvars
        self.bits = bits
        self.terms = terms
        if maxdeg is None:
            mask = (1 << bits) - 1
            maxdeg = 0
            for key in terms:
                d = 0
                while key:
                    d += key & mask
                    key >>= bits
                if d > maxdeg:
                    maxdeg = d
        self.maxdeg = maxdeg  # upper bound on total degree

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, field, nvars, bits=4):
        return cls(field, nvars, {}, bits, 0)

    @classmethod
    def const(cls, field, nvars, c, bits=4):
        if field.is_zero(c):
            return cls.zero(field, nvars, bits)
        return cls(field, nvars, {0: c}, bits, 0)

    @classmethod
    def variable(cls, field, nvars, i, bits=4):
        return cls(field, nvars, {1 << (bits * i): field.one}, bits, 1)

    @classmethod
    def variables(cls, field, nvars, bits=4):
        return [cls.variable(field, nvars, i, bits) for i in range(nvars)]

    @classmethod
    def from_dict(cls, field, nvars, expdict, bits=4):
        terms = {}
        for exps, c in expdict.items():
            if field.is_zero(c):
                continue
            key = 0
            for i, e in enumerate(exps):
                if e >= (1 << bits):
                    raise ValueError("exponent does not fit packing width")
                key |= e << (bits * i)
            terms[key] = field.add(terms[key], c) if key in terms else c
        terms = {k: v for k, v in terms.items() if not field.is_zero(v)}
        return cls(field, nvars, terms, bits)

    # -- views ---------------------------------------------------------

    def decode(self, key):
        mask = (1 << self.bits) - 1
        out = []
        for _ in range(self.nvars):
            out.append(key & mask)
            key >>= self.bits
        return tuple(out)

    def items_decoded(self):
        return sorted((self.decode(k), v) for k, v in self.terms.items())

    def is_zero(self):
        return not self.terms

    def degree(self):
        if not self.terms:
            return -1
        return max(sum(self.decode(k)) for k in self.terms)

    def constant_value(self):
        if not self.terms:
            return self.field.zero
        if len(self.terms) == 1 and 0 in self.terms:
            return self.terms[0]
        return None

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        if self.field != other.field or self.nvars != other.nvars:
            return False
        if self.bits == other.bits:
            return self.terms == other.terms
        return dict(self.items_decoded()) == dict(other.items_decoded())

    def __hash__(self):
        return hash((self.nvars, frozenset(self.items_decoded())))

    def __repr__(self):
        parts = []
        for exps, c in self.items_decoded()[:8]:
            mono = "*".join(f"x{i}^{e}" if e > 1 else f"x{i}" for i, e in enumerate(exps) if e)
            parts.append(f"{c}" + ("*" + mono if mono else ""))
        body = " + ".join(parts) if parts else "0"
        if len(self.terms) > 8:
            body += f" + ... ({len(self.terms)} terms)"
        return f"<Poly {body}>"

    # -- packing -------------------------------------------------------

    def repack(self, bits):
        if bits == self.bits:
            return self
        old = self.bits
        mask = (1 << old) - 1
        terms = {}
        for key, c in self.terms.items():
            nk, shift = 0, 0
            while key:
                nk |= (key & mask) << shift
                key >>= old
                shift += bits
            terms[nk] = c
        return Poly(self.field, self.nvars, terms, bits, self.maxdeg)

    def _harmonize(self, other):
        if self.bits == other.bits:
            return self, other
        bits = max(self.bits, other.bits)
        return self.repack(bits), other.repack(bits)

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        a, b = self._harmonize(other)
        F = a.field
        terms = dict(a.terms)
        for k, c in b.terms.items():
            if k in terms:
                s = F.add(terms[k], c)
                if F.is_zero(s):
                    del terms[k]
                else:
                    terms[k] = s
            else:
                terms[k] = c
        return Poly(F, a.nvars, terms, a.bits, max(a.maxdeg, b.maxdeg))

    def __neg__(self):
        F = self.field
        return Poly(F, self.nvars, {k: F.neg(c) for k, c in self.terms.items()}, self.bits, self.maxdeg)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        F = self.field
        if F.is_zero(c):
            return Poly.zero(F, self.nvars, self.bits)
        return Poly(F, self.nvars, {k: F.mul(v, c) for k, v in self.terms.items()}, self.bits, self.maxdeg)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        a, b = self._harmonize(other)
        F = a.field
        if not a.terms or not b.terms:
            return Poly.zero(F, a.nvars, a.bits)
        while a.maxdeg + b.maxdeg >= (1 << a.bits):
            a, b = a.repack(a.bits * 2), b.repack(b.bits * 2)
        n1, n2 = len(a.terms), len(b.terms)
        if n1 * n2 >= _ARRAY_THRESHOLD:
            out = a._mul_arrays(b)
            if out is not None:
                return out
        return a._mul_dict(b)

    def _mul_dict(self, other):
        F = self.field
        out = {}
        get = out.get
        if isinstance(F, PrimeField):
            p = F.p
            small, big = self.terms, other.terms
            if len(small) > len(big):
                small, big = big, small
            for k1, c1 in small.items():
                for k2, c2 in big.items():
                    k = k1 + k2
                    out[k] = (get(k, 0) + c1 * c2) % p
            out = {k: v for k, v in out.items() if v}
        else:
            add, mul, is_zero = F.add, F.mul, F.is_zero
            for k1, c1 in self.terms.items():
                for k2, c2 in other.terms.items():
                    k = k1 + k2
                    prev = get(k)
                    out[k] = mul(c1, c2) if prev is None else add(prev, mul(c1, c2))
            out = {k: v for k, v in out.items() if not is_zero(v)}
        return Poly(F, self.nvars, out, self.bits, self.maxdeg + other.maxdeg)

    def _mul_arrays(self, other):
        """int64 fast path; returns None when the domain does not allow it."""
        F = self.field
        if self.nvars * self.bits > 63:
            return None
        if isinstance(F, PrimeField):
            if F.p > (1 << 31):
                return None
            k1 = np.fromiter(self.terms.keys(), np.int64, len(self.terms))
            c1 = np.fromiter(self.terms.values(), np.int64, len(self.terms))
            k2 = np.fromiter(other.terms.keys(), np.int64, len(other.terms))
            c2 = np.fromiter(other.terms.values(), np.int64, len(other.terms))
            keys, vals = kernels.accumulate_products(k1, c1, k2, c2, F.p)
            terms = dict(zip(keys.tolist(), vals.tolist()))
            return Poly(F, self.nvars, terms, self.bits, self.maxdeg + other.maxdeg)
        if isinstance(F, Rationals):
            try:
                n1 = [c.numerator for c in self.terms.values() if c.denominator == 1]
                n2 = [c.numerator for c in other.terms.values() if c.denominator == 1]
            except AttributeError:  # pragma: no cover
                return None
            if len(n1) != len(self.terms) or len(n2) != len(other.terms):
                return None
            m1 = max(abs(c) for c in n1)
            m2 = max(abs(c) for c in n2)
            # every output coefficient is a sum of <= min(n1,n2) products
            if m1 * m2 * min(len(n1), len(n2)) >= (1 << 62):
                return None
            k1 = np.fromiter(self.terms.keys(), np.int64, len(self.terms))
            k2 = np.fromiter(other.terms.keys(), np.int64, len(other.terms))
            keys, vals = kernels.accumulate_products(
                k1, np.array(n1, np.int64), k2, np.array(n2, np.int64), 0
            )
            terms = {k: Fraction(v) for k, v in zip(keys.tolist(), vals.tolist())}
            return Poly(F, self.nvars, terms, self.bits, self.maxdeg + other.maxdeg)
        return None

    # -- calculus ------------------------------------------------------

    def deriv(self, i):
        """Formal partial derivative; equals the directional polarization
        coefficient, so it is correct in every characteristic."""
        F = self.field
        bits, mask = self.bits, (1 << self.bits) - 1
        shift = bits * i
        terms = {}
        for key, c in self.terms.items():
            e = (key >> shift) & mask
            if not e:
                continue
            nc = F.mul(c, F.from_int(e))
            if F.is_zero(nc):
                continue
            nk = key - (1 << shift)
            terms[nk] = F.add(terms[nk], nc) if nk in terms else nc
        return Poly(F, self.nvars, {k: v for k, v in terms.items() if not F.is_zero(v)}, bits, max(0, self.maxdeg - 1))

    # -- evaluation & substitution --------------------------------------

    def eval(self, point):
        """Evaluate at a list of raw field elements."""
        F = self.field
        bits, mask = self.bits, (1 << self.bits) - 1
        powcache = [{0: F.one} for _ in range(self.nvars)]
        acc = F.zero
        for key, c in self.terms.items():
            val = c
            i = 0
            while key:
                e = key & mask
                if e:
                    cache = powcache[i]
                    pw = cache.get(e)
                    if pw is None:
                        pw = F.pow(point[i], e)
                        cache[e] = pw
                    val = F.mul(val, pw)
                key >>= bits
                i += 1
            acc = F.add(acc, val)
        return acc

    def eval_partial(self, assign):
        """Substitute constants for the variables in `assign` (dict i -> raw)."""
        F = self.field
        bits, mask = self.bits, (1 << self.bits) - 1
        terms = {}
        for key, c in self.terms.items():
            val = c
            nk = 0
            i = 0
            k = key
            while k:
                e = k & mask
                if e:
                    if i in assign:
                        val = F.mul(val, F.pow(assign[i], e))
                    else:
                        nk |= e << (bits * i)
                k >>= bits
                i += 1
            if F.is_zero(val):
                continue
            terms[nk] = F.add(terms[nk], val) if nk in terms else val
        return Poly(F, self.nvars, {k: v for k, v in terms.items() if not F.is_zero(v)}, bits, self.maxdeg)

    def subst(self, maps):
        """Substitute maps[i] (a Poly) for variable i.  All maps share one
        variable space."""
        F = self.field
        bits, mask = self.bits, (1 << self.bits) - 1
        out_nvars = maps[0].nvars if maps else self.nvars
        out_bits = maps[0].bits if maps else self.bits
        acc = Poly.zero(F, out_nvars, out_bits)
        powcache = [{} for _ in range(self.nvars)]
        one = Poly.const(F, out_nvars, F.one, out_bits)
        for key, c in self.terms.items():
            val = None
            i = 0
            k = key
            while k:
                e = k & mask
                if e:
                    cache = powcache[i]
                    pw = cache.get(e)
                    if pw is None:
                        pw = one
                        base = maps[i]
                        ee = e
                        while ee:
                            if ee & 1:
                                pw = pw * base
                            ee >>= 1
                            if ee:
                                base = base * base
                        cache[e] = pw
                    val = pw if val is None else val * pw
                k >>= bits
                i += 1
            term = one.scale(c) if val is None else val.scale(c)
            acc = acc + term
        return acc


# ---------------------------------------------------------------------------
# helpers on vectors of polynomials ("polynomial maps")


def poly_map_eval(polys, point):
    return [p.eval(point) for p in polys]


def poly_map_subst(polys, maps):
    return [p.subst(maps) for p in polys]


def linear_polys_from_matrix(field, M, nvars=None, bits=4, var_offset=0):
    """Rows of M as linear polynomials: out_i = sum_j M[i][j] x_(j+var_offset)."""
    n = nvars if nvars is not None else (len(M[0]) if M else 0)
    out = []
    for row in M:
        terms = {}
        for j, c in enumerate(row):
            if not field.is_zero(c):
                terms[1 << (bits * (j + var_offset))] = c
        out.append(Poly(field, n, terms, bits, 1))
    return out


def quadratic_coefficients(poly):
    """{(i,j) i<=j: coeff} of a (at most) quadratic polynomial, plus the
    linear/constant parts ({i: coeff}, const)."""
    quad, lin = {}, {}
    const = poly.field.zero
    for exps, c in poly.items_decoded():
        nz = [(i, e) for i, e in enumerate(exps) if e]
        total = sum(e for _, e in nz)
        if total == 0:
            const = c
        elif total == 1:
            lin[nz[0][0]] = c
        elif total == 2:
            if len(nz) == 1:
                quad[(nz[0][0], nz[0][0])] = c
            else:
                quad[(nz[0][0], nz[1][0])] = c
        else:
            raise ValueError("polynomial is not quadratic")
    return quad, lin, const


def polar_pairs(poly):
    """Bilinearization data of a quadratic form q: pairs (i, j, coeff) such
    that q(x+y) - q(x) - q(y) = sum coeff * (x_i y_j + x_j y_i) over i < j
    plus sum 2*coeff * x_i y_i for diagonal entries (the 2 is computed in
    the field, so this is correct in characteristic 2)."""
    F = poly.field
    quad, lin, const = quadratic_coefficients(poly)
    if lin or not F.is_zero(const):
        raise ValueError("not a homogeneous quadratic form")
    out = []
    two = F.from_int(2)
    for (i, j), c in quad.items():
        if i == j:
            c2 = F.mul(two, c)
            if not F.is_zero(c2):
                out.append((i, i, c2))
        else:
            out.append((i, j, c))
    return out
