"""Exact base fields: rationals and finite fields GF(p^k).

Field objects hold the arithmetic; elements are plain hashable data
(`Fraction` for the rationals, `int` in [0, p) for GF(p), tuples of k
ints for GF(p^k)).  Keeping elements as raw data lets hot loops avoid
per-element object overhead and makes them usable as dict keys.

Canonical enumeration order (used by deterministic searches):
rationals 1, -1, 2, -2, ...; finite fields by lexicographic coefficient
order (0, 1, ..., p-1 for prime fields).
"""

from fractions import Fraction
import itertools
import math

from .errors import NotIrreducible, NotPrime, PreconditionError

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n):
    """Deterministic Miller-Rabin, valid for all n < 3.3e24 (covers 2**64)."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _SMALL_PRIMES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class Field:
    """Common interface; subclasses fill in the arithmetic."""

    char = None
    order = None  # None means infinite

    @property
    def is_finite(self):
        return self.order is not None

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a):
        return a == self.zero

    def is_one(self, a):
        return a == self.one

    def sum(self, items):
        acc = self.zero
        for a in items:
            acc = self.add(acc, a)
        return acc

    def pow(self, a, n):
        if n < 0:
            a, n = self.inv(a), -n
        acc, base = self.one, a
        while n:
            if n & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            n >>= 1
        return acc

    def descriptor(self):
        raise NotImplementedError

    def __eq__(self, other):
        return isinstance(other, Field) and self.descriptor() == other.descriptor()

    def __hash__(self):
        return hash(self.descriptor())

    def __repr__(self):
        return self.name


class Rationals(Field):
    char = 0
    order = None
    name = "Q"

    def __init__(self):
        self.zero = Fraction(0)
        self.one = Fraction(1)

    def descriptor(self):
        return ("rationals",)

    def coerce(self, x):
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, str):
            return Fraction(x)
        raise TypeError(f"cannot coerce {x!r} into Q")

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return 1 / a

    def from_int(self, n):
        return Fraction(n)

    def canonical_iter(self):
        """1, -1, 2, -2, ..."""
        n = 1
        while True:
            yield Fraction(n)
            yield Fraction(-n)
            n += 1

    def random_element(self, rng, bound=2**31):
        return Fraction(rng.randrange(bound))

    def is_square(self, a):
        if a < 0:
            return False
        n, d = a.numerator, a.denominator
        return math.isqrt(n) ** 2 == n and math.isqrt(d) ** 2 == d

    def sqrt(self, a):
        if not self.is_square(a):
            return None
        return Fraction(math.isqrt(a.numerator), math.isqrt(a.denominator))

    def to_json(self, a):
        return f"{a.numerator}/{a.denominator}"

    def from_json(self, obj):
        if isinstance(obj, str):
            return Fraction(obj)
        if isinstance(obj, int):
            return Fraction(obj)
        raise TypeError(f"bad rational literal {obj!r}")


class PrimeField(Field):
    def __init__(self, p):
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        self.p = p
        self.char = p
        self.order = p
        self.zero = 0
        self.one = 1 % p
        self.name = f"GF({p})"

    def descriptor(self):
        return ("gf", self.p)

    def coerce(self, x):
        if isinstance(x, int):
            return x % self.p
        if isinstance(x, Fraction) and x.denominator == 1:
            return x.numerator % self.p
        raise TypeError(f"cannot coerce {x!r} into {self.name}")

    def add(self, a, b):
        return (a + b) % self.p

    def neg(self, a):
        return -a % self.p

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of 0")
        return pow(a, -1, self.p)

    def from_int(self, n):
        return n % self.p

    def elements(self):
        return range(self.p)

    def units(self):
        return range(1, self.p)

    def canonical_iter(self):
        return iter(range(self.p))

    def random_element(self, rng):
        return rng.randrange(self.p)

    def is_square(self, a):
        a %= self.p
        if a == 0 or self.p == 2:
            return True
        return pow(a, (self.p - 1) // 2, self.p) == 1

    def to_json(self, a):
        return [a]

    def from_json(self, obj):
        if isinstance(obj, int):
            return obj % self.p
        if isinstance(obj, list) and len(obj) == 1:
            return obj[0] % self.p
        raise TypeError(f"bad {self.name} literal {obj!r}")


def _poly_trim(c):
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_mul_mod(a, b, p):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_trim(out)


def _poly_divmod(a, b, p):
    a = list(a)
    binv = pow(b[-1], -1, p)
    q = [0] * max(0, len(a) - len(b) + 1)
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] * binv % p
        if c:
            q[i] = c
            for j, bj in enumerate(b):
                a[i + j] = (a[i + j] - c * bj) % p
    return _poly_trim(q), _poly_trim(a)


def poly_is_irreducible(f, p):
    """Exhaustive trial division by monic polynomials of degree <= deg(f)/2.

    Only sensible for p**deg(f) up to ~1e6, which is what the library
    accepts for extension-field moduli.
    """
    k = len(f) - 1
    if k < 1:
        return False
    if k == 1:
        return True
    for d in range(1, k // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            g = list(tail) + [1]
            _, r = _poly_divmod(list(f), g, p)
            if not r:
                return False
    return True


class ExtensionField(Field):
    """GF(p^k) as GF(p)[t]/(modulus); elements are k-tuples of ints."""

    def __init__(self, p, k, modulus):
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if k < 1:
            raise PreconditionError("extension degree must be >= 1")
        modulus = tuple(c % p for c in modulus)
        if len(modulus) != k + 1 or modulus[-1] != 1:
            raise PreconditionError("modulus must be monic of degree k")
        if p**k <= 10**6:
            if not poly_is_irreducible(modulus, p):
                raise NotIrreducible(f"modulus {list(modulus)} reducible over GF({p})")
        self.p = p
        self.k = k
        self.modulus = modulus
        self.char = p
        self.order = p**k
        self.zero = (0,) * k
        self.one = tuple([1 % p] + [0] * (k - 1))
        self.name = f"GF({p}^{k})"
        # reduction table: t^(k+i) mod modulus, i = 0..k-2
        red = []
        cur = [(-c) % p for c in modulus[:-1]]  # t^k
        red.append(tuple(cur))
        for _ in range(k - 2):
            cur = [0] + cur
            lead = cur.pop()
            if lead:
                cur = [(c - lead * m) % p for c, m in zip(cur, modulus[:-1])]
            red.append(tuple(cur))
        self._red = red
        # Kronecker-substitution multiply: coefficients packed into one big
        # int, m bits per slot, wide enough that the convolution plus the
        # reduction accumulation never overflows a slot
        bound = k * (p - 1) ** 2 * (1 + (k - 1) * (p - 1)) + 1
        m = max(4, bound.bit_length() + 1)
        self._kron_m = m
        self._kron_mask = (1 << m) - 1
        self._kron_low = (1 << (m * k)) - 1
        self._kron_red = [self._pack(r) for r in red]

    def _pack(self, coeffs):
        m = self._kron_m
        acc = 0
        for i, c in enumerate(coeffs):
            if c:
                acc |= c << (m * i)
        return acc

    def descriptor(self):
        return ("gf", self.p, self.k, self.modulus)

    def gen(self):
        """The class of t."""
        if self.k == 1:
            return self.from_int(0)
        return tuple([0, 1] + [0] * (self.k - 2))

    def coerce(self, x):
        if isinstance(x, tuple) and len(x) == self.k:
            return tuple(c % self.p for c in x)
        if isinstance(x, int):
            return self.from_int(x)
        if isinstance(x, (list,)) and len(x) <= self.k:
            return tuple([c % self.p for c in x] + [0] * (self.k - len(x)))
        raise TypeError(f"cannot coerce {x!r} into {self.name}")

    def add(self, a, b):
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def neg(self, a):
        p = self.p
        return tuple(-x % p for x in a)

    def mul(self, a, b):
        p, k, m = self.p, self.k, self._kron_m
        mask = self._kron_mask
        prod = self._pack(a) * self._pack(b)
        acc = prod & self._kron_low
        hi = prod >> (m * k)
        i = 0
        while hi:
            c = hi & mask
            if c:
                acc += c * self._kron_red[i]
            hi >>= m
            i += 1
        return tuple((acc >> (m * j) & mask) % p for j in range(k))

    def inv(self, a):
        if a == self.zero:
            raise ZeroDivisionError("inverse of 0")
        # extended Euclid in GF(p)[t]
        p = self.p
        r0, r1 = list(self.modulus), _poly_trim([c for c in a])
        s0, s1 = [], [1]
        while r1:
            q, r = _poly_divmod(r0, r1, p)
            r0, r1 = r1, r
            qs = _poly_mul_mod(q, s1, p)
            s = [(x - y) % p for x, y in itertools.zip_longest(s0, qs, fillvalue=0)]
            s0, s1 = s1, _poly_trim(s)
        # r0 is the gcd, a nonzero constant
        c = pow(r0[0], -1, p)
        out = [x * c % p for x in s0]
        return tuple(out + [0] * (self.k - len(out)))

    def from_int(self, n):
        return tuple([n % self.p] + [0] * (self.k - 1))

    def elements(self):
        for tup in itertools.product(range(self.p), repeat=self.k):
            yield tup

    def units(self):
        for tup in self.elements():
            if any(tup):
                yield tup

    def canonical_iter(self):
        # lexicographic coefficient order
        return self.elements()

    def random_element(self, rng):
        return tuple(rng.randrange(self.p) for _ in range(self.k))

    def frobenius_trace(self, a):
        """Absolute trace down to GF(p)."""
        acc = self.zero
        cur = a
        for _ in range(self.k):
            acc = self.add(acc, cur)
            cur = self.pow(cur, self.p)
        assert all(c == 0 for c in acc[1:])
        return acc[0]

    def is_square(self, a):
        if all(c == 0 for c in a):
            return True
        if self.p == 2:
            return True
        return self.pow(a, (self.order - 1) // 2) == self.one

    def artin_schreier_solvable(self, beta):
        """Is z**2 + z = beta solvable?  (char 2 only)"""
        assert self.p == 2
        return self.frobenius_trace(beta) == 0

    def to_json(self, a):
        return list(a)

    def from_json(self, obj):
        if isinstance(obj, list):
            return self.coerce(tuple(obj))
        if isinstance(obj, int):
            return self.from_int(obj)
        raise TypeError(f"bad {self.name} literal {obj!r}")


def GF(p, k=1, modulus=None):
    """Convenience constructor for finite fields.

    Without an explicit modulus, picks the lexicographically smallest
    irreducible monic of degree k (deterministic).
    """
    if k == 1:
        return PrimeField(p)
    if modulus is None:
        modulus = smallest_irreducible(p, k)
    return ExtensionField(p, k, modulus)


def smallest_irreducible(p, k):
    """First monic irreducible of degree k over GF(p), in the deterministic
    order that enumerates the non-leading coefficients as base-p digits of
    0, 1, 2, ... (constant coefficient = least significant digit)."""
    qs = {q for q in range(2, k + 1) if k % q == 0 and is_prime(q)}
    small = p**k <= 10**6
    for n in itertools.count():
        digits, m = [], n
        for _ in range(k):
            digits.append(m % p)
            m //= p
        if m:
            raise NotIrreducible(f"no irreducible of degree {k} over GF({p})")  # pragma: no cover
        f = digits + [1]
        ok = poly_is_irreducible(f, p) if small else _rabin_irreducible(f, p, k, qs)
        if ok:
            return tuple(f)


def _poly_powmod_x(e, f, p):
    """x**e mod f via square-and-multiply on exponent bits."""
    acc = [1]
    base = _poly_divmod([0, 1], f, p)[1]
    while e:
        if e & 1:
            acc = _poly_divmod(_poly_mul_mod(acc, base, p), f, p)[1]
        base = _poly_divmod(_poly_mul_mod(base, base, p), f, p)[1]
        e >>= 1
    return acc


def _poly_gcd(a, b, p):
    a, b = list(a), list(b)
    while b:
        a, b = b, _poly_divmod(a, b, p)[1]
    return a


def _rabin_irreducible(f, p, k, prime_divisors):
    x = [0, 1]
    xq = _poly_powmod_x(p**k, f, p)
    diff = [(a - b) % p for a, b in itertools.zip_longest(xq, x, fillvalue=0)]
    if _poly_trim(diff):
        return False
    for q in prime_divisors:
        xe = _poly_powmod_x(p ** (k // q), f, p)
        diff = [(a - b) % p for a, b in itertools.zip_longest(xe, x, fillvalue=0)]
        g = _poly_gcd(f, _poly_trim(diff), p)
        if len(g) - 1 != 0:
            return False
    return True


# ---------------------------------------------------------------------------
# generic polynomial helpers over an arbitrary Field (coefficient lists,
# low degree first, trimmed)


def _gpoly_trim(F, c):
    while c and F.is_zero(c[-1]):
        c.pop()
    return c


def _gpoly_mul(F, a, b):
    if not a or not b:
        return []
    out = [F.zero] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if not F.is_zero(ai):
            for j, bj in enumerate(b):
                out[i + j] = F.add(out[i + j], F.mul(ai, bj))
    return _gpoly_trim(F, out)


def _gpoly_divmod(F, a, b):
    a = list(a)
    binv = F.inv(b[-1])
    q = [F.zero] * max(0, len(a) - len(b) + 1)
    for i in range(len(a) - len(b), -1, -1):
        c = F.mul(a[i + len(b) - 1], binv)
        if not F.is_zero(c):
            q[i] = c
            for j, bj in enumerate(b):
                a[i + j] = F.sub(a[i + j], F.mul(c, bj))
    return _gpoly_trim(F, q), _gpoly_trim(F, a)


def _gpoly_gcd(F, a, b):
    a, b = list(a), list(b)
    while b:
        a, b = b, _gpoly_divmod(F, a, b)[1]
    return a


def _gpoly_powmod_x(F, e, f):
    base = _gpoly_divmod(F, [F.zero, F.one], f)[1]
    acc = [F.one]
    while e:
        if e & 1:
            acc = _gpoly_divmod(F, _gpoly_mul(F, acc, base), f)[1]
        base = _gpoly_divmod(F, _gpoly_mul(F, base, base), f)[1]
        e >>= 1
    return acc


def _gpoly_sub(F, a, b):
    out = list(a) + [F.zero] * max(0, len(b) - len(a))
    for i, bi in enumerate(b):
        out[i] = F.sub(out[i], bi)
    return _gpoly_trim(F, out)


def generic_rabin_irreducible(F, f):
    """Rabin irreducibility test for a monic f over a finite field F."""
    k = len(f) - 1
    q = F.order
    x = [F.zero, F.one]
    if _gpoly_sub(F, _gpoly_powmod_x(F, q**k, f), x):
        return False
    for r in {r for r in range(2, k + 1) if k % r == 0 and is_prime(r)}:
        g = _gpoly_gcd(F, f, _gpoly_sub(F, _gpoly_powmod_x(F, q ** (k // r), f), x))
        if len(g) - 1 != 0:
            return False
    return True


class TowerExtension(Field):
    """Degree-m extension of an arbitrary finite field F, as F[t]/(modulus).

    Elements are m-tuples of F-elements.  Used for scalar extensions of
    non-prime base fields in randomized identity checks.
    """

    def __init__(self, base, m, modulus=None):
        if not base.is_finite:
            raise PreconditionError("tower base must be finite")
        if modulus is None:
            modulus = smallest_irreducible_over(base, m)
        modulus = tuple(modulus)
        if len(modulus) != m + 1 or not base.is_one(modulus[-1]):
            raise PreconditionError("modulus must be monic of degree m")
        self.base = base
        self.m = m
        self.modulus = modulus
        self.char = base.char
        self.order = base.order**m
        self.zero = (base.zero,) * m
        self.one = tuple([base.one] + [base.zero] * (m - 1))
        self.name = f"{base.name}[t]/deg{m}"
        red = []
        cur = [base.neg(c) for c in modulus[:-1]]
        red.append(tuple(cur))
        for _ in range(m - 2):
            cur = [base.zero] + cur
            lead = cur.pop()
            if not base.is_zero(lead):
                cur = [base.sub(c, base.mul(lead, mm)) for c, mm in zip(cur, modulus[:-1])]
            red.append(tuple(cur))
        self._red = red

    def descriptor(self):
        return ("tower", self.base.descriptor(), self.m, self.modulus)

    def embed(self, a):
        """Embed an element of the base field."""
        return tuple([a] + [self.base.zero] * (self.m - 1))

    def add(self, a, b):
        B = self.base
        return tuple(B.add(x, y) for x, y in zip(a, b))

    def neg(self, a):
        B = self.base
        return tuple(B.neg(x) for x in a)

    def mul(self, a, b):
        B, m = self.base, self.m
        prod = [B.zero] * (2 * m - 1)
        for i, ai in enumerate(a):
            if not B.is_zero(ai):
                for j, bj in enumerate(b):
                    prod[i + j] = B.add(prod[i + j], B.mul(ai, bj))
        out = prod[:m]
        for i in range(m, 2 * m - 1):
            c = prod[i]
            if not B.is_zero(c):
                row = self._red[i - m]
                out = [B.add(o, B.mul(c, r)) for o, r in zip(out, row)]
        return tuple(out)

    def inv(self, a):
        if a == self.zero:
            raise ZeroDivisionError("inverse of 0")
        B = self.base
        r0, r1 = list(self.modulus), _gpoly_trim(B, list(a))
        s0, s1 = [], [B.one]
        while r1:
            q, r = _gpoly_divmod(B, r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _gpoly_sub(B, s0, _gpoly_mul(B, q, s1))
        c = B.inv(r0[0])
        out = [B.mul(x, c) for x in s0]
        return tuple(out + [B.zero] * (self.m - len(out)))

    def from_int(self, n):
        return self.embed(self.base.from_int(n))

    def random_element(self, rng):
        return tuple(self.base.random_element(rng) for _ in range(self.m))


def smallest_irreducible_over(F, m):
    """First monic irreducible of degree m over finite F, enumerating the
    non-leading coefficients as base-|F| digits of 0, 1, 2, ... with the
    canonical element order of F."""
    elems = list(F.canonical_iter())
    q = len(elems)
    for n in itertools.count():
        digits, r = [], n
        for _ in range(m):
            digits.append(elems[r % q])
            r //= q
        if r:
            raise NotIrreducible(f"no irreducible of degree {m} over {F.name}")  # pragma: no cover
        f = digits + [F.one]
        if generic_rabin_irreducible(F, f):
            return tuple(f)


def extension_of_size(F, min_size):
    """A scalar extension of the finite field F with at least min_size elements.

    Used by randomized identity checks: identities that hold formally hold
    in every scalar extension, so sampling there is sound, and the domain
    is large enough for the documented Schwartz-Zippel bound.  Returns
    (extension, embed) where embed maps F-elements into the extension.
    """
    if not F.is_finite:
        raise PreconditionError("extension_of_size needs a finite field")
    m = 1
    while F.order**m < min_size:
        m += 1
    if m == 1:
        return F, lambda a: a
    if isinstance(F, PrimeField):
        E = GF(F.p, m)
        return E, E.from_int
    E = TowerExtension(F, m)
    return E, E.embed
