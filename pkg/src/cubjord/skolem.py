"""Constructive Skolem-Noether machinery: extension of (iso)morphisms of
etale Tits process algebras from (phi, psi, y)-data, norm classes and
membership searches, equivalence-of-embeddings checks, the two-generator
span test, and the second-generator discriminant search.

Searches over finite fields are exhaustive in the canonical element
order; first-hit-wins merging keeps sharded scans deterministic.  Over
the rationals only the definite-sign obstruction is decided, everything
else honestly returns "unknown".
"""

from dataclasses import dataclass

from .errors import (
    BudgetExceeded,
    CompatibilityViolation,
    Exhausted,
    InternalVerificationError,
    NoGenerator,
    NotInvertible,
    PreconditionError,
)
from . import linalg
from .cns import certify_map, jordan_from_cns
from .commalg import EtaleTensor, matrix_apply_polys
from .constructions import (
    degree_three_from_cubic_etale,
    etale_tits_process,
    first_tits,
)
from .fields import Rationals
from .polys import Poly


# ---------------------------------------------------------------------------
# embeddings


@dataclass
class Embedding:
    """An (isotopic) embedding of a cubic etale algebra into a cubic norm
    structure; matrix columns are the images of the E-basis."""

    source: object  # CubicEtale
    target: object  # CubicNormStructure
    matrix: list  # target.dim x 3
    kind: str = "isomorphic"  # or "isotopic"

    def __post_init__(self):
        E, X = self.source, self.target
        F = E.field
        img_unit = self.apply(E.unit)
        if self.kind == "isomorphic":
            if img_unit != list(X.c):
                raise PreconditionError("embedding does not preserve the base point")
            self._check_norms(X.norm)
        else:
            if not X.is_invertible(img_unit):
                raise PreconditionError("image of 1 is not invertible")
            # isomorphic embedding into the p-isotope with p = (image of 1)^{-1}
            p = X.inv(img_unit)
            Np = X.N(p)
            self._check_norms(X.norm.scale(Np))
        cols = linalg.transpose(self.matrix)
        if linalg.rank(F, cols) != 3:
            raise PreconditionError("embedding matrix is not injective")

    def _check_norms(self, target_norm):
        E = self.source
        F = E.field
        xs = Poly.variables(F, 3)
        lin = matrix_apply_polys(F, self.matrix, xs)
        comp = target_norm.subst(lin)
        if not (comp - E.norm_poly).is_zero():
            raise PreconditionError("embedding does not preserve norms")

    def apply(self, e):
        return linalg.mat_vec(self.source.field, self.matrix, e)

    def twist(self, w):
        """The embedding i o R_w; isotopic unless w = 1 (the unit moves)."""
        E = self.source
        F = E.field
        Rw = linalg.transpose([E.mul(E.alg._basis(j), w) for j in range(3)])
        M = linalg.mat_mul(F, self.matrix, Rw)
        kind = self.kind if list(w) == list(E.unit) else "isotopic"
        return Embedding(self.source, self.target, M, kind)


def initial_embedding(X):
    """The embedding of E through the initial summand of an etale Tits
    process output."""
    E = X.datum["E"]
    F = E.field
    M = [[F.zero] * 3 for _ in range(X.dim)]
    for i in range(3):
        M[i][i] = F.one
    return Embedding(E, X, M, "isomorphic")


# ---------------------------------------------------------------------------
# Skolem-Noether extension builders


def _check_algebra_iso(A, B, phi, what):
    """phi: A -> B an isomorphism of commutative algebras (unit and basis
    products), given as a matrix."""
    F = A.field

    def ap(x):
        return linalg.mat_vec(F, phi, x)

    if ap(A.alg.unit) != list(B.alg.unit):
        raise PreconditionError(f"{what}: does not preserve units")
    for i in range(A.dim):
        for j in range(i, A.dim):
            lhs = ap(A.alg.mult[i][j])
            rhs = B.alg.mul(ap(A.alg._basis(i)), ap(A.alg._basis(j)))
            if lhs != rhs:
                raise PreconditionError(f"{what}: not multiplicative")
    if F.is_zero(linalg.det(F, phi)):
        raise PreconditionError(f"{what}: not bijective")


def tensor_map(T_src, T_dst, phi, psi):
    """(phi (x) psi) as a matrix between tensor algebras."""
    F = T_src.field
    M = [[F.zero] * 6 for _ in range(6)]
    for a in range(3):
        for b in range(2):
            for c in range(3):
                for d in range(2):
                    M[2 * a + b][2 * c + d] = F.mul(phi[a][c], psi[b][d])
    return M


def extend_isomorphism(src, dst, phi, psi, y, structural="formal"):
    """Extension criterion for isomorphisms of etale Tits process algebras.

    src, dst: outputs of etale_tits_process (J(E',L',u',b') and
    J(E,L,u,b)); phi: E' -> E and psi: L' -> L algebra isomorphisms
    (matrices); y: invertible element of E (x) L (6 coordinates).

    Requires exactly phi(u') = n_L(y) u and psi(b') = N_E(y) b; the built
    map Phi(v0' + v'j') = phi(v0') + (y (phi x psi)(v'))j then *must*
    certify as an isomorphism, so a certification failure is a hard error.
    """
    E, L = dst.datum["E"], dst.datum["L"]
    Ep, Lp = src.datum["E"], src.datum["L"]
    u, b = dst.datum["u_E"], dst.datum["b"]
    up, bp = src.datum["u_E"], src.datum["b"]
    T = dst.datum["datum"].tensor
    F = E.field
    _check_algebra_iso(Ep, E, phi, "phi")
    _check_algebra_iso(Lp, L, psi, "psi")
    if not T.alg.is_unit(y):
        raise NotInvertible("y must be invertible in E (x) L")
    failed = []
    nly = T.n_L(y)
    if linalg.mat_vec(F, phi, up) != E.mul(nly, u):
        failed.append("u")
    ney = T.norm_over_L(y)
    if linalg.mat_vec(F, psi, bp) != L.mul(ney, b):
        failed.append("b")
    if failed:
        raise CompatibilityViolation(f"equations {failed} fail", failed=failed)
    M = _phi_block_matrix(T, phi, psi, y)
    cert = certify_map(src, dst, M, structural=structural)
    if cert.kind != "Isomorphism":
        raise InternalVerificationError(f"extension failed to certify: {cert.reason}")
    return cert


def _phi_block_matrix(T, phi, psi, y):
    F = T.field
    M = [[F.zero] * 9 for _ in range(9)]
    for i in range(3):
        for j in range(3):
            M[i][j] = phi[i][j]
    tp = tensor_map(T, T, phi, psi)
    Ly = linalg.transpose([T.alg.mul(y, T.alg._basis(j)) for j in range(6)])
    blk = linalg.mat_mul(F, Ly, tp)
    for i in range(6):
        for j in range(6):
            M[3 + i][3 + j] = blk[i][j]
    return M


def extend_isotopy(src, dst, phi, psi, y, structural="formal"):
    """Isotopy version: phi: E' -> E need only be an isotopy (norm
    similarity); with p := phi(1)^{-1} the compatibility equations read
    phi(u') = n_L(y) p# p^{-3} u and psi(b') = N_E(y) b.  The same block
    map then certifies as an isotopy with multiplier N_E(p)^{-1}."""
    E, L = dst.datum["E"], dst.datum["L"]
    Ep, Lp = src.datum["E"], src.datum["L"]
    u, b = dst.datum["u_E"], dst.datum["b"]
    up, bp = src.datum["u_E"], src.datum["b"]
    T = dst.datum["datum"].tensor
    F = E.field
    # phi is a norm similarity E' -> E
    xs = Poly.variables(F, 3)
    comp = E.norm_poly.subst(matrix_apply_polys(F, phi, xs))
    lam = None
    for key, c in Ep.norm_poly.terms.items():
        got = comp.terms.get(key)
        if got is None:
            raise PreconditionError("phi is not a norm similarity")
        cand = F.div(got, c)
        if lam is None:
            lam = cand
        elif lam != cand:
            raise PreconditionError("phi is not a norm similarity")
    if lam is None or F.is_zero(lam) or not (comp - Ep.norm_poly.scale(lam)).is_zero():
        raise PreconditionError("phi is not a norm similarity")
    _check_algebra_iso(Lp, L, psi, "psi")
    if not T.alg.is_unit(y):
        raise NotInvertible("y must be invertible in E (x) L")
    phi_one = linalg.mat_vec(F, phi, Ep.unit)
    p = E.inv(phi_one)
    p_sharp = E.sharp(p)
    p_m3 = E.inv(E.alg.pow(p, 3))
    corr = E.mul(E.mul(p_sharp, p_m3), u)
    failed = []
    nly = T.n_L(y)
    if linalg.mat_vec(F, phi, up) != E.mul(nly, corr):
        failed.append("u")
    ney = T.norm_over_L(y)
    if linalg.mat_vec(F, psi, bp) != L.mul(ney, b):
        failed.append("b")
    if failed:
        raise CompatibilityViolation(f"equations {failed} fail", failed=failed)
    M = _phi_block_matrix(T, phi, psi, y)
    cert = certify_map(src, dst, M, structural=structural)
    if not cert.verified:
        raise InternalVerificationError(f"isotopy extension failed to certify: {cert.reason}")
    expected_mu = F.inv(E.norm(p))
    if cert.multiplier != expected_mu:
        raise InternalVerificationError("isotopy multiplier differs from N(phi(1))")
    return cert


# ---------------------------------------------------------------------------
# norm classes and membership


@dataclass
class NormClass:
    """Class of a norm-one element w in E^x / n_L((E (x) L)^x)."""

    E: object
    L: object
    representative: list
    decision: str  # "trivial" | "nontrivial" | "unknown"
    witness: list = None
    scanned: int = 0
    total: int = 0
    reason: str = ""

    @property
    def trivial(self):
        return self.decision == "trivial"

    def as_dict(self):
        F = self.E.field
        d = {
            "decision": self.decision,
            "representative": [F.to_json(c) for c in self.representative]
            if hasattr(F, "to_json")
            else [str(c) for c in self.representative],
            "scanned": self.scanned,
            "total": self.total,
        }
        if self.witness is not None:
            d["witness"] = [F.to_json(c) for c in self.witness] if hasattr(F, "to_json") else [
                str(c) for c in self.witness
            ]
        if self.reason:
            d["reason"] = self.reason
        return d


def _chunk_ranges(total, jobs):
    size = (total + jobs - 1) // jobs
    return [(s, min(s + size, total)) for s in range(0, total, size)]


def _scan_first_hit(T, predicate, budget, jobs=1):
    """First element of the tensor algebra satisfying `predicate`, in
    canonical order.  The index space is partitioned into `jobs` chunks,
    each scanned independently; hits merge first-wins by canonical index,
    so the outcome is independent of chunk scheduling."""
    F = T.field
    q = F.order
    if q is None:
        raise PreconditionError("exhaustive scan needs a finite field")
    total = q**6
    if total > budget:
        raise BudgetExceeded(f"|E (x) L| = {total} exceeds budget {budget}")
    elems = list(F.canonical_iter())

    def element_at(idx):
        coords = []
        for _ in range(6):
            coords.append(elems[idx % q])
            idx //= q
        return coords

    hits = []
    for lo, hi in _chunk_ranges(total, jobs):
        for idx in range(lo, hi):
            y = element_at(idx)
            if predicate(y):
                hits.append((idx, y))
                break
    if hits:
        idx, y = min(hits, key=lambda t: t[0])
        return idx, y, total
    return None, None, total


def norm_membership(E, L, w, budget=10**7, jobs=1):
    """Is w in n_L((E (x) L)^x)?

    Finite fields: exhaustive scan, returning the first witness y with
    n_L(y) = w in canonical order, or a scan-complete nontrivial verdict.
    Rationals: the definite-sign obstruction (split E, positive-definite
    n_L, some nonpositive coordinate of w) decides nontrivially;
    everything else is unknown.
    """
    F = E.field
    if not F.is_one(E.norm(w)):
        raise PreconditionError("norm_membership needs N_E(w) = 1")
    if F.is_finite:
        T = EtaleTensor(E, L)
        w = list(w)

        def hit(y):
            return T.n_L(y) == w and T.alg.is_unit(y)

        idx, y, total = _scan_first_hit(T, hit, budget, jobs)
        if y is not None:
            return NormClass(E, L, w, "trivial", witness=y, scanned=idx + 1, total=total)
        return NormClass(E, L, w, "nontrivial", scanned=total, total=total)
    if isinstance(F, Rationals):
        kind, disc = L.disc_class()
        definite = kind == "square" and disc < 0
        if E.split_product and definite:
            if any(c <= 0 for c in w):
                return NormClass(
                    E, L, w, "nontrivial", reason="definite norm form forces positive coordinates"
                )
        return NormClass(E, L, w, "unknown", reason="no decision procedure over Q")
    return NormClass(E, L, w, "unknown", reason="unsupported field")


def norm_one_witness(E, L, y, budget=10**7, jobs=1):
    """Given y with n_L(N_E(y)) = 1, find y' with N_E(y') = N_E(y) and
    n_L(y') = 1.  Existence is guaranteed, so scan exhaustion is a hard
    error (only conceivable through an implementation bug)."""
    F = E.field
    T = EtaleTensor(E, L)
    c = T.norm_over_L(y)
    if not F.is_one(L.norm(c)):
        raise PreconditionError("norm_one_witness needs n_L(N_E(y)) = 1")
    if not F.is_finite:
        return None  # unknown over infinite fields
    one_E = list(E.unit)

    def hit(yp):
        return T.norm_over_L(yp) == c and T.n_L(yp) == one_E

    idx, yp, total = _scan_first_hit(T, hit, budget, jobs)
    if yp is None:
        raise Exhausted("guaranteed witness not found: implementation bug")
    return yp


def norm_class_of_twist(i, w, L=None, budget=10**7):
    """The norm class of (i, i o R_w) for a norm-one twist w: trivial
    exactly when the two embeddings are strongly equivalent."""
    E = i.source
    if L is None:
        datum = getattr(i.target, "datum", None) or {}
        L = datum.get("L")
        if L is None:
            raise PreconditionError("ambient quadratic algebra L required")
    return norm_membership(E, L, w, budget=budget)


def norm_class_witness_condition(E, L, b, w, budget=10**7):
    """The two-sided witness condition of the strong-equivalence criterion:
    does some y in (E (x) L)^x satisfy n_L(y) = w and N_E(y) in {1, conj(b)/b}?

    Returns (bool, witness-or-None).  Decided independently of
    norm_membership, for cross-checking the equivalence theorem."""
    F = E.field
    T = EtaleTensor(E, L)
    targets = [list(L.alg.unit)]
    bbar = L.conj(b)
    targets.append(L.mul(bbar, L.inv(b)))
    w = list(w)

    def hit(y):
        if not T.alg.is_unit(y):
            return False
        if T.n_L(y) != w:
            return False
        return T.norm_over_L(y) in targets

    idx, y, total = _scan_first_hit(T, hit, budget)
    return y is not None, y


# ---------------------------------------------------------------------------
# weak / strong equivalence of embeddings


@dataclass
class EquivalenceVerdict:
    status: str  # "strongly-equivalent" | "weakly-equivalent" | "rejected"
    reason: str = ""
    certificate: object = None

    @property
    def accepted(self):
        return self.status != "rejected"


def weak_equivalence_check(i, i_prime, w, M, structural="formal"):
    """Verify the witness (w, M) for weak equivalence of two embeddings:
    M must lie in the structure group of the common target and
    i o R_w = M o i' must commute exactly; w = 1 upgrades to strong."""
    E = i.source
    F = E.field
    if i.target is not i_prime.target and i.target.norm != i_prime.target.norm:
        return EquivalenceVerdict("rejected", "embeddings target different algebras")
    if not F.is_one(E.norm(w)):
        return EquivalenceVerdict("rejected", "twist w must have norm 1")
    X = i.target
    cert = certify_map(X, X, M, structural=structural)
    if not cert.verified:
        return EquivalenceVerdict("rejected", f"map not in the structure group: {cert.reason}")
    Rw = linalg.transpose([E.mul(E.alg._basis(j), w) for j in range(3)])
    lhs = linalg.mat_mul(F, i.matrix, Rw)
    rhs = linalg.mat_mul(F, M, i_prime.matrix)
    if lhs != rhs:
        return EquivalenceVerdict("rejected", "diagram does not commute")
    if w == list(E.unit):
        return EquivalenceVerdict("strongly-equivalent", certificate=cert)
    return EquivalenceVerdict("weakly-equivalent", certificate=cert)


# ---------------------------------------------------------------------------
# second generator search and the two-generation Gram test


def second_generator_alpha(E1, u0):
    """For a generator u0 of E1, the first alpha != 0 (canonical order)
    such that y = u0 + alpha j1 in J(E1, 1) generates a cubic etale
    subalgebra.  The discriminant of y's characteristic polynomial is

        D(alpha) = D(u0) - (4 T^3 + 54 N - 18 T S) alpha^3 - 27 alpha^6

    with T = T(u0), S = T(u0#), N = N(u0).  Returns (alpha, D(alpha)).
    """
    F = E1.field
    T_ = E1.trace(u0)
    S_ = E1.trace(E1.sharp(u0))
    N_ = E1.norm(u0)
    from .commalg import cubic_disc

    disc_u0 = cubic_disc(F, F.neg(T_), S_, F.neg(N_))
    if F.is_zero(disc_u0):
        raise NoGenerator("u0 does not generate E1")
    n = F.from_int
    coef3 = F.sub(
        F.add(F.mul(n(4), F.pow(T_, 3)), F.mul(n(54), N_)),
        F.mul(F.mul(n(18), T_), S_),
    )

    def delta_y(alpha):
        a3 = F.pow(alpha, 3)
        return F.sub(F.sub(disc_u0, F.mul(coef3, a3)), F.mul(n(27), F.mul(a3, a3)))

    for alpha in F.canonical_iter():
        if F.is_zero(alpha):
            continue
        d = delta_y(alpha)
        if not F.is_zero(d):
            return alpha, d
    raise Exhausted("no alpha with nonzero discriminant (tiny field)")


def second_generator_element(E1, u0, alpha):
    """(J(E1,1), y) with y = u0 + alpha j1."""
    A3 = degree_three_from_cubic_etale(E1)
    X = first_tits(A3, E1.field.one)
    F = E1.field
    y = list(u0) + [F.mul(alpha, c) for c in E1.unit] + [F.zero] * 3
    return X, y


def cubic_subalgebra_etale(X, y):
    """Independent oracle: is F[y] inside the cubic Jordan algebra X a
    three-dimensional algebra with nondegenerate trace form?  Uses powers
    1, y, y^2 and the Gram of the ambient bilinear trace."""
    F = X.field
    J = jordan_from_cns(X, verify=False)
    basis = [list(X.c), list(y), J.power(y, 2)]
    if linalg.rank(F, basis) != 3:
        return False
    gram = [[X.T(a, b) for b in basis] for a in basis]
    return not F.is_zero(linalg.det(F, gram))


def generated_subalgebra(X, x, xp):
    """The nine canonical elements spanning the subalgebra generated by two
    elements of a degree-3 algebra, their span dimension, and the 9x9 Gram
    determinant of the bilinear trace on them."""
    F = X.field
    xs = X.sharp(x)
    xps = X.sharp(xp)
    elems = [
        list(X.c),
        list(x),
        xs,
        list(xp),
        xps,
        X.cross_vec(x, xp),
        X.cross_vec(xs, xp),
        X.cross_vec(x, xps),
        X.cross_vec(xs, xps),
    ]
    dim = linalg.rank(F, elems)
    gram = [[X.T(a, b) for b in elems] for a in elems]
    return elems, dim, linalg.det(F, gram)


# ---------------------------------------------------------------------------
# first Tits construction equivalence over finite fields


@dataclass
class EquivalenceDecision:
    decided: bool
    equivalent: bool = False
    detail: str = ""


def first_tits_equivalence(E, alpha, alpha2, budget=10**7):
    """Are J(E, alpha) and J(E, alpha') isomorphic (equivalently isotopic)?
    Decided over finite fields by exhausting N_E(E^x): the criterion is
    alpha = alpha'^{+-1} modulo norms."""
    F = E.field
    alpha, alpha2 = F.coerce(alpha), F.coerce(alpha2)
    if F.is_zero(alpha) or F.is_zero(alpha2):
        raise PreconditionError("alpha, alpha' must be nonzero")
    if not F.is_finite:
        return EquivalenceDecision(False, detail="unknown over infinite fields")
    if F.order**3 > budget:
        raise BudgetExceeded("|E| exceeds budget")
    norms = set()
    for u in E.units():
        norms.add(E.norm(u))
    ratio = F.div(alpha, alpha2)
    product = F.mul(alpha, alpha2)
    eq = ratio in norms or product in norms
    return EquivalenceDecision(True, eq, detail=f"|N_E(E^x)| = {len(norms)}")
