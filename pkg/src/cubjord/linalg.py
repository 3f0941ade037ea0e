"""Exact linear algebra over a Field (lists of lists of raw elements)."""

from .errors import NotInvertible


def zeros(F, rows, cols):
    return [[F.zero] * cols for _ in range(rows)]


def identity(F, n):
    M = zeros(F, n, n)
    for i in range(n):
        M[i][i] = F.one
    return M


def mat_mul(F, A, B):
    n, m, r = len(A), len(B), len(B[0]) if B else 0
    out = zeros(F, n, r)
    for i in range(n):
        Ai = A[i]
        Oi = out[i]
        for k in range(m):
            a = Ai[k]
            if F.is_zero(a):
                continue
            Bk = B[k]
            for j in range(r):
                if not F.is_zero(Bk[j]):
                    Oi[j] = F.add(Oi[j], F.mul(a, Bk[j]))
    return out

def mat_vec(F, A, v):
    out = []
    for row in A:
        acc = F.zero
        for a, x in zip(row, v):
            if not F.is_zero(a) and not F.is_zero(x):
                acc = F.add(acc, F.mul(a, x))
        out.append(acc)
    return out


def transpose(A):
    return [list(col) for col in zip(*A)]


def mat_eq(A, B):
    return A == B


def scale_vec(F, c, v):
    return [F.mul(c, x) for x in v]


def add_vec(F, u, v):
    return [F.add(a, b) for a, b in zip(u, v)]


def sub_vec(F, u, v):
    return [F.sub(a, b) for a, b in zip(u, v)]


def _elimination(F, M, ncols):
    """Row reduce in place; returns pivot column list."""
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, len(M)):
            if not F.is_zero(M[i][c]):
                pivot = i
                break
        if pivot is None:
            continue
        M[r], M[pivot] = M[pivot], M[r]
        inv = F.inv(M[r][c])
        M[r] = [F.mul(inv, x) for x in M[r]]
        for i in range(len(M)):
            if i != r and not F.is_zero(M[i][c]):
                f = M[i][c]
                M[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return pivots


def rank(F, A):
    M = [list(row) for row in A]
    return len(_elimination(F, M, len(A[0]) if A else 0))


def det(F, A):
    n = len(A)
    M = [list(row) for row in A]
    d = F.one
    for c in range(n):
        pivot = None
        for i in range(c, n):
            if not F.is_zero(M[i][c]):
                pivot = i
                break
        if pivot is None:
            return F.zero
        if pivot != c:
            M[c], M[pivot] = M[pivot], M[c]
            d = F.neg(d)
        d = F.mul(d, M[c][c])
        inv = F.inv(M[c][c])
        for i in range(c + 1, n):
            if not F.is_zero(M[i][c]):
                f = F.mul(inv, M[i][c])
                M[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(M[i], M[c])]
    return d


def solve(F, A, b):
    """One solution of A x = b, or None if inconsistent."""
    n, m = len(A), len(A[0]) if A else 0
    M = [list(row) + [bb] for row, bb in zip(A, b)]
    pivots = _elimination(F, M, m)
    for i in range(len(pivots), n):
        if not F.is_zero(M[i][m]):
            return None
    x = [F.zero] * m
    for r, c in enumerate(pivots):
        x[c] = M[r][m]
    return x


def inverse(F, A):
    n = len(A)
    M = [list(row) + list(irow) for row, irow in zip(A, identity(F, n))]
    pivots = _elimination(F, M, n)
    if len(pivots) != n:
        raise NotInvertible("matrix is singular")
    return [row[n:] for row in M]


def kernel_basis(F, A):
    """Basis of the right kernel of A."""
    m = len(A[0]) if A else 0
    M = [list(row) for row in A]
    pivots = _elimination(F, M, m)
    pivot_set = set(pivots)
    free = [c for c in range(m) if c not in pivot_set]
    basis = []
    for fc in free:
        v = [F.zero] * m
        v[fc] = F.one
        for r, c in enumerate(pivots):
            v[c] = F.neg(M[r][fc])
        basis.append(v)
    return basis


def row_space_equal(F, A, B):
    """Do the rows of A and B span the same subspace?"""
    ra = rank(F, A)
    rb = rank(F, B)
    if ra != rb:
        return False
    return rank(F, A + B) == ra


def in_span(F, vectors, v):
    """Is v in the span of `vectors`?"""
    if not vectors:
        return all(F.is_zero(x) for x in v)
    A = transpose(vectors)
    return solve(F, A, v) is not None


def coordinates_in_basis(F, basis, v):
    """Coefficients of v in `basis` (list of vectors), or None."""
    A = transpose(basis)
    return solve(F, A, v)
