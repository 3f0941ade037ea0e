"""Hot kernel: sparse-polynomial multiply-accumulate on packed exponent keys.

A product of two sparse polynomials with int64-packed exponent keys and
int64 coefficients is an outer add of the key arrays plus an outer product
of the coefficient arrays, followed by a dedupe-and-sum over equal keys.
That loop dominates the formal identity checks, so it has three
implementations selected by the CUBJORD_KERNEL environment variable:

  numba   @njit kernel (default when numba imports)
  numpy   pure-numpy fallback (sort + reduceat)
  python  dict accumulation (always available; also the reference)

Coefficients are either residues mod p (p >= 2) or plain bounded integers
(p == 0, used for integer-coefficient rational polynomials).  Callers are
responsible for the int64 bounds; see polys.Poly._mul_arrays.
"""

import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        return wrap if not (args and callable(args[0])) else args[0]


def kernel_mode():
    mode = os.environ.get("CUBJORD_KERNEL", "auto").lower()
    if mode == "auto":
        return "numba" if HAS_NUMBA else "numpy"
    if mode not in ("numba", "numpy", "python"):
        raise ValueError(f"CUBJORD_KERNEL={mode!r}: expected numba, numpy or python")
    if mode == "numba" and not HAS_NUMBA:  # pragma: no cover
        return "numpy"
    return mode


@njit(cache=True)
def _accumulate_numba(k1, c1, k2, c2, p):  # pragma: no cover - exercised via dispatch
    n1 = k1.size
    n2 = k2.size
    total = n1 * n2
    keys = np.empty(total, np.int64)
    vals = np.empty(total, np.int64)
    idx = 0
    for i in range(n1):
        ki = k1[i]
        ci = c1[i]
        for j in range(n2):
            keys[idx] = ki + k2[j]
            v = ci * c2[j]
            if p:
                v %= p
            vals[idx] = v
            idx += 1
    order = np.argsort(keys)
    out_k = np.empty(total, np.int64)
    out_v = np.empty(total, np.int64)
    m = -1
    prev = np.int64(-1)
    for t in range(total):
        o = order[t]
        k = keys[o]
        if k == prev:
            v = out_v[m] + vals[o]
            if p:
                v %= p
            out_v[m] = v
        else:
            m += 1
            out_k[m] = k
            out_v[m] = vals[o]
            prev = k
    n_out = 0
    for t in range(m + 1):
        if out_v[t] != 0:
            out_k[n_out] = out_k[t]
            out_v[n_out] = out_v[t]
            n_out += 1
    return out_k[:n_out], out_v[:n_out]


def _accumulate_numpy(k1, c1, k2, c2, p):
    keys = (k1[:, None] + k2[None, :]).ravel()
    vals = (c1[:, None] * c2[None, :]).ravel()
    if p:
        vals %= p
    order = np.argsort(keys, kind="stable")
    keys = keys[order]
    vals = vals[order]
    starts = np.empty(keys.size, dtype=bool)
    starts[0] = True
    np.not_equal(keys[1:], keys[:-1], out=starts[1:])
    idx = np.flatnonzero(starts)
    sums = np.add.reduceat(vals, idx)
    if p:
        sums %= p
    keys = keys[idx]
    nz = sums != 0
    return keys[nz], sums[nz]


def accumulate_products(k1, c1, k2, c2, p):
    """(keys, coeffs) of the product of two packed sparse polynomials."""
    mode = kernel_mode()
    if mode == "numba":
        return _accumulate_numba(k1, c1, k2, c2, p)
    if mode == "numpy":
        return _accumulate_numpy(k1, c1, k2, c2, p)
    out = {}
    for ki, ci in zip(k1.tolist(), c1.tolist()):
        for kj, cj in zip(k2.tolist(), c2.tolist()):
            k = ki + kj
            v = out.get(k, 0) + ci * cj
            out[k] = v % p if p else v
    items = sorted((k, v) for k, v in out.items() if v)
    if not items:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    ks, vs = zip(*items)
    return np.array(ks, np.int64), np.array(vs, np.int64)
