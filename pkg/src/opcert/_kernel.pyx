# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled reduction kernels; interface mirrors ``_kernel_py``.

Coefficients stay generic Python objects (int/Fraction) so arithmetic remains
exact; the win over the pure kernel is loop, slicing and comparison overhead
on the word tuples, which is where reduction and obstruction enumeration
spend their time.
"""

BACKEND = "c"


cdef inline bint _eq_range(tuple a, Py_ssize_t astart, tuple b,
                           Py_ssize_t bstart, Py_ssize_t n):
    cdef Py_ssize_t t
    for t in range(n):
        if a[astart + t] != b[bstart + t]:
            return False
    return True


def word_key(tuple w, rank):
    cdef Py_ssize_t i, n = len(w)
    if rank is None:
        return (n, w)
    mapped = [None] * n
    for i in range(n):
        mapped[i] = rank[<Py_ssize_t> w[i]]
    return (n, tuple(mapped))


def find_best_match(tuple w, dict leadmap, tuple lengths):
    cdef Py_ssize_t n = len(w)
    cdef Py_ssize_t L, pos
    cdef object hit, rk, best_rk
    cdef tuple cand
    for L in lengths:
        if L > n:
            continue
        best_rk = None
        best = None
        for pos in range(n - L + 1):
            cand = w[pos:pos + L]
            hit = leadmap.get(cand)
            if hit is not None:
                rk = (<tuple> hit)[2]
                if best_rk is None or rk > best_rk:
                    best_rk = rk
                    best = (pos, cand, (<tuple> hit)[0], (<tuple> hit)[1])
        if best is not None:
            return best
    return None


def submul(dict dst, list items, c, tuple left, tuple right):
    cdef list new_words = []
    cdef tuple w, key
    cdef object cw, v
    for w, cw in items:
        key = left + w + right
        v = dst.get(key)
        if v is None:
            dst[key] = -c * cw
            new_words.append(key)
        else:
            v = v - c * cw
            if v:
                dst[key] = v
            else:
                del dst[key]
    return new_words


def self_overlaps(tuple v):
    cdef list out = []
    cdef Py_ssize_t n = len(v), k
    for k in range(1, n):
        if _eq_range(v, n - k, v, 0, k):
            out.append(((), v[k:], v[:n - k], (), v + v[k:]))
    return out


def batch_overlaps(tuple v, list others):
    cdef list out = []
    cdef Py_ssize_t nv = len(v), nu, m, k, t
    cdef tuple u
    cdef object i
    for i, u in others:
        nu = len(u)
        m = nu if nu < nv else nv
        for k in range(1, m):
            if _eq_range(u, nu - k, v, 0, k):
                out.append((i, (), v[k:], u[:nu - k], (), u + v[k:]))
            if _eq_range(v, nv - k, u, 0, k):
                out.append((i, v[:nv - k], (), (), u[k:], v + u[k:]))
        if nv < nu:
            for t in range(nu - nv + 1):
                if _eq_range(u, t, v, 0, nv):
                    out.append((i, (), (), u[:t], u[t + nv:], u))
        elif nu < nv:
            for t in range(nv - nu + 1):
                if _eq_range(v, t, u, 0, nu):
                    out.append((i, v[:t], v[t + nu:], (), (), v))
        elif _eq_range(u, 0, v, 0, nv):
            out.append((i, (), (), (), (), v))
    return out


def find_retirees(tuple lead, list others):
    cdef list out = []
    cdef Py_ssize_t n = len(lead), nw, t
    cdef tuple w
    cdef object i
    for i, w in others:
        nw = len(w)
        if nw < n:
            continue
        for t in range(nw - n + 1):
            if _eq_range(w, t, lead, 0, n):
                out.append(i)
                break
    return out
