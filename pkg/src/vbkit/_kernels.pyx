# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled polynomial kernels; same contract as ``_kernels_py``."""


cpdef tuple mono_mul(tuple a, tuple b):
    cdef Py_ssize_t i = 0, j = 0
    cdef Py_ssize_t la = len(a), lb = len(b)
    cdef list out
    cdef object na, nb, e
    cdef tuple pa, pb
    if la == 0:
        return b
    if lb == 0:
        return a
    out = []
    while i < la and j < lb:
        pa = <tuple>a[i]
        pb = <tuple>b[j]
        na = pa[0]
        nb = pb[0]
        if na == nb:
            e = pa[1] + pb[1]
            if e:
                out.append((na, e))
            i += 1
            j += 1
        elif na < nb:
            out.append(pa)
            i += 1
        else:
            out.append(pb)
            j += 1
    while i < la:
        out.append(a[i])
        i += 1
    while j < lb:
        out.append(b[j])
        j += 1
    return tuple(out)


cpdef dict mul_terms(dict a, dict b):
    cdef dict out = {}
    cdef object ma, ca, mb, cb, m, c
    if len(a) > len(b):
        a, b = b, a
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = mono_mul(<tuple>ma, <tuple>mb)
            c = out.get(m)
            if c is None:
                out[m] = ca * cb
            else:
                out[m] = c + ca * cb
    return {m: c for m, c in out.items() if c}


cpdef dict add_terms(dict a, dict b, int sign=1):
    cdef dict out = dict(a)
    cdef object m, c, v
    for m, c in b.items():
        if sign != 1:
            c = -c
        v = out.get(m)
        if v is None:
            out[m] = c
        else:
            v = v + c
            if v:
                out[m] = v
            else:
                del out[m]
    return out


cpdef dict scale_terms(dict a, object c):
    if not c:
        return {}
    return {m: v * c for m, v in a.items()}
