"""Pure-Python polynomial kernels.

A monomial is a tuple of ``(name, exponent)`` pairs sorted by name with no
zero exponents; a term map is a dict from monomials to nonzero Fractions.
The compiled module ``_kernels`` exposes the same four functions.
"""


def mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    la = len(a)
    lb = len(b)
    while i < la and j < lb:
        na, ea = a[i]
        nb, eb = b[j]
        if na == nb:
            e = ea + eb
            if e:
                out.append((na, e))
            i += 1
            j += 1
        elif na < nb:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    if i < la:
        out.extend(a[i:])
    if j < lb:
        out.extend(b[j:])
    return tuple(out)


def mul_terms(a, b):
    if len(a) > len(b):
        a, b = b, a
    out = {}
    get = out.get
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = mono_mul(ma, mb)
            c = get(m)
            out[m] = ca * cb if c is None else c + ca * cb
    return {m: c for m, c in out.items() if c}


def add_terms(a, b, sign=1):
    out = dict(a)
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


def scale_terms(a, c):
    if not c:
        return {}
    return {m: v * c for m, v in a.items()}
