# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled dense row-reduction kernels.

Same contract and output as the pure fallback: fraction-free integer
RREF with gcd-stripped rows and positive pivots, and unit-pivot RREF
over GF(p).  Arbitrary-precision inputs (or int64 overflow mid-run)
drop back to the object-based fallback implementation.
"""

import numpy as np

from . import _fallback as _fb

BACKEND = "native"

DEF INT64_LIMIT = 4611686018427387904  # 2**62


cdef long long _gcd(long long a, long long b) noexcept:
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        a, b = b, a % b
    return a


cdef _rref_int64(long long[:, ::1] a, Py_ssize_t ncols):
    cdef Py_ssize_t nr = a.shape[0]
    cdef Py_ssize_t r = 0, c, i, k, pr
    cdef long long piv, v, g, m, w, bound_a, bound_b
    cdef long long pivmax, rowmax
    pivots = []
    for c in range(ncols):
        pr = -1
        for i in range(r, nr):
            if a[i, c] != 0:
                pr = i
                break
        if pr == -1:
            continue
        if pr != r:
            for k in range(ncols):
                w = a[r, k]
                a[r, k] = a[pr, k]
                a[pr, k] = w
        g = 0
        for k in range(ncols):
            if a[r, k] != 0:
                g = _gcd(g, a[r, k])
                if g == 1:
                    break
        if a[r, c] < 0:
            g = -g
        if g != 1 and g != 0:
            for k in range(ncols):
                a[r, k] = a[r, k] // g
        piv = a[r, c]
        pivmax = 0
        for k in range(ncols):
            m = a[r, k]
            if m < 0:
                m = -m
            if m > pivmax:
                pivmax = m
        for i in range(nr):
            if i == r:
                continue
            v = a[i, c]
            if v == 0:
                continue
            rowmax = 0
            for k in range(ncols):
                m = a[i, k]
                if m < 0:
                    m = -m
                if m > rowmax:
                    rowmax = m
            bound_a = piv * rowmax if rowmax < INT64_LIMIT // (piv if piv else 1) else INT64_LIMIT
            bound_b = (v if v > 0 else -v)
            if bound_a >= INT64_LIMIT or bound_b >= INT64_LIMIT // (pivmax + 1):
                raise OverflowError
            if bound_a + bound_b * pivmax >= INT64_LIMIT:
                raise OverflowError
            g = 0
            for k in range(ncols):
                w = piv * a[i, k] - v * a[r, k]
                a[i, k] = w
                if w != 0 and g != 1:
                    g = _gcd(g, w)
            if g > 1:
                for k in range(ncols):
                    a[i, k] = a[i, k] // g
        pivots.append(c)
        r += 1
        if r == nr:
            break
    out = []
    arr = np.asarray(a)
    for i in range(len(pivots)):
        out.append([int(arr[i, k]) for k in range(ncols)])
    return out, pivots


def rref_int(rows, ncols):
    if not rows:
        return [], []
    try:
        arr = np.array(rows, dtype=np.int64)
    except OverflowError:
        return _fb._rref_int_obj(rows, ncols)
    backup = arr.copy()
    try:
        return _rref_int64(arr, ncols)
    except OverflowError:
        return _fb._rref_int_obj([[int(v) for v in row] for row in backup], ncols)


cdef _rref_mod64(long long[:, ::1] a, Py_ssize_t ncols, long long p):
    cdef Py_ssize_t nr = a.shape[0]
    cdef Py_ssize_t r = 0, c, i, k, pr
    cdef long long inv, v, w
    pivots = []
    for c in range(ncols):
        pr = -1
        for i in range(r, nr):
            if a[i, c] != 0:
                pr = i
                break
        if pr == -1:
            continue
        if pr != r:
            for k in range(ncols):
                w = a[r, k]
                a[r, k] = a[pr, k]
                a[pr, k] = w
        inv = pow(int(a[r, c]), p - 2, p)
        for k in range(ncols):
            a[r, k] = (a[r, k] * inv) % p
        for i in range(nr):
            if i == r:
                continue
            v = a[i, c]
            if v == 0:
                continue
            for k in range(ncols):
                w = (a[i, k] - v * a[r, k]) % p
                if w < 0:
                    w += p
                a[i, k] = w
        pivots.append(c)
        r += 1
        if r == nr:
            break
    out = []
    arr = np.asarray(a)
    for i in range(len(pivots)):
        out.append([int(arr[i, k]) for k in range(ncols)])
    return out, pivots


def rref_mod(rows, ncols, p):
    if not rows:
        return [], []
    if p >= 2**31:
        return _fb.rref_mod(rows, ncols, p)
    a = np.array(rows, dtype=np.int64) % p
    return _rref_mod64(a, ncols, p)
