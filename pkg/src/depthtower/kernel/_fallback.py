"""Pure-python exact row-reduction kernels.

Dense reduction is fraction-free: all arithmetic happens on python ints
(rows are pre-scaled by the caller), entries are kept small with per-row
gcd stripping, and an int64 numpy fast path is attempted before falling
back to arbitrary-precision objects.  The compiled twin in ``_native``
implements the same two entry points with identical output; everything
here is the reference the native code is tested against.

Sparse reduction keeps rows as ``{column: value}`` dicts and is used for
the large, highly structured relation systems produced by tensor-product
quotients, where most rows are differences of two unit vectors.
"""

from fractions import Fraction
from math import gcd

import numpy as np

BACKEND = "pure"

_INT64_LIMIT = 2**62


class _Overflow(Exception):
    pass


def _strip_row(row):
    """Divide an integer row by its content, first nonzero made positive."""
    g = 0
    for v in row:
        if v:
            g = gcd(g, v if v > 0 else -v)
            if g == 1:
                break
    if g == 0:
        return row
    lead = next(v for v in row if v)
    if lead < 0:
        g = -g
    if g != 1:
        return [v // g for v in row]
    return row


def _rref_int_obj(rows, ncols):
    rows = [list(r) for r in rows]
    nr = len(rows)
    pivots = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, nr):
            if rows[i][c]:
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        prow = _strip_row(rows[r])
        rows[r] = prow
        piv = prow[c]
        for i in range(nr):
            if i == r:
                continue
            v = rows[i][c]
            if v:
                ri = rows[i]
                rows[i] = _strip_row([piv * ri[k] - v * prow[k] for k in range(ncols)])
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return [row for row in rows[: len(pivots)]], pivots


def _rref_int_np(rows, ncols):
    a = np.array(rows, dtype=np.int64)
    if a.size == 0:
        return [], []
    nr = a.shape[0]
    pivots = []
    r = 0
    for c in range(ncols):
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            a[[r, pr]] = a[[pr, r]]
        g = int(np.gcd.reduce(np.abs(a[r])))
        if g > 1:
            a[r] //= g
        if a[r, c] < 0:
            a[r] = -a[r]
        piv = int(a[r, c])
        col = a[:, c].copy()
        col[r] = 0
        mask = col != 0
        if mask.any():
            sub = a[mask]
            bound = piv * int(np.abs(sub).max()) + int(np.abs(col[mask]).max()) * int(
                np.abs(a[r]).max()
            )
            if bound >= _INT64_LIMIT:
                raise _Overflow
            sub = piv * sub - col[mask, None] * a[r]
            gs = np.gcd.reduce(np.abs(sub), axis=1)
            gs[gs == 0] = 1
            sub //= gs[:, None]
            a[mask] = sub
        pivots.append(c)
        r += 1
        if r == nr:
            break
    out = a[: len(pivots)]
    return [[int(v) for v in row] for row in out], pivots


def rref_int(rows, ncols):
    """Reduced row echelon form of integer rows, fraction-free.

    Returns ``(rows, pivots)`` where the surviving rows are gcd-stripped
    with positive pivot entries and are fully reduced (each pivot column
    is zero in every other row).  Dividing each row by its pivot yields
    the canonical rational RREF.
    """
    if not rows:
        return [], []
    try:
        return _rref_int_np(rows, ncols)
    except (_Overflow, OverflowError):
        return _rref_int_obj(rows, ncols)


def rref_mod(rows, ncols, p):
    """Reduced row echelon form over GF(p); pivots normalized to 1."""
    if not rows:
        return [], []
    a = np.array(rows, dtype=np.int64) % p
    nr = a.shape[0]
    pivots = []
    r = 0
    for c in range(ncols):
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            a[[r, pr]] = a[[pr, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r] = (a[r] * inv) % p
        col = a[:, c].copy()
        col[r] = 0
        mask = col != 0
        if mask.any():
            a[mask] = (a[mask] - col[mask, None] * a[r]) % p
        pivots.append(c)
        r += 1
        if r == nr:
            break
    out = a[: len(pivots)]
    return [[int(v) for v in row] for row in out], pivots


# ---------------------------------------------------------------------------
# sparse paths (always pure python; rows are {col: value} dicts)


def _inv(v, p):
    if p is None:
        return Fraction(1, 1) / v
    return pow(v % p, p - 2, p)


def sparse_rref(rows, ncols, p=None):
    """Sparse RREF.  Values are Fractions/ints (p None) or residues mod p.

    Returns ``(rows, pivots)`` with unit pivots, rows sorted by pivot
    column, fully reduced: the same canonical form the dense path
    produces after pivot normalization.
    """
    pivrows = {}
    tails = {}  # col -> set of pivot cols whose row has a tail entry at col

    def _unindex(pc, row):
        for c in row:
            if c != pc:
                s = tails.get(c)
                if s is not None:
                    s.discard(pc)

    def _index(pc, row):
        for c in row:
            if c != pc:
                tails.setdefault(c, set()).add(pc)

    for incoming in rows:
        row = dict(incoming)
        for c in [c for c in row if c in pivrows]:
            v = row.pop(c)
            if not v:
                continue
            for k, w in pivrows[c].items():
                if k == c:
                    continue
                nv = row.get(k, 0) - v * w
                if p is not None:
                    nv %= p
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
        row = {c: v for c, v in row.items() if v}
        if not row:
            continue
        c = min(row)
        inv = _inv(row[c], p)
        if p is None:
            row = {k: Fraction(v) * inv for k, v in row.items()}
        else:
            row = {k: (v * inv) % p for k, v in row.items()}
        for pc in list(tails.get(c, ())):
            prow = pivrows[pc]
            v = prow.pop(c)
            _unindex(pc, prow)
            for k, w in row.items():
                if k == c:
                    continue
                nv = prow.get(k, 0) - v * w
                if p is not None:
                    nv %= p
                if nv:
                    prow[k] = nv
                else:
                    prow.pop(k, None)
            _index(pc, prow)
        tails.pop(c, None)
        pivrows[c] = row
        _index(c, row)

    pivots = sorted(pivrows)
    return [pivrows[c] for c in pivots], pivots


def monomial_relation_rref(rows, ncols, p=None):
    """Fast RREF for relation sets whose rows have at most two entries.

    Such systems (``a*e_i - b*e_j = 0`` and ``a*e_i = 0``) are exactly
    what tensor-square quotients over monomial subalgebras produce; the
    reduction is a weighted union-find instead of elimination.  Returns
    None when some row has three or more entries.
    """
    one = 1
    parent = {}
    weight = {}  # x_col = weight[col] * x_root
    killed = set()

    def find(c):
        if c not in parent:
            parent[c] = c
            weight[c] = one
            return c, one
        path = []
        node = c
        while parent[node] != node:
            path.append(node)
            node = parent[node]
        root = node
        acc = one
        for nd in reversed(path):
            acc = weight[nd] * acc
            if p is not None:
                acc %= p
            parent[nd] = root
            weight[nd] = acc
        if path:
            return root, weight[c]
        return root, one

    for row in rows:
        items = [(c, v) for c, v in row.items() if v]
        if len(items) > 2:
            return None
        if not items:
            continue
        if len(items) == 1:
            c, _ = items[0]
            r, _w = find(c)
            killed.add(r)
            continue
        (i, a), (j, b) = items
        ri, wi = find(i)
        rj, wj = find(j)
        # relation a*x_i + b*x_j = 0  with  x_i = wi*x_ri, x_j = wj*x_rj
        if ri == rj:
            coeff = a * wi + b * wj
            if p is not None:
                coeff %= p
            if coeff:
                killed.add(ri)
            continue
        if p is None:
            den = a * wi
            num = -b * wj
            if den == 1:
                w = num
            elif den == -1:
                w = -num
            else:
                w = Fraction(num) / Fraction(den)
        else:
            w = (-b * wj * pow((a * wi) % p, p - 2, p)) % p
        parent[ri] = rj
        weight[ri] = w
        if ri in killed:
            killed.discard(ri)
            killed.add(rj)

    classes = {}
    for c in parent:
        r, w = find(c)
        classes.setdefault(r, []).append((c, w))

    out = {}
    for r, members in classes.items():
        if r in killed:
            for c, _w in members:
                out[c] = {c: one}
            continue
        if len(members) == 1:
            continue
        rep = max(c for c, _w in members)
        wrep = dict(members)[rep]
        for c, w in members:
            if c == rep:
                continue
            if p is None:
                if wrep == 1:
                    tail = -w
                elif wrep == -1:
                    tail = w
                else:
                    tail = -Fraction(w) / Fraction(wrep)
            else:
                tail = (-w * pow(wrep, p - 2, p)) % p
            out[c] = {c: one, rep: tail}

    pivots = sorted(out)
    return [out[c] for c in pivots], pivots


def relation_rref_sparse(rows, ncols, p=None):
    """RREF of sparse relation rows, trying the union-find path first."""
    if all(len(r) <= 2 for r in rows):
        res = monomial_relation_rref(rows, ncols, p)
        if res is not None:
            return res
    return sparse_rref(rows, ncols, p)


def sparse_kernel(rows, ncols, p=None):
    """Canonical kernel basis (one vector per free column) of sparse rows."""
    rr, pivots = relation_rref_sparse(rows, ncols, p)
    by_pivot = dict(zip(pivots, rr))
    pivset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = {f: 1}
        for c in pivset:
            w = by_pivot[c].get(f)
            if w:
                v[c] = -w if p is None else (-w) % p
        basis.append(v)
    return basis
