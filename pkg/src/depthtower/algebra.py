"""Structure-constant algebras, towers, bimodules and tensor squares.

An :class:`Algebra` is a basis-explicit finite-dimensional unital
associative algebra: a sparse multiplication table ``e_i e_j = sum_k
c[i][j][k] e_k`` over an exact field, checked for associativity and the
unit law on construction.  Towers carry explicit embedding matrices,
and tensor squares ``A (x)_B A`` are realized as canonical quotients of
``A (x) A`` (non-pivot coordinates of the relation RREF), so every
downstream certificate is reproducible.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from . import kernel
from .exactfield import (
    GF,
    LinOp,
    Matrix,
    QuotientSpace,
    Subspace,
    dense_of,
    sparse_of,
    unit_vec,
    vec_is_zero,
    vec_reduce,
    zero_vec,
)


class AlgebraError(ValueError):
    pass


def dimension_cap():
    return int(os.environ.get("DEPTHTOWER_MAX_DIM", "700"))


class Algebra:
    """Finite-dimensional unital associative algebra over an exact field."""

    def __init__(self, field, table, unit, labels=None, name="A", check=True):
        self.field = field
        self.dim = len(table)
        self.table = table  # table[i][j] = list of (k, scalar)
        self.unit = list(unit)
        self.labels = list(labels) if labels else [f"e{i}" for i in range(self.dim)]
        self.name = name
        self._gens = None
        self._trace_nondegenerate = None
        self._lmul = {}
        self._rmul = {}
        if check:
            self._check()

    # -- construction helpers

    @classmethod
    def from_dense_table(cls, field, dense, unit, labels=None, name="A", check=True):
        """dense[i][j] = coordinate vector of e_i e_j."""
        n = len(dense)
        table = [
            [[(k, field.coerce(v)) for k, v in enumerate(dense[i][j]) if v] for j in range(n)]
            for i in range(n)
        ]
        return cls(field, table, unit, labels, name, check)

    def _check(self):
        n = self.dim
        f = self.field
        for i in range(n):
            if not vec_is_zero(
                [a - b for a, b in zip(self.mul_basis_vec(i, self.unit), unit_basis(self, i))], f
            ) or not vec_is_zero(
                [a - b for a, b in zip(self.mul_vec_basis(self.unit, i), unit_basis(self, i))], f
            ):
                raise AlgebraError(f"{self.name}: unit law fails at basis {i}")
        for i in range(n):
            for j in range(n):
                eij = self.table[i][j]
                for k in range(n):
                    lhs = self._mul_sparse_basis(eij, k)
                    rhs = self._mul_basis_sparse(i, self.table[j][k])
                    if not _sparse_eq(lhs, rhs, f):
                        raise AlgebraError(
                            f"{self.name}: associativity fails at ({i},{j},{k})"
                        )

    # -- multiplication

    def _mul_sparse_basis(self, sx, k):
        p = self.field.p
        out = {}
        for i, v in sx:
            for t, w in self.table[i][k]:
                nv = out.get(t, 0) + v * w
                if p is not None:
                    nv %= p
                if nv:
                    out[t] = nv
                else:
                    out.pop(t, None)
        return out

    def _mul_basis_sparse(self, i, sy):
        p = self.field.p
        out = {}
        for j, v in sy:
            for t, w in self.table[i][j]:
                nv = out.get(t, 0) + v * w
                if p is not None:
                    nv %= p
                if nv:
                    out[t] = nv
                else:
                    out.pop(t, None)
        return out

    def mul_sparse(self, sx, sy):
        """Product of two sparse coordinate dicts."""
        p = self.field.p
        out = {}
        for i, v in sx.items():
            if not v:
                continue
            for j, w in sy.items():
                c = v * w
                if not c:
                    continue
                for t, s in self.table[i][j]:
                    nv = out.get(t, 0) + c * s
                    if p is not None:
                        nv %= p
                    if nv:
                        out[t] = nv
                    else:
                        out.pop(t, None)
        return out

    def mul(self, x, y):
        return dense_of(self.mul_sparse(sparse_of(x), sparse_of(y)), self.dim)

    def mul_basis_vec(self, i, y):
        return dense_of(self._mul_basis_sparse(i, list(sparse_of(y).items())), self.dim)

    def mul_vec_basis(self, x, j):
        out = self.mul_sparse(sparse_of(x), {j: 1})
        return dense_of(out, self.dim)

    def lmul_basis(self, i):
        """Left multiplication by e_i as a LinOp, cached."""
        if i not in self._lmul:
            cols = {}
            for j in range(self.dim):
                img = {k: v for k, v in self.table[i][j]}
                if img:
                    cols[j] = img
            self._lmul[i] = LinOp(self.field, self.dim, self.dim, cols)
        return self._lmul[i]

    def rmul_basis(self, j):
        """Right multiplication by e_j as a LinOp, cached."""
        if j not in self._rmul:
            cols = {}
            for i in range(self.dim):
                img = {k: v for k, v in self.table[i][j]}
                if img:
                    cols[i] = img
            self._rmul[j] = LinOp(self.field, self.dim, self.dim, cols)
        return self._rmul[j]

    def lmul(self, x):
        op = LinOp.zero(self.field, self.dim, self.dim)
        for i, v in sparse_of(x).items():
            op = op.add(self.lmul_basis(i).scale(v))
        return op

    def rmul(self, x):
        op = LinOp.zero(self.field, self.dim, self.dim)
        for i, v in sparse_of(x).items():
            op = op.add(self.rmul_basis(i).scale(v))
        return op

    def inverse_element(self, x):
        """Two-sided inverse of x, or None."""
        m = self.lmul(x).to_matrix()
        sol, _ker = m.solve(self.unit)
        if sol is None:
            return None
        if self.mul(sol, dense_of(sparse_of(x), self.dim)) != list(
            vec_reduce(self.unit, self.field)
        ):
            return None
        return sol

    # -- structure

    def generator_indices(self):
        """Small algebra generating set (greedy over the basis), cached."""
        if self._gens is None:
            gens = []
            span = _subalgebra_span(self, [self.unit])
            for i in range(self.dim):
                if span.dim == self.dim:
                    break
                if not span.contains(unit_vec(self.dim, i)):
                    gens.append(i)
                    span = _subalgebra_span(
                        self, [list(r) for r in span.rows] + [unit_vec(self.dim, i)]
                    )
            self._gens = gens
        return list(self._gens)

    def is_commutative(self):
        return all(
            _sparse_eq(
                {k: v for k, v in self.table[i][j]},
                {k: v for k, v in self.table[j][i]},
                self.field,
            )
            for i in range(self.dim)
            for j in range(i)
        )

    def trace_vector(self):
        """tr of left multiplication by each basis element."""
        out = []
        for i in range(self.dim):
            s = 0
            for j in range(self.dim):
                for k, v in self.table[i][j]:
                    if k == j:
                        s += v
            out.append(s if self.field.p is None else s % self.field.p)
        return out

    def has_nondegenerate_trace_form(self):
        """Exact rank test of the regular trace form; implies semisimple."""
        if self._trace_nondegenerate is None:
            tr = self.trace_vector()
            gram = []
            for i in range(self.dim):
                row = []
                for j in range(self.dim):
                    s = 0
                    for k, v in self.table[i][j]:
                        s += v * tr[k]
                    row.append(s if self.field.p is None else s % self.field.p)
                gram.append(row)
            m = Matrix(self.field, gram, self.dim)
            self._trace_nondegenerate = m.rank() == self.dim
        return self._trace_nondegenerate

    def __repr__(self):
        return f"Algebra({self.name}, dim {self.dim} over {self.field})"


def unit_basis(_alg, i):
    return unit_vec(_alg.dim, i)


def _sparse_eq(a, b, field):
    p = field.p
    keys = set(a) | set(b)
    for k in keys:
        d = a.get(k, 0) - b.get(k, 0)
        if (d if p is None else d % p) != 0:
            return False
    return True


def _subalgebra_span(alg, seed_rows):
    """Span of the subalgebra generated by the rows (unit included)."""
    span = Subspace.from_rows(alg.field, alg.dim, [alg.unit] + list(seed_rows))
    while True:
        new_rows = []
        rows = [list(r) for r in span.rows]
        for a in rows:
            sa = sparse_of(a)
            for b in rows:
                prod = dense_of(alg.mul_sparse(sa, sparse_of(b)), alg.dim)
                if not span.contains(prod):
                    new_rows.append(prod)
        if not new_rows:
            return span
        span = Subspace.from_rows(alg.field, alg.dim, rows + new_rows)


# ---------------------------------------------------------------------------
# builders


def field_algebra(field, name="k"):
    return Algebra(field, [[[(0, 1)]]], [1], labels=["1"], name=name, check=False)


def group_algebra(group, field, name=None):
    table = [
        [[(group.table[i][j], 1)] for j in range(group.order)] for i in range(group.order)
    ]
    unit = unit_vec(group.order, 0)
    return Algebra(
        field,
        table,
        unit,
        labels=list(group.labels),
        name=name or f"{field}[{group.name}]",
        check=False,
    )


def matrix_algebra(n, field, name=None):
    """Full matrix algebra with basis E(r,c) ordered row-major."""
    dim = n * n
    idx = lambda r, c: r * n + c

    def prod(i, j):
        r1, c1 = divmod(i, n)
        r2, c2 = divmod(j, n)
        if c1 != r2:
            return []
        return [(idx(r1, c2), 1)]

    table = [[prod(i, j) for j in range(dim)] for i in range(dim)]
    unit = zero_vec(dim)
    for r in range(n):
        unit[idx(r, r)] = 1
    labels = [f"E{r + 1}{c + 1}" for r in range(n) for c in range(n)]
    return Algebra(field, table, unit, labels, name or f"M{n}({field})", check=False)


def quaternion_algebra(field, a=-1, b=-1, name=None):
    """Basis 1, i, j, k with i*i = a, j*j = b, i*j = k = -j*i."""
    a = field.coerce(a)
    b = field.coerce(b)
    if a == 0 or b == 0:
        raise AlgebraError("quaternion parameters must be nonzero")
    one, i, j, k = range(4)
    t = {
        (one, one): [(one, 1)], (one, i): [(i, 1)], (one, j): [(j, 1)], (one, k): [(k, 1)],
        (i, one): [(i, 1)], (j, one): [(j, 1)], (k, one): [(k, 1)],
        (i, i): [(one, a)], (j, j): [(one, b)],
        (i, j): [(k, 1)], (j, i): [(k, -1)],
        (i, k): [(j, a)], (k, i): [(j, -a)],
        (j, k): [(i, -b)], (k, j): [(i, b)],
        (k, k): [(one, -a * b)],
    }
    table = [[[(t2, field.coerce(v)) for t2, v in t[(x, y)]] for y in range(4)] for x in range(4)]
    return Algebra(field, table, [1, 0, 0, 0], ["1", "i", "j", "k"], name or "H", check=True)


def _poly_mul_mod(u, v, f, p):
    """Product of coefficient lists modulo the monic polynomial f, over GF(p)."""
    n = len(f) - 1
    out = [0] * (len(u) + len(v) - 1)
    for i, a in enumerate(u):
        if not a:
            continue
        for j, b in enumerate(v):
            out[i + j] = (out[i + j] + a * b) % p
    for deg in range(len(out) - 1, n - 1, -1):
        c = out[deg]
        if not c:
            continue
        out[deg] = 0
        for t in range(n):
            out[deg - n + t] = (out[deg - n + t] - c * f[t]) % p
    return [x % p for x in out[:n]] + [0] * max(0, n - len(out))


def _is_irreducible(f, p):
    """f monic coefficient list (low to high, f[n] = 1) irreducible over GF(p)."""
    n = len(f) - 1
    if n == 1:
        return True
    # x^(p^n) == x mod f and gcd-degree checks via repeated Frobenius
    def frob(vec):
        out = [0] * n
        out_poly = [0]
        # compute vec(x)^p by exponentiation of the polynomial basis
        result = [1] + [0] * (n - 1)
        base = vec
        e = p
        while e:
            if e & 1:
                result = _poly_mul_mod(result, base, f, p)
            base = _poly_mul_mod(base, base, f, p)
            e >>= 1
        return result

    x = [0, 1] + [0] * (n - 2) if n >= 2 else [0]
    cur = list(x)
    for d in range(1, n):
        cur = frob(cur)
        if n % d == 0:
            # gcd(x^(p^d) - x, f) must be 1: no roots in GF(p^d) subfield sense
            diff = [(c - (1 if t == 1 else 0)) % p for t, c in enumerate(cur + [0] * (2 - len(cur)))]
            diff = diff[:n] if len(diff) >= n else diff + [0] * (n - len(diff))
            if _poly_gcd_is_nonconstant(diff, f, p):
                return False
    cur = frob(cur)
    want = [0, 1] + [0] * (n - 2) if n >= 2 else [0]
    return cur == (want + [0] * (n - len(want)))[:n]


def _poly_gcd_is_nonconstant(a, f, p):
    a = list(a)
    b = list(f)

    def deg(u):
        for i in range(len(u) - 1, -1, -1):
            if u[i] % p:
                return i
        return -1

    while True:
        da, db = deg(a), deg(b)
        if da < 0:
            return db > 0
        if db < 0:
            return da > 0
        if da < db:
            a, b = b, a
            da, db = db, da
        inv = pow(b[db], p - 2, p)
        shift = da - db
        factor = (a[da] * inv) % p
        for i in range(db + 1):
            a[i + shift] = (a[i + shift] - factor * b[i]) % p
        if deg(a) < 0:
            return db > 0


def minimal_irreducible_poly(p, n):
    """Lexicographically least monic irreducible of degree n over GF(p)."""
    if n == 1:
        return [0, 1]
    counter = [0] * n
    while True:
        f = list(counter) + [1]
        if f[0] != 0 and _is_irreducible(f, p):
            return f
        for i in range(n):
            counter[i] += 1
            if counter[i] < p:
                break
            counter[i] = 0
        else:
            raise AlgebraError("no irreducible polynomial found")


def finite_field_algebra(p, n, name=None):
    """GF(p^n) as an n-dimensional algebra over GF(p), basis 1, x, .., x^(n-1)."""
    field = GF(p)
    f = minimal_irreducible_poly(p, n)
    basis = [[1 if t == d else 0 for t in range(n)] for d in range(n)]
    table = []
    for i in range(n):
        row = []
        for j in range(n):
            prod = _poly_mul_mod(basis[i], basis[j], f, p)
            row.append([(k, v) for k, v in enumerate(prod) if v])
        table.append(row)
    labels = ["1"] + [f"x^{d}" if d > 1 else "x" for d in range(1, n)]
    return Algebra(field, table, unit_vec(n, 0), labels, name or f"GF({p}^{n})", check=True)


def groupoid_algebra(field, component_sizes, name=None):
    """Disjoint union of full groupoids: arrows (s -> t) within components.

    The product of arrows g: s(g)->t(g), h: s(h)->t(h) is the composite
    g after h when t(h) = s(g), and zero otherwise; the identity is the
    sum of the object loops.
    """
    arrows = []  # (component, target, source)
    for ci, size in enumerate(component_sizes):
        for t in range(size):
            for s in range(size):
                arrows.append((ci, t, s))
    index = {a: i for i, a in enumerate(arrows)}
    dim = len(arrows)
    table = []
    for (c1, t1, s1) in arrows:
        row = []
        for (c2, t2, s2) in arrows:
            if c1 == c2 and s1 == t2:
                row.append([(index[(c1, t1, s2)], 1)])
            else:
                row.append([])
        table.append(row)
    unit = zero_vec(dim)
    for ci, size in enumerate(component_sizes):
        for t in range(size):
            unit[index[(ci, t, t)]] = 1
    labels = [f"a{c}:{s + 1}->{t + 1}" for (c, t, s) in arrows]
    alg = Algebra(field, table, unit, labels, name or "kG", check=True)
    alg.groupoid_arrows = arrows
    alg.groupoid_components = list(component_sizes)
    return alg


def tensor_with_op(a, c, name=None):
    """The algebra A (x) C^op on pairs (i, j), row-major in C."""
    dim = a.dim * c.dim
    cd = c.dim

    def pair(i, j):
        return i * cd + j

    table = []
    for x in range(dim):
        i1, j1 = divmod(x, cd)
        row = []
        for y in range(dim):
            i2, j2 = divmod(y, cd)
            out = []
            for k1, v1 in a.table[i1][i2]:
                for k2, v2 in c.table[j2][j1]:  # opposite order in C
                    out.append((pair(k1, k2), v1 * v2 if a.field.p is None else (v1 * v2) % a.field.p))
            row.append(out)
        table.append(row)
    unit = zero_vec(dim)
    for i, v in sparse_of(a.unit).items():
        for j, w in sparse_of(c.unit).items():
            unit[pair(i, j)] = v * w
    return Algebra(a.field, table, unit, name=name or f"{a.name}(x){c.name}op", check=False)


# ---------------------------------------------------------------------------
# maps, towers


class AlgebraMap:
    """Unital algebra homomorphism given by images of source basis vectors."""

    def __init__(self, source, target, images, name="", check=True):
        self.source = source
        self.target = target
        self.images = [list(v) for v in images]
        self.name = name
        if check:
            self._check()

    def _check(self):
        s, t = self.source, self.target
        if len(self.images) != s.dim:
            raise AlgebraError("embedding image count mismatch")
        if not vec_is_zero(
            [a - b for a, b in zip(self.apply(s.unit), t.unit)], t.field
        ):
            raise AlgebraError(f"map {self.name} does not preserve the unit")
        for i in range(s.dim):
            for j in range(s.dim):
                lhs = self.apply(s.mul(unit_vec(s.dim, i), unit_vec(s.dim, j)))
                rhs = t.mul(self.images[i], self.images[j])
                if not vec_is_zero([a - b for a, b in zip(lhs, rhs)], t.field):
                    raise AlgebraError(f"map {self.name} not multiplicative at ({i},{j})")

    def apply(self, vec):
        out = zero_vec(self.target.dim)
        for i, v in sparse_of(vec).items():
            for k, w in sparse_of(self.images[i]).items():
                out[k] += v * w
        return vec_reduce(out, self.target.field)

    def apply_sparse(self, sv):
        return sparse_of(self.apply(dense_of(sv, self.source.dim)))

    def compose(self, inner):
        """self after inner."""
        return AlgebraMap(
            inner.source,
            self.target,
            [self.apply(img) for img in inner.images],
            name=f"{self.name}*{inner.name}",
            check=False,
        )

    def is_injective(self):
        return Matrix(self.target.field, self.images, self.target.dim).rank() == self.source.dim

    @classmethod
    def identity(cls, alg):
        return cls(alg, alg, [unit_vec(alg.dim, i) for i in range(alg.dim)], "id", check=False)


class Tower:
    """C -> B -> A with explicit unital embeddings."""

    def __init__(self, a, b, c, emb_cb, emb_ba, name="tower", check=True):
        self.a = a
        self.b = b
        self.c = c
        self.emb_cb = emb_cb
        self.emb_ba = emb_ba
        self.emb_ca = emb_ba.compose(emb_cb)
        self.name = name
        if check:
            if not emb_cb.is_injective() or not emb_ba.is_injective():
                raise AlgebraError("tower embeddings must be injective")
        self.b_in_a = [emb_ba.apply(unit_vec(b.dim, i)) for i in range(b.dim)]
        self.c_in_a = [self.emb_ca.apply(unit_vec(c.dim, i)) for i in range(c.dim)]
        self.c_in_b = [emb_cb.apply(unit_vec(c.dim, i)) for i in range(c.dim)]

    def b_gen_vecs_in_a(self):
        return [self.b_in_a[i] for i in self.b.generator_indices()]

    def c_gen_vecs_in_a(self):
        return [self.c_in_a[i] for i in self.c.generator_indices()]

    def __repr__(self):
        return (
            f"Tower({self.a.name}|{self.b.name}|{self.c.name}, "
            f"dims {self.a.dim},{self.b.dim},{self.c.dim})"
        )


def tower_from_chain(chain, field, name=None):
    """Group-algebra tower of a subgroup chain; embeddings send g to g."""
    g = chain.group
    a = group_algebra(g, field)
    hb = list(chain.h)
    kb = list(chain.k)
    bt = [[_group_sub_table(g, hb, i, j) for j in range(len(hb))] for i in range(len(hb))]
    b = Algebra(
        field, bt, unit_vec(len(hb), hb.index(0)),
        labels=[g.labels[x] for x in hb], name=f"{field}[H]", check=False,
    )
    kt = [[_group_sub_table(g, kb, i, j) for j in range(len(kb))] for i in range(len(kb))]
    c = Algebra(
        field, kt, unit_vec(len(kb), kb.index(0)),
        labels=[g.labels[x] for x in kb], name=f"{field}[K]", check=False,
    )
    emb_ba = AlgebraMap(b, a, [unit_vec(g.order, x) for x in hb], "B->A", check=False)
    emb_cb = AlgebraMap(
        c, b, [unit_vec(len(hb), hb.index(x)) for x in kb], "C->B", check=False
    )
    return Tower(a, b, c, emb_cb, emb_ba, name=name or f"{g.name} chain")


def _group_sub_table(group, elems, i, j):
    prod = group.table[elems[i]][elems[j]]
    return [(elems.index(prod), 1)]


def trivial_tower(alg, name=None):
    """A = B = C with identity embeddings."""
    ident = AlgebraMap.identity(alg)
    return Tower(alg, alg, alg, ident, ident, name=name or f"{alg.name}=B=C")


def tower_from_subalgebras(a, b_basis, c_basis, name="tower"):
    """Tower from subalgebra basis vectors of A (C-basis inside span of B)."""
    field = a.field
    b = subalgebra_on_basis(a, b_basis, name="B")
    bspan = Subspace.from_rows(field, a.dim, b_basis)
    c_in_b = []
    for v in c_basis:
        coords = bspan.coordinates(list(v))
        if coords is None:
            raise AlgebraError("C basis does not lie inside B")
        c_in_b.append(coords)
    c = subalgebra_on_basis(a, c_basis, name="C")
    emb_ba = AlgebraMap(b, a, [list(v) for v in b_basis], "B->A", check=False)
    emb_cb = AlgebraMap(c, b, c_in_b, "C->B", check=False)
    return Tower(a, b, c, emb_cb, emb_ba, name=name)


def subalgebra_on_basis(a, basis_rows, name="S"):
    """The subalgebra of A spanned by the given independent rows."""
    field = a.field
    span = Subspace.from_rows(field, a.dim, basis_rows)
    if span.dim != len(basis_rows):
        raise AlgebraError("subalgebra basis is dependent")
    unit_coords = span.coordinates(list(vec_reduce(a.unit, field)))
    if unit_coords is None:
        raise AlgebraError("subalgebra does not contain the unit")
    table = []
    for x in basis_rows:
        row = []
        sx = sparse_of(list(x))
        for y in basis_rows:
            prod = dense_of(a.mul_sparse(sx, sparse_of(list(y))), a.dim)
            coords = span.coordinates(prod)
            if coords is None:
                raise AlgebraError("basis rows do not span a subalgebra")
            row.append([(k, v) for k, v in enumerate(coords) if v])
        table.append(row)
    return Algebra(field, table, unit_coords, name=name, check=False)


# ---------------------------------------------------------------------------
# bimodules


class Bimodule:
    """Vector space with commuting left/right algebra actions.

    Actions are lazy per-basis ``LinOp`` providers; only the acting
    algebras' generators are ever needed for solving, the rest is built
    on demand for verification and products.
    """

    def __init__(
        self,
        field,
        dim,
        left_alg,
        right_alg,
        left_provider,
        right_provider,
        name="M",
        regular=None,
        tensor=None,
    ):
        self.field = field
        self.dim = dim
        self.left_alg = left_alg
        self.right_alg = right_alg
        self._lp = left_provider
        self._rp = right_provider
        self._lcache = {}
        self._rcache = {}
        self.name = name
        self.regular = regular  # "left"/"right": underlying space is that algebra
        self.tensor = tensor  # TensorSquare when M is a tensor-square quotient
        self._gens = None

    def left_op(self, i):
        if i not in self._lcache:
            self._lcache[i] = self._lp(i)
        return self._lcache[i]

    def right_op(self, i):
        if i not in self._rcache:
            self._rcache[i] = self._rp(i)
        return self._rcache[i]

    def left_op_vec(self, avec):
        op = LinOp.zero(self.field, self.dim, self.dim)
        for i, v in sparse_of(avec).items():
            op = op.add(self.left_op(i).scale(v))
        return op

    def right_op_vec(self, avec):
        op = LinOp.zero(self.field, self.dim, self.dim)
        for i, v in sparse_of(avec).items():
            op = op.add(self.right_op(i).scale(v))
        return op

    def left_gen_ops(self):
        return [self.left_op(i) for i in self.left_alg.generator_indices()]

    def right_gen_ops(self):
        return [self.right_op(i) for i in self.right_alg.generator_indices()]

    def verify_actions(self):
        """Action laws on generators: multiplicativity, unit, commuting."""
        la, ra = self.left_alg, self.right_alg
        uid = LinOp.identity(self.field, self.dim)
        if not self.left_op_vec(la.unit).eq(uid) or not self.right_op_vec(ra.unit).eq(uid):
            raise AlgebraError(f"{self.name}: unit does not act as identity")
        for g in la.generator_indices():
            for j in range(la.dim):
                prod = dense_of(la._mul_basis_sparse(g, [(j, 1)]), la.dim)
                if not self.left_op_vec(prod).eq(self.left_op(g).compose(self.left_op(j))):
                    raise AlgebraError(f"{self.name}: left action not multiplicative")
        for g in ra.generator_indices():
            for j in range(ra.dim):
                prod = dense_of(ra._mul_basis_sparse(j, [(g, 1)]), ra.dim)
                if not self.right_op_vec(prod).eq(self.right_op(g).compose(self.right_op(j))):
                    raise AlgebraError(f"{self.name}: right action not anti-multiplicative")
        for g in la.generator_indices():
            for h in ra.generator_indices():
                lg, rh = self.left_op(g), self.right_op(h)
                if not lg.compose(rh).eq(rh.compose(lg)):
                    raise AlgebraError(f"{self.name}: actions do not commute")
        return True

    def generator_vectors(self):
        """Greedy generating set of M under both actions (sparse vectors)."""
        if self._gens is not None:
            return self._gens
        gens = []
        ops = [self.left_op(i) for i in self.left_alg.generator_indices()]
        ops += [self.right_op(i) for i in self.right_alg.generator_indices()]
        closed_rows = []
        closed_pivots = {}
        p = self.field.p

        def reduce_insert(sv):
            sv = dict(sv)
            while True:
                hit = [c for c in sv if c in closed_pivots]
                if not hit:
                    break
                for c in hit:
                    v = sv.pop(c)
                    row = closed_pivots[c]
                    for k, w in row.items():
                        if k == c:
                            continue
                        nv = sv.get(k, 0) - v * w
                        if p is not None:
                            nv %= p
                        if nv:
                            sv[k] = nv
                        else:
                            sv.pop(k, None)
            if not sv:
                return None
            c = min(sv)
            inv = self.field.inv(sv[c])
            sv = {k: (v * inv if p is None else (v * inv) % p) for k, v in sv.items()}
            closed_pivots[c] = sv
            return sv

        for start in range(self.dim):
            seed = {start: 1}
            if reduce_insert(seed) is None:
                continue
            gens.append(seed)
            frontier = [seed]
            while frontier:
                nxt = []
                for v in frontier:
                    for op in ops:
                        img = op.apply_sparse(v)
                        ins = reduce_insert(img)
                        if ins is not None:
                            nxt.append(img)
                frontier = nxt
            if len(closed_pivots) == self.dim:
                break
        self._gens = gens
        return gens

    def __repr__(self):
        return f"Bimodule({self.name}, dim {self.dim})"


def regular_bimodule(alg, left_emb_vecs=None, right_emb_vecs=None,
                     left_alg=None, right_alg=None, name=None, regular=None):
    """alg as a bimodule; either side may act through embedding images."""
    la = left_alg or alg
    ra = right_alg or alg

    def lp(i):
        vec = left_emb_vecs[i] if left_emb_vecs is not None else unit_vec(alg.dim, i)
        return alg.lmul(vec)

    def rp(i):
        vec = right_emb_vecs[i] if right_emb_vecs is not None else unit_vec(alg.dim, i)
        return alg.rmul(vec)

    return Bimodule(
        alg.field, alg.dim, la, ra, lp, rp,
        name=name or f"{alg.name} as bimodule", regular=regular,
    )


def one_sided_bimodule(alg, side, emb_vecs=None, acting=None, name=None):
    """alg as a one-sided module: the other side is the base field."""
    triv = field_algebra(alg.field)
    if side == "right":
        return regular_bimodule(
            alg, left_emb_vecs=[alg.unit], right_emb_vecs=emb_vecs,
            left_alg=triv, right_alg=acting or alg, name=name,
        )
    return regular_bimodule(
        alg, left_emb_vecs=emb_vecs, right_emb_vecs=[alg.unit],
        left_alg=acting or alg, right_alg=triv, name=name,
    )


# ---------------------------------------------------------------------------
# tensor squares A (x)_X A


class TensorSquare:
    """A (x)_X A as a canonical quotient of A (x) A.

    The relation span is generated by ``(a x) (x) a' - a (x) (x a')`` for
    basis a, a' and x running over generators of the middle subalgebra's
    image; the quotient basis is the set of non-pivot coordinates of the
    relation RREF.
    """

    def __init__(self, alg, mid_gen_vecs, name="AxA"):
        n = alg.dim
        if n * n > dimension_cap():
            raise AlgebraError(
                f"tensor square ambient dimension {n * n} exceeds cap {dimension_cap()}"
            )
        self.alg = alg
        self.field = alg.field
        self.n = n
        self.name = name
        relations = []
        for x in mid_gen_vecs:
            sx = sparse_of(list(x))
            for i in range(n):
                xi = alg.mul_sparse({i: 1}, sx)  # e_i * x
                for j in range(n):
                    xj = alg.mul_sparse(sx, {j: 1})  # x * e_j
                    rel = {}
                    for k, v in xi.items():
                        rel[k * n + j] = rel.get(k * n + j, 0) + v
                    for k, v in xj.items():
                        rel[i * n + k] = rel.get(i * n + k, 0) - v
                    rel = {t: v for t, v in rel.items() if v}
                    if rel:
                        relations.append(rel)
        self.quotient = QuotientSpace(alg.field, n * n, relations)
        self.dim = self.quotient.dim
        self._one_one = None

    def pair_sparse(self, sx, sy):
        """Quotient coordinates of x (x) y for sparse algebra coords."""
        amb = {}
        n = self.n
        for i, v in sx.items():
            for j, w in sy.items():
                c = v * w
                if c:
                    amb[i * n + j] = amb.get(i * n + j, 0) + c
        return self.quotient.project_sparse(amb)

    def pair(self, x, y):
        return dense_of(self.pair_sparse(sparse_of(x), sparse_of(y)), self.dim)

    def one_tensor_one(self):
        if self._one_one is None:
            u = sparse_of(self.alg.unit)
            self._one_one = self.pair_sparse(u, u)
        return self._one_one

    def lift_to_pairs(self, qsv):
        """Ambient representative {(i, j): value} of a quotient vector."""
        out = {}
        n = self.n
        for c, v in self.quotient.lift_sparse(qsv).items():
            i, j = divmod(c, n)
            out[(i, j)] = v
        return out

    def left_basis_op(self, i):
        """Action e_i . (x (x) y) = (e_i x) (x) y on quotient coordinates."""
        cols = {}
        n = self.n
        for qi, c in enumerate(self.quotient.section_cols):
            a, b = divmod(c, n)
            img = self.pair_sparse(self.alg._mul_basis_sparse(i, [(a, 1)]), {b: 1})
            if img:
                cols[qi] = img
        return LinOp(self.field, self.dim, self.dim, cols)

    def right_basis_op(self, j):
        cols = {}
        n = self.n
        for qi, c in enumerate(self.quotient.section_cols):
            a, b = divmod(c, n)
            img = self.pair_sparse({a: 1}, self.alg._mul_basis_sparse(b, [(j, 1)]))
            if img:
                cols[qi] = img
        return LinOp(self.field, self.dim, self.dim, cols)

    def left_vec_op(self, avec):
        op = LinOp.zero(self.field, self.dim, self.dim)
        for i, v in sparse_of(avec).items():
            op = op.add(self.left_basis_op(i).scale(v))
        return op

    def right_vec_op(self, avec):
        op = LinOp.zero(self.field, self.dim, self.dim)
        for i, v in sparse_of(avec).items():
            op = op.add(self.right_basis_op(i).scale(v))
        return op

    def mu(self, qsv):
        """Multiplication map x (x) y -> xy on a quotient vector."""
        out = {}
        n = self.n
        p = self.field.p
        for c, v in self.quotient.lift_sparse(qsv).items():
            i, j = divmod(c, n)
            for k, w in self.alg.table[i][j]:
                nv = out.get(k, 0) + v * w
                if p is not None:
                    nv %= p
                if nv:
                    out[k] = nv
                else:
                    out.pop(k, None)
        return out

    def __repr__(self):
        return f"TensorSquare({self.name}, ambient {self.n * self.n} -> dim {self.dim})"


def tensor_over(tower, over="B"):
    """A (x)_B A (or A (x)_C A) for a tower, with cached construction."""
    key = f"_ts_{over}"
    cached = getattr(tower, key, None)
    if cached is not None:
        return cached
    if over == "B":
        gens = tower.b_gen_vecs_in_a()
    elif over == "C":
        gens = tower.c_gen_vecs_in_a()
    else:
        raise AlgebraError("tensor_over expects 'B' or 'C'")
    ts = TensorSquare(tower.a, gens, name=f"A(x)_{over}A")
    setattr(tower, key, ts)
    return ts


def tensor_square_bimodule(tower, over="B", left="A", right="C", name=None):
    """The tensor square as a bimodule with the requested outer actions."""
    cache = getattr(tower, "_bimodules", None)
    if cache is None:
        cache = tower._bimodules = {}
    key = ("ts", over, left, right)
    if key in cache:
        return cache[key]
    ts = tensor_over(tower, over)

    def emb_vecs(side):
        if side == "A":
            return None, tower.a
        if side == "B":
            return tower.b_in_a, tower.b
        return tower.c_in_a, tower.c

    lvecs, lalg = emb_vecs(left)
    rvecs, ralg = emb_vecs(right)

    def lp(i):
        vec = lvecs[i] if lvecs is not None else unit_vec(tower.a.dim, i)
        return ts.left_vec_op(vec)

    def rp(i):
        vec = rvecs[i] if rvecs is not None else unit_vec(tower.a.dim, i)
        return ts.right_vec_op(vec)

    bm = Bimodule(
        tower.a.field, ts.dim, lalg, ralg, lp, rp,
        name=name or f"{left}|{ts.name}|{right}", tensor=ts,
    )
    cache[key] = bm
    return bm


def regular_tower_bimodule(tower, left="A", right="C", name=None):
    """A itself as a bimodule over the named tower levels."""
    cache = getattr(tower, "_bimodules", None)
    if cache is None:
        cache = tower._bimodules = {}
    key = ("reg", left, right)
    if key in cache:
        return cache[key]
    a = tower.a

    def emb(side):
        if side == "A":
            return None, a
        if side == "B":
            return tower.b_in_a, tower.b
        return tower.c_in_a, tower.c

    lvecs, lalg = emb(left)
    rvecs, ralg = emb(right)
    reg = None
    if left == "A":
        reg = "left"
    elif right == "A":
        reg = "right"
    bm = regular_bimodule(
        a, left_emb_vecs=lvecs, right_emb_vecs=rvecs, left_alg=lalg, right_alg=ralg,
        name=name or f"{left}|A|{right}", regular=reg,
    )
    cache[key] = bm
    return bm


# ---------------------------------------------------------------------------
# hom spaces and centralizers


def hom_space(m, n):
    """Basis of bimodule maps M -> N as LinOps, solving the commutation system.

    Maps are vectorized on the (row, col) index space; constraints range
    over the acting algebras' generators only.
    """
    if m.left_alg is not n.left_alg and m.left_alg.dim != n.left_alg.dim:
        raise AlgebraError("hom_space: left algebras differ")
    if m.right_alg is not n.right_alg and m.right_alg.dim != n.right_alg.dim:
        raise AlgebraError("hom_space: right algebras differ")
    rows = []
    dm, dn = m.dim, n.dim

    def add_constraints(op_m, op_n):
        # phi . op_m - op_n . phi = 0; unknown phi is dn x dm
        n_rows = op_n.transpose_rows()
        # entry (i, j): sum_k phi[i, k] op_m[k, j] - sum_k op_n[i, k] phi[k, j]
        for i in range(dn):
            opn_row = n_rows.get(i, {})
            for j in range(dm):
                row = {}
                col = op_m.cols.get(j, {})
                for k, v in col.items():
                    row[i * dm + k] = row.get(i * dm + k, 0) + v
                for k, v in opn_row.items():
                    row[k * dm + j] = row.get(k * dm + j, 0) - v
                row = {t: v for t, v in row.items() if v}
                if row:
                    rows.append(row)

    for g in m.left_alg.generator_indices():
        add_constraints(m.left_op(g), n.left_op(g))
    for g in m.right_alg.generator_indices():
        add_constraints(m.right_op(g), n.right_op(g))
    basis = kernel.sparse_kernel(rows, dn * dm, m.field.p)
    return [LinOp.from_vectorized(m.field, dn, dm, sv) for sv in basis]


def centralizer_in_bimodule(m, avecs_left, avecs_right, acting_alg):
    """{v in M : (emb a) . v = v . (emb a)} for generators of an algebra.

    ``avecs_left[i]``/``avecs_right[i]`` are the acting element's coords
    on M's left and right algebra for the acting algebra's basis i.
    """
    rows = []
    for g in acting_alg.generator_indices():
        lop = m.left_op_vec(avecs_left[g])
        rop = m.right_op_vec(avecs_right[g])
        diff = lop.sub(rop)
        for _j, col in sorted(diff.transpose_rows().items()):
            rows.append(dict(col))
    basis = kernel.sparse_kernel(rows, m.dim, m.field.p)
    return [dense_of(sv, m.dim) for sv in basis]


def centralizer(alg, sub_basis_vecs, sub_gens_idx=None):
    """Centralizer subspace of a subalgebra (given by basis vecs) inside alg."""
    rows = []
    idxs = sub_gens_idx if sub_gens_idx is not None else range(len(sub_basis_vecs))
    for i in idxs:
        diff = alg.lmul(sub_basis_vecs[i]).sub(alg.rmul(sub_basis_vecs[i]))
        for _j, col in sorted(diff.transpose_rows().items()):
            rows.append(dict(col))
    basis = kernel.sparse_kernel(rows, alg.dim, alg.field.p)
    return Subspace.from_rows(alg.field, alg.dim, [dense_of(sv, alg.dim) for sv in basis])


# ---------------------------------------------------------------------------
# Frobenius systems


@dataclass
class FrobeniusSystem:
    """Conditional expectation E: B -> C with dual bases x_i, y_i."""

    e_images: list  # C-coords of E(e_i) for each B basis i
    xs: list  # B-coord vectors
    ys: list  # B-coord vectors

    def apply_e(self, bvec, cdim):
        out = zero_vec(cdim)
        for i, v in sparse_of(bvec).items():
            for k, w in sparse_of(self.e_images[i]).items():
                out[k] += v * w
        return out


def frobenius_system_group(tower):
    """Frobenius system for a group-algebra pair B >= C inside a tower.

    E restricts coefficients to the subgroup span; the dual bases are
    left coset representatives (catalog order) and their inverses.
    """
    b, c = tower.b, tower.c
    field = b.field
    # identify, inside B, which basis elements lie in the image of C
    cspan = Subspace.from_rows(field, b.dim, tower.c_in_b)
    e_images = []
    for i in range(b.dim):
        coords = cspan.coordinates(unit_vec(b.dim, i))
        e_images.append(coords if coords is not None else zero_vec(c.dim))
    # left coset representatives: greedy cover of B basis by rep * C-span
    covered = set()
    xs, ys = [], []
    for i in range(b.dim):
        if i in covered:
            continue
        xs.append(unit_vec(b.dim, i))
        # coset members: supports of e_i * (image of C basis)
        members = set()
        for cv in tower.c_in_b:
            prod = b.mul(unit_vec(b.dim, i), cv)
            members.update(sparse_of(prod))
        covered |= members
        inv = b.inverse_element(unit_vec(b.dim, i))
        if inv is None:
            raise AlgebraError("group basis element is not invertible")
        ys.append(inv)
    sysm = FrobeniusSystem(e_images, xs, ys)
    verify_frobenius_system(tower, sysm)
    return sysm


def verify_frobenius_system(tower, sysm):
    """Dual-basis identities sum E(a x_i) y_i = a = sum x_i E(y_i a)."""
    b, c = tower.b, tower.c
    field = b.field
    for i in range(b.dim):
        a_vec = unit_vec(b.dim, i)
        left = zero_vec(b.dim)
        right = zero_vec(b.dim)
        for x, y in zip(sysm.xs, sysm.ys):
            e_ax = sysm.apply_e(b.mul(a_vec, x), c.dim)
            term = b.mul(_c_to_b(tower, e_ax), y)
            left = [u + v for u, v in zip(left, term)]
            e_ya = sysm.apply_e(b.mul(y, a_vec), c.dim)
            term = b.mul(x, _c_to_b(tower, e_ya))
            right = [u + v for u, v in zip(right, term)]
        if not vec_is_zero([u - v for u, v in zip(left, a_vec)], field):
            raise AlgebraError("Frobenius identity (left) fails")
        if not vec_is_zero([u - v for u, v in zip(right, a_vec)], field):
            raise AlgebraError("Frobenius identity (right) fails")
    # E is a C-C bimodule map
    for ci in range(c.dim):
        cvec_b = tower.c_in_b[ci]
        for bi in range(b.dim):
            lhs = sysm.apply_e(b.mul(cvec_b, unit_vec(b.dim, bi)), c.dim)
            rhs = c.mul(unit_vec(c.dim, ci), sysm.apply_e(unit_vec(b.dim, bi), c.dim))
            if not vec_is_zero([u - v for u, v in zip(lhs, rhs)], field):
                raise AlgebraError("E is not left C-linear")
            lhs = sysm.apply_e(b.mul(unit_vec(b.dim, bi), cvec_b), c.dim)
            rhs = c.mul(sysm.apply_e(unit_vec(b.dim, bi), c.dim), unit_vec(c.dim, ci))
            if not vec_is_zero([u - v for u, v in zip(lhs, rhs)], field):
                raise AlgebraError("E is not right C-linear")
    return True


def _c_to_b(tower, cvec):
    out = zero_vec(tower.b.dim)
    for i, v in sparse_of(cvec).items():
        for k, w in sparse_of(tower.c_in_b[i]).items():
            out[k] += v * w
    return vec_reduce(out, tower.b.field)


def separability_element(b, c_in_b_vecs, c_gens_idx=None):
    """A separability element of B over C, or None.

    Searches e in (B (x)_C B)^B with mu(e) = 1: a linear feasibility
    problem in the tensor-square quotient.
    """
    field = b.field
    gens = c_gens_idx if c_gens_idx is not None else range(len(c_in_b_vecs))
    ts = TensorSquare(b, [c_in_b_vecs[g] for g in gens], name="Bx_CB")
    # centralizer of B inside the quotient
    rows = []
    for g in b.generator_indices():
        diff = ts.left_basis_op(g).sub(ts.right_basis_op(g))
        for _j, col in sorted(diff.transpose_rows().items()):
            rows.append(dict(col))
    cent = kernel.sparse_kernel(rows, ts.dim, field.p)
    if not cent:
        return None
    # solve mu(sum t_i v_i) = 1
    cols = [dense_of(ts.mu(sv), b.dim) for sv in cent]
    m = Matrix.from_columns(field, cols, b.dim)
    sol, _ = m.solve(list(vec_reduce(b.unit, field)))
    if sol is None:
        return None
    out = {}
    for coef, sv in zip(sol, cent):
        if not coef:
            continue
        for k, v in sv.items():
            nv = out.get(k, 0) + coef * v
            if nv:
                out[k] = nv
            else:
                out.pop(k, None)
    return ts, out
