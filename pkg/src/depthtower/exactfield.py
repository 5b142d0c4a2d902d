"""Exact scalars (Q and GF(p)) and the linear algebra everything rests on.

Scalars are plain python objects: ``fractions.Fraction`` (ints welcome)
over Q, and ints in ``[0, p)`` over GF(p).  A field object carries the
descriptor-level operations (coercion, parsing, inversion); matrices and
subspaces dispatch their row reduction through :mod:`depthtower.kernel`.

Every subspace is stored in canonical reduced row echelon form, so equal
subspaces have identical representations and subspace equality is row
equality.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

from . import kernel


class FieldError(ValueError):
    pass


class RationalField:
    """The rationals.  Scalars are Fraction or int, always exact."""

    char = 0
    p = None

    def __repr__(self):
        return "QQ"

    def coerce(self, x):
        if isinstance(x, (int, Fraction)):
            return x
        raise FieldError(f"not a rational scalar: {x!r}")

    def zero(self):
        return 0

    def one(self):
        return 1

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return Fraction(1, 1) / x

    def parse(self, s):
        s = s.strip()
        try:
            return Fraction(s)
        except (ValueError, ZeroDivisionError) as exc:
            raise FieldError(f"bad rational scalar {s!r}") from exc

    def show(self, x):
        x = Fraction(x)
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator}"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")


def _is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class PrimeField:
    """GF(p) for a prime p; scalars are ints in [0, p)."""

    char = None  # set per instance

    def __init__(self, p):
        if not _is_prime(p):
            raise FieldError(f"{p} is not prime")
        self.p = p
        self.char = p

    def __repr__(self):
        return f"GF({self.p})"

    def coerce(self, x):
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise FieldError(f"denominator divisible by {self.p}")
            return x.numerator * pow(x.denominator, self.p - 2, self.p) % self.p
        if isinstance(x, int):
            return x % self.p
        raise FieldError(f"not a scalar: {x!r}")

    def zero(self):
        return 0

    def one(self):
        return 1

    def inv(self, x):
        x %= self.p
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(x, self.p - 2, self.p)

    def parse(self, s):
        s = s.strip()
        if " mod " in s:
            val, mod = s.split(" mod ")
            if int(mod) != self.p:
                raise FieldError(f"scalar {s!r} has wrong modulus for GF({self.p})")
            s = val
        try:
            return int(s) % self.p
        except ValueError as exc:
            raise FieldError(f"bad scalar {s!r} for GF({self.p})") from exc

    def show(self, x):
        return f"{x % self.p} mod {self.p}"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))


QQ = RationalField()

_gf_cache = {}


def GF(p):
    if p not in _gf_cache:
        _gf_cache[p] = PrimeField(p)
    return _gf_cache[p]


def field_from_name(name):
    name = name.strip()
    if name in ("Q", "QQ"):
        return QQ
    if name.startswith("F"):
        return GF(int(name[1:]))
    raise FieldError(f"unknown field {name!r} (expected Q or F<p>)")


def field_name(field):
    return "Q" if field.p is None else f"F{field.p}"


# ---------------------------------------------------------------------------
# vectors: plain lists of scalars


def zero_vec(n):
    return [0] * n


def unit_vec(n, i):
    v = [0] * n
    v[i] = 1
    return v


def vec_add(u, v):
    return [a + b for a, b in zip(u, v)]


def vec_sub(u, v):
    return [a - b for a, b in zip(u, v)]


def vec_scale(c, v):
    return [c * a for a in v]


def vec_is_zero(v, field=QQ):
    if field.p is None:
        return all(a == 0 for a in v)
    return all(a % field.p == 0 for a in v)


def vec_reduce(v, field):
    if field.p is None:
        return list(v)
    return [a % field.p for a in v]


def sparse_of(v):
    return {i: a for i, a in enumerate(v) if a}


def dense_of(sv, n):
    v = [0] * n
    for i, a in sv.items():
        v[i] = a
    return v


# ---------------------------------------------------------------------------


def _integerize(row):
    """Scale a rational row to integers (row scaling is RREF-invariant)."""
    scale = lcm(*(x.denominator for x in row)) if row else 1
    if scale == 1:
        return [int(x) for x in row]
    return [int(x * scale) for x in row]


class Matrix:
    """Dense exact matrix over one field; immutable by convention."""

    __slots__ = ("field", "rows", "nrows", "ncols")

    def __init__(self, field, rows, ncols=None):
        rows = [list(r) for r in rows]
        if ncols is None:
            if not rows:
                raise ValueError("ncols required for an empty matrix")
            ncols = len(rows[0])
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged rows")
        self.field = field
        self.rows = rows
        self.nrows = len(rows)
        self.ncols = ncols

    @classmethod
    def identity(cls, field, n):
        return cls(field, [unit_vec(n, i) for i in range(n)], n)

    @classmethod
    def zeros(cls, field, nr, nc):
        return cls(field, [[0] * nc for _ in range(nr)], nc)

    @classmethod
    def from_columns(cls, field, cols, nrows):
        rows = [[col[i] for col in cols] for i in range(nrows)]
        return cls(field, rows, len(cols))

    def column(self, j):
        return [r[j] for r in self.rows]

    def apply(self, vec):
        """Matrix times column vector."""
        if len(vec) != self.ncols:
            raise ValueError("dimension mismatch")
        out = []
        for r in self.rows:
            s = 0
            for a, b in zip(r, vec):
                if a and b:
                    s += a * b
            out.append(s)
        return vec_reduce(out, self.field)

    def mul(self, other):
        if self.ncols != other.nrows:
            raise ValueError("dimension mismatch")
        bt = list(zip(*other.rows)) if other.nrows else [()] * other.ncols
        out = []
        for r in self.rows:
            row = []
            for c in range(other.ncols):
                s = 0
                col = bt[c] if other.nrows else ()
                for a, b in zip(r, col):
                    if a and b:
                        s += a * b
                row.append(s)
            out.append(vec_reduce(row, self.field))
        return Matrix(self.field, out, other.ncols)

    def add(self, other):
        return Matrix(
            self.field,
            [vec_reduce(vec_add(a, b), self.field) for a, b in zip(self.rows, other.rows)],
            self.ncols,
        )

    def sub(self, other):
        return Matrix(
            self.field,
            [vec_reduce(vec_sub(a, b), self.field) for a, b in zip(self.rows, other.rows)],
            self.ncols,
        )

    def scale(self, c):
        return Matrix(
            self.field, [vec_reduce(vec_scale(c, r), self.field) for r in self.rows], self.ncols
        )

    def transpose(self):
        if self.nrows == 0:
            return Matrix(self.field, [[] for _ in range(self.ncols)], 0)
        return Matrix(self.field, [list(c) for c in zip(*self.rows)], self.nrows)

    def is_zero(self):
        return all(vec_is_zero(r, self.field) for r in self.rows)

    def is_identity(self):
        if self.nrows != self.ncols:
            return False
        return self.eq(Matrix.identity(self.field, self.nrows))

    def eq(self, other):
        if self.nrows != other.nrows or self.ncols != other.ncols:
            return False
        f = self.field
        for a, b in zip(self.rows, other.rows):
            if not vec_is_zero(vec_sub(a, b), f):
                return False
        return True

    def rref(self):
        rows, pivots = _rref_rows(self.field, self.rows, self.ncols)
        return Matrix(self.field, rows, self.ncols), pivots

    def rank(self):
        return len(self.rref()[1])

    def solve(self, b):
        """One solution of self*x = b plus a kernel basis, or (None, basis)."""
        if len(b) != self.nrows:
            raise ValueError("dimension mismatch")
        n = self.ncols
        aug = [row + [bv] for row, bv in zip(self.rows, b)]
        rows, pivots = _rref_rows(self.field, aug, n + 1)
        if n in pivots:
            return None, self.kernel_basis(_pre=(rows, pivots, True))
        x = [0] * n
        for r, c in enumerate(pivots):
            x[c] = rows[r][n]
        return x, self.kernel_basis(_pre=(rows, pivots, True))

    def kernel_basis(self, _pre=None):
        """Basis of the right kernel {x : self*x = 0}."""
        n = self.ncols
        if _pre is None:
            rows, pivots = _rref_rows(self.field, self.rows, n)
            aug = False
        else:
            rows, pivots, aug = _pre
        pivset = set(pivots)
        basis = []
        for f in range(n):
            if f in pivset:
                continue
            v = [0] * n
            v[f] = 1
            for r, c in enumerate(pivots):
                if c < n and rows[r][f]:
                    v[c] = -rows[r][f]
            basis.append(vec_reduce(v, self.field))
        return basis

    def inverse(self):
        if self.nrows != self.ncols:
            return None
        n = self.nrows
        aug = [row + unit_vec(n, i) for i, row in enumerate(self.rows)]
        rows, pivots = _rref_rows(self.field, aug, 2 * n)
        if list(pivots[:n]) != list(range(n)) or len(pivots) != n:
            return None
        return Matrix(self.field, [r[n:] for r in rows], n)

    def __repr__(self):
        return f"Matrix({self.field}, {self.nrows}x{self.ncols})"


def _rref_rows(field, rows, ncols):
    """Canonical RREF rows (unit pivots) and pivot columns."""
    rows = [r for r in rows if not vec_is_zero(r, field)]
    if not rows:
        return [], []
    if field.p is not None:
        out, pivots = kernel.rref_mod([[x % field.p for x in r] for r in rows], ncols, field.p)
        return out, pivots
    int_rows = [_integerize(r) for r in rows]
    out, pivots = kernel.rref_int(int_rows, ncols)
    norm = []
    for r, c in zip(out, pivots):
        piv = r[c]
        if piv == 1:
            norm.append([Fraction(x) if x else 0 for x in r])
        else:
            norm.append([Fraction(x, piv) if x else 0 for x in r])
    return norm, pivots


def rref(m):
    """Reduced row echelon form and pivot columns of a Matrix."""
    return m.rref()


def solve(a, b):
    return a.solve(b)


class Subspace:
    """A subspace of F^n held as canonical RREF rows."""

    __slots__ = ("field", "ambient", "rows", "pivots")

    def __init__(self, field, ambient, rows, pivots, _canonical=False):
        if not _canonical:
            rows, pivots = _rref_rows(field, rows, ambient)
        self.field = field
        self.ambient = ambient
        self.rows = rows
        self.pivots = list(pivots)

    @classmethod
    def from_rows(cls, field, ambient, rows):
        r, p = _rref_rows(field, rows, ambient)
        return cls(field, ambient, r, p, _canonical=True)

    @classmethod
    def full(cls, field, ambient):
        return cls.from_rows(field, ambient, [unit_vec(ambient, i) for i in range(ambient)])

    @classmethod
    def zero(cls, field, ambient):
        return cls(field, ambient, [], [], _canonical=True)

    @property
    def dim(self):
        return len(self.rows)

    def reduce(self, v):
        """Residual of v modulo this subspace."""
        v = list(v)
        f = self.field
        for row, c in zip(self.rows, self.pivots):
            coef = v[c] if f.p is None else v[c] % f.p
            if coef:
                v = vec_sub(v, vec_scale(coef, row))
        return vec_reduce(v, f)

    def coordinates(self, v):
        """Coordinates of v in the stored basis, or None if outside."""
        v = list(v)
        f = self.field
        coords = []
        for row, c in zip(self.rows, self.pivots):
            coef = v[c] if f.p is None else v[c] % f.p
            coords.append(coef)
            if coef:
                v = vec_sub(v, vec_scale(coef, row))
        if vec_is_zero(v, f):
            return coords
        return None

    def contains(self, v):
        return vec_is_zero(self.reduce(v), self.field)

    def contains_space(self, other):
        return all(self.contains(r) for r in other.rows)

    def eq(self, other):
        if self.ambient != other.ambient or self.pivots != other.pivots:
            return False
        f = self.field
        for a, b in zip(self.rows, other.rows):
            if not vec_is_zero(vec_sub(a, b), f):
                return False
        return True

    def sum(self, other):
        return Subspace.from_rows(self.field, self.ambient, self.rows + other.rows)

    def intersect(self, other):
        # kernel of the stacked coordinate map: x in both spans
        a = Matrix(self.field, [list(r) for r in self.rows] + [list(r) for r in other.rows],
                   self.ambient).transpose() if (self.rows or other.rows) else None
        if a is None:
            return Subspace.zero(self.field, self.ambient)
        ker = a.kernel_basis()
        d = self.dim
        vecs = []
        for k in ker:
            v = zero_vec(self.ambient)
            for c, row in zip(k[:d], self.rows):
                if c:
                    v = vec_add(v, vec_scale(c, row))
            vecs.append(v)
        return Subspace.from_rows(self.field, self.ambient, vecs)

    def basis_matrix(self):
        return Matrix(self.field, [list(r) for r in self.rows], self.ambient)

    def __repr__(self):
        return f"Subspace(dim {self.dim} of F^{self.ambient})"


def membership(s, v):
    """(True, coordinates) when v lies in s, else (False, None)."""
    if len(v) != s.ambient:
        raise ValueError("dimension mismatch")
    coords = s.coordinates(v)
    return (coords is not None), coords


class QuotientSpace:
    """F^n modulo a relation subspace, with canonical section basis.

    The section basis consists of the unit vectors at the non-pivot
    coordinates of the relation RREF; the projection reduces a vector by
    the relation rows and reads off those coordinates.
    """

    __slots__ = ("field", "ambient", "rel_by_pivot", "rel_pivots", "section_cols", "index")

    def __init__(self, field, ambient, relation_rows_sparse):
        self.field = field
        self.ambient = ambient
        rows, pivots = kernel.relation_rref_sparse(
            [dict(r) for r in relation_rows_sparse], ambient, field.p
        )
        self.rel_by_pivot = dict(zip(pivots, rows))
        self.rel_pivots = pivots
        pivset = set(pivots)
        self.section_cols = [c for c in range(ambient) if c not in pivset]
        self.index = {c: i for i, c in enumerate(self.section_cols)}

    @property
    def dim(self):
        return len(self.section_cols)

    def project_sparse(self, sv):
        """Quotient coordinates of a sparse ambient vector."""
        p = self.field.p
        out = {}
        stack = list(sv.items())
        while stack:
            c, v = stack.pop()
            if not v:
                continue
            if c in self.index:
                nv = out.get(self.index[c], 0) + v
                if p is not None:
                    nv %= p
                if nv:
                    out[self.index[c]] = nv
                else:
                    out.pop(self.index[c], None)
            else:
                row = self.rel_by_pivot[c]
                for k, w in row.items():
                    if k == c:
                        continue
                    stack.append((k, -v * w if p is None else (-v * w) % p))
        return out

    def project(self, vec):
        out = self.project_sparse(sparse_of(vec))
        return dense_of(out, self.dim)

    def lift_sparse(self, qsv):
        return {self.section_cols[i]: v for i, v in qsv.items() if v}

    def lift(self, qcoords):
        v = zero_vec(self.ambient)
        for i, c in enumerate(self.section_cols):
            v[c] = qcoords[i]
        return v

    def __repr__(self):
        return f"QuotientSpace(F^{self.ambient} -> F^{self.dim})"


def quotient_space(field, ambient, relations):
    """Quotient of F^ambient by a relation set (Subspace or sparse rows)."""
    if isinstance(relations, Subspace):
        rows = [sparse_of(r) for r in relations.rows]
    else:
        rows = [r if isinstance(r, dict) else sparse_of(r) for r in relations]
    return QuotientSpace(field, ambient, rows)


class LinOp:
    """A linear map stored by sparse columns (images of basis vectors)."""

    __slots__ = ("field", "dim_out", "dim_in", "cols")

    def __init__(self, field, dim_out, dim_in, cols):
        self.field = field
        self.dim_out = dim_out
        self.dim_in = dim_in
        self.cols = cols  # dict j -> {i: value}

    @classmethod
    def identity(cls, field, n):
        return cls(field, n, n, {j: {j: 1} for j in range(n)})

    @classmethod
    def zero(cls, field, dim_out, dim_in):
        return cls(field, dim_out, dim_in, {})

    @classmethod
    def from_matrix(cls, m):
        cols = {}
        for i, row in enumerate(m.rows):
            for j, v in enumerate(row):
                if v:
                    cols.setdefault(j, {})[i] = v
        return cls(m.field, m.nrows, m.ncols, cols)

    @classmethod
    def from_columns(cls, field, dim_out, col_list):
        cols = {}
        for j, col in enumerate(col_list):
            sv = col if isinstance(col, dict) else sparse_of(col)
            if sv:
                cols[j] = dict(sv)
        return cls(field, dim_out, len(col_list), cols)

    def apply_sparse(self, sv):
        p = self.field.p
        out = {}
        for j, v in sv.items():
            col = self.cols.get(j)
            if not col or not v:
                continue
            for i, w in col.items():
                nv = out.get(i, 0) + v * w
                if p is not None:
                    nv %= p
                if nv:
                    out[i] = nv
                else:
                    out.pop(i, None)
        return out

    def apply(self, vec):
        return dense_of(self.apply_sparse(sparse_of(vec)), self.dim_out)

    def compose(self, other):
        """self after other."""
        cols = {}
        for j, col in other.cols.items():
            img = self.apply_sparse(col)
            if img:
                cols[j] = img
        return LinOp(self.field, self.dim_out, other.dim_in, cols)

    def add(self, other):
        p = self.field.p
        cols = {j: dict(c) for j, c in self.cols.items()}
        for j, col in other.cols.items():
            tgt = cols.setdefault(j, {})
            for i, w in col.items():
                nv = tgt.get(i, 0) + w
                if p is not None:
                    nv %= p
                if nv:
                    tgt[i] = nv
                else:
                    tgt.pop(i, None)
            if not tgt:
                del cols[j]
        return LinOp(self.field, self.dim_out, self.dim_in, cols)

    def scale(self, c):
        p = self.field.p
        cols = {}
        for j, col in self.cols.items():
            nc = {}
            for i, w in col.items():
                v = c * w if p is None else (c * w) % p
                if v:
                    nc[i] = v
            if nc:
                cols[j] = nc
        return LinOp(self.field, self.dim_out, self.dim_in, cols)

    def sub(self, other):
        return self.add(other.scale(-1))

    def eq(self, other):
        return self.sub(other).is_zero()

    def is_zero(self):
        return not self.cols

    def to_matrix(self):
        rows = [[0] * self.dim_in for _ in range(self.dim_out)]
        for j, col in self.cols.items():
            for i, v in col.items():
                rows[i][j] = v
        return Matrix(self.field, rows, self.dim_in)

    def transpose_rows(self):
        """Rows of the operator as sparse dicts (row i -> {col: value})."""
        rows = {}
        for j, col in self.cols.items():
            for i, v in col.items():
                rows.setdefault(i, {})[j] = v
        return rows

    def vectorize(self):
        """Sparse dict on the (row*dim_in + col) index space."""
        out = {}
        for j, col in self.cols.items():
            for i, v in col.items():
                out[i * self.dim_in + j] = v
        return out

    @classmethod
    def from_vectorized(cls, field, dim_out, dim_in, sv):
        cols = {}
        for idx, v in sv.items():
            i, j = divmod(idx, dim_in)
            cols.setdefault(j, {})[i] = v
        return cls(field, dim_out, dim_in, cols)

    def __repr__(self):
        return f"LinOp({self.dim_out}x{self.dim_in}, nnz={sum(len(c) for c in self.cols.values())})"
