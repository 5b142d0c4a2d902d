from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from depthtower import kernel
from depthtower.exactfield import (
    GF,
    QQ,
    FieldError,
    Matrix,
    Subspace,
    field_from_name,
    membership,
    quotient_space,
    rref,
    unit_vec,
)

FIELDS = [QQ, GF(2), GF(5), GF(7)]


def hand_gauss(rows, ncols):
    """Independent straight textbook Gauss-Jordan over Fraction, no kernel."""
    rows = [[Fraction(x) for x in r] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        piv = rows[r][c]
        rows[r] = [x / piv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return [row for row in rows if any(row)], pivots


def test_rref_identity():
    m = Matrix.identity(QQ, 3)
    r, pivots = rref(m)
    assert r.eq(m)
    assert pivots == [0, 1, 2]


def test_rref_zero():
    m = Matrix.zeros(QQ, 2, 3)
    r, pivots = rref(m)
    assert r.nrows == 0
    assert pivots == []


def test_rref_rank_one():
    # oracle: hand Gaussian elimination
    m = [[2, 4], [1, 2]]
    expect_rows, expect_piv = hand_gauss(m, 2)
    r, pivots = rref(Matrix(QQ, m))
    assert pivots == expect_piv == [0]
    assert [[Fraction(x) for x in row] for row in r.rows] == expect_rows
    assert r.rows[0] == [1, 2]


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.lists(st.integers(-6, 6), min_size=4, max_size=4),
        min_size=1,
        max_size=5,
    )
)
def test_rref_matches_hand_gauss_and_is_idempotent(rows):
    m = Matrix(QQ, rows, 4)
    r, pivots = rref(m)
    expect_rows, expect_piv = hand_gauss(rows, 4)
    assert pivots == expect_piv
    assert [[Fraction(x) for x in row] for row in r.rows] == expect_rows
    r2, piv2 = rref(r)
    assert r2.eq(r) and piv2 == pivots
    assert m.rank() == len(pivots)


@settings(max_examples=40, deadline=None)
@given(
    st.lists(
        st.lists(st.integers(0, 6), min_size=3, max_size=3),
        min_size=1,
        max_size=4,
    )
)
def test_rref_mod_p_idempotent(rows):
    m = Matrix(GF(7), rows, 3)
    r, pivots = rref(m)
    r2, piv2 = rref(r)
    assert r2.eq(r) and piv2 == pivots


def test_solve_identity():
    m = Matrix.identity(QQ, 3)
    x, ker = m.solve([1, 2, 3])
    assert x == [1, 2, 3]
    assert ker == []


def test_solve_zero_matrix():
    m = Matrix.zeros(QQ, 2, 2)
    x, ker = m.solve([0, 0])
    assert x == [0, 0]
    assert len(ker) == 2


def test_solve_inconsistent():
    # oracle: rank of [A] is 1, rank of [A|b] is 2
    a = Matrix(QQ, [[1, 1], [2, 2]])
    aug = Matrix(QQ, [[1, 1, 1], [2, 2, 3]])
    assert a.rank() == 1 and aug.rank() == 2
    x, ker = a.solve([1, 3])
    assert x is None
    assert len(ker) == 1


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.lists(st.integers(-5, 5), min_size=3, max_size=3), min_size=2, max_size=4),
    st.lists(st.integers(-5, 5), min_size=3, max_size=3),
)
def test_solve_consistency_property(rows, x0):
    for field in (QQ, GF(5)):
        a = Matrix(field, rows, 3)
        b = a.apply([field.coerce(v) for v in x0])
        x, ker = a.solve(b)
        assert x is not None
        assert a.apply(x) == b
        for k in ker:
            assert all(v == 0 for v in a.apply(k))


def test_membership_basis_and_zero():
    s = Subspace.from_rows(QQ, 3, [[1, 0, 1], [0, 1, 1]])
    for row in s.rows:
        ok, coords = membership(s, row)
        assert ok
    ok, coords = membership(s, [0, 0, 0])
    assert ok and coords == [0, 0]
    ok, coords = membership(Subspace.from_rows(QQ, 2, [[1, 0]]), [0, 1])
    assert not ok and coords is None


def test_membership_coordinates_reproduce():
    s = Subspace.from_rows(QQ, 3, [[2, 4, 0], [0, 0, 3]])
    v = [1, 2, 5]
    ok, coords = membership(s, v)
    assert ok
    rebuilt = [0, 0, 0]
    for c, row in zip(coords, s.rows):
        rebuilt = [a + c * b for a, b in zip(rebuilt, row)]
    assert [Fraction(x) for x in rebuilt] == [Fraction(x) for x in v]


def test_membership_dim_mismatch():
    s = Subspace.from_rows(QQ, 2, [[1, 0]])
    with pytest.raises(ValueError):
        membership(s, [1, 0, 0])


def test_quotient_trivial_relations():
    q = quotient_space(QQ, 3, [])
    assert q.dim == 3
    assert q.project([1, 2, 3]) == [1, 2, 3]
    assert q.lift([1, 2, 3]) == [1, 2, 3]


def test_quotient_full_relations():
    q = quotient_space(QQ, 2, [unit_vec(2, 0), unit_vec(2, 1)])
    assert q.dim == 0


def test_quotient_rank_nullity():
    # oracle: rank-nullity, rank of the single relation is 1
    q = quotient_space(QQ, 3, [[1, -1, 0]])
    assert q.dim == 3 - 1
    # projection kills the relation and fixes the section
    assert q.project([1, -1, 0]) == [0, 0]
    for qv in ([1, 0], [0, 1]):
        assert q.project(q.lift(qv)) == qv


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.lists(st.integers(-4, 4), min_size=5, max_size=5), min_size=0, max_size=4)
)
def test_quotient_projection_section_property(rel):
    for field in (QQ, GF(5)):
        rows = [[field.coerce(x) for x in r] for r in rel]
        q = quotient_space(field, 5, rows)
        sub = Subspace.from_rows(field, 5, rows)
        assert q.dim == 5 - sub.dim
        for i in range(q.dim):
            qv = unit_vec(q.dim, i)
            assert q.project(q.lift(qv)) == qv
        for r in rows:
            assert all(v == 0 for v in q.project(r))


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.lists(st.integers(-9, 9), min_size=6, max_size=6), min_size=1, max_size=5)
)
def test_sparse_dense_rref_agree(rows):
    """The sparse kernel path must produce the canonical dense RREF."""
    m = Matrix(QQ, rows, 6)
    dense, pivots = rref(m)
    sparse_rows, sparse_piv = kernel.sparse_rref(
        [{i: v for i, v in enumerate(r) if v} for r in rows], 6
    )
    assert sparse_piv == pivots
    rebuilt = [[row.get(c, 0) for c in range(6)] for row in sparse_rows]
    assert [[Fraction(x) for x in r] for r in rebuilt] == [
        [Fraction(x) for x in r] for r in dense.rows
    ]


@settings(max_examples=40, deadline=None)
@given(
    st.lists(
        st.tuples(st.integers(0, 5), st.integers(0, 5), st.integers(-3, 3), st.integers(-3, 3)),
        min_size=0,
        max_size=8,
    )
)
def test_monomial_relation_path_matches_generic(pairs):
    """Two-term relation rows: union-find path equals generic elimination."""
    rows = []
    for i, j, a, b in pairs:
        row = {}
        if a:
            row[i] = row.get(i, 0) + a
        if b:
            row[j] = row.get(j, 0) + b
        rows.append({k: v for k, v in row.items() if v})
    mono = kernel.monomial_relation_rref([dict(r) for r in rows], 6)
    generic_rows, generic_piv = kernel.sparse_rref([dict(r) for r in rows], 6)
    assert mono is not None
    mono_rows, mono_piv = mono
    assert mono_piv == generic_piv
    norm = lambda rs: [{c: Fraction(v) for c, v in r.items()} for r in rs]
    assert norm(mono_rows) == norm(generic_rows)


def test_parse_print_round_trip():
    for x in (Fraction(3, 7), Fraction(-2), Fraction(0), Fraction(22, 7)):
        assert QQ.parse(QQ.show(x)) == x
    f = GF(11)
    for x in range(11):
        assert f.parse(f.show(x)) == x
    assert f.parse("5") == 5


@settings(max_examples=80, deadline=None)
@given(st.integers(-10**12, 10**12), st.integers(1, 10**9))
def test_parse_print_round_trip_property(num, den):
    x = Fraction(num, den)
    assert QQ.parse(QQ.show(x)) == x


def test_field_from_name_and_prime_check():
    assert field_from_name("Q") is QQ
    assert field_from_name("F7").p == 7
    with pytest.raises(FieldError):
        GF(4)
    with pytest.raises(FieldError):
        field_from_name("R")


def test_matrix_inverse():
    m = Matrix(QQ, [[2, 1], [1, 1]])
    inv = m.inverse()
    assert m.mul(inv).is_identity()
    assert Matrix(QQ, [[1, 1], [2, 2]]).inverse() is None


def test_subspace_sum_intersect():
    a = Subspace.from_rows(QQ, 3, [[1, 0, 0]])
    b = Subspace.from_rows(QQ, 3, [[0, 1, 0], [1, 1, 0]])
    assert a.sum(b).dim == 2
    inter = a.intersect(b)
    assert inter.dim == 1 and inter.contains([1, 0, 0])
