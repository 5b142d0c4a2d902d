from fractions import Fraction

import pytest

from depthtower.algebra import (
    AlgebraError,
    AlgebraMap,
    Bimodule,
    FrobeniusSystem,
    centralizer,
    field_algebra,
    finite_field_algebra,
    frobenius_system_group,
    group_algebra,
    groupoid_algebra,
    hom_space,
    matrix_algebra,
    quaternion_algebra,
    regular_bimodule,
    regular_tower_bimodule,
    separability_element,
    subalgebra_on_basis,
    tensor_over,
    tensor_square_bimodule,
    tower_from_chain,
    trivial_tower,
    verify_frobenius_system,
)
from depthtower.exactfield import GF, QQ, Subspace, unit_vec
from depthtower.groups import (
    cyclic_group,
    group_from_permutations,
    parse_permutation,
    subgroup_chain,
    symmetric_group,
)


def s3():
    return group_from_permutations(
        [parse_permutation("(1 2)", 3), parse_permutation("(1 2 3)", 3)], degree=3
    )


def s3_a3_e_tower(field=QQ):
    g = s3()
    a3 = [i for i, p in enumerate(g.perms) if g.element_order(i) in (1, 3)]
    chain = subgroup_chain(g, a3, [0])
    return tower_from_chain(chain, field)


def s3_h_h_tower(field=QQ):
    """H = K = the order-2 subgroup generated by a transposition."""
    g = s3()
    t = next(i for i in range(6) if g.element_order(i) == 2)
    chain = subgroup_chain(g, [t], [t])
    return tower_from_chain(chain, field)


def test_group_algebra_trivial_group():
    g = group_from_permutations([], degree=1)
    a = group_algebra(g, QQ)
    assert a.dim == 1
    a._check()


def test_group_algebra_c2():
    a = group_algebra(cyclic_group(2), QQ)
    assert a.dim == 2
    assert a.mul([0, 1], [0, 1]) == [1, 0]  # g*g = e
    a._check()


def test_group_algebra_s3_associative():
    a = group_algebra(s3(), QQ)
    a._check()  # associativity check is the oracle
    assert a.unit == unit_vec(6, 0)


def test_tower_from_chain_dims():
    t = s3_a3_e_tower()
    assert (t.a.dim, t.b.dim, t.c.dim) == (6, 3, 1)
    g = symmetric_group(4)
    a4 = g.subgroup_closure(
        [i for i, p in enumerate(g.perms) if g.element_order(i) == 3][:2]
    )
    v4 = g.subgroup_closure(
        [i for i in range(24) if g.element_order(i) == 2 and g.perms[i][0] != 0
         and all(g.perms[i][x] != x for x in range(4))]
    )
    chain = subgroup_chain(g, a4, v4)
    t = tower_from_chain(chain, QQ)
    assert (t.a.dim, t.b.dim, t.c.dim) == (24, 12, 4)


def test_trivial_tower_identity_embeddings():
    a = group_algebra(cyclic_group(3), QQ)
    t = trivial_tower(a)
    assert t.b is a and t.c is a
    assert t.emb_ba.apply([1, 2, 3]) == [1, 2, 3]


def test_matrix_algebra_structure():
    m2 = matrix_algebra(2, QQ)
    m2._check()
    # E11 * E12 = E12, E12 * E11 = 0
    e11, e12 = unit_vec(4, 0), unit_vec(4, 1)
    assert m2.mul(e11, e12) == e12
    assert m2.mul(e12, e11) == [0, 0, 0, 0]
    assert matrix_algebra(1, QQ).dim == 1


def test_quaternions():
    h = quaternion_algebra(QQ)
    one, i, j, k = (unit_vec(4, t) for t in range(4))
    assert h.mul(i, i) == [-1, 0, 0, 0]
    assert h.mul(j, j) == [-1, 0, 0, 0]
    assert h.mul(i, j) == k
    assert h.mul(j, i) == [0, 0, 0, -1]
    assert h.mul(k, k) == [-1, 0, 0, 0]
    # division: every nonzero basis combo used below is invertible
    inv = h.inverse_element([1, 2, -1, 3])
    assert inv is not None
    assert h.mul([1, 2, -1, 3], inv) == [1, 0, 0, 0]


def test_finite_field_algebra():
    e = finite_field_algebra(2, 4)
    assert e.dim == 4 and e.field.p == 2
    e._check()
    # multiplicative group order 15: x^15 = 1
    x = unit_vec(4, 1)
    acc = e.unit
    for _ in range(15):
        acc = e.mul(acc, x)
    assert acc == e.unit
    assert finite_field_algebra(3, 2).dim == 2


def test_groupoid_algebra_two_objects_is_m2():
    kg = groupoid_algebra(QQ, [2])
    m2 = matrix_algebra(2, QQ)
    assert kg.dim == 4
    kg._check()
    # arrows are matrix units: same structure constants up to relabeling
    # unit = sum of object loops = identity matrix
    assert sum(kg.unit) == 2
    # zero products witness: two arrows that do not compose
    arrows = kg.groupoid_arrows
    i = arrows.index((0, 0, 0))
    j = arrows.index((0, 1, 1))
    assert kg.mul(unit_vec(4, i), unit_vec(4, j)) == [0, 0, 0, 0]
    assert m2.dim == kg.dim


def test_tensor_square_dims():
    # B = A: dim A (x)_A A = dim A
    a = group_algebra(s3(), QQ)
    t = trivial_tower(a)
    ts = tensor_over(t, "B")
    assert ts.dim == 6
    # B = base field: no relations, dim = (dim A)^2
    tower = s3_a3_e_tower()
    tsc = tensor_over(tower, "C")
    assert tsc.dim == 36
    # A = Q[S3], B = Q[A3]: |G| * [G:H] = 12  (coset-counting oracle)
    tsb = tensor_over(tower, "B")
    assert tsb.dim == 12


def test_tensor_square_mu_well_defined():
    tower = s3_a3_e_tower()
    ts = tensor_over(tower, "B")
    a = tower.a
    for i in range(6):
        for j in range(6):
            q = ts.pair_sparse({i: 1}, {j: 1})
            prod = ts.mu(q)
            want = a.mul_sparse({i: 1}, {j: 1})
            assert prod == want


def test_tensor_square_relations_killed():
    tower = s3_a3_e_tower()
    ts = tensor_over(tower, "B")
    a = tower.a
    for bvec in tower.b_in_a:
        for i in range(6):
            for j in range(6):
                xb = a.mul(unit_vec(6, i), bvec)
                bx = a.mul(bvec, unit_vec(6, j))
                lhs = ts.pair(xb, unit_vec(6, j))
                rhs = ts.pair(unit_vec(6, i), bx)
                assert lhs == rhs


def test_hom_space_contains_identity():
    tower = s3_a3_e_tower()
    m = regular_tower_bimodule(tower, "A", "C")
    maps = hom_space(m, m)
    span = Subspace.from_rows(QQ, 36, [_flat(op) for op in maps])
    ident = _flat_identity(6)
    assert span.contains(ident)


def _flat(op):
    m = op.to_matrix()
    return [v for row in m.rows for v in row]


def _flat_identity(n):
    out = []
    for i in range(n):
        for j in range(n):
            out.append(1 if i == j else 0)
    return out


def test_hom_space_schur_m2():
    m2 = matrix_algebra(2, QQ)
    m = regular_bimodule(m2, name="M2")
    maps = hom_space(m, m)
    assert len(maps) == 1  # A-A endomorphisms of A = M2 form the center = Q


def test_hom_space_dim_equals_centralizer():
    # dim Hom(A_C -> (A x_B A)_C as A-C-bimodules) = dim (A x_B A)^C
    tower = s3_a3_e_tower()
    n = regular_tower_bimodule(tower, "A", "C")
    m = tensor_square_bimodule(tower, "B", "A", "C")
    maps = hom_space(n, m)
    from depthtower.algebra import centralizer_in_bimodule

    cent = centralizer_in_bimodule(
        m, tower.c_in_a, tower.c_in_a, tower.c
    )
    assert len(maps) == len(cent)


def test_centralizer_commutative_full():
    a = group_algebra(cyclic_group(4), QQ)
    cent = centralizer(a, [unit_vec(4, i) for i in range(4)])
    assert cent.dim == 4


def test_centralizer_trivial_constraint():
    tower = s3_a3_e_tower()
    cent = centralizer(tower.a, tower.c_in_a)
    assert cent.dim == 6  # C = Q: everything centralizes


def test_center_of_qs3_is_class_sums():
    # oracle: 3 conjugacy classes
    a = group_algebra(s3(), QQ)
    cent = centralizer(a, [unit_vec(6, i) for i in range(6)])
    assert cent.dim == 3
    assert s3().conjugacy_class_sizes() == [1, 2, 3]


def test_frobenius_k_equals_h():
    a = group_algebra(cyclic_group(3), QQ)
    t = trivial_tower(a)
    fs = frobenius_system_group(t)
    assert len(fs.xs) == 1
    assert verify_frobenius_system(t, fs)


def test_frobenius_a3_over_trivial():
    tower = s3_a3_e_tower()
    # restrict to the pair B = Q[A3], C = Q
    g = s3()
    a3 = [i for i in range(6) if g.element_order(i) in (1, 3)]
    chain = subgroup_chain(g, a3, [0])
    t = tower_from_chain(chain, QQ)
    # Frobenius system of B over C has [H:K] = 3 dual pairs
    from depthtower.algebra import Tower

    inner = Tower(
        t.b, t.b, t.c, t.emb_cb, AlgebraMap.identity(t.b), check=False
    )
    fs = frobenius_system_group(inner)
    assert len(fs.xs) == 3


def test_frobenius_s3_over_c2():
    tower = s3_h_h_tower()
    from depthtower.algebra import Tower

    inner = Tower(tower.a, tower.a, tower.b,
                  tower.emb_ba, AlgebraMap.identity(tower.a), check=False)
    fs = frobenius_system_group(inner)
    assert len(fs.xs) == 3  # [S3 : C2] = 3


def test_separability_element_group_algebra():
    # Q[A3] over Q is separable (Maschke)
    tower = s3_a3_e_tower()
    res = separability_element(tower.b, tower.c_in_b)
    assert res is not None
    ts, elem = res
    # mu(e) = 1
    assert ts.mu(elem) == {i: v for i, v in enumerate(tower.b.unit) if v}


def test_separable_trace_form():
    assert group_algebra(s3(), QQ).has_nondegenerate_trace_form()
    assert matrix_algebra(2, QQ).has_nondegenerate_trace_form()
    # modular case: F3[C3] is not semisimple
    assert not group_algebra(cyclic_group(3), GF(3)).has_nondegenerate_trace_form()
    # but F2[C3] is
    assert group_algebra(cyclic_group(3), GF(2)).has_nondegenerate_trace_form()


def test_bimodule_action_verification():
    tower = s3_a3_e_tower()
    m = tensor_square_bimodule(tower, "B", "A", "C")
    assert m.verify_actions()
    r = regular_tower_bimodule(tower, "A", "B")
    assert r.verify_actions()


def test_bimodule_generators_cover():
    tower = s3_a3_e_tower()
    m = tensor_square_bimodule(tower, "B", "A", "C")
    gens = m.generator_vectors()
    assert len(gens) >= 1
    # the regular bimodule A over (A, C) is generated by 1
    r = regular_tower_bimodule(tower, "A", "C")
    assert len(r.generator_vectors()) == 1


def test_subalgebra_on_basis():
    a = group_algebra(s3(), QQ)
    g = s3()
    a3 = [i for i in range(6) if g.element_order(i) in (1, 3)]
    sub = subalgebra_on_basis(a, [unit_vec(6, i) for i in a3])
    assert sub.dim == 3
    sub._check()


def test_algebra_map_rejects_bad():
    a = group_algebra(cyclic_group(2), QQ)
    b = group_algebra(cyclic_group(4), QQ)
    with pytest.raises(AlgebraError):
        AlgebraMap(a, b, [unit_vec(4, 0), unit_vec(4, 1)])  # not multiplicative
