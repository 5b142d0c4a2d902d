import pytest

from depthtower.groups import (
    GroupError,
    alternating_group,
    are_isomorphic,
    all_subgroups,
    cyclic_group,
    d3_group_criterion,
    dihedral_group,
    double_cosets,
    group_from_permutations,
    normal_closure,
    parse_permutation,
    permutation_label,
    small_group_catalog,
    subgroup_chain,
    symmetric_group,
)


def brute_closure(perms, degree):
    """Independent oracle: saturate a set of permutation tuples."""
    ident = tuple(range(degree))
    elems = {ident}
    elems.update(perms)
    while True:
        new = {tuple(a[b[x]] for x in range(degree)) for a in elems for b in elems}
        if new <= elems:
            return elems
        elems |= new


def test_parse_and_label_round_trip():
    for s in ["(1 2)", "(1 2 3)(4 5)", "()", "(2 4 3)"]:
        p = parse_permutation(s)
        assert parse_permutation(permutation_label(p)) == p


def test_parse_rejects_garbage():
    with pytest.raises(GroupError):
        parse_permutation("(1 2")
    with pytest.raises(GroupError):
        parse_permutation("(1 x)")
    with pytest.raises(GroupError):
        parse_permutation("(1 2)(2 3)")


def test_group_from_single_transposition():
    g = group_from_permutations([parse_permutation("(1 2)")])
    assert g.order == 2


def test_group_from_empty_generators():
    g = group_from_permutations([], degree=1)
    assert g.order == 1


def test_s3_closure_matches_brute_force():
    gens = [parse_permutation("(1 2)", 3), parse_permutation("(1 2 3)", 3)]
    g = group_from_permutations(gens, degree=3)
    assert g.order == len(brute_closure(gens, 3)) == 6


def test_closure_cap():
    with pytest.raises(GroupError):
        group_from_permutations([parse_permutation("(1 2 3 4 5 6 7)")], cap=5)


def s3():
    return group_from_permutations(
        [parse_permutation("(1 2)", 3), parse_permutation("(1 2 3)", 3)], degree=3
    )


def s4():
    return symmetric_group(4)


def _indices(group, perm_strs):
    want = {parse_permutation(s, len(group.perms[0])) for s in perm_strs}
    return [i for i, p in enumerate(group.perms) if p in want]


def brute_normal_closure(group, k):
    conj = {group.conj(g, x) for g in range(group.order) for x in k}
    cur = set(conj) | {0}
    while True:
        new = {group.table[a][b] for a in cur for b in cur}
        if new <= cur:
            return frozenset(cur)
        cur |= new


def test_normal_closure_of_normal_subgroup():
    g = s3()
    a3 = g.subgroup_closure(_indices(g, ["(1 2 3)"]))
    assert normal_closure(g, a3) == a3


def test_normal_closure_trivial():
    g = s3()
    assert normal_closure(g, [0]) == frozenset({0})


def test_normal_closure_transposition_is_s3():
    g = s3()
    k = g.subgroup_closure(_indices(g, ["(1 2)"]))
    nc = normal_closure(g, k)
    assert nc == brute_normal_closure(g, k)
    assert len(nc) == 6


def test_double_cosets_extremes():
    g = s3()
    full = tuple(range(6))
    assert double_cosets(g, full, full) == [(0, full)]
    singles = double_cosets(g, (0,), (0,))
    assert len(singles) == g.order
    assert all(len(c) == 1 for _r, c in singles)


def test_double_cosets_s3_transposition():
    g = s3()
    h = tuple(sorted(g.subgroup_closure(_indices(g, ["(1 2)"]))))
    dcs = double_cosets(g, h, h)
    sizes = sorted(len(c) for _r, c in dcs)
    assert sizes == [2, 4]
    # partition property
    assert sorted(x for _r, c in dcs for x in c) == list(range(6))


def test_d3_criterion_trivial_k():
    g = s3()
    h = tuple(sorted(g.subgroup_closure(_indices(g, ["(1 2)"]))))
    chain = subgroup_chain(g, h, [0])
    assert d3_group_criterion(chain)


def test_d3_criterion_s4_a4_v4():
    g = s4()
    a4 = g.subgroup_closure(_indices(g, ["(1 2 3)", "(2 3 4)"]))
    v4 = g.subgroup_closure(_indices(g, ["(1 2)(3 4)", "(1 3)(2 4)"]))
    assert len(a4) == 12 and len(v4) == 4
    chain = subgroup_chain(g, a4, v4)
    assert brute_normal_closure(g, v4) == v4  # V4 is normal in S4
    assert d3_group_criterion(chain)


def test_d3_criterion_false_case():
    g = s3()
    h = tuple(sorted(g.subgroup_closure(_indices(g, ["(1 2)"]))))
    chain = subgroup_chain(g, h, h)
    assert brute_normal_closure(g, h) == frozenset(range(6))
    assert not d3_group_criterion(chain)


def test_normal_closure_properties():
    g = s4()
    for seed in ([1], [2], [5, 7]):
        k = g.subgroup_closure(seed)
        nc = normal_closure(g, k)
        assert k <= nc
        assert all(g.conj(x, y) in nc for x in range(g.order) for y in nc)
        assert normal_closure(g, nc) == nc


def test_chain_validation():
    g = s3()
    h = g.subgroup_closure(_indices(g, ["(1 2)"]))
    with pytest.raises(GroupError):
        subgroup_chain(g, h, _indices(g, ["(1 2 3)"]))


def test_catalog_order_1():
    cat = small_group_catalog(1)
    assert len(cat) == 1 and cat[0].group.order == 1


def test_catalog_order_6_contains_c6_and_s3():
    cat = small_group_catalog(6)
    order6 = [c.group for c in cat if c.group.order == 6]
    assert len(order6) == 2
    assert sorted(g.is_abelian() for g in order6) == [False, True]


def test_catalog_order_8_has_five_classes():
    cat = small_group_catalog(8)
    order8 = [c.group for c in cat if c.group.order == 8]
    assert len(order8) == 5
    fps = {g.fingerprint() for g in order8}
    assert len(fps) == 5


def test_catalog_order_16_counts():
    cat = small_group_catalog(16)
    by_order = {}
    for c in cat:
        by_order[c.group.order] = by_order.get(c.group.order, 0) + 1
    assert by_order[16] == 14
    assert by_order[12] == 5


def test_subgroup_counts_standard_examples():
    s4g = s4()
    assert len(all_subgroups(s4g)) == 30
    d4 = dihedral_group(4)
    assert len(all_subgroups(d4)) == 10
    c12 = cyclic_group(12)
    assert len(all_subgroups(c12)) == 6  # one per divisor


def test_iso_distinguishes():
    assert are_isomorphic(cyclic_group(6), cyclic_group(6))
    assert not are_isomorphic(cyclic_group(6), s3())
    assert are_isomorphic(alternating_group(3), cyclic_group(3))
