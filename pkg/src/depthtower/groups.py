"""Finite group machinery: Cayley tables, subgroups, double cosets.

Groups are stored as Cayley tables on element indices (identity at index
0) together with a realizing permutation for each element; element labels
are cycle-notation strings.  Everything here is brute-force by design:
the catalog stops at order 24, where exhaustive closure and backtracking
isomorphism tests are instant.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field

DEFAULT_ORDER_CAP = 200

# number of isomorphism classes for each order 1..24
GROUP_COUNTS = [
    1, 1, 1, 2, 1, 2, 1, 5, 2, 2, 1, 5, 1, 2, 1, 14, 1, 5, 1, 5, 2, 2, 1, 15,
]


class GroupError(ValueError):
    pass


# ---------------------------------------------------------------------------
# permutations: tuples mapping 0-based points


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_permutation(s, degree=None):
    """Parse cycle notation like ``(1 2 3)(4 5)`` on 1-based points."""
    s = s.strip()
    if not s:
        raise GroupError("empty permutation")
    consumed = "".join(_CYCLE_RE.findall(s))
    stripped = _CYCLE_RE.sub("", s).strip()
    if stripped:
        raise GroupError(f"malformed cycle notation at {stripped.split()[0]!r}")
    cycles = []
    maxpt = degree or 1
    for body in _CYCLE_RE.findall(s):
        pts = [t for t in re.split(r"[,\s]+", body.strip()) if t]
        cyc = []
        for t in pts:
            if not t.isdigit() or int(t) < 1:
                raise GroupError(f"malformed cycle notation at {t!r}")
            cyc.append(int(t) - 1)
        if len(set(cyc)) != len(cyc):
            raise GroupError(f"repeated point in cycle ({body})")
        cycles.append(cyc)
        if cyc:
            maxpt = max(maxpt, max(cyc) + 1)
    if degree is not None and maxpt > degree:
        raise GroupError(f"point {maxpt} exceeds degree {degree}")
    n = degree or maxpt
    perm = list(range(n))
    seen = set()
    for cyc in cycles:
        for p in cyc:
            if p in seen:
                raise GroupError(f"point {p + 1} appears in two cycles")
            seen.add(p)
        for i, p in enumerate(cyc):
            perm[p] = cyc[(i + 1) % len(cyc)]
    return tuple(perm)


def permutation_label(perm):
    n = len(perm)
    seen = [False] * n
    out = []
    for i in range(n):
        if seen[i] or perm[i] == i:
            seen[i] = True
            continue
        cyc = [i]
        seen[i] = True
        j = perm[i]
        while j != i:
            cyc.append(j)
            seen[j] = True
            j = perm[j]
        out.append("(" + " ".join(str(p + 1) for p in cyc) + ")")
    return "".join(out) if out else "()"


def compose(p, q):
    """p after q: (p*q)(x) = p(q(x))."""
    return tuple(p[q[x]] for x in range(len(p)))


def invert(p):
    out = [0] * len(p)
    for i, v in enumerate(p):
        out[v] = i
    return tuple(out)


# ---------------------------------------------------------------------------


class FiniteGroup:
    """A finite group as a Cayley table plus realizing permutations."""

    def __init__(self, perms, table, name="G", check=True):
        self.perms = list(perms)
        self.order = len(perms)
        self.table = table
        self.labels = [permutation_label(p) for p in perms]
        self.name = name
        ident = tuple(range(len(perms[0])))
        if perms[0] != ident:
            raise GroupError("identity must sit at index 0")
        inv = [None] * self.order
        for i in range(self.order):
            for j in range(self.order):
                if table[i][j] == 0:
                    inv[i] = j
                    break
        if any(v is None for v in inv):
            raise GroupError("missing inverses")
        self.inv = inv
        if check:
            self._check(full=self.order <= 64)
        self._gens = None

    def _check(self, full, samples=2000, seed=7):
        n = self.order
        t = self.table
        for i in range(n):
            if t[0][i] != i or t[i][0] != i:
                raise GroupError("index 0 is not an identity")
            if t[i][self.inv[i]] != 0 or t[self.inv[i]][i] != 0:
                raise GroupError("inverse table inconsistent")
        if full:
            for a in range(n):
                ta = t[a]
                for b in range(n):
                    tab = ta[b]
                    tb = t[b]
                    for c in range(n):
                        if t[tab][c] != ta[tb[c]]:
                            raise GroupError("associativity fails")
        else:
            rng = random.Random(seed)
            for _ in range(samples):
                a, b, c = rng.randrange(n), rng.randrange(n), rng.randrange(n)
                if t[t[a][b]][c] != t[a][t[b][c]]:
                    raise GroupError("associativity fails")

    @classmethod
    def from_permutations(cls, gens, degree=None, cap=DEFAULT_ORDER_CAP, name="G"):
        """Breadth-first closure of permutation generators."""
        if degree is None:
            degree = max((len(g) for g in gens), default=1)
        gens = [tuple(g) + tuple(range(len(g), degree)) for g in gens]
        for g in gens:
            if sorted(g) != list(range(degree)):
                raise GroupError("generator is not a permutation")
        ident = tuple(range(degree))
        elems = [ident]
        index = {ident: 0}
        queue = [ident]
        while queue:
            cur = queue.pop(0)
            for g in gens:
                nxt = compose(cur, g)
                if nxt not in index:
                    if len(elems) >= cap:
                        raise GroupError(f"closure exceeds cap {cap}")
                    index[nxt] = len(elems)
                    elems.append(nxt)
                    queue.append(nxt)
        table = [
            [index[compose(a, b)] for b in elems]
            for a in elems
        ]
        grp = cls(elems, table, name=name, check=False)
        grp._gens = sorted(index[g] for g in gens if index[g] != 0)
        return grp

    @classmethod
    def from_table(cls, table, name="G"):
        """Build from a raw Cayley table via the regular representation."""
        n = len(table)
        perms = [tuple(table[i][j] for j in range(n)) for i in range(n)]
        # reorder so the identity (row equal to range) is index 0
        ident_idx = next(i for i in range(n) if perms[i] == tuple(range(n)))
        order = [ident_idx] + [i for i in range(n) if i != ident_idx]
        pos = {old: new for new, old in enumerate(order)}
        newtab = [[pos[table[a][b]] for b in order] for a in order]
        newperms = [tuple(pos[table[a][b]] for b in order) for a in order]
        return cls(newperms, newtab, name=name, check=True)

    def mult(self, a, b):
        return self.table[a][b]

    def inverse(self, a):
        return self.inv[a]

    def conj(self, g, x):
        return self.table[self.table[g][x]][self.inv[g]]

    def element_order(self, a):
        x = a
        n = 1
        while x != 0:
            x = self.table[x][a]
            n += 1
        return n

    def generator_indices(self):
        """A small generating set (greedy), cached."""
        if self._gens is None or not self._is_generating(self._gens):
            gens = []
            closed = {0}
            for i in range(self.order):
                if i not in closed:
                    gens.append(i)
                    closed = self.subgroup_closure(gens)
                    if len(closed) == self.order:
                        break
            self._gens = gens
        return list(self._gens)

    def _is_generating(self, gens):
        return len(self.subgroup_closure(gens)) == self.order

    def subgroup_closure(self, seed):
        cur = {0}
        cur.update(seed)
        frontier = list(cur)
        while frontier:
            new = []
            for a in frontier:
                for b in list(cur):
                    for c in (self.table[a][b], self.table[b][a]):
                        if c not in cur:
                            cur.add(c)
                            new.append(c)
            frontier = new
        return frozenset(cur)

    def is_subgroup(self, elems):
        s = set(elems)
        if 0 not in s:
            return False
        return all(self.table[a][b] in s for a in s for b in s)

    def center_size(self):
        return sum(
            1
            for a in range(self.order)
            if all(self.table[a][b] == self.table[b][a] for b in range(self.order))
        )

    def is_abelian(self):
        return self.center_size() == self.order

    def conjugacy_class_sizes(self):
        seen = set()
        sizes = []
        for a in range(self.order):
            if a in seen:
                continue
            cls = {self.conj(g, a) for g in range(self.order)}
            seen |= cls
            sizes.append(len(cls))
        return sorted(sizes)

    def fingerprint(self):
        orders = sorted(self.element_order(a) for a in range(self.order))
        return (
            self.order,
            tuple(orders),
            self.center_size(),
            tuple(self.conjugacy_class_sizes()),
        )

    def __repr__(self):
        return f"FiniteGroup({self.name}, order {self.order})"


def group_from_permutations(gens, degree=None, cap=DEFAULT_ORDER_CAP, name="G"):
    return FiniteGroup.from_permutations(gens, degree=degree, cap=cap, name=name)


@dataclass(frozen=True)
class SubgroupChain:
    """G > H > K with H, K stored as sorted element-index tuples."""

    group: FiniteGroup
    h: tuple
    k: tuple
    name: str = field(default="", compare=False)

    def __post_init__(self):
        g = self.group
        hs, ks = set(self.h), set(self.k)
        if not ks <= hs:
            raise GroupError("K is not contained in H")
        if not g.is_subgroup(hs) or not g.is_subgroup(ks):
            raise GroupError("H or K is not closed")
        object.__setattr__(self, "h", tuple(sorted(hs)))
        object.__setattr__(self, "k", tuple(sorted(ks)))


def subgroup_chain(group, h_seed, k_seed, name=""):
    h = group.subgroup_closure(h_seed)
    k = group.subgroup_closure(k_seed)
    if not k <= h:
        raise GroupError("generated K is not contained in generated H")
    return SubgroupChain(group, tuple(sorted(h)), tuple(sorted(k)), name=name)


def normal_closure(group, k):
    """Smallest normal subgroup of ``group`` containing the subgroup k."""
    conjugates = {group.conj(g, x) for g in range(group.order) for x in k}
    return group.subgroup_closure(conjugates)


def double_cosets(group, h, k):
    """H-K double cosets as (least representative, sorted class) pairs."""
    unseen = set(range(group.order))
    out = []
    t = group.table
    for rep in range(group.order):
        if rep not in unseen:
            continue
        cls = {t[t[a][rep]][b] for a in h for b in k}
        unseen -= cls
        out.append((rep, tuple(sorted(cls))))
    return out


def d3_group_criterion(chain):
    """True iff the normal closure of K in G lies inside H."""
    return normal_closure(chain.group, chain.k) <= set(chain.h)


def conjugacy_key(group, h, k):
    """Canonical key of (H, K) under simultaneous conjugation."""
    best = None
    for g in range(group.order):
        hc = tuple(sorted(group.conj(g, x) for x in h))
        kc = tuple(sorted(group.conj(g, x) for x in k))
        cand = (hc, kc)
        if best is None or cand < best:
            best = cand
    return best


def all_subgroups(group):
    """Every subgroup, by iterated closure of joins of cyclic subgroups."""
    cyclics = {group.subgroup_closure([a]) for a in range(group.order)}
    subs = set(cyclics)
    subs.add(frozenset({0}))
    grew = True
    while grew:
        grew = False
        for s in list(subs):
            for c in cyclics:
                if c <= s:
                    continue
                u = group.subgroup_closure(s | c)
                if u not in subs:
                    subs.add(u)
                    grew = True
    return sorted(subs, key=lambda s: (len(s), tuple(sorted(s))))


# ---------------------------------------------------------------------------
# isomorphism testing (brute force with invariant prefilter)


def _greedy_generators(group):
    gens = []
    closed = {0}
    for i in range(group.order):
        if i not in closed:
            gens.append(i)
            closed = group.subgroup_closure(gens)
            if len(closed) == group.order:
                break
    return gens


def _extend_iso(ga, gb, pairs, require_full):
    """Extend generator images over the generated subgroup; None on clash."""
    for a, b in pairs:
        if ga.element_order(a) != gb.element_order(b):
            return None
    mapping = {0: 0}
    frontier = [0]
    while frontier:
        x = frontier.pop()
        for a, b in pairs:
            xa = ga.table[x][a]
            xb = gb.table[mapping[x]][b]
            if xa in mapping:
                if mapping[xa] != xb:
                    return None
            else:
                mapping[xa] = xb
                frontier.append(xa)
    if len(set(mapping.values())) != len(mapping):
        return None
    if require_full and len(mapping) != ga.order:
        return None
    return mapping


def are_isomorphic(ga, gb):
    if ga.order != gb.order:
        return False
    if ga.fingerprint() != gb.fingerprint():
        return False
    gens = _greedy_generators(ga)
    orders = [ga.element_order(a) for a in gens]
    candidates = [
        [b for b in range(gb.order) if gb.element_order(b) == o] for o in orders
    ]

    def backtrack(i, pairs):
        if _extend_iso(ga, gb, pairs, require_full=(i == len(gens))) is None:
            return False
        if i == len(gens):
            return True
        for b in candidates[i]:
            if backtrack(i + 1, pairs + [(gens[i], b)]):
                return True
        return False

    return backtrack(0, [])


# ---------------------------------------------------------------------------
# constructions feeding the catalog


def cyclic_group(n, name=None):
    if n == 1:
        return FiniteGroup.from_permutations([], degree=1, name=name or "C1")
    gen = tuple(list(range(1, n)) + [0])
    return FiniteGroup.from_permutations([gen], name=name or f"C{n}")


def symmetric_group(n):
    gens = [parse_permutation("(1 2)"), parse_permutation("(" + " ".join(map(str, range(1, n + 1))) + ")")]
    return FiniteGroup.from_permutations(gens, degree=n, name=f"S{n}")


def alternating_group(n):
    gens = []
    for i in range(1, n - 1):
        gens.append(parse_permutation(f"({i} {i + 1} {i + 2})", degree=n))
    return FiniteGroup.from_permutations(gens, degree=n, name=f"A{n}")


def dihedral_group(n):
    rot = tuple(list(range(1, n)) + [0])
    ref = tuple((n - i) % n for i in range(n))
    return FiniteGroup.from_permutations([rot, ref], degree=n, name=f"D{n}")


def direct_product(a, b, name=None):
    da = len(a.perms[0])
    db = len(b.perms[0])
    gens = []
    for g in a.perms[1:]:
        gens.append(tuple(g) + tuple(da + i for i in range(db)))
    for g in b.perms[1:]:
        gens.append(tuple(range(da)) + tuple(da + v for v in g))
    grp = FiniteGroup.from_permutations(
        gens, degree=da + db, cap=a.order * b.order, name=name or f"{a.name}x{b.name}"
    )
    if grp.order != a.order * b.order:
        raise GroupError("direct product closure has wrong order")
    return grp


def _group_from_model(elems, mul, name):
    index = {e: i for i, e in enumerate(elems)}
    table = [[index[mul(a, b)] for b in elems] for a in elems]
    g = FiniteGroup.from_table(table, name=name)
    g.name = name
    return g


def dicyclic_group(m):
    """Dic_m of order 4m: <a, b | a^(2m)=1, b^2=a^m, bab^-1=a^-1>."""
    elems = [(i, j) for j in (0, 1) for i in range(2 * m)]

    def mul(x, y):
        i, j = x
        i2, j2 = y
        if j == 0:
            return ((i + i2) % (2 * m), j2)
        if j2 == 0:
            return ((i - i2) % (2 * m), 1)
        return ((i - i2 + m) % (2 * m), 0)

    return _group_from_model(elems, mul, f"Dic{m}")


def semidirect_cyclic(m, n, k, name=None):
    """C_m x| C_n with the generator of C_n acting by x -> x^k."""
    if pow(k, n, m) != 1 % m:
        raise GroupError("action order does not divide n")
    elems = [(i, j) for j in range(n) for i in range(m)]

    def mul(x, y):
        i, j = x
        i2, j2 = y
        return ((i + i2 * pow(k, j, m)) % m, (j + j2) % n)

    return _group_from_model(elems, mul, name or f"C{m}:C{n}(k={k})")


def generalized_dihedral(base, name=None):
    """(abelian base) x| C2 with the involution inverting the base."""
    elems = [(i, j) for j in (0, 1) for i in range(base.order)]
    t, inv = base.table, base.inv

    def mul(x, y):
        i, j = x
        i2, j2 = y
        ii = i2 if j == 0 else inv[i2]
        return (t[i][ii], j ^ j2)

    return _group_from_model(elems, mul, name or f"GD({base.name})")


def pauli_group_16():
    """Central product C4 o D4: phases i^k times X^a Z^b."""
    elems = [(k, a, b) for k in range(4) for a in (0, 1) for b in (0, 1)]

    def mul(x, y):
        k, a, b = x
        k2, a2, b2 = y
        return ((k + k2 + 2 * b * a2) % 4, a ^ a2, b ^ b2)

    return _group_from_model(elems, mul, "Pauli16")


def c2c2_semidirect_c4():
    """(C2 x C2) x| C4 with the C4 generator swapping the factors."""
    elems = [(a, b, j) for j in range(4) for a in (0, 1) for b in (0, 1)]

    def mul(x, y):
        a, b, j = x
        a2, b2, j2 = y
        if j % 2:
            a2, b2 = b2, a2
        return (a ^ a2, b ^ b2, (j + j2) % 4)

    return _group_from_model(elems, mul, "(C2xC2):C4")


def sl23_group():
    """SL(2,3): 2x2 determinant-one matrices over GF(3)."""
    elems = []
    for a in range(3):
        for b in range(3):
            for c in range(3):
                for d in range(3):
                    if (a * d - b * c) % 3 == 1:
                        elems.append((a, b, c, d))

    def mul(x, y):
        a, b, c, d = x
        e, f, g, h = y
        return ((a * e + b * g) % 3, (a * f + b * h) % 3, (c * e + d * g) % 3, (c * f + d * h) % 3)

    return _group_from_model(elems, mul, "SL(2,3)")


def c3_semidirect_d4():
    """C3 x| D4 where reflections act trivially and the rotation inverts."""
    d4 = dihedral_group(4)
    rot = next(i for i in range(8) if d4.element_order(i) == 4)
    r2 = d4.table[rot][rot]
    refl = next(i for i in range(8) if d4.element_order(i) == 2 and i != r2)
    ker = d4.subgroup_closure([r2, refl])
    eps = [0 if i in ker else 1 for i in range(8)]
    elems = [(c, d) for d in range(8) for c in range(3)]

    def mul(x, y):
        c, d = x
        c2, d2 = y
        cc = c2 if eps[d] == 0 else (-c2) % 3
        return ((c + cc) % 3, d4.table[d][d2])

    return _group_from_model(elems, mul, "C3:D4")


def _catalog_pool(order, smaller):
    """Candidate constructions of a given order (duplicates welcome)."""
    out = [cyclic_group(order)]
    for da in range(2, order):
        if order % da:
            continue
        db = order // da
        if db < 2 or da > db:
            continue
        for a in smaller.get(da, []):
            for b in smaller.get(db, []):
                out.append(direct_product(a, b))
    if order % 2 == 0 and order >= 6:
        out.append(dihedral_group(order // 2))
    if order % 4 == 0 and order >= 8:
        out.append(dicyclic_group(order // 4))
    for m in range(3, order):
        if order % m:
            continue
        n = order // m
        if n < 2:
            continue
        for k in range(2, m):
            if pow(k, n, m) == 1:
                out.append(semidirect_cyclic(m, n, k))
    if order == 12:
        out.append(alternating_group(4))
    if order == 16:
        out.append(pauli_group_16())
        out.append(c2c2_semidirect_c4())
        out.append(generalized_dihedral(direct_product(cyclic_group(4), cyclic_group(2))))
    if order == 18:
        out.append(generalized_dihedral(direct_product(cyclic_group(3), cyclic_group(3))))
    if order == 24:
        out.append(symmetric_group(4))
        out.append(sl23_group())
        out.append(c3_semidirect_d4())
    return out


@dataclass
class CatalogGroup:
    gid: str
    group: FiniteGroup
    subgroups: list


_catalog_cache = {}


def small_group_catalog(max_order=16):
    """All groups of order <= max_order up to isomorphism, with subgroups.

    The construction pool is deduplicated by brute-force isomorphism and
    checked against the known class counts per order.
    """
    if max_order > 24:
        raise GroupError("catalog is limited to order 24")
    if max_order in _catalog_cache:
        return _catalog_cache[max_order]
    by_order = {}
    classes = []
    for order in range(1, max_order + 1):
        pool = _catalog_pool(order, by_order)
        reps = []
        for cand in pool:
            if cand.order != order:
                raise GroupError(f"bad construction order for {cand.name}")
            if not any(are_isomorphic(cand, r) for r in reps):
                reps.append(cand)
        expected = GROUP_COUNTS[order - 1]
        if len(reps) != expected:
            raise GroupError(
                f"catalog builds {len(reps)} classes of order {order}, expected {expected}"
            )
        reps.sort(key=lambda g: g.fingerprint())
        by_order[order] = reps
        for i, g in enumerate(reps, start=1):
            classes.append(CatalogGroup(f"{order}.{i}", g, all_subgroups(g)))
    _catalog_cache[max_order] = classes
    return classes
