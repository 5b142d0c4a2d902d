"""The decision core: exact direct-summand tests and quasibases.

``summand_of_power(M, N)`` decides whether M is isomorphic to a direct
summand of a finite power of N, as bimodules.  Two routes:

* the trace route solves ``id_M in span{f o g}`` over the hom spaces
  Hom(N, M) and Hom(M, N) (an exact linear feasibility problem; the
  solution is the certificate), and
* the support route, valid when both acting algebras have an exactly
  nondegenerate regular trace form (hence are separable and the
  enveloping algebra is semisimple): there the condition is equivalent
  to containment of central annihilators, which is tiny to compute.

Both routes agree wherever both apply; the differential tests enforce
that.  Certificates always come from the trace route.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import kernel
from .algebra import (
    Algebra,
    AlgebraError,
    AlgebraMap,
    Bimodule,
    TensorSquare,
    Tower,
    centralizer_in_bimodule,
    hom_space,
    one_sided_bimodule,
    regular_bimodule,
    regular_tower_bimodule,
    tensor_over,
    tensor_square_bimodule,
    tensor_with_op,
)
from .exactfield import (
    LinOp,
    Matrix,
    Subspace,
    dense_of,
    sparse_of,
    unit_vec,
    vec_reduce,
    zero_vec,
)


class DepthError(ValueError):
    pass


class PreconditionError(DepthError):
    pass


# ---------------------------------------------------------------------------
# span feasibility with early exit


class _SpanTracker:
    """Incremental canonical RREF over inserted sparse columns.

    Tracks whether a target vector has entered the span; keeps the
    inserted columns that grew the rank for certificate recovery.
    """

    def __init__(self, field, target):
        self.field = field
        self.p = field.p
        self.pivrows = {}
        self.tails = {}
        self.kept = []
        self.t_res = dict(target)

    def _reduce(self, sv):
        p = self.p
        sv = dict(sv)
        for c in [c for c in sv if c in self.pivrows]:
            v = sv.pop(c)
            if not v:
                continue
            for k, w in self.pivrows[c].items():
                if k == c:
                    continue
                nv = sv.get(k, 0) - v * w
                if p is not None:
                    nv %= p
                if nv:
                    sv[k] = nv
                else:
                    sv.pop(k, None)
        return {c: v for c, v in sv.items() if v}

    @property
    def target_hit(self):
        return not self.t_res

    def insert(self, key, col):
        """Insert a column; returns True when the rank grew."""
        red = self._reduce(col)
        if not red:
            return False
        c = min(red)
        inv = self.field.inv(red[c])
        p = self.p
        row = {k: (v * inv if p is None else (v * inv) % p) for k, v in red.items()}
        for pc in list(self.tails.get(c, ())):
            prow = self.pivrows[pc]
            v = prow.pop(c)
            for k2 in prow:
                if k2 != pc:
                    s = self.tails.get(k2)
                    if s is not None:
                        s.discard(pc)
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
            for k2 in prow:
                if k2 != pc:
                    self.tails.setdefault(k2, set()).add(pc)
        self.tails.pop(c, None)
        self.pivrows[c] = row
        for k in row:
            if k != c:
                self.tails.setdefault(k, set()).add(c)
        tv = self.t_res.pop(c, 0)
        if tv:
            for k, w in row.items():
                if k == c:
                    continue
                nv = self.t_res.get(k, 0) - tv * w
                if p is not None:
                    nv %= p
                if nv:
                    self.t_res[k] = nv
                else:
                    self.t_res.pop(k, None)
        self.kept.append((key, dict(col)))
        return True


# ---------------------------------------------------------------------------
# certificates


@dataclass
class SummandCertificate:
    """Maps with sum f_i o g_i = id_M, each a bimodule map."""

    fs: list  # LinOps N -> M
    gs: list  # LinOps M -> N

    @property
    def count(self):
        return len(self.fs)

    def verify(self, dim_m):
        if not self.fs:
            return dim_m == 0
        acc = LinOp.zero(self.fs[0].field, dim_m, dim_m)
        for f, g in zip(self.fs, self.gs):
            acc = acc.add(f.compose(g))
        return acc.eq(LinOp.identity(self.fs[0].field, dim_m))


@dataclass
class QuasibaseSet:
    """Witnesses of a one-sided depth-three condition.

    right: x (x) y = sum_i x gamma_i(y) u_i with gamma_i in End B-A-C
    and u_i in the C-centralizer of the tensor square.
    left:  x (x) y = sum_j t_j beta_j(x) y.
    """

    side: str
    maps: list  # LinOps A -> A (gamma_i or beta_j)
    elements: list  # sparse quotient coordinates (u_i or t_j)


# ---------------------------------------------------------------------------
# the two summand routes


def _support_gate(m):
    return (
        m.left_alg.has_nondegenerate_trace_form()
        and m.right_alg.has_nondegenerate_trace_form()
    )


class SupportCache:
    """Per-(left,right) algebra pair data reused across summand tests."""

    def __init__(self):
        self.envelope = {}
        self.ann = {}

    def annihilator(self, m, z_rows, right_dim, key=None):
        if key is not None and key in self.ann:
            return self.ann[key]
        res = _central_annihilator(m, z_rows, right_dim)
        if key is not None:
            self.ann[key] = res
        return res

    def center(self, left_alg, right_alg, left_unit=None):
        key = (id(left_alg), id(right_alg))
        if key not in self.envelope:
            lam = tensor_with_op(left_alg, right_alg)
            gens = []
            cd = right_alg.dim
            for i in left_alg.generator_indices():
                vec = zero_vec(lam.dim)
                for j, w in sparse_of(right_alg.unit).items():
                    vec[i * cd + j] = w
                gens.append(vec)
            for j in right_alg.generator_indices():
                vec = zero_vec(lam.dim)
                for i, w in sparse_of(left_alg.unit).items():
                    vec[i * cd + j] = w
                gens.append(vec)
            from .algebra import centralizer

            z = centralizer(lam, gens)
            self.envelope[key] = (lam, z)
        return self.envelope[key]


_default_cache = SupportCache()


def _central_annihilator(m, z_rows, right_dim):
    """{z in the center span : z acts as zero on M}, in center coordinates."""
    gens = m.generator_vectors()
    nz = len(z_rows)
    rows = {}
    for t, z in enumerate(z_rows):
        sz = sparse_of(list(z))
        for gi, g in enumerate(gens):
            acc = {}
            p = m.field.p
            for idx, w in sz.items():
                i, j = divmod(idx, right_dim)
                img = m.right_op(j).apply_sparse(m.left_op(i).apply_sparse(g))
                for k, v in img.items():
                    nv = acc.get(k, 0) + w * v
                    if p is not None:
                        nv %= p
                    if nv:
                        acc[k] = nv
                    else:
                        acc.pop(k, None)
            for k, v in acc.items():
                rows.setdefault((gi, k), {})[t] = v
    basis = kernel.sparse_kernel(list(rows.values()), nz, m.field.p)
    return Subspace.from_rows(m.field, nz, [dense_of(sv, nz) for sv in basis])


def _support_summand(m, n, cache, m_key=None, n_key=None):
    lam, z = cache.center(m.left_alg, m.right_alg)
    z_rows = [list(r) for r in z.rows]
    ann_m = cache.annihilator(m, z_rows, m.right_alg.dim, m_key)
    ann_n = cache.annihilator(n, z_rows, n.right_alg.dim, n_key)
    return ann_m.contains_space(ann_n)


def _trace_summand(m, n, hom_nm, hom_mn, want_certificate):
    gens = m.generator_vectors()
    mdim = m.dim

    def stack(op):
        out = {}
        for gi, g in enumerate(gens):
            img = op.apply_sparse(g)
            for k, v in img.items():
                out[gi * mdim + k] = v
        return out

    target = {}
    for gi, g in enumerate(gens):
        for k, v in g.items():
            target[gi * mdim + k] = v
    tracker = _SpanTracker(m.field, target)
    if tracker.target_hit:
        return True, SummandCertificate([], [])
    images = [[g.apply_sparse(gv) for gv in gens] for g in hom_mn]
    for i, f in enumerate(hom_nm):
        for j in range(len(hom_mn)):
            col = {}
            for gi in range(len(gens)):
                img = f.apply_sparse(images[j][gi])
                for k, v in img.items():
                    col[gi * mdim + k] = v
            tracker.insert((i, j), col)
            if tracker.target_hit:
                if want_certificate:
                    return True, _build_certificate(m, hom_nm, hom_mn, tracker, target)
                return True, None
    return False, None


def _build_certificate(m, hom_nm, hom_mn, tracker, target):
    field = m.field
    keys = [k for k, _c in tracker.kept]
    cols = [c for _k, c in tracker.kept]
    length = 1 + max(
        [max(c) for c in cols if c] + [max(target) if target else 0]
    )
    mat = Matrix.from_columns(
        field, [dense_of(c, length) for c in cols], length
    )
    sol, _ = mat.solve(dense_of(target, length))
    if sol is None:
        raise DepthError("certificate recovery failed after feasibility")
    by_i = {}
    for coef, (i, j) in zip(sol, keys):
        if not coef:
            continue
        cur = by_i.get(i)
        term = hom_mn[j].scale(coef)
        by_i[i] = term if cur is None else cur.add(term)
    fs, gs = [], []
    for i, g in sorted(by_i.items()):
        fs.append(hom_nm[i])
        gs.append(g)
    cert = SummandCertificate(fs, gs)
    if not _verify_certificate_on_gens(m, cert):
        raise DepthError("certificate verification failed")
    return cert


def _verify_certificate_on_gens(m, cert):
    gens = m.generator_vectors()
    for g in gens:
        acc = {}
        p = m.field.p
        for f, gg in zip(cert.fs, cert.gs):
            img = f.apply_sparse(gg.apply_sparse(g))
            for k, v in img.items():
                nv = acc.get(k, 0) + v
                if p is not None:
                    nv %= p
                if nv:
                    acc[k] = nv
                else:
                    acc.pop(k, None)
        if acc != {k: v for k, v in g.items() if v}:
            return False
    return True


def summand_of_power(
    m, n, method="auto", want_certificate=False, homs=None, cache=None
):
    """Is M isomorphic to a bimodule direct summand of some N^k?

    Returns ``(verdict, certificate_or_None)``.  ``homs`` may carry
    precomputed ``(hom_nm, hom_mn)`` bases; ``method`` is ``auto``,
    ``trace`` or ``support``.
    """
    if m.left_alg.dim != n.left_alg.dim or m.right_alg.dim != n.right_alg.dim:
        raise AlgebraError("summand test: algebra pair mismatch")
    if m.dim == 0:
        return True, SummandCertificate([], [])
    if n.dim == 0:
        return False, None
    if method == "auto":
        method = "support" if (_support_gate(m) and not want_certificate) else "trace"
    if method == "support":
        if not _support_gate(m):
            raise PreconditionError("support route requires separable acting algebras")
        verdict = _support_summand(m, n, cache or _default_cache)
        if verdict and want_certificate:
            method = "trace"
        else:
            return verdict, None
    if homs is None:
        hom_nm = hom_space(n, m)
        hom_mn = hom_space(m, n)
    else:
        hom_nm, hom_mn = homs
    return _trace_summand(m, n, hom_nm, hom_mn, want_certificate)


def h_equivalent(m, n, method="auto", cache=None):
    a, _ = summand_of_power(m, n, method=method, cache=cache)
    if not a:
        return False
    b, _ = summand_of_power(n, m, method=method, cache=cache)
    return b


# ---------------------------------------------------------------------------
# fast hom spaces for the depth bimodules


def tensor_centralizer_vectors(tower, over="B", wrt="C"):
    """Basis of the wrt-centralizer of A (x)_over A, as sparse vectors."""
    m = tensor_square_bimodule(tower, over, "A", "A")
    if wrt == "C":
        vecs, alg = tower.c_in_a, tower.c
    elif wrt == "B":
        vecs, alg = tower.b_in_a, tower.b
    else:
        vecs, alg = [unit_vec(tower.a.dim, i) for i in range(tower.a.dim)], tower.a
    dense = centralizer_in_bimodule(m, vecs, vecs, alg)
    return [sparse_of(v) for v in dense], m


def homs_regular_to_tensor(tower, m, side):
    """Hom(A-regular, tensor square): one map a |-> a.p (or p.a) per p.

    The identification is with the C-centralizer of the tensor square:
    for the right side M is an (A, C)-bimodule, for the left a (C, A)
    one, and the centralizing condition pins f(1).
    """
    rows = []
    for gidx in tower.c.generator_indices():
        if side == "right":
            diff = m.left_op_vec(tower.c_in_a[gidx]).sub(m.right_op(gidx))
        else:
            diff = m.left_op(gidx).sub(m.right_op_vec(tower.c_in_a[gidx]))
        for _j, col in sorted(diff.transpose_rows().items()):
            rows.append(dict(col))
    p_vecs = kernel.sparse_kernel(rows, m.dim, m.field.p)
    n_dim = tower.a.dim
    ops = []
    for p in p_vecs:
        cols = {}
        for a in range(n_dim):
            img = (
                m.left_op(a).apply_sparse(p)
                if side == "right"
                else m.right_op(a).apply_sparse(p)
            )
            if img:
                cols[a] = img
        ops.append(LinOp(m.field, m.dim, n_dim, cols))
    return ops, p_vecs


def intertwiner_space(tower, left_level, right_level):
    """End of A as a (left_level, right_level)-bimodule, e.g. End B-A-C."""
    reg = regular_tower_bimodule(tower, left_level, right_level)
    return hom_space(reg, reg)


def homs_tensor_to_regular(tower, m, side):
    """Hom(tensor square, A-regular) from the one-sided endo space."""
    ts = m.tensor
    n = tower.a.dim
    if side == "right":
        alphas = intertwiner_space(tower, "B", "C")
    else:
        alphas = intertwiner_space(tower, "C", "B")
    ops = []
    for alpha in alphas:
        cols = {}
        for qi, c in enumerate(ts.quotient.section_cols):
            a, b = divmod(c, n)
            if side == "right":
                img = tower.a.mul_sparse({a: 1}, alpha.apply_sparse({b: 1}))
            else:
                img = tower.a.mul_sparse(alpha.apply_sparse({a: 1}), {b: 1})
            if img:
                cols[qi] = img
        ops.append(LinOp(m.field, n, m.dim, cols))
    return ops, alphas


# ---------------------------------------------------------------------------
# depth verdicts


def _pair_tower_ab(tower):
    cached = getattr(tower, "_pair_ab", None)
    if cached is None:
        cached = Tower(
            tower.a, tower.b, tower.b,
            AlgebraMap.identity(tower.b), tower.emb_ba,
            name=f"{tower.name}|AB", check=False,
        )
        tower._pair_ab = cached
    return cached


def _pair_tower_ac(tower):
    cached = getattr(tower, "_pair_ac", None)
    if cached is None:
        cached = Tower(
            tower.a, tower.c, tower.c,
            AlgebraMap.identity(tower.c), tower.emb_ca,
            name=f"{tower.name}|AC", check=False,
        )
        tower._pair_ac = cached
    return cached


def depth_bimodules(tower, side="right"):
    """(M, N) for the one-sided depth-three test on a tower."""
    if side == "right":
        m = tensor_square_bimodule(tower, "B", "A", "C")
        n = regular_tower_bimodule(tower, "A", "C")
    else:
        m = tensor_square_bimodule(tower, "B", "C", "A")
        n = regular_tower_bimodule(tower, "C", "A")
    return m, n


def _emb_key(vectors):
    return tuple(tuple(sorted(sparse_of(v).items())) for v in vectors)


def _depth_verdict(tower, side, method, want_certificate, cache):
    m, n = depth_bimodules(tower, side)
    if method in ("auto", "support") and not want_certificate and _support_gate(m):
        n_key = (
            "regular", side, id(tower.a), id(tower.c), _emb_key(tower.c_in_a)
        )
        verdict = _support_summand(m, n, cache or _default_cache, n_key=n_key)
        return verdict, None
    hom_nm, _p = homs_regular_to_tensor(tower, m, side)
    hom_mn, _a = homs_tensor_to_regular(tower, m, side)
    return summand_of_power(
        m, n, method="trace", want_certificate=want_certificate,
        homs=(hom_nm, hom_mn),
    )


def is_rD3(tower, method="auto", cache=None):
    v, _ = _depth_verdict(tower, "right", method, False, cache)
    return v


def is_lD3(tower, method="auto", cache=None):
    v, _ = _depth_verdict(tower, "left", method, False, cache)
    return v


def is_D3(tower, method="auto", cache=None):
    return is_rD3(tower, method, cache) and is_lD3(tower, method, cache)


def is_rD2(tower, method="auto", cache=None):
    """Right depth two of the extension A | B (ignores C)."""
    return is_rD3(_pair_tower_ab(tower), method, cache)


def is_lD2(tower, method="auto", cache=None):
    return is_lD3(_pair_tower_ab(tower), method, cache)


def is_rD2_composite(tower, method="auto", cache=None):
    """Right depth two of the composite extension A | C."""
    return is_rD3(_pair_tower_ac(tower), method, cache)


def is_lD2_composite(tower, method="auto", cache=None):
    return is_lD3(_pair_tower_ac(tower), method, cache)


# ---------------------------------------------------------------------------
# quasibases


def extract_quasibases(tower, side="right", cache=None):
    """Quasibases from a trace-route certificate, verified before return."""
    m, n = depth_bimodules(tower, side)
    hom_nm, _p = homs_regular_to_tensor(tower, m, side)
    hom_mn, _a = homs_tensor_to_regular(tower, m, side)
    verdict, cert = summand_of_power(
        m, n, method="trace", want_certificate=True, homs=(hom_nm, hom_mn)
    )
    if not verdict:
        raise PreconditionError(f"tower is not {side} depth three")
    a = tower.a
    ts = m.tensor
    unit = sparse_of(a.unit)
    elements = []
    maps = []
    for f, g in zip(cert.fs, cert.gs):
        elements.append(f.apply_sparse(unit))
        cols = {}
        for bidx in range(a.dim):
            if side == "right":
                q = ts.pair_sparse(unit, {bidx: 1})
            else:
                q = ts.pair_sparse({bidx: 1}, unit)
            img = g.apply_sparse(q)
            if img:
                cols[bidx] = img
        maps.append(LinOp(a.field, a.dim, a.dim, cols))
    qb = QuasibaseSet(side, maps, elements)
    ok, reason = verify_quasibases(tower, qb)
    if not ok:
        raise DepthError(f"extracted quasibases fail verification: {reason}")
    return qb


def verify_quasibases(tower, qb):
    """Membership and the defining identity, exactly, on all basis pairs."""
    a = tower.a
    ts = tensor_over(tower, "B")
    m = tensor_square_bimodule(tower, "B", "A", "A")
    p_vecs, _m2 = tensor_centralizer_vectors(tower, "B", "C")
    p_span = Subspace.from_rows(
        a.field, ts.dim, [dense_of(sv, ts.dim) for sv in p_vecs]
    )
    for u in qb.elements:
        if not p_span.contains(dense_of(u, ts.dim)):
            return False, "element outside the C-centralizer of the tensor square"
    side = qb.side
    if side == "right":
        endos = intertwiner_space(tower, "B", "C")
    else:
        endos = intertwiner_space(tower, "C", "B")
    e_span = Subspace.from_rows(
        a.field,
        a.dim * a.dim,
        [dense_of(op.vectorize(), a.dim * a.dim) for op in endos],
    )
    for op in qb.maps:
        if not e_span.contains(dense_of(op.vectorize(), a.dim * a.dim)):
            return False, "map outside the required intertwiner space"
    p = a.field.p
    for x in range(a.dim):
        for y in range(a.dim):
            want = ts.pair_sparse({x: 1}, {y: 1})
            acc = {}
            for op, u in zip(qb.maps, qb.elements):
                if side == "right":
                    coeff = a.mul_sparse({x: 1}, op.apply_sparse({y: 1}))
                    act = m.left_op
                else:
                    coeff = a.mul_sparse(op.apply_sparse({x: 1}), {y: 1})
                    act = m.right_op
                for idx, cv in coeff.items():
                    img = act(idx).apply_sparse(u)
                    for k, v in img.items():
                        nv = acc.get(k, 0) + cv * v
                        if p is not None:
                            nv %= p
                        if nv:
                            acc[k] = nv
                        else:
                            acc.pop(k, None)
            if acc != want:
                return False, f"identity fails at basis pair ({x},{y})"
    return True, "ok"


# ---------------------------------------------------------------------------
# endomorphism ring machinery


def right_module_endos(alg, sub_vecs, sub_alg):
    """Basis of End of alg as a right module over a subalgebra image."""
    m = one_sided_bimodule(alg, "right", emb_vecs=sub_vecs, acting=sub_alg)
    return hom_space(m, m)


def is_finite_projective_right(alg, sub_vecs, sub_alg, method="auto", cache=None):
    """alg_B | B_B^k: finite projectivity of the right module."""
    m = one_sided_bimodule(alg, "right", emb_vecs=sub_vecs, acting=sub_alg)
    n = one_sided_bimodule(sub_alg, "right", acting=sub_alg)
    v, _ = summand_of_power(m, n, method=method, cache=cache)
    return v


def is_finite_projective_left(alg, sub_vecs, sub_alg, method="auto", cache=None):
    m = one_sided_bimodule(alg, "left", emb_vecs=sub_vecs, acting=sub_alg)
    n = one_sided_bimodule(sub_alg, "left", acting=sub_alg)
    v, _ = summand_of_power(m, n, method=method, cache=cache)
    return v


def endo_bimodule_over_tower(tower):
    """End A_B as an (A, C)-bimodule: a.f.c = lambda_a o f o lambda_c."""
    a = tower.a
    endos = right_module_endos(a, tower.b_in_a, tower.b)
    e_dim = len(endos)
    amb = a.dim * a.dim
    span = Subspace.from_rows(
        a.field, amb, [dense_of(op.vectorize(), amb) for op in endos]
    )

    def coords_of(op):
        c = span.coordinates(dense_of(op.vectorize(), amb))
        if c is None:
            raise DepthError("endomorphism outside its own basis span")
        return c

    def left_provider(i):
        lam = a.lmul_basis(i)
        cols = {}
        for k, op in enumerate(endos):
            img = coords_of(lam.compose(op))
            sv = sparse_of(img)
            if sv:
                cols[k] = sv
        return LinOp(a.field, e_dim, e_dim, cols)

    def right_provider(i):
        lam = a.lmul(tower.c_in_a[i])
        cols = {}
        for k, op in enumerate(endos):
            img = coords_of(op.compose(lam))
            sv = sparse_of(img)
            if sv:
                cols[k] = sv
        return LinOp(a.field, e_dim, e_dim, cols)

    return (
        Bimodule(
            a.field, e_dim, a, tower.c, left_provider, right_provider,
            name="End A_B as A-C",
        ),
        endos,
    )


def is_lD3_via_endo(tower, method="auto", cache=None):
    """Second decision route through End A_B; must agree with is_lD3."""
    if not is_finite_projective_right(
        tower.a, tower.b_in_a, tower.b, method=method, cache=cache
    ):
        raise PreconditionError("A is not finite projective as a right B-module")
    m, _endos = endo_bimodule_over_tower(tower)
    n = regular_tower_bimodule(tower, "A", "C")
    v, _ = summand_of_power(m, n, method=method, cache=cache)
    return v


@dataclass
class EndomorphismTower:
    """C -> B -> End B_C, with the tensor-square identification recorded."""

    tower: Tower
    endo_basis: list  # LinOps on B
    tensor_iso: Matrix  # B (x)_C B -> End B_C coordinates


def endomorphism_tower(b, c, emb_cb, frob):
    """Build A = End B_C as a structure-constant algebra and the tower on it.

    The left-regular map lambda embeds B; the recorded isomorphism sends
    x (x) y to lambda_x o E o lambda_y.
    """
    field = b.field
    c_in_b = [emb_cb.apply(unit_vec(c.dim, i)) for i in range(c.dim)]
    endos = right_module_endos(b, c_in_b, c)
    e_dim = len(endos)
    amb = b.dim * b.dim
    span = Subspace.from_rows(field, amb, [dense_of(op.vectorize(), amb) for op in endos])

    def coords_of(op):
        cc = span.coordinates(dense_of(op.vectorize(), amb))
        if cc is None:
            raise DepthError("composition leaves the endomorphism space")
        return cc

    table = []
    for i in range(e_dim):
        row = []
        for j in range(e_dim):
            cc = coords_of(endos[i].compose(endos[j]))
            row.append([(k, v) for k, v in enumerate(cc) if v])
        table.append(row)
    unit = coords_of(LinOp.identity(field, b.dim))
    a = Algebra(field, table, unit, name=f"End {b.name}_{c.name}", check=True)
    lam_images = [coords_of(b.lmul_basis(i)) for i in range(b.dim)]
    emb_ba = AlgebraMap(b, a, lam_images, "lambda", check=True)
    tower = Tower(a, b, c, emb_cb, emb_ba, name=f"End tower over {b.name}|{c.name}")
    # identification B (x)_C B -> A via x (x) y |-> lambda_x o E o lambda_y
    e_cols = {}
    for j in range(b.dim):
        sv = sparse_of(_c_image(b, c_in_b, frob, j))
        if sv:
            e_cols[j] = sv
    e_op = LinOp(field, b.dim, b.dim, e_cols)
    ts = TensorSquare(b, [c_in_b[g] for g in c.generator_indices()], name="Bx_CB")
    cols = []
    for qi, pos in enumerate(ts.quotient.section_cols):
        x, y = divmod(pos, b.dim)
        op = b.lmul_basis(x).compose(e_op).compose(b.lmul_basis(y))
        cols.append(coords_of(op))
    iso = Matrix.from_columns(field, cols, e_dim)
    if iso.rank() != e_dim or ts.dim != e_dim:
        raise DepthError("tensor square is not isomorphic to the endomorphism ring")
    return EndomorphismTower(tower, endos, iso)


def _c_image(b, c_in_b, frob, j):
    out = zero_vec(b.dim)
    for k, w in sparse_of(frob.e_images[j]).items():
        for t, v in sparse_of(c_in_b[k]).items():
            out[t] += w * v
    return vec_reduce(out, b.field)


# ---------------------------------------------------------------------------
# separability gates


def is_separable_extension(tower):
    """B separable over C: a separability element exists."""
    from .algebra import separability_element

    gens = tower.c.generator_indices()
    return separability_element(tower.b, tower.c_in_b, gens) is not None


def is_h_separable_extension(b, c_in_b_vecs, c_alg, method="auto", cache=None):
    """B (x)_C B a B-B-bimodule summand of a power of B."""
    ts = TensorSquare(b, [c_in_b_vecs[g] for g in c_alg.generator_indices()])

    def lp(i):
        return ts.left_basis_op(i)

    def rp(i):
        return ts.right_basis_op(i)

    m = Bimodule(b.field, ts.dim, b, b, lp, rp, name="Bx_CB", tensor=ts)
    n = regular_bimodule(b, name="B")
    v, _ = summand_of_power(m, n, method=method, cache=cache)
    return v
