"""Group towers made executable: double-coset quasibases and the census.

For a chain G > H > K with the normal closure of K inside H, the
double-coset construction produces explicit depth-three quasibases:
projections onto the H-K double-coset spans paired with the images of
``rep^-1 (x) rep`` in the tensor square.  The census sweeps every chain
from the catalog (deduplicated up to simultaneous conjugacy), decides
depth three with the group-blind engine, and cross-checks the two
routes; a chain where the criterion holds but the engine says no is a
theorem violation and aborts the run.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field as dc_field

from .algebra import Algebra, AlgebraMap, Tower, group_algebra, tensor_over
from .depth import QuasibaseSet, SupportCache, is_lD3, is_rD3, verify_quasibases
from .exactfield import LinOp, field_name, unit_vec
from .groups import (
    conjugacy_key,
    d3_group_criterion,
    double_cosets,
    small_group_catalog,
    subgroup_chain,
)


class TheoremViolation(RuntimeError):
    """An engine verdict contradicts a proved implication: always a bug."""


def double_coset_quasibases(tower, chain, side="right"):
    """Constructive quasibases for a chain with K^G inside H.

    right: gamma_i kills everything outside the i-th H-K double coset
    and u_i is the image of rep_i^-1 (x) rep_i; the left version mirrors
    this through inverses with K-H double cosets.
    """
    if not d3_group_criterion(chain):
        raise ValueError("the normal closure of K is not contained in H")
    g = chain.group
    ts = tensor_over(tower, "B")
    maps = []
    elements = []
    if side == "right":
        classes = double_cosets(g, chain.h, chain.k)
    else:
        classes = double_cosets(g, chain.k, chain.h)
    for rep, members in classes:
        cols = {x: {x: 1} for x in members}
        maps.append(LinOp(tower.a.field, g.order, g.order, cols))
        inv = g.inverse(rep)
        if side == "right":
            elements.append(ts.pair_sparse({inv: 1}, {rep: 1}))
        else:
            elements.append(ts.pair_sparse({rep: 1}, {inv: 1}))
    return QuasibaseSet(side, maps, elements)


@dataclass
class CensusRecord:
    group_id: str
    group_order: int
    h_gens: list
    k_gens: list
    criterion: bool
    rd3: bool
    ld3: bool
    d3: bool
    field: str
    modular: bool
    quasibases_verified: bool | None
    wall_ms: int

    def to_json(self, include_timings=False):
        out = {
            "group": self.group_id,
            "order": self.group_order,
            "h_gens": self.h_gens,
            "k_gens": self.k_gens,
            "criterion": self.criterion,
            "rd3": self.rd3,
            "ld3": self.ld3,
            "d3": self.d3,
            "field": self.field,
            "modular": self.modular,
            "quasibases_verified": self.quasibases_verified,
        }
        if include_timings:
            out["wall_ms"] = self.wall_ms
        return out


def _subgroup_generators(group, elems):
    gens = []
    closed = {0}
    for x in sorted(elems):
        if x not in closed:
            gens.append(x)
            closed = group.subgroup_closure(gens)
    return gens


def _sub_algebra(group, elems, fieldobj, label):
    elems = list(elems)
    table = [
        [[(elems.index(group.table[elems[i]][elems[j]]), 1)] for j in range(len(elems))]
        for i in range(len(elems))
    ]
    alg = Algebra(
        fieldobj, table, unit_vec(len(elems), elems.index(0)),
        labels=[group.labels[x] for x in elems], name=label, check=False,
    )
    gen_elems = _subgroup_generators(group, elems)
    alg._gens = [elems.index(x) for x in gen_elems]
    return alg


def build_group_tower(group, hset, kset, fieldobj, algcache=None):
    """Group-algebra tower with shared algebra objects for cache reuse."""
    algcache = algcache if algcache is not None else {}
    akey = ("A", id(group), field_name(fieldobj))
    if akey not in algcache:
        a = group_algebra(group, fieldobj)
        a._gens = list(group.generator_indices())
        algcache[akey] = a
    a = algcache[akey]
    hkey = ("S", id(group), tuple(sorted(hset)), field_name(fieldobj))
    if hkey not in algcache:
        algcache[hkey] = _sub_algebra(group, sorted(hset), fieldobj, "B")
    b = algcache[hkey]
    kkey = ("S", id(group), tuple(sorted(kset)), field_name(fieldobj))
    if kkey not in algcache:
        algcache[kkey] = _sub_algebra(group, sorted(kset), fieldobj, "C")
    c = algcache[kkey]
    hl, kl = sorted(hset), sorted(kset)
    emb_ba = AlgebraMap(b, a, [unit_vec(group.order, x) for x in hl], "B->A", check=False)
    emb_cb = AlgebraMap(
        c, b, [unit_vec(len(hl), hl.index(x)) for x in kl], "C->B", check=False
    )
    return Tower(a, b, c, emb_cb, emb_ba, name=f"{group.name}", check=False)


@dataclass
class CensusResult:
    records: list
    summary: dict
    violations: list = dc_field(default_factory=list)

    def to_json(self, include_timings=False):
        return {
            "records": [r.to_json(include_timings) for r in self.records],
            "summary": self.summary,
        }


def census(
    max_order=16,
    fieldobj=None,
    include_modular=False,
    verify=True,
    progress=None,
):
    """Sweep all chains (G, H, K) with |G| <= max_order.

    Chains are deduplicated up to simultaneous conjugacy of (H, K).
    With ``verify`` on, double-coset quasibases of every criterion-true
    chain are constructed and checked exactly, on both sides.
    """
    from .exactfield import QQ

    fieldobj = fieldobj or QQ
    records = []
    violations = []
    candidates = []
    skipped_modular = 0
    cache = SupportCache()
    algcache = {}
    for cat in small_group_catalog(max_order):
        g = cat.group
        modular = fieldobj.p is not None and g.order % fieldobj.p == 0
        if modular and not include_modular:
            skipped_modular += sum(
                1 for h in cat.subgroups for k in cat.subgroups if k <= h
            )
            continue
        seen = set()
        for h in cat.subgroups:
            for k in cat.subgroups:
                if not k <= h:
                    continue
                key = conjugacy_key(g, h, k)
                if key in seen:
                    continue
                seen.add(key)
                t0 = time.perf_counter()
                chain = subgroup_chain(g, h, k)
                tower = build_group_tower(g, chain.h, chain.k, fieldobj, algcache)
                crit = d3_group_criterion(chain)
                method = "auto" if not modular else "trace"
                rd3 = is_rD3(tower, method=method, cache=cache)
                ld3 = is_lD3(tower, method=method, cache=cache)
                d3 = rd3 and ld3
                qver = None
                if crit and verify:
                    qver = True
                    for side in ("right", "left"):
                        qb = double_coset_quasibases(tower, chain, side)
                        ok, reason = verify_quasibases(tower, qb)
                        if not ok:
                            qver = False
                            violations.append(
                                f"{cat.gid}: double-coset quasibases fail ({side}): {reason}"
                            )
                wall = int((time.perf_counter() - t0) * 1000)
                rec = CensusRecord(
                    group_id=cat.gid,
                    group_order=g.order,
                    h_gens=[g.labels[x] for x in _subgroup_generators(g, h)],
                    k_gens=[g.labels[x] for x in _subgroup_generators(g, k)],
                    criterion=crit,
                    rd3=rd3,
                    ld3=ld3,
                    d3=d3,
                    field=field_name(fieldobj),
                    modular=modular,
                    quasibases_verified=qver,
                    wall_ms=wall,
                )
                records.append(rec)
                if crit and not d3:
                    violations.append(
                        f"{cat.gid}: criterion holds but engine says not D3 "
                        f"(H gens {rec.h_gens}, K gens {rec.k_gens})"
                    )
                if d3 and not crit:
                    candidates.append(rec.to_json())
                if progress:
                    progress(rec)
    summary = {
        "max_order": max_order,
        "field": field_name(fieldobj),
        "towers": len(records),
        "criterion_true": sum(1 for r in records if r.criterion),
        "d3_true": sum(1 for r in records if r.d3),
        "violations": violations,
        "counterexample_candidates": candidates,
        "candidate_note": (
            "candidates are field-relative evidence only; a verdict over "
            f"{field_name(fieldobj)} does not decide the question over the complex numbers"
        ),
        "skipped_modular_towers": skipped_modular,
    }
    return CensusResult(records, summary, violations)
