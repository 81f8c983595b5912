"""Total-excess minimization engines for spanning trees and m-tree-connected
spanning subgraphs, with certificate extraction.

The engines mirror the structural recipe behind the construction theorems:
keep a minimally m-tree-connected candidate (a spanning tree when m = 1),
drive its total excess down by component-local exchanges, and grow a cascade
of vertex sets whose fixed point S satisfies, machine-verified,

  1. the component measure of G and of the candidate agree after cutting S,
  2. S contains every vertex over its degree target,
  3. every vertex of S is at or over its degree target.

A verified fixed point with positive excess yields a certificate set whose
inequality is re-checked in exact arithmetic.  Relief searches may be
incomplete; that can only enlarge S, trigger extra correction rounds, or end
in an explicit "inconclusive", never a wrong branch.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .graph import (
    Multigraph,
    SpanningSubgraph,
    _DSU,
    components,
    induced_subgraph,
)
from .hypotheses import hypothesis_sides
from .packing import (
    DeficientPartition,
    TreePacking,
    exchange_edge,
    m_components,
    m_critical_reduce,
    omega_m,
    pack_trees,
)

RELIEF_DEPTH = 3
EXHAUSTIVE_VERTEX_CAP = 12
EXHAUSTIVE_NODE_BUDGET = 200_000
CORRECTION_BUDGET = 150


def _ceil_fr(x: Fraction) -> int:
    x = Fraction(x)
    return -((-x.numerator) // x.denominator)


@dataclass(frozen=True)
class DegreeSpec:
    """Per-vertex real degree targets on a constrained set X = eta.keys(),
    a density discount lam, the tree multiplicity m, and an optional forced
    spanning subgraph (edge ids of the host)."""

    eta: dict[int, Fraction]
    lam: Fraction
    m: int = 1
    forest: frozenset[int] | None = None
    distinguished: int | None = None

    def validate(self) -> None:
        if self.m < 1:
            raise ValueError("m must be >= 1")
        lam = Fraction(self.lam)
        if not (0 <= lam <= Fraction(1, self.m)):
            raise ValueError("lam must lie in [0, 1/m]")
        floor = self.m * lam + Fraction(self.m - 1, self.m)
        for v, val in self.eta.items():
            if not Fraction(val) > floor:
                raise ValueError(
                    f"eta({v}) = {val} must exceed m*lam + (m-1)/m = {floor}"
                )


@dataclass(frozen=True)
class ExcessTarget:
    """Integer degree targets h on V, derived from a DegreeSpec."""

    values: tuple[int, ...]

    def __getitem__(self, v: int) -> int:
        return self.values[v]

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Certificate:
    """A vertex set S whose evaluated inequality violates a theorem
    hypothesis; relation is the established comparison of lhs vs rhs."""

    family: str
    S: tuple[int, ...]
    lhs: Fraction
    rhs: Fraction
    relation: str  # ">=" against a strict hypothesis, ">" against a non-strict one

    def to_jsonable(self):
        return {
            "status": "certificate",
            "family": self.family,
            "S": list(self.S),
            "lhs": str(self.lhs),
            "rhs": str(self.rhs),
            "relation": self.relation,
        }


@dataclass(frozen=True)
class Inconclusive:
    reason: str

    def to_jsonable(self):
        return {"status": "inconclusive", "reason": self.reason}


def total_excess(H: SpanningSubgraph, h: Sequence[int] | ExcessTarget) -> int:
    """te(H, h) = sum over v of max(0, d_H(v) - h(v))."""
    degs = H.degrees()
    return sum(max(0, degs[v] - h[v]) for v in range(H.host.n))


def make_certificate(
    g: Multigraph, family: str, params: dict, S: Iterable[int]
) -> Certificate:
    """Evaluate the family's sides at S and assert the hypothesis is violated."""
    S = tuple(sorted(set(S)))
    lhs, rhs, strict = hypothesis_sides(g, family, params, S)
    ok = lhs >= rhs if strict else lhs > rhs
    if not ok:
        raise AssertionError(
            f"certificate S={S} does not violate {family}: {lhs} vs {rhs}"
        )
    return Certificate(family, S, lhs, rhs, ">=" if strict else ">")


# ---------------------------------------------------------------------------
# relief search: rearrange the candidate inside one component's zone
# ---------------------------------------------------------------------------


class _Budget:
    __slots__ = ("left",)

    def __init__(self, n: int):
        self.left = n

    def spend(self, k: int = 1) -> bool:
        self.left -= k
        return self.left >= 0


class _ReliefProblem:
    """Zone-local search state shared by the swap descent and the exhaustive
    fallback.  local_sets are vertex sets whose induced candidate subgraph
    must stay m-tree-connected through every rearrangement (for m = 1 the
    whole graph only: the candidate must stay a spanning tree)."""

    def __init__(self, g, m, H, forced, zone, local_sets, caps_eff, v, target):
        self.g = g
        self.m = m
        self.forced = forced
        self.zone = frozenset(zone)
        self.local_sets = [frozenset(t) for t in local_sets]
        self.caps = caps_eff
        self.v = v
        self.target = target
        self.Z = sorted(
            eid
            for eid, (a, b) in enumerate(g.edges)
            if a in self.zone and b in self.zone
        )
        self.Zset = frozenset(self.Z)
        self.A0 = frozenset(e for e in self.Z if e in H)
        self.outside = frozenset(H) - self.A0

    def degrees(self, A: frozenset[int]) -> list[int]:
        deg = [0] * self.g.n
        for e in self.outside | A:
            a, b = self.g.edges[e]
            deg[a] += 1
            deg[b] += 1
        return deg

    def assemble(self, A: frozenset[int]) -> frozenset[int]:
        return self.outside | A


def _mtc_component_index(g: Multigraph, m: int, edge_ids: Iterable[int]) -> list[int]:
    """m-tree-connected component index of the spanning subgraph (V, edges)."""
    sub = Multigraph(g.n, [g.edges[e] for e in sorted(edge_ids)])
    if m == 1:
        idx = [0] * g.n
        for i, comp in enumerate(components(sub)):
            for v in comp:
                idx[v] = i
        return idx
    return m_components(sub, m).component_index()


def _local_component_tables(prob: _ReliefProblem, H: frozenset[int], a: int):
    """For removal candidate a: per local target T, the m-tree-connected
    component index of H[T] - a.  An insertion b is valid iff it crosses all
    of them (base-exchange test on minimally tree-connected graphs)."""
    g = prob.g
    tables = []
    for T in prob.local_sets:
        ids = sorted(
            e for e in H
            if e != a and g.edges[e][0] in T and g.edges[e][1] in T
        )
        sub, old_v, _ = induced_subgraph(g, T)
        back = {w: i for i, w in enumerate(old_v)}
        local = Multigraph(
            len(old_v), [(back[g.edges[e][0]], back[g.edges[e][1]]) for e in ids]
        )
        idx = _mtc_component_index(local, prob.m, range(local.num_edges))
        tables.append((back, idx))
    return tables


def _insert_crosses(prob: _ReliefProblem, tables, b: int) -> bool:
    bu, bv = prob.g.edges[b]
    for back, idx in tables:
        if bu not in back or bv not in back:
            return False
        if idx[back[bu]] == idx[back[bv]]:
            return False
    return True


def _relief_descent(
    prob: _ReliefProblem, depth: int, budget: _Budget
) -> frozenset[int] | None:
    """Bounded-depth exchange search lowering prob.v's degree to the target;
    recursion unblocks capacity at endpoints sitting on their cap.  Returns
    a zone edge set A or None."""
    g = prob.g

    def attempt(A, deg, goal_v, goal, depth_left):
        if deg[goal_v] <= goal:
            return A
        if budget.left <= 0:
            return None
        H = prob.assemble(A)
        removable = sorted(
            e for e in A - prob.forced if goal_v in g.edges[e]
        )
        blocked = []
        for a in removable:
            if not budget.spend():
                return None
            tables = _local_component_tables(prob, H, a)
            au, av = g.edges[a]
            for b in sorted(prob.Zset - A):
                if not budget.spend():
                    return None
                bu, bv = g.edges[b]
                if goal_v in (bu, bv):
                    continue
                if not _insert_crosses(prob, tables, b):
                    continue
                over = [
                    w
                    for w in {bu, bv}
                    if deg[w] + 1 - (1 if w in (au, av) else 0) > prob.caps[w]
                ]
                if over:
                    blocked.append((a, b, min(over)))
                    continue
                deg2 = list(deg)
                for w in (au, av):
                    deg2[w] -= 1
                for w in (bu, bv):
                    deg2[w] += 1
                res = attempt((A - {a}) | {b}, deg2, goal_v, goal, depth_left)
                if res is not None:
                    return res
        if depth_left <= 0:
            return None
        tried = set()
        for a, b, p in blocked:
            if p in tried:
                continue
            tried.add(p)
            freed = attempt(A, deg, p, deg[p] - 1, depth_left - 1)
            if freed is not None and freed != A:
                res = attempt(
                    freed, prob.degrees(freed), goal_v, goal, depth_left - 1
                )
                if res is not None:
                    return res
        return None

    return attempt(prob.A0, prob.degrees(prob.A0), prob.v, prob.target, depth)


class _BudgetExhausted(Exception):
    pass


def _relief_exhaustive_tree(prob: _ReliefProblem, budget: _Budget):
    """Complete search for m = 1: a degree-capped spanning tree of the zone
    contracted by the outside forest.  Returns a zone edge set, None
    (definitely none) or "unknown" on budget exhaustion."""
    g = prob.g
    dsu_out = _DSU(g.n)
    for e in sorted(prob.outside):
        a, b = g.edges[e]
        dsu_out.union(a, b)
    cls = [dsu_out.find(v) for v in range(g.n)]
    classes = sorted({cls[v] for v in range(g.n)})
    cid = {c: i for i, c in enumerate(classes)}
    need = len(classes) - 1

    limit = list(prob.caps)
    limit[prob.v] = prob.target
    deg = prob.degrees(frozenset())
    cand = [e for e in prob.Z if cls[g.edges[e][0]] != cls[g.edges[e][1]]]
    forced_here = [e for e in cand if e in prob.forced]
    free = [e for e in cand if e not in prob.forced]

    dsu = _DSU(len(classes))
    chosen: list[int] = []
    count = 0
    for e in forced_here:
        a, b = g.edges[e]
        deg[a] += 1
        deg[b] += 1
        ok = dsu.union(cid[cls[a]], cid[cls[b]])
        assert ok, "forced edges must stay acyclic against the outside forest"
        chosen.append(e)
        count += 1
    if any(deg[w] > limit[w] for w in prob.zone):
        return None

    def connectable(idx: int) -> bool:
        probe = _DSU(len(classes))
        for c in chosen:
            a, b = g.edges[c]
            probe.union(cid[cls[a]], cid[cls[b]])
        for e in free[idx:]:
            a, b = g.edges[e]
            probe.union(cid[cls[a]], cid[cls[b]])
        root = probe.find(0)
        return all(probe.find(i) == root for i in range(len(classes)))

    def backtrack(idx: int, count: int):
        if not budget.spend():
            raise _BudgetExhausted
        if count == need:
            return frozenset(chosen)
        if idx >= len(free) or not connectable(idx):
            return None
        e = free[idx]
        a, b = g.edges[e]
        ca, cb = cid[cls[a]], cid[cls[b]]
        if dsu.find(ca) != dsu.find(cb) and deg[a] < limit[a] and deg[b] < limit[b]:
            snap = (dsu.parent[:], dsu.rank[:])
            dsu.union(ca, cb)
            deg[a] += 1
            deg[b] += 1
            chosen.append(e)
            res = backtrack(idx + 1, count + 1)
            if res is not None:
                return res
            chosen.pop()
            deg[a] -= 1
            deg[b] -= 1
            dsu.parent, dsu.rank = snap
        return backtrack(idx + 1, count)

    try:
        return backtrack(0, count)
    except _BudgetExhausted:
        return "unknown"


def _relief_exhaustive_m(prob: _ReliefProblem, budget: _Budget):
    """Complete search for m >= 2: choose |A0| zone edges keeping every local
    target m-tree-connected, under degree caps."""
    g, m = prob.g, prob.m
    size = len(prob.A0)
    forced_here = [e for e in prob.Z if e in prob.forced]
    free = [e for e in prob.Z if e not in prob.forced]
    limit = list(prob.caps)
    limit[prob.v] = prob.target
    deg = prob.degrees(frozenset())
    chosen = list(forced_here)
    for e in forced_here:
        a, b = g.edges[e]
        deg[a] += 1
        deg[b] += 1
    if any(deg[w] > limit[w] for w in prob.zone):
        return None

    local_snapshots = []
    for T in prob.local_sets:
        sub, old_v, _ = induced_subgraph(g, T)
        back = {w: i for i, w in enumerate(old_v)}
        local_snapshots.append((T, back, len(old_v)))

    def feasible_leaf(A: frozenset[int]) -> bool:
        H = prob.assemble(A)
        for T, back, nn in local_snapshots:
            ids = sorted(
                e for e in H if g.edges[e][0] in T and g.edges[e][1] in T
            )
            local = Multigraph(nn, [(back[g.edges[e][0]], back[g.edges[e][1]]) for e in ids])
            if not isinstance(pack_trees(local, m), TreePacking):
                return False
        return True

    def backtrack(idx: int, count: int):
        if not budget.spend():
            raise _BudgetExhausted
        if count == size:
            A = frozenset(chosen)
            return A if feasible_leaf(A) else None
        if idx >= len(free) or count + (len(free) - idx) < size:
            return None
        e = free[idx]
        a, b = g.edges[e]
        if deg[a] < limit[a] and deg[b] < limit[b]:
            deg[a] += 1
            deg[b] += 1
            chosen.append(e)
            res = backtrack(idx + 1, count + 1)
            if res is not None:
                return res
            chosen.pop()
            deg[a] -= 1
            deg[b] -= 1
        # skip branch; prune if a zone vertex can no longer reach degree m
        for w in prob.zone:
            if deg[w] >= m:
                continue
            avail = sum(1 for f in free[idx + 1:] if w in g.edges[f])
            if deg[w] + avail < m:
                return None
        return backtrack(idx + 1, count)

    try:
        return backtrack(0, len(forced_here))
    except _BudgetExhausted:
        return "unknown"


# ---------------------------------------------------------------------------
# cascade engines
# ---------------------------------------------------------------------------


class _EngineInconclusive(Exception):
    def __init__(self, reason: str):
        self.reason = reason


class _CascadeEngine:
    """Shared machinery: fixed-vertex levels, relief memberships, claim
    violations, improvement and correction moves."""

    minimize_components = False

    def __init__(self, g: Multigraph, m: int, h: Sequence[int],
                 forced: frozenset[int], *,
                 relief_depth: int = RELIEF_DEPTH,
                 exhaustive_cap: int = EXHAUSTIVE_VERTEX_CAP):
        self.g = g
        self.m = m
        self.h = list(h)
        self.forced = forced
        self.relief_depth = relief_depth
        self.exhaustive_cap = exhaustive_cap
        fdeg = SpanningSubgraph(g, forced).degrees()
        self.caps = [self.h[v] + fdeg[v] for v in range(g.n)]
        self.H: frozenset[int] = frozenset()
        self._comp_cache: dict[frozenset[int], tuple[list[int], list[set[int]]]] = {}
        self._relief_cache: dict[tuple[frozenset[int], int], tuple[bool, frozenset[int] | None]] = {}

    def _reset_caches(self) -> None:
        self._comp_cache.clear()
        self._relief_cache.clear()

    def deg(self, H: frozenset[int] | None = None) -> list[int]:
        H = self.H if H is None else H
        d = [0] * self.g.n
        for e in H:
            a, b = self.g.edges[e]
            d[a] += 1
            d[b] += 1
        return d

    def excess(self, H: frozenset[int] | None = None) -> int:
        d = self.deg(H)
        return sum(max(0, d[v] - self.caps[v]) for v in range(self.g.n))

    def _surviving(self, S: frozenset[int], H: frozenset[int] | None = None) -> list[int]:
        H = self.H if H is None else H
        return sorted(
            e for e in H
            if e in self.forced
            or (self.g.edges[e][0] not in S and self.g.edges[e][1] not in S)
        )

    def comps_at(self, S: frozenset[int]) -> tuple[list[int], list[set[int]]]:
        if S not in self._comp_cache:
            idx = _mtc_component_index(self.g, self.m, self._surviving(S))
            groups: dict[int, set[int]] = {}
            for v in range(self.g.n):
                groups.setdefault(idx[v], set()).add(v)
            comps = sorted(groups.values(), key=min)
            re_idx = [0] * self.g.n
            for i, c in enumerate(comps):
                for v in c:
                    re_idx[v] = i
            self._comp_cache[S] = (re_idx, comps)
        return self._comp_cache[S]

    def _local_sets_for(self, X: frozenset[int], v: int) -> list[frozenset[int]]:
        if self.minimize_components:
            idx0, comps0 = self.comps_at(frozenset())
            base = frozenset(comps0[idx0[v]])
        else:
            base = frozenset(range(self.g.n))
        sets = [base]
        if self.m >= 2 and X != base:
            sets.append(X)
        return sets

    def relieve(self, S: frozenset[int], v: int, *, caps_eff=None, target=None
                ) -> tuple[bool, frozenset[int] | None]:
        key = (S, v)
        cacheable = caps_eff is None and target is None
        if cacheable and key in self._relief_cache:
            return self._relief_cache[key]
        caps_eff = self.caps if caps_eff is None else caps_eff
        target = caps_eff[v] - 1 if target is None else target
        deg = self.deg()
        if deg[v] <= target:
            result: tuple[bool, frozenset[int] | None] = (True, self.H)
        else:
            idx, comps = self.comps_at(S)
            X = frozenset(comps[idx[v]])
            zone = X - S
            prob = _ReliefProblem(
                self.g, self.m, self.H, self.forced, zone,
                self._local_sets_for(X, v), caps_eff, v, target,
            )
            found = _relief_descent(prob, self.relief_depth, _Budget(EXHAUSTIVE_NODE_BUDGET))
            if found is None and len(zone) <= self.exhaustive_cap:
                if self.m == 1:
                    res = _relief_exhaustive_tree(prob, _Budget(EXHAUSTIVE_NODE_BUDGET))
                else:
                    res = _relief_exhaustive_m(prob, _Budget(EXHAUSTIVE_NODE_BUDGET))
                if res is not None and res != "unknown":
                    found = res
            result = (
                (True, prob.assemble(found)) if found is not None else (False, None)
            )
        if cacheable:
            self._relief_cache[key] = result
        return result

    # -- cascade ----------------------------------------------------------

    def first_level(self) -> frozenset[int]:
        return frozenset()

    def is_candidate(self, v: int, deg: list[int]) -> bool:
        raise NotImplementedError

    def cascade(self) -> list[frozenset[int]]:
        levels = [frozenset()]
        first = self.first_level()
        if first:
            levels.append(first)
        cur = levels[-1]
        deg = self.deg()
        while True:
            nxt = set(cur)
            for v in range(self.g.n):
                if v in cur or not self.is_candidate(v, deg):
                    continue
                relieved, _ = self.relieve(cur, v)
                if not relieved:
                    nxt.add(v)
            frozen = frozenset(nxt)
            if frozen == cur:
                return levels
            levels.append(frozen)
            cur = frozen

    # -- violations -------------------------------------------------------

    def find_violation(self, levels: list[frozenset[int]]):
        S = levels[-1]
        idx, _ = self.comps_at(S)
        for eid, (x, y) in enumerate(self.g.edges):
            if eid in self.H or x in S or y in S:
                continue
            if idx[x] != idx[y]:
                for j, Sj in enumerate(levels):
                    jdx, _ = self.comps_at(Sj)
                    if jdx[x] != jdx[y]:
                        return eid, j
                raise AssertionError("violation must separate at some level")
        return None

    def witness_for(self, S: frozenset[int], v: int) -> frozenset[int]:
        relieved, wit = self.relieve(S, v)
        assert relieved and wit is not None, "violation endpoint must be relieved"
        return wit

    def handle_violation(self, eid: int, sep: int, levels: list[frozenset[int]]) -> str:
        g = self.g
        x, y = g.edges[eid]
        if sep == 0:
            assert self.minimize_components, "candidate spans one component at level 0"
            return self._merge_components(eid)
        Sprev, Scur = levels[sep - 1], levels[sep]
        idx_prev, comps_prev = self.comps_at(Sprev)
        idx_cur, comps_cur = self.comps_at(Scur)
        assert idx_prev[x] == idx_prev[y] and idx_cur[x] != idx_cur[y]
        Zv = frozenset(comps_prev[idx_prev[x]])
        level_set = Scur - Sprev
        M = [
            e for e in sorted(self.H)
            if e not in self.forced
            and g.edges[e][0] in Zv and g.edges[e][1] in Zv
            and g.edges[e][0] not in Sprev and g.edges[e][1] not in Sprev
            and (g.edges[e][0] in level_set or g.edges[e][1] in level_set)
            and idx_cur[g.edges[e][0]] != idx_cur[g.edges[e][1]]
        ]
        assert M, "a separating level must kill a crossing candidate edge"
        sub, old_v, old_e = induced_subgraph(g, Zv)
        back_e = {he: i for i, he in enumerate(old_e)}
        comp_edges = [back_e[e] for e in self._surviving(Sprev) if e in back_e]
        H_loc = SpanningSubgraph.of(sub, comp_edges)
        picked = exchange_edge(H_loc, self.m, [back_e[e] for e in M], back_e[eid])
        zz = old_e[picked]
        zu, zw = g.edges[zz]
        z = min(w for w in (zu, zw) if w in level_set)

        Hx = self.witness_for(Scur, x)
        Hy = self.witness_for(Scur, y)
        X = frozenset(comps_cur[idx_cur[x]]) - Scur
        Y = frozenset(comps_cur[idx_cur[y]]) - Scur

        def rw(A: frozenset[int], T: frozenset[int]) -> frozenset[int]:
            return frozenset(
                e for e in A if g.edges[e][0] in T and g.edges[e][1] in T
            )

        newH = (
            (self.H - rw(self.H, X) - rw(self.H, Y) - {zz})
            | rw(Hx, X) | rw(Hy, Y) | {eid}
        )
        self._validate_candidate(newH)
        d_old, d_new = self.deg(), self.deg(newH)
        assert d_new[z] == d_old[z] - 1
        if not self.minimize_components and sep == 1:
            assert self.excess(newH) < self.excess(self.H)
            self.H = newH
            self._reset_caches()
            return "improved"
        if self.minimize_components:
            assert self.excess(newH) == 0
            assert self._omega_of(newH) == self._omega_of(self.H)
        self._relief_cache[(Sprev, z)] = (True, newH)
        return "corrected"

    def _merge_components(self, eid: int) -> str:
        raise NotImplementedError

    def _omega_of(self, H: frozenset[int]) -> Fraction:
        return omega_m(Multigraph(self.g.n, [self.g.edges[e] for e in sorted(H)]), self.m)

    def _validate_candidate(self, H: frozenset[int]) -> None:
        raise NotImplementedError


class _MinExcessEngine(_CascadeEngine):
    """Minimally m-tree-connected spanning candidate containing the forced
    edges, driven to (locally) minimum total excess from caps = h + d_F."""

    def first_level(self) -> frozenset[int]:
        deg = self.deg()
        return frozenset(v for v in range(self.g.n) if deg[v] > self.caps[v])

    def is_candidate(self, v: int, deg: list[int]) -> bool:
        return deg[v] >= self.caps[v]

    def _validate_candidate(self, H: frozenset[int]) -> None:
        assert self.forced <= H
        assert len(H) == self.m * (self.g.n - 1)
        sub = Multigraph(self.g.n, [self.g.edges[e] for e in sorted(H)])
        assert isinstance(pack_trees(sub, self.m), TreePacking)
        deg = self.deg(H)
        V1 = self.first_level()
        for v in range(self.g.n):
            if v not in V1:
                assert deg[v] <= self.caps[v]

    def initial(self) -> DeficientPartition | None:
        res = pack_trees(self.g, self.m)
        if isinstance(res, DeficientPartition):
            return res
        H = set()
        for t in res.trees:
            H |= t
        for e in sorted(self.forced - H):
            M = sorted(H - self.forced)
            sel = exchange_edge(SpanningSubgraph.of(self.g, H), self.m, M, e)
            H.discard(sel)
            H.add(e)
        self.H = frozenset(H)
        return None

    def pre_descent(self) -> None:
        while True:
            deg = self.deg()
            over = sorted(v for v in range(self.g.n) if deg[v] > self.caps[v])
            if not over:
                return
            changed = False
            for v in over:
                deg = self.deg()
                if deg[v] <= self.caps[v]:
                    continue
                caps_eff = [max(self.caps[w], deg[w]) for w in range(self.g.n)]
                relieved, wit = self.relieve(
                    frozenset(), v, caps_eff=caps_eff, target=deg[v] - 1
                )
                if relieved and wit != self.H:
                    self.H = wit
                    self._reset_caches()
                    changed = True
            if not changed:
                return

    def run(self):
        bad = self.initial()
        if bad is not None:
            return bad
        self.pre_descent()
        corrections = 0
        while True:
            if self.excess() == 0:
                return self.H, 0, ()
            levels = self.cascade()
            viol = self.find_violation(levels)
            if viol is None:
                S = levels[-1]
                self._verify_conditions(S)
                return self.H, self.excess(), tuple(sorted(S))
            kind = self.handle_violation(viol[0], viol[1], levels)
            if kind == "corrected":
                corrections += 1
                if corrections > CORRECTION_BUDGET:
                    raise _EngineInconclusive(
                        "correction budget exhausted in excess cascade"
                    )

    def _verify_conditions(self, S: frozenset[int]) -> None:
        deg = self.deg()
        assert all(deg[v] <= self.caps[v] or v in S for v in range(self.g.n))
        assert all(deg[v] >= self.caps[v] for v in S)
        keep_g = [
            e for e in range(self.g.num_edges)
            if e in self.forced
            or (self.g.edges[e][0] not in S and self.g.edges[e][1] not in S)
        ]
        omega_g = _measure(self.g, self.m, keep_g)
        omega_h = _measure(self.g, self.m, self._surviving(S))
        assert omega_g == omega_h, "component-measure condition failed"


class _MinComponentsEngine(_CascadeEngine):
    """Candidate with zero excess (degrees <= caps everywhere), m-critical at
    all times, driven to the minimum component measure."""

    minimize_components = True

    def is_candidate(self, v: int, deg: list[int]) -> bool:
        return deg[v] == self.caps[v]

    def _validate_candidate(self, H: frozenset[int]) -> None:
        assert self.forced <= H
        deg = self.deg(H)
        assert all(deg[v] <= self.caps[v] for v in range(self.g.n))

    def initial(self) -> None:
        if any(self.h[v] < 0 for v in range(self.g.n)):
            raise ValueError("degree targets must be nonnegative")
        self.H = frozenset(self.forced)
        self._grow()

    def _grow(self) -> None:
        while True:
            deg = self.deg()
            idx, _ = self.comps_at(frozenset())
            added = False
            for eid, (a, b) in enumerate(self.g.edges):
                if eid in self.H or idx[a] == idx[b]:
                    continue
                if deg[a] < self.caps[a] and deg[b] < self.caps[b]:
                    self.H = self.H | {eid}
                    self._reset_caches()
                    added = True
                    break
            if not added:
                return

    def _merge_components(self, eid: int) -> str:
        g = self.g
        x, y = g.edges[eid]
        idx0, comps0 = self.comps_at(frozenset())
        Hx = self.witness_for(frozenset(), x)
        Hy = self.witness_for(frozenset(), y)
        X = frozenset(comps0[idx0[x]])
        Y = frozenset(comps0[idx0[y]])

        def rw(A, T):
            return frozenset(e for e in A if g.edges[e][0] in T and g.edges[e][1] in T)

        newH = (self.H - rw(self.H, X) - rw(self.H, Y)) | rw(Hx, X) | rw(Hy, Y) | {eid}
        self._validate_candidate(newH)
        assert self._omega_of(newH) < self._omega_of(self.H)
        self.H = newH
        self._reset_caches()
        self._grow()
        return "improved"

    def run(self):
        self.initial()
        corrections = 0
        while True:
            if self._omega_of(self.H) == 1:
                return self.H, ()
            levels = self.cascade()
            viol = self.find_violation(levels)
            if viol is None:
                S = levels[-1]
                self._verify_conditions(S)
                return self.H, tuple(sorted(S))
            kind = self.handle_violation(viol[0], viol[1], levels)
            if kind == "corrected":
                corrections += 1
                if corrections > CORRECTION_BUDGET:
                    raise _EngineInconclusive(
                        "correction budget exhausted in component cascade"
                    )

    def _verify_conditions(self, S: frozenset[int]) -> None:
        deg = self.deg()
        assert all(deg[v] == self.caps[v] for v in S)
        keep_g = [
            e for e in range(self.g.num_edges)
            if e in self.forced
            or (self.g.edges[e][0] not in S and self.g.edges[e][1] not in S)
        ]
        omega_g = _measure(self.g, self.m, keep_g)
        omega_h = _measure(self.g, self.m, self._surviving(S))
        assert omega_g == omega_h, "component-measure condition failed"


def _measure(g: Multigraph, m: int, edge_ids: list[int]) -> Fraction:
    return omega_m(Multigraph(g.n, [g.edges[e] for e in sorted(edge_ids)]), m)


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def min_excess_spanning_tree(
    g: Multigraph,
    F: SpanningSubgraph | None,
    h: Sequence[int] | ExcessTarget,
) -> tuple[SpanningSubgraph, int, tuple[int, ...]] | Inconclusive:
    """A spanning tree T containing F that the exchange cascade cannot
    improve, its total excess from h + d_F, and the verified fixed-point set
    S (conditions of the minimum-excess structure theorem)."""
    forced = F.edge_ids if F is not None else frozenset()
    if F is not None and not F.is_forest():
        raise ValueError("F must be a forest")
    if len(components(g)) != 1:
        raise ValueError("G must be connected")
    hvals = [h[v] for v in range(g.n)]
    engine = _MinExcessEngine(g, 1, hvals, forced)
    try:
        res = engine.run()
    except _EngineInconclusive as exc:
        return Inconclusive(exc.reason)
    H, te, S = res
    return SpanningSubgraph(g, H), te, S


def min_excess_m_subgraph(
    g: Multigraph,
    m: int,
    h: Sequence[int] | ExcessTarget,
    F: SpanningSubgraph | None = None,
) -> tuple[SpanningSubgraph, int, tuple[int, ...]] | DeficientPartition | Inconclusive:
    """Minimally m-tree-connected spanning subgraph containing the reduced F
    with locally minimum total excess from h + d_F', plus the verified set S.
    Removed F-edges are re-added afterwards by the bounded_* wrappers."""
    forced = frozenset()
    if F is not None and F.edge_ids:
        forced = m_critical_reduce(F, m).edge_ids
    hvals = [h[v] for v in range(g.n)]
    engine = _MinExcessEngine(g, m, hvals, forced)
    try:
        res = engine.run()
    except _EngineInconclusive as exc:
        return Inconclusive(exc.reason)
    if isinstance(res, DeficientPartition):
        return res
    H, te, S = res
    return SpanningSubgraph(g, H), te, S


def _derived_targets(
    g: Multigraph, spec: DegreeSpec, mode: str, reduced: SpanningSubgraph
) -> tuple[list[int], list[int]]:
    """(h, caps_reported): h drives the engine; caps_reported is the final
    per-vertex bound of the selected theorem, with the original F degrees."""
    m = spec.m
    rdeg = reduced.degrees()
    fdeg = (
        SpanningSubgraph(g, spec.forest).degrees()
        if spec.forest is not None
        else [0] * g.n
    )
    h = []
    caps = []
    for v in range(g.n):
        if v not in spec.eta:
            h.append(g.degree(v) + 1)
            caps.append(g.degree(v) + fdeg[v])
            continue
        base = _ceil_fr(m * Fraction(spec.eta[v]) - m * m * Fraction(spec.lam))
        if mode == "plain":
            h.append(base - min(m, rdeg[v]))
            caps.append(base + max(0, fdeg[v] - m))
        elif mode == "forest-exception":
            h.append(base - m)
            caps.append(base + fdeg[v] - m)
        else:
            raise ValueError(f"unknown mode {mode!r}")
    return h, caps


def bounded_spanning_tree(
    g: Multigraph, spec: DegreeSpec, mode: str = "plain"
) -> SpanningSubgraph | Certificate | Inconclusive:
    """Spanning tree T containing spec.forest with d_T(v) bounded per the
    selected theorem on X, or a certificate set violating its hypothesis."""
    if spec.m != 1:
        raise ValueError("bounded_spanning_tree requires m = 1")
    if len(components(g)) != 1:
        raise ValueError("G must be connected")
    return bounded_m_subgraph(g, spec, mode)


def bounded_m_subgraph(
    g: Multigraph, spec: DegreeSpec, mode: str = "plain"
) -> SpanningSubgraph | Certificate | DeficientPartition | Inconclusive:
    """m-tree-connected spanning subgraph containing spec.forest meeting the
    per-vertex cap of the selected theorem, or a certificate, or the
    deficient partition when G itself is not m-tree-connected."""
    spec.validate()
    m = spec.m
    F = (
        SpanningSubgraph(g, spec.forest)
        if spec.forest is not None
        else SpanningSubgraph.trivial(g)
    )
    if m == 1 and not F.is_forest():
        raise ValueError("forced subgraph must be a forest when m = 1")
    reduced = m_critical_reduce(F, m) if F.edge_ids else F
    h, caps = _derived_targets(g, spec, mode, reduced)
    res = min_excess_m_subgraph(g, m, h, reduced)
    if isinstance(res, (DeficientPartition, Inconclusive)):
        return res
    H, te, S = res
    if te == 0:
        final = H.union(F.edge_ids)
        deg = final.degrees()
        for v in spec.eta:
            assert deg[v] <= caps[v], "degree cap violated after re-adding F"
        return final
    params = {
        "eta": spec.eta,
        "lam": spec.lam,
        "m": m,
        "forest": F if F.edge_ids else None,
    }
    family = {
        ("plain", 1): "tree",
        ("forest-exception", 1): "tree-forest",
        ("plain", 0): "subgraph",
        ("forest-exception", 0): "subgraph-forest",
    }[(mode, 1 if m == 1 else 0)]
    return make_certificate(g, family, params, S)


def min_components_zero_excess(
    g: Multigraph,
    m: int,
    h: Sequence[int] | ExcessTarget,
    F: SpanningSubgraph | None = None,
) -> tuple[SpanningSubgraph, tuple[int, ...]] | Inconclusive:
    """Spanning subgraph H containing F with d_H <= h + d_F everywhere and a
    locally minimal component measure; returns (H, S) where S is the verified
    fixed-point set (empty iff H came out m-tree-connected whenever the
    relevant hypothesis holds).  Backs the tough-extension recipes."""
    forced = frozenset()
    reduced = None
    if F is not None and F.edge_ids:
        reduced = m_critical_reduce(F, m)
        forced = reduced.edge_ids
    hvals = [h[v] for v in range(g.n)]
    engine = _MinComponentsEngine(g, m, hvals, forced)
    try:
        H, S = engine.run()
    except _EngineInconclusive as exc:
        return Inconclusive(exc.reason)
    final = frozenset(H) | (F.edge_ids if F is not None else frozenset())
    return SpanningSubgraph(g, final), S


def derive_spec(kind: str, g: Multigraph, **params) -> DegreeSpec:
    """The exact (eta, lam, X) a theorem's proof uses for a connectivity
    class, including the distinguished-vertex variant."""
    m = int(params.get("m", 1))
    u = params.get("u")
    X = params.get("X")
    X = set(range(g.n)) if X is None else set(X)
    if kind in ("k-edge-connected", "k-tree-connected"):
        k = int(params["k"])
        if kind == "k-edge-connected":
            if k < 2 * m:
                raise ValueError("edge-connected route requires k >= 2m")
            lam = Fraction(2, k)
            shift = 2
            ubonus = 2 * m
        else:
            if k < m:
                raise ValueError("tree-connected route requires k >= m")
            lam = Fraction(1, k)
            shift = 1
            ubonus = m
        eta = {}
        for v in sorted(X):
            if u is not None and v == u:
                eta[v] = (
                    Fraction(g.degree(v) + ubonus, k) - Fraction(k - 1, k * m)
                )
            else:
                eta[v] = Fraction(g.degree(v), k) + shift
        return DegreeSpec(eta, lam, m, None, u)
    if kind == "independent-X":
        k = int(params["k"])
        conn = params.get("connectivity", "edge")
        if conn == "edge" and k < 2 * m:
            raise ValueError("edge-connected route requires k >= 2m")
        if conn == "tree" and k < m:
            raise ValueError("tree-connected route requires k >= m")
        shift = 2 if conn == "edge" else 1
        eta = {v: Fraction(g.degree(v), k) + shift for v in sorted(X)}
        return DegreeSpec(eta, Fraction(1, m), m, None, None)
    if kind == "toughness":
        n_param = Fraction(params["n"])
        eta = {v: 2 + n_param / m for v in sorted(X)}
        return DegreeSpec(eta, Fraction(0), m, None, None)
    raise ValueError(f"unknown spec kind {kind!r}")
