"""Steiner tree solvers on the weighted wire graph.

solve_exact_dw     Dreyfus-Wagner dynamic programming over terminal
                   subsets with Dijkstra-based relaxation per subset
                   (O(3^k n + 2^k (n log n + m))). Globally optimal.
solve_approx       Nearest-terminal Voronoi + terminal-MST expansion
                   (2-approximation).
oracle_brute_force Exhaustive optimum for tiny instances, used by tests.
solve              Policy dispatch between exact and approximation.

Costs are (weight, pattern length) pairs compared lexicographically, so
weight ties break toward shorter trees; remaining ties follow the fixed
lexicographic iteration order over vertices and edge ids. Large
instances switch to a scalar-weight relaxation backed by scipy's
C Dijkstra (weight ties are vanishingly rare there; the result is still
optimal in weight and deterministic).
"""

from __future__ import annotations

import heapq
import itertools
import logging
from dataclasses import dataclass

import numpy as np

from .errors import (
    DisconnectedTerminals,
    OracleTooLarge,
    TerminalCapExceeded,
    WirelayError,
)
from .graph import WeightedWireGraph, check_terminal_connectivity

log = logging.getLogger(__name__)

DEFAULT_TERMINAL_CAP = 16
ORACLE_EDGE_CAP = 25
# Above this many (vertex, subset) cells the pure-python DP switches to
# the scipy-backed scalar relaxation.
SCIPY_CELL_THRESHOLD = 200_000

INF = float("inf")


@dataclass(frozen=True)
class SolvePolicy:
    prefer_exact: bool = True
    cap: int = DEFAULT_TERMINAL_CAP


@dataclass(frozen=True)
class SteinerTree:
    edges: tuple  # graph edge ids, sorted
    total_weight: float
    total_length: float
    terminals: tuple
    solver_kind: str

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def edge_vertices(self, graph: WeightedWireGraph):
        return [tuple(int(x) for x in graph.edges[e]) for e in self.edges]

    def to_json_dict(self, graph: WeightedWireGraph = None) -> dict:
        out = {
            "edges": [int(e) for e in self.edges],
            "weight": self.total_weight,
            "length": self.total_length,
            "terminals": [int(t) for t in self.terminals],
            "solverKind": self.solver_kind,
        }
        if graph is not None:
            out["edgeVertices"] = [
                [int(u), int(v)] for u, v in self.edge_vertices(graph)
            ]
        return out


def _make_tree(graph, edge_ids, kind) -> SteinerTree:
    """Assemble, prune non-terminal leaves, and validate a tree."""
    edge_ids = set(int(e) for e in edge_ids)
    terminals = set(graph.terminals)
    # prune non-terminal leaves (defensive; optimal trees never need it)
    changed = True
    while changed:
        changed = False
        degree = {}
        for e in edge_ids:
            u, v = (int(x) for x in graph.edges[e])
            degree[u] = degree.get(u, 0) + 1
            degree[v] = degree.get(v, 0) + 1
        for e in sorted(edge_ids):
            u, v = (int(x) for x in graph.edges[e])
            for leaf in (u, v):
                if degree.get(leaf, 0) == 1 and leaf not in terminals:
                    edge_ids.remove(e)
                    changed = True
                    break
            if changed:
                break
    validate_tree(graph, edge_ids)
    ids = tuple(sorted(edge_ids))
    return SteinerTree(
        edges=ids,
        total_weight=float(sum(graph.weight[e] for e in ids)),
        total_length=float(sum(graph.length[e] for e in ids)),
        terminals=tuple(sorted(terminals)),
        solver_kind=kind,
    )


def validate_tree(graph: WeightedWireGraph, edge_ids) -> None:
    """Acyclic, connected, spans terminals, every leaf a terminal."""
    terminals = set(graph.terminals)
    if not edge_ids:
        if len(terminals) > 1:
            raise WirelayError("empty edge set cannot span terminals")
        return
    verts = set()
    for e in edge_ids:
        u, v = (int(x) for x in graph.edges[e])
        verts.update((u, v))
    if not terminals <= verts:
        raise WirelayError("tree does not span all terminals")
    parent = {v: v for v in verts}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in edge_ids:
        u, v = (int(x) for x in graph.edges[e])
        ru, rv = find(u), find(v)
        if ru == rv:
            raise WirelayError("edge set contains a cycle")
        parent[rv] = ru
    if len({find(v) for v in verts}) != 1:
        raise WirelayError("edge set is not connected")
    degree = {}
    for e in edge_ids:
        u, v = (int(x) for x in graph.edges[e])
        degree[u] = degree.get(u, 0) + 1
        degree[v] = degree.get(v, 0) + 1
    for v, d in degree.items():
        if d == 1 and v not in terminals:
            raise WirelayError(f"non-terminal leaf {v}")


# ---------------------------------------------------------------------------
# Shared shortest-path helpers (lexicographic (weight, length) costs)


def _dijkstra_pairs(adj, weight, length, sources):
    """Multi-source Dijkstra with pair costs.

    sources: list of (vertex, (w0, l0)) seeds.
    Returns (dist_w, dist_l, parent_edge, parent_vertex, source_of).
    """
    n = len(adj)
    dw = [INF] * n
    dl = [INF] * n
    pe = [-1] * n
    pv = [-1] * n
    src = [-1] * n
    heap = []
    for v, (w0, l0) in sources:
        if (w0, l0) < (dw[v], dl[v]):
            dw[v], dl[v] = w0, l0
            src[v] = v
            heapq.heappush(heap, (w0, l0, v))
    while heap:
        w, l, u = heapq.heappop(heap)
        if (w, l) > (dw[u], dl[u]):
            continue
        for v, eid in adj[u]:
            nw = w + weight[eid]
            nl = l + length[eid]
            if (nw, nl) < (dw[v], dl[v]):
                dw[v], dl[v] = nw, nl
                pe[v] = eid
                pv[v] = u
                src[v] = src[u]
                heapq.heappush(heap, (nw, nl, v))
    return dw, dl, pe, pv, src


def _walk_parents(pv, pe, v):
    """Edge ids along the parent chain from v back to its source."""
    out = []
    while pe[v] != -1:
        out.append(pe[v])
        v = pv[v]
    return out, v


# ---------------------------------------------------------------------------
# Exact Dreyfus-Wagner


def solve_exact_dw(graph: WeightedWireGraph, cap: int = DEFAULT_TERMINAL_CAP) -> SteinerTree:
    """Globally optimal Steiner tree by subset dynamic programming."""
    terms = list(graph.terminals)
    k = len(terms)
    if k > cap:
        raise TerminalCapExceeded(k, cap)
    check_terminal_connectivity(graph)
    if k == 1:
        return SteinerTree(
            edges=(),
            total_weight=0.0,
            total_length=0.0,
            terminals=tuple(terms),
            solver_kind="exact-dw",
        )

    cells = graph.num_nodes * (1 << (k - 1))
    if cells > SCIPY_CELL_THRESHOLD:
        try:
            return _solve_dw_scipy(graph, terms)
        except ImportError:  # pragma: no cover - scipy is a hard dependency
            log.warning("scipy unavailable; falling back to pure-python DP")
    return _solve_dw_python(graph, terms)


def _solve_dw_python(graph: WeightedWireGraph, terms) -> SteinerTree:
    adj = graph.adjacency()
    weight = np.asarray(graph.weight)
    length = np.asarray(graph.length)
    root = terms[-1]
    base = terms[:-1]
    k1 = len(base)
    full = (1 << k1) - 1

    # dp[mask] = (w array, l array); parents: ('base', t) handled via
    # per-terminal Dijkstra parents, ('edge', u) via pred arrays,
    # ('merge', sub) via split arrays.
    dpw = {}
    dpl = {}
    pred_v = {}
    pred_e = {}
    split = {}
    base_parents = {}

    for i, t in enumerate(base):
        dw, dl, pe, pv, _ = _dijkstra_pairs(adj, weight, length, [(t, (0.0, 0.0))])
        mask = 1 << i
        dpw[mask] = dw
        dpl[mask] = dl
        base_parents[mask] = (pe, pv)

    n = graph.num_nodes
    for mask in range(1, full + 1):
        if mask & (mask - 1) == 0:
            continue  # singleton, already done
        mw = [INF] * n
        ml = [INF] * n
        msplit = [0] * n
        sub = (mask - 1) & mask
        while sub:
            comp = mask ^ sub
            if sub < comp:  # each split once
                sub = (sub - 1) & mask
                continue
            w1, l1 = dpw[sub], dpl[sub]
            w2, l2 = dpw[comp], dpl[comp]
            for v in range(n):
                if w1[v] == INF or w2[v] == INF:
                    continue
                cw = w1[v] + w2[v]
                cl = l1[v] + l2[v]
                if (cw, cl) < (mw[v], ml[v]):
                    mw[v], ml[v] = cw, cl
                    msplit[v] = sub
            sub = (sub - 1) & mask
        # Dijkstra relaxation seeded with merged labels
        seeds = [(v, (mw[v], ml[v])) for v in range(n) if mw[v] < INF]
        dw, dl, pe, pv, _ = _dijkstra_pairs(adj, weight, length, seeds)
        dpw[mask] = dw
        dpl[mask] = dl
        pred_e[mask] = pe
        pred_v[mask] = pv
        split[mask] = msplit

    if dpw[full][root] == INF:
        raise DisconnectedTerminals([set(terms)])

    edges = set()
    stack = [(full, root)]
    while stack:
        mask, v = stack.pop()
        if mask & (mask - 1) == 0:
            pe, pv = base_parents[mask]
            chain, _ = _walk_parents(pv, pe, v)
            edges.update(chain)
            continue
        chain, v0 = _walk_parents(pred_v[mask], pred_e[mask], v)
        edges.update(chain)
        sub = split[mask][v0]
        stack.append((sub, v0))
        stack.append((mask ^ sub, v0))
    return _make_tree(graph, edges, "exact-dw")


def _solve_dw_scipy(graph: WeightedWireGraph, terms) -> SteinerTree:
    """Scalar-weight DW with scipy Dijkstra relaxations (large instances)."""
    from scipy.sparse import csr_matrix, vstack as sp_vstack
    from scipy.sparse.csgraph import dijkstra

    n = graph.num_nodes
    e = np.asarray(graph.edges)
    w = np.asarray(graph.weight, dtype=np.float64)
    root = terms[-1]
    base = terms[:-1]
    k1 = len(base)
    full = (1 << k1) - 1

    # Static graph in CSR with both edge directions stored; shape leaves
    # room for a virtual source row (id n) appended per relaxation.
    rows = np.concatenate([e[:, 0], e[:, 1]])
    cols = np.concatenate([e[:, 1], e[:, 0]])
    data = np.concatenate([w, w])
    mat = csr_matrix((data, (rows, cols)), shape=(n + 1, n + 1))
    base_rows = mat[:n]

    def relax(init):
        """Dijkstra from a virtual source with per-vertex seed labels."""
        finite = np.nonzero(np.isfinite(init))[0]
        virt = csr_matrix(
            (init[finite], (np.zeros(len(finite), dtype=np.int64), finite)),
            shape=(1, n + 1),
        )
        big = sp_vstack([base_rows, virt], format="csr")
        dist, pred = dijkstra(big, directed=True, indices=n, return_predecessors=True)
        return dist[:n], pred[:n]

    dpw = {}
    preds = {}
    splits = {}
    base_parents = {}
    for i, t in enumerate(base):
        dist, pred = dijkstra(mat, directed=True, indices=t, return_predecessors=True)
        mask = 1 << i
        dpw[mask] = dist[:n]
        base_parents[mask] = pred[:n]

    for mask in range(1, full + 1):
        if mask & (mask - 1) == 0:
            continue
        merged = np.full(n, np.inf)
        msplit = np.zeros(n, dtype=np.int64)
        sub = (mask - 1) & mask
        while sub:
            comp = mask ^ sub
            if sub >= comp:
                cand = dpw[sub] + dpw[comp]
                better = cand < merged
                merged[better] = cand[better]
                msplit[better] = sub
            sub = (sub - 1) & mask
        dist, pred = relax(merged)
        dpw[mask] = dist
        preds[mask] = pred
        splits[mask] = msplit

    if not np.isfinite(dpw[full][root]):
        raise DisconnectedTerminals([set(terms)])

    edge_index = {}
    for eid, (u, v) in enumerate(e):
        edge_index[(int(u), int(v))] = eid
        edge_index[(int(v), int(u))] = eid

    edges = set()
    stack = [(full, int(root))]
    while stack:
        mask, v = stack.pop()
        if mask & (mask - 1) == 0:
            pred = base_parents[mask]
            while pred[v] >= 0:
                u = int(pred[v])
                edges.add(edge_index[(u, v)])
                v = u
            continue
        pred = preds[mask]
        while pred[v] >= 0 and pred[v] != graph.num_nodes:
            u = int(pred[v])
            edges.add(edge_index[(u, v)])
            v = u
        sub = int(splits[mask][v])
        stack.append((sub, v))
        stack.append((mask ^ sub, v))
    return _make_tree(graph, edges, "exact-dw")


# ---------------------------------------------------------------------------
# Mehlhorn-style 2-approximation


def solve_approx_mehlhorn(graph: WeightedWireGraph) -> SteinerTree:
    """Voronoi-region 2-approximation (terminal MST expansion)."""
    check_terminal_connectivity(graph)
    terms = list(graph.terminals)
    if len(terms) == 1:
        return SteinerTree((), 0.0, 0.0, tuple(terms), "approx-mehlhorn")
    adj = graph.adjacency()
    weight = np.asarray(graph.weight)
    length = np.asarray(graph.length)
    dw, dl, pe, pv, src = _dijkstra_pairs(
        adj, weight, length, [(t, (0.0, 0.0)) for t in terms]
    )

    # Candidate terminal-pair connections through single bridging edges.
    best = {}
    for eid, (u, v) in enumerate(np.asarray(graph.edges)):
        u, v = int(u), int(v)
        tu, tv = src[u], src[v]
        if tu == -1 or tv == -1 or tu == tv:
            continue
        key = (tu, tv) if tu < tv else (tv, tu)
        cand = (dw[u] + weight[eid] + dw[v], dl[u] + length[eid] + dl[v], eid)
        if key not in best or cand < best[key]:
            best[key] = cand

    # Kruskal over the terminal distance graph.
    parent = {t: t for t in terms}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    chosen_bridges = []
    for key in sorted(best, key=lambda kk: (best[kk][0], best[kk][1], kk)):
        a, b = key
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra
            chosen_bridges.append(best[key][2])
    if len({find(t) for t in terms}) != 1:
        raise DisconnectedTerminals([{t for t in terms if find(t) == r} for r in {find(t) for t in terms}])

    edge_ids = set()
    for eid in chosen_bridges:
        u, v = (int(x) for x in graph.edges[eid])
        edge_ids.add(int(eid))
        for end in (u, v):
            chain, _ = _walk_parents(pv, pe, end)
            edge_ids.update(chain)

    # MST of the expanded subgraph, then leaf pruning in _make_tree.
    verts = set()
    for eid in edge_ids:
        u, v = (int(x) for x in graph.edges[eid])
        verts.update((u, v))
    parent2 = {v: v for v in verts}

    def find2(x):
        while parent2[x] != x:
            parent2[x] = parent2[parent2[x]]
            x = parent2[x]
        return x

    mst = []
    for eid in sorted(edge_ids, key=lambda i: (weight[i], length[i], i)):
        u, v = (int(x) for x in graph.edges[eid])
        ru, rv = find2(u), find2(v)
        if ru != rv:
            parent2[rv] = ru
            mst.append(eid)
    return _make_tree(graph, mst, "approx-mehlhorn")


# ---------------------------------------------------------------------------
# Brute-force oracle


def oracle_brute_force(graph: WeightedWireGraph) -> SteinerTree:
    """Exhaustive optimum: MST over every subset of candidate Steiner
    vertices. Independent of the DP solver; testing only."""
    if graph.num_edges > ORACLE_EDGE_CAP:
        raise OracleTooLarge(
            f"{graph.num_edges} edges exceed oracle cap {ORACLE_EDGE_CAP}"
        )
    check_terminal_connectivity(graph)
    terms = sorted(set(graph.terminals))
    weight = np.asarray(graph.weight)
    length = np.asarray(graph.length)
    edges = np.asarray(graph.edges)
    touched = sorted({int(x) for uv in edges for x in uv})
    extras = [v for v in touched if v not in set(terms)]
    edge_order = sorted(
        range(len(edges)), key=lambda i: (weight[i], length[i], i)
    )

    best = None
    for r in range(len(extras) + 1):
        for combo in itertools.combinations(extras, r):
            allowed = set(terms) | set(combo)
            parent = {v: v for v in allowed}

            def find(x):
                while parent[x] != x:
                    parent[x] = parent[parent[x]]
                    x = parent[x]
                return x

            chosen = []
            for eid in edge_order:
                u, v = (int(x) for x in edges[eid])
                if u not in allowed or v not in allowed:
                    continue
                ru, rv = find(u), find(v)
                if ru != rv:
                    parent[rv] = ru
                    chosen.append(eid)
            if len({find(t) for t in terms}) != 1:
                continue
            # prune non-terminal leaves for a fair comparison
            chosen_set = set(chosen)
            while True:
                deg = {}
                for eid in chosen_set:
                    u, v = (int(x) for x in edges[eid])
                    deg[u] = deg.get(u, 0) + 1
                    deg[v] = deg.get(v, 0) + 1
                drop = None
                for eid in sorted(chosen_set):
                    u, v = (int(x) for x in edges[eid])
                    if (deg[u] == 1 and u not in set(terms)) or (
                        deg[v] == 1 and v not in set(terms)
                    ):
                        drop = eid
                        break
                if drop is None:
                    break
                chosen_set.remove(drop)
            key = (
                float(sum(weight[i] for i in chosen_set)),
                float(sum(length[i] for i in chosen_set)),
                tuple(sorted(chosen_set)),
            )
            if best is None or key < best:
                best = key
    if best is None:
        raise DisconnectedTerminals([set(terms)])
    return _make_tree(graph, best[2], "oracle")


# ---------------------------------------------------------------------------
# Dispatch


def solve(graph: WeightedWireGraph, policy: SolvePolicy = SolvePolicy()) -> SteinerTree:
    k = len(graph.terminals)
    if policy.prefer_exact and k <= policy.cap:
        return solve_exact_dw(graph, cap=policy.cap)
    log.warning(
        "%d terminals exceed exact cap %d; using 2-approximation", k, policy.cap
    )
    return solve_approx_mehlhorn(graph)
