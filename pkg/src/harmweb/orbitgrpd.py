"""Fundamental groupoids of finite graphs, group actions, orbit groupoids.

Graphs here are small combinatorial models: a vertex list and a list of
edges (multi-edges and loops allowed).  The fundamental groupoid of a graph
on a set of base points is free, so everything reduces to spanning forests,
orbit counts and word reduction.

The checks of the path-lifting conditions are a discrete shadow of the
topological statements: walks stand in for paths and free reduction of edge
words stands in for homotopy rel endpoints.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field

from . import _perm
from .errors import PreconditionError, UsageError


@dataclass(frozen=True)
class FiniteGraph:
    vertices: tuple
    edges: tuple  # (u, v) pairs; position is the edge id

    def __post_init__(self):
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise UsageError("duplicate vertex")
        for u, v in self.edges:
            if u not in vs or v not in vs:
                raise UsageError(f"edge {(u, v)} leaves the vertex set")

    @classmethod
    def from_edges(cls, edges, vertices=()) -> "FiniteGraph":
        vs = list(vertices)
        seen = set(vs)
        for e in edges:
            for x in e:
                if x not in seen:
                    seen.add(x)
                    vs.append(x)
        return cls(tuple(vs), tuple(tuple(e) for e in edges))

    @property
    def V(self) -> int:
        return len(self.vertices)

    @property
    def E(self) -> int:
        return len(self.edges)

    def euler_characteristic(self) -> int:
        return self.V - self.E

    def index(self):
        return {v: i for i, v in enumerate(self.vertices)}

    def components(self) -> list[list]:
        """Vertex lists of the connected components, in order of first vertex."""
        idx = self.index()
        parent = list(range(self.V))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in self.edges:
            a, b = find(idx[u]), find(idx[v])
            if a != b:
                parent[a] = b
        groups = {}
        for i, v in enumerate(self.vertices):
            groups.setdefault(find(i), []).append(v)
        return list(groups.values())

    def subgraph(self, edge_ids, vertices=()) -> "FiniteGraph":
        """Subgraph on some edges (ids of self) plus extra vertices; edge ids are kept in ``edge_ids`` order."""
        es = [self.edges[k] for k in edge_ids]
        vs = list(vertices)
        return FiniteGraph.from_edges(es, vs)


def cycle_rank(X: FiniteGraph) -> int:
    """E - V + (number of components)."""
    return X.E - X.V + len(X.components())


# ---------------------------------------------------------------------------
# fundamental groupoid presentations


@dataclass(frozen=True)
class GroupoidPresentation:
    objects: tuple        # the base points
    bases: tuple          # one chosen base point per component
    generators: tuple     # edge ids outside the spanning forest
    tree: tuple           # edge ids of the spanning forest
    ranks: dict = field(default_factory=dict)  # base -> rank of the vertex group
    relations: tuple = ()  # free: empty

    @property
    def rank(self) -> int:
        return sum(self.ranks.values())


def _spanning_forest(X: FiniteGraph, roots):
    """BFS forest from the given roots (then any leftover vertex).  Returns (tree edge ids, parent map)."""
    idx = X.index()
    inc = {v: [] for v in X.vertices}
    for k, (u, v) in enumerate(X.edges):
        inc[u].append((k, v))
        if u != v:
            inc[v].append((k, u))
    seen = {}
    tree = []
    parent = {}
    order = list(roots) + [v for v in X.vertices]
    for r in order:
        if r in seen:
            continue
        seen[r] = r
        parent[r] = None
        queue = deque([r])
        while queue:
            x = queue.popleft()
            for k, y in inc[x]:
                if y not in seen:
                    seen[y] = r
                    parent[y] = (k, x)
                    tree.append(k)
                    queue.append(y)
    del idx
    return tree, parent, seen


def pi1_presentation(X: FiniteGraph, A) -> GroupoidPresentation:
    A = list(dict.fromkeys(A))
    if any(a not in set(X.vertices) for a in A):
        raise UsageError("base point outside the graph")
    comps = X.components()
    bases = []
    for comp in comps:
        cs = set(comp)
        mine = [a for a in A if a in cs]
        if not mine:
            raise PreconditionError("a component has no base point", witness=comp[0])
        bases.append(mine[0])
    tree, _, root_of = _spanning_forest(X, bases)
    tset = set(tree)
    gens = tuple(k for k in range(X.E) if k not in tset)
    ranks = {b: 0 for b in bases}
    for k in gens:
        ranks[root_of[X.edges[k][0]]] += 1
    return GroupoidPresentation(tuple(A), tuple(bases), gens, tuple(sorted(tree)), ranks)


# ---------------------------------------------------------------------------
# group actions


@dataclass(frozen=True)
class GroupActionOnGraph:
    graph: FiniteGraph
    vertex_gens: tuple   # permutations of vertex positions
    edge_gens: tuple     # permutations of edge positions

    def __post_init__(self):
        X = self.graph
        if len(self.vertex_gens) != len(self.edge_gens):
            raise UsageError("one edge permutation per generator")
        for pv, pe in zip(self.vertex_gens, self.edge_gens):
            if len(pv) != X.V or not _perm.is_permutation(pv):
                raise UsageError("vertex action is not a permutation")
            if len(pe) != X.E or not _perm.is_permutation(pe):
                raise UsageError("edge action is not a permutation")
        idx = X.index()
        for pv, pe in zip(self.vertex_gens, self.edge_gens):
            for k, (u, v) in enumerate(X.edges):
                img = X.edges[pe[k]]
                want = sorted((pv[idx[u]], pv[idx[v]]))
                if sorted((idx[img[0]], idx[img[1]])) != want:
                    raise UsageError(f"edge action incompatible with vertex action on edge {k}")

    @classmethod
    def from_vertex_maps(cls, X: FiniteGraph, maps) -> "GroupActionOnGraph":
        """Induce edge permutations from vertex maps (parallel edges keep their relative order)."""
        idx = X.index()
        vgens, egens = [], []
        for mp in maps:
            pv = tuple(idx[mp.get(v, v)] for v in X.vertices)
            buckets = {}
            for k, (u, v) in enumerate(X.edges):
                buckets.setdefault(tuple(sorted((idx[u], idx[v]))), []).append(k)
            used = {key: 0 for key in buckets}
            pe = []
            for k, (u, v) in enumerate(X.edges):
                key = tuple(sorted((pv[idx[u]], pv[idx[v]])))
                if key not in buckets or used[key] >= len(buckets[key]):
                    raise UsageError("vertex map does not preserve the edges")
                pe.append(buckets[key][used[key]])
                used[key] += 1
            vgens.append(pv)
            egens.append(tuple(pe))
        return cls(X, tuple(vgens), tuple(egens))

    def _combined(self):
        V = self.graph.V
        return [tuple(pv) + tuple(V + x for x in pe) for pv, pe in zip(self.vertex_gens, self.edge_gens)]

    def elements(self) -> list:
        """Group elements as (vertex perm, edge perm), identity first."""
        V = self.graph.V
        gens = self._combined()
        if not gens:
            gens = [_perm.identity(V + self.graph.E)]
        table = _perm.closure(gens)
        out = sorted(table, key=lambda g: (len(table[g]), table[g]))
        return [(g[:V], tuple(x - V for x in g[V:])) for g in out]

    @property
    def order(self) -> int:
        return len(self.elements())

    def vertex_action_faithful(self) -> bool:
        return len({g[0] for g in self.elements()}) == self.order

    def fixed_witness(self):
        """A non-identity element fixing a vertex or an edge, or None when the action is free."""
        X = self.graph
        for pv, pe in self.elements()[1:]:
            for i, v in enumerate(X.vertices):
                if pv[i] == i:
                    return ("vertex", v, pv)
            for k in range(X.E):
                if pe[k] == k:
                    return ("edge", k, pe)
        return None

    def is_free(self) -> bool:
        return self.fixed_witness() is None


def _require_free(act: GroupActionOnGraph):
    w = act.fixed_witness()
    if w is not None:
        kind, what, g = w
        raise PreconditionError(f"action is not free: a non-identity element fixes {kind} {what!r}",
                                witness={"fixed": kind, "which": what, "element": g})


@dataclass(frozen=True)
class Quotient:
    graph: FiniteGraph
    vproj: dict   # vertex -> orbit vertex
    eproj: tuple  # edge id -> quotient edge id
    orient: tuple = ()  # edge id -> +1 if it runs along its quotient edge, -1 if against


def quotient(X: FiniteGraph, act: GroupActionOnGraph) -> Quotient:
    els = act.elements()
    vorb = {}
    for i, v in enumerate(X.vertices):
        if v in vorb:
            continue
        rep = min((X.vertices[g[0][i]] for g in els), key=lambda x: X.index()[x])
        for g in els:
            vorb[X.vertices[g[0][i]]] = rep
    idx = X.index()
    eorb, orient = {}, {}
    qedges = []
    for k in range(X.E):
        if k in eorb:
            continue
        u, v = X.edges[k]
        qid = len(qedges)
        qedges.append((vorb[u], vorb[v]))
        for pv, pe in els:
            k2 = pe[k]
            if k2 in eorb:
                continue
            eorb[k2] = qid
            gu = X.vertices[pv[idx[u]]]
            orient[k2] = 1 if X.edges[k2][0] == gu else -1
    qverts = [v for v in X.vertices if vorb[v] == v]
    Y = FiniteGraph(tuple(qverts), tuple(qedges))
    return Quotient(Y, vorb, tuple(eorb[k] for k in range(X.E)), tuple(orient[k] for k in range(X.E)))


def quotient_graph(X: FiniteGraph, act: GroupActionOnGraph) -> FiniteGraph:
    _require_free(act)
    return quotient(X, act).graph


# ---------------------------------------------------------------------------
# orbit groupoid versus the quotient


def _walk_tree(parent, x):
    """Oriented edge path from the root of x's tree down to x."""
    path = []
    while parent[x] is not None:
        k, y = parent[x]
        path.append((k, y, x))
        x = y
    path.reverse()
    return path


def _fold_rank(words, base):
    """Stallings folding of a bouquet of closed words (lists of (label, +-1)).

    Returns the folded graph as (vertex count, edge set) with the base vertex 0.
    """
    nxt = 1
    edges = set()
    for w in words:
        cur = 0
        for i, (lab, sgn) in enumerate(w):
            tgt = 0 if i == len(w) - 1 else nxt
            if tgt:
                nxt += 1
            edges.add((cur, lab, tgt) if sgn > 0 else (tgt, lab, cur))
            cur = tgt
    parent = list(range(nxt))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    changed = True
    while changed:
        changed = False
        out_seen, in_seen = {}, {}
        for a, lab, b in list(edges):
            a, b = find(a), find(b)
            for key, other, table in (((a, lab), b, out_seen), ((b, lab), a, in_seen)):
                if key in table and find(table[key]) != find(other):
                    x, y = find(table[key]), find(other)
                    parent[max(x, y)] = min(x, y)
                    changed = True
                table.setdefault(key, other)
        edges = {(find(a), lab, find(b)) for a, lab, b in edges}
    verts = {find(0)} | {a for a, _, _ in edges} | {b for _, _, b in edges}
    return len(verts), edges


@dataclass(frozen=True)
class OrbitGroupoidReport:
    quotient_ranks: tuple     # per quotient component
    orbit_ranks: tuple        # from orbit counts of the presentation of Pi_1(X)
    surjective: tuple         # per quotient component
    ok: bool

    def __bool__(self):
        return self.ok


def orbit_groupoid_check(X: FiniteGraph, act: GroupActionOnGraph, A=None) -> OrbitGroupoidReport:
    """Compare Pi_1(X/G) with the orbit groupoid of Pi_1(X, A) for a free action.

    Quotient side: spanning-forest rank of the quotient graph.  Orbit side:
    (edge orbits) - (vertex orbits) + 1 per orbit of components, read off the
    action on X.  Surjectivity: loops of X/G coming from paths in X between
    base points of one orbit generate all of pi_1 (checked by folding).
    """
    _require_free(act)
    A = list(X.vertices) if A is None else list(A)
    els = act.elements()
    idx = X.index()
    Aset = set(A)
    for pv, _ in els:
        if any(X.vertices[pv[idx[a]]] not in Aset for a in A):
            raise PreconditionError("base set is not G-stable")
    pres_X = pi1_presentation(X, A)  # also checks that A meets every component
    q = quotient(X, act)
    Y = q.graph
    ycomps = Y.components()
    qpres = pi1_presentation(Y, [c[0] for c in ycomps])
    # orbit side
    comp_of = {}
    for ci, comp in enumerate(X.components()):
        for v in comp:
            comp_of[v] = ci
    q_ranks, o_ranks, surj = [], [], []
    tree_x, parent_x, root_x = _spanning_forest(X, pres_X.bases)
    for comp in ycomps:
        cset = set(comp)
        base_q = comp[0]
        q_ranks.append(qpres.ranks[base_q])
        vo = sum(1 for v in Y.vertices if v in cset)
        eo = sum(1 for (u, _) in Y.edges if u in cset)
        o_ranks.append(eo - vo + 1)
        # surjectivity: lift the base, collect paths to its translates in the same component
        a = next(x for x in A if q.vproj[x] in cset)
        words = []
        same = [X.vertices[pv[idx[a]]] for pv, _ in els]
        same = [b for b in same if root_x[b] == root_x[a]]

        def proj_path(path):
            return [(q.eproj[k], q.orient[k] * (1 if X.edges[k][0] == x and X.edges[k][1] == y else -1))
                    for k, x, y in path]

        def tree_path(x, y):
            # x to y through the tree of their component
            up = [(k, b, a_) for k, a_, b in reversed(_walk_tree(parent_x, x))]
            down = _walk_tree(parent_x, y)
            return up + down

        for b in same:
            w = proj_path(tree_path(a, b))
            words.append(w)
        for k in pres_X.generators:
            u, v = X.edges[k]
            if root_x[u] != root_x[a]:
                continue
            words.append(proj_path(tree_path(a, u) + [(k, u, v)] + tree_path(v, a)))
        words = [_reduce(w) for w in words]
        words = [w for w in words if w]
        nv, fe = _fold_rank(words, 0) if words else (1, set())
        # the folded graph immerses into the component; surjective iff it is the whole core
        core_v, core_e = _core(Y, cset, base_q)
        folded_rank = len(fe) - nv + 1
        surj.append(folded_rank == q_ranks[-1] and len(fe) == core_e and nv == core_v)
    ok = q_ranks == o_ranks and all(surj)
    return OrbitGroupoidReport(tuple(q_ranks), tuple(o_ranks), tuple(surj), ok)


def _reduce(word):
    out = []
    for lab, sgn in word:
        if out and out[-1] == (lab, -sgn):
            out.pop()
        else:
            out.append((lab, sgn))
    # cyclic reduction is not wanted: words are based at vertex 0
    return out


def _core(Y: FiniteGraph, cset, base):
    """Vertex and edge counts of the core of a component (hanging trees pruned, base kept)."""
    verts = {v for v in Y.vertices if v in cset}
    edges = [k for k, (u, v) in enumerate(Y.edges) if u in cset]
    deg = {v: 0 for v in verts}
    for k in edges:
        u, v = Y.edges[k]
        deg[u] += 1
        deg[v] += 1
    alive = set(edges)
    changed = True
    while changed:
        changed = False
        for v in list(verts):
            if v != base and deg[v] == 1:
                for k in list(alive):
                    if v in Y.edges[k]:
                        alive.discard(k)
                        a, b = Y.edges[k]
                        deg[a] -= 1
                        deg[b] -= 1
                verts.discard(v)
                changed = True
            elif v != base and deg[v] == 0:
                verts.discard(v)
                changed = True
    if deg.get(base, 0) == 0 and not alive:
        return 1, 0
    # a base vertex of degree one on a hanging path stays; prune the path down to it
    return len(verts), len(alive)


# ---------------------------------------------------------------------------
# van Kampen


@dataclass(frozen=True)
class VanKampenResult:
    presentation: GroupoidPresentation
    rank_1: int
    rank_2: int
    rank_0: int
    correction: int
    rank_direct: int

    @property
    def agrees(self) -> bool:
        return self.rank_1 + self.rank_2 - self.rank_0 + self.correction == self.rank_direct \
            and self.presentation.rank == self.rank_direct


def van_kampen_pushout(X: FiniteGraph, E1, E2, A, V1=(), V2=()) -> VanKampenResult:
    """Assemble Pi_1(X, A) from two subgraphs (edge ids E1, E2 of X plus extra vertices).

    Spanning forests are chosen compatibly: one for the intersection, extended
    to each piece.  Edges of the union of the two forests that close a cycle
    (possible when the intersection is disconnected) become extra free
    generators; their number is the correction term.
    """
    E1, E2 = sorted(set(E1)), sorted(set(E2))
    vs1 = set(V1) | {x for k in E1 for x in X.edges[k]}
    vs2 = set(V2) | {x for k in E2 for x in X.edges[k]}
    if set(E1) | set(E2) != set(range(X.E)) or vs1 | vs2 != set(X.vertices):
        raise PreconditionError("the two pieces do not cover the graph")
    E0 = sorted(set(E1) & set(E2))
    vs0 = vs1 & vs2
    order = X.index()

    def sub(es, vs):
        return FiniteGraph(tuple(sorted(vs, key=order.get)), tuple(X.edges[k] for k in es))

    X1, X2, X0 = sub(E1, vs1), sub(E2, vs2), sub(E0, vs0)
    A = list(dict.fromkeys(A))
    for Y in (X1, X2, X0):
        for comp in Y.components():
            if not set(comp) & set(A):
                raise PreconditionError("a piece has a component without base point", witness=comp[0])
    # compatible forests
    t0, _, _ = _spanning_forest(X0, [a for a in A if a in vs0])
    t0 = {E0[k] for k in t0}

    def extend(es, vs, start):
        parent = {v: v for v in vs}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        tree = []
        for k in sorted(start) + [k for k in es if k not in start]:
            u, v = X.edges[k]
            a, b = find(u), find(v)
            if a != b:
                parent[a] = b
                tree.append(k)
        return set(tree)

    t1 = extend(E1, vs1, t0)
    t2 = extend(E2, vs2, t0)
    union = extend(range(X.E), set(X.vertices), sorted(t1 | t2))
    closing = sorted((t1 | t2) - union)
    gens = sorted(set(E1) - t1 | set(E2) - t2 | set(closing))
    r1, r2, r0 = cycle_rank(X1), cycle_rank(X2), cycle_rank(X0)
    corr = len(X.components()) - len(X1.components()) - len(X2.components()) + len(X0.components())
    _, _, root_of = _spanning_forest(X, [a for a in A])
    bases = []
    for comp in X.components():
        bases.append(next(a for a in A if a in set(comp)))
    ranks = {b: 0 for b in bases}
    base_of = {}
    for comp, b in zip(X.components(), bases):
        for v in comp:
            base_of[v] = b
    for k in gens:
        ranks[base_of[X.edges[k][0]]] += 1
    pres = GroupoidPresentation(tuple(A), tuple(bases), tuple(gens), tuple(sorted(union)), ranks,
                                relations=tuple(("amalgamate", k) for k in sorted(set(E0) - t0)))
    return VanKampenResult(pres, r1, r2, r0, corr, cycle_rank(X))


# ---------------------------------------------------------------------------
# the path-lifting conditions (discrete shadow)


@dataclass(frozen=True)
class ClubsuitReport:
    free: bool
    walks: int
    lifting: bool             # every walk lifted from every preimage of its start
    homotopy_pairs: int
    stabilizer_relates: bool  # lifts of homotopic walks related by a stabiliser element
    note: str = "discrete shadow: walks for paths, free reduction for homotopy"

    def __str__(self):
        return (f"[{self.note}] free={self.free} walks={self.walks} lifting={self.lifting} "
                f"homotopic pairs={self.homotopy_pairs} stabiliser relates lifts={self.stabilizer_relates}")


def _lift(X, q, walk_q, start, rng):
    """Lift a walk of signed quotient edges (qedge, sign, from, to) starting at a vertex of X.

    Returns signed edges (k, sign, from, to) of X; sign +1 runs from the first
    endpoint of the edge to the second.
    """
    path = []
    x = start
    for qe, sg, _, b in walk_q:
        cand = []
        for k, (u, v) in enumerate(X.edges):
            if q.eproj[k] != qe:
                continue
            eff = sg * q.orient[k]
            src, dst = (u, v) if eff > 0 else (v, u)
            if src == x and q.vproj[dst] == b:
                cand.append((k, eff, src, dst))
        if not cand:
            return None
        step = rng.choice(cand)
        path.append(step)
        x = step[3]
    return path


def _reduce_path(path):
    out = []
    for k, sg, a, b in path:
        if out and out[-1][:2] == (k, -sg):
            out.pop()
        else:
            out.append((k, sg, a, b))
    return out


def check_clubsuit(X: FiniteGraph, act: GroupActionOnGraph, walks: int = 50, length: int = 8,
                   seed: int = 0) -> ClubsuitReport:
    rng = random.Random(seed)
    q = quotient(X, act)
    Y = q.graph
    els = act.elements()
    idx = X.index()
    inc = {v: [] for v in Y.vertices}
    for k, (u, v) in enumerate(Y.edges):
        inc[u].append((k, 1, u, v))
        inc[v].append((k, -1, v, u))
    lifting = True
    relates = True
    pairs = 0
    for _ in range(walks):
        s0 = rng.choice(list(Y.vertices))
        w = []
        x = s0
        for _ in range(rng.randint(0, length)):
            if not inc[x]:
                break
            step = rng.choice(inc[x])
            w.append(step)
            x = step[3]
        # a homotopic variant: insert a backtrack somewhere
        w2 = list(w)
        pos = rng.randint(0, len(w))
        at = s0 if pos == 0 else w[pos - 1][3]
        if inc[at]:
            k, sg, a, b = rng.choice(inc[at])
            w2[pos:pos] = [(k, sg, a, b), (k, -sg, b, a)]
        starts = [v for v in X.vertices if q.vproj[v] == s0]
        for st in starts:
            l1 = _lift(X, q, w, st, rng)
            l2 = _lift(X, q, w2, st, rng)
            if l1 is None or l2 is None:
                lifting = False
                continue
            pairs += 1
            r1 = _reduce_path(l1)
            r2 = [(k, sg, a, b) for k, sg, a, b in _reduce_path(l2)]
            ok = False
            for pv, pe in els:
                if X.vertices[pv[idx[st]]] != st:
                    continue
                img = []
                for k, sg, a, b in r1:
                    ga, gb = X.vertices[pv[idx[a]]], X.vertices[pv[idx[b]]]
                    k2 = pe[k]
                    flip = 1 if X.edges[k2][0] == X.vertices[pv[idx[X.edges[k][0]]]] else -1
                    img.append((k2, sg * flip, ga, gb))
                if img == r2:
                    ok = True
                    break
            relates = relates and ok
    return ClubsuitReport(act.is_free(), walks, lifting, pairs, relates)


# ---------------------------------------------------------------------------
# instances


def cycle_graph(m: int) -> FiniteGraph:
    return FiniteGraph(tuple(range(m)), tuple((i, (i + 1) % m) for i in range(m)))


def rotation_action(m: int, step: int) -> GroupActionOnGraph:
    X = cycle_graph(m)
    return GroupActionOnGraph.from_vertex_maps(X, [{i: (i + step) % m for i in range(m)}])


def two_triangles() -> tuple[FiniteGraph, GroupActionOnGraph]:
    X = FiniteGraph(tuple(range(6)), ((0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)))
    act = GroupActionOnGraph.from_vertex_maps(X, [{0: 3, 1: 4, 2: 5, 3: 0, 4: 1, 5: 2}])
    return X, act


def fixed_vertex_example() -> tuple[FiniteGraph, GroupActionOnGraph]:
    """A path a - v - b with Z/2 swapping the ends and fixing v."""
    X = FiniteGraph(("a", "v", "b"), (("a", "v"), ("v", "b")))
    act = GroupActionOnGraph.from_vertex_maps(X, [{"a": "b", "b": "a"}])
    return X, act


_SMALL_GROUPS = {
    # name -> generators as permutations of the group's own elements (regular representation)
    "Z1": [(0,)],
    "Z2": [(1, 0)],
    "Z3": [(1, 2, 0)],
    "Z4": [(1, 2, 3, 0)],
    "Z5": [(1, 2, 3, 4, 0)],
    "Z6": [(1, 2, 3, 4, 5, 0)],
    "Z2xZ2": [(1, 0, 3, 2), (2, 3, 0, 1)],
    # S3 acting on itself: elements 0..5 = e, r, r^2, f, fr, fr^2
    "S3": [(1, 2, 0, 5, 3, 4), (3, 4, 5, 0, 1, 2)],
}


def _regular(name):
    gens = _SMALL_GROUPS[name]
    elems = sorted(_perm.closure(gens))
    # index each element by where it sends 0 (regular action is simply transitive)
    by_img = {g[0]: g for g in elems}
    return [by_img[i] for i in range(len(elems))]


def random_free_action(rng: random.Random, max_order: int = 6, max_vertices: int = 30):
    """A random derived graph (voltage construction) with its free deck action.

    Base graph B with k vertices and random edges labelled by group elements;
    X has vertices (u, g) and, for each base edge e = (u, v) with label h and
    each g, an edge (u, g) - (v, g h).  The group acts by left translation.
    """
    names = [nm for nm in _SMALL_GROUPS if len(_regular(nm)) <= max_order]
    name = rng.choice(names)
    G = _regular(name)  # G[i] is left multiplication by element i, as a permutation of 0..m-1
    m = len(G)
    k = rng.randint(1, max(1, max_vertices // m))
    n_edges = rng.randint(max(0, k - 1), k + 4)
    base_edges = []
    for _ in range(n_edges):
        u, v = rng.randrange(k), rng.randrange(k)
        base_edges.append((u, v, rng.randrange(m)))

    def mul(a, b):
        return G[a][b]

    verts = [(u, g) for u in range(k) for g in range(m)]
    edges = []
    for u, v, h in base_edges:
        for g in range(m):
            edges.append(((u, g), (v, mul(g, h))))
    X = FiniteGraph(tuple(verts), tuple(edges))
    idx = X.index()
    gens = _SMALL_GROUPS[name]
    vgens, egens = [], []
    eid = {}
    for j, (u, v, h) in enumerate(base_edges):
        for g in range(m):
            eid[(j, g)] = j * m + g
    for gen in gens:
        a = gen[0]  # the generator is left multiplication by element a
        vgens.append(tuple(idx[(u, mul(a, g))] for u, g in verts))
        egens.append(tuple(eid[(j, mul(a, g))] for j in range(len(base_edges)) for g in range(m)))
    return X, GroupActionOnGraph(X, tuple(vgens), tuple(egens)), name


# ---------------------------------------------------------------------------
# file formats


def parse_graph(text: str) -> FiniteGraph:
    """``u v`` per line; a line with one token declares an isolated vertex; ``#`` comments."""
    edges, verts = [], []
    for ln, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if len(tok) == 1:
            verts.append(tok[0])
        elif len(tok) == 2:
            edges.append((tok[0], tok[1]))
        else:
            raise UsageError(f"graph line {ln}: expected 'u v'")
    return FiniteGraph.from_edges(edges, verts)


def parse_action(text: str, X: FiniteGraph) -> GroupActionOnGraph:
    """One generator per line, as ``u:v`` vertex images (unlisted vertices are fixed)."""
    maps = []
    names = set(X.vertices)
    for ln, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        mp = {}
        for tok in line.split():
            if ":" not in tok:
                raise UsageError(f"action line {ln}: expected u:v pairs")
            a, b = tok.split(":", 1)
            if a not in names or b not in names:
                raise UsageError(f"action line {ln}: unknown vertex")
            mp[a] = b
        if sorted(mp.values()) != sorted(mp):
            raise UsageError(f"action line {ln}: not a permutation")
        maps.append(mp)
    return GroupActionOnGraph.from_vertex_maps(X, maps)


def format_graph(X: FiniteGraph) -> str:
    used = {x for e in X.edges for x in e}
    lines = [f"{v}" for v in X.vertices if v not in used]
    lines += [f"{u} {v}" for u, v in X.edges]
    return "\n".join(lines) + "\n"
