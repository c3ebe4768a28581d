"""Chord diagrams: two-coloured embedded forests in a disc with 4n boundary leaves.

A diagram is stored combinatorially.  Edges carry a colour and two ends,
each end being ``("leaf", k)`` or ``("node", i)``.  Every inner node keeps the
counterclockwise cyclic list of its incident edge ends ``(edge_id, end)``;
together these lists form the rotation system.
"""
from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass

from .errors import DiagramError, UsageError
from .webtrace import Color, NodeKind, Web, slot_color

LEAF = "leaf"
NODE = "node"


@dataclass(frozen=True)
class DNode:
    kind: NodeKind
    cyclic: tuple  # ((edge_id, end_index), ...) counterclockwise

    @property
    def valency(self) -> int:
        return len(self.cyclic)


@dataclass(frozen=True)
class DEdge:
    color: Color
    ends: tuple  # two of ("leaf", k) / ("node", i)


@dataclass(frozen=True, eq=False)
class ChordDiagram:
    n: int
    nodes: tuple
    edges: tuple
    source: str | None = None

    def __post_init__(self):
        validate(self)

    @property
    def num_leaves(self) -> int:
        return 4 * self.n

    def leaf_colors(self):
        return [slot_color(k) for k in range(4 * self.n)]

    def code(self) -> str:
        return canonical_form(self)

    def __eq__(self, other):
        return isinstance(other, ChordDiagram) and self.code() == other.code()

    def __hash__(self):
        return hash(self.code())

    def leaf_edge(self, k: int) -> int:
        for i, e in enumerate(self.edges):
            if (LEAF, k) in e.ends:
                return i
        raise DiagramError(f"leaf {k} has no edge")

    def node_kinds(self):
        return [nd.kind for nd in self.nodes]


# ---------------------------------------------------------------------------
# validation


def _uf_find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def _acyclic(vertices, pairs) -> bool:
    parent = {v: v for v in vertices}
    for a, b in pairs:
        ra, rb = _uf_find(parent, a), _uf_find(parent, b)
        if ra == rb:
            return False
        parent[ra] = rb
    return True


def _count_faces(darts_next) -> int:
    seen = set()
    faces = 0
    for d in darts_next:
        if d in seen:
            continue
        faces += 1
        while d not in seen:
            seen.add(d)
            d = darts_next[d]
    return faces


def genus_with_boundary(d: "ChordDiagram") -> int:
    """Genus of the rotation system after closing the leaves into a boundary cycle."""
    L = 4 * d.n
    # vertex ids: ("leaf", k) / ("node", i); darts are (edge_key, side)
    rot = {}
    for i, nd in enumerate(d.nodes):
        rot[(NODE, i)] = [("e", eid, end) for eid, end in nd.cyclic]
    for k in range(L):
        eid = None
        end = None
        for j, e in enumerate(d.edges):
            for s, ref in enumerate(e.ends):
                if ref == (LEAF, k):
                    eid, end = j, s
        # counterclockwise at a boundary point: towards k+1, inward, towards k-1
        rot[(LEAF, k)] = [("b", k, 0), ("e", eid, end), ("b", (k - 1) % L, 1)]
    # dart ("e", eid, end) starts at ends[end]; ("b", k, 0) runs k -> k+1, ("b", k, 1) the reverse
    def head(dart):
        if dart[0] == "e":
            return d.edges[dart[1]].ends[1 - dart[2]]
        k, side = dart[1], dart[2]
        return (LEAF, (k + 1) % L) if side == 0 else (LEAF, k)

    def reverse(dart):
        return (dart[0], dart[1], 1 - dart[2])

    pos = {}
    for v, lst in rot.items():
        for idx, dart in enumerate(lst):
            pos[dart] = (v, idx)
    nxt = {}
    for dart in pos:
        r = reverse(dart)
        v, idx = pos[r]
        lst = rot[v]
        nxt[dart] = lst[(idx + 1) % len(lst)]
    V = len(rot)
    E = len(d.edges) + L
    F = _count_faces(nxt)
    chi = V - E + F
    return (2 - chi) // 2


def validate(d: ChordDiagram) -> None:
    """Raise DiagramError naming the first violated invariant."""
    n = d.n
    if not isinstance(n, int) or n < 1:
        raise DiagramError("degree must be a positive integer")
    L = 4 * n
    leaf_use = [0] * L
    node_ends = {}
    for j, e in enumerate(d.edges):
        if len(e.ends) != 2:
            raise DiagramError(f"edge {j} does not have two ends")
        for s, ref in enumerate(e.ends):
            if ref[0] == LEAF:
                k = ref[1]
                if not 0 <= k < L:
                    raise DiagramError(f"edge {j} ends at missing leaf {k}")
                leaf_use[k] += 1
                if slot_color(k) is not e.color:
                    raise DiagramError(f"leaf colour: {e.color.value} edge {j} at leaf {k}")
            elif ref[0] == NODE:
                if not 0 <= ref[1] < len(d.nodes):
                    raise DiagramError(f"edge {j} ends at missing node {ref[1]}")
                node_ends.setdefault(ref[1], []).append((j, s))
            else:
                raise DiagramError(f"edge {j}: bad end {ref!r}")
    bad = [k for k in range(L) if leaf_use[k] != 1]
    if bad:
        raise DiagramError(f"leaf count: leaves {bad} are not of degree 1")
    for i, nd in enumerate(d.nodes):
        if sorted(nd.cyclic) != sorted(node_ends.get(i, [])):
            raise DiagramError(f"rotation system: node {i} cyclic list disagrees with edges")
        v = nd.valency
        if v < 4 or v % 2:
            raise DiagramError(f"valency: node {i} has valency {v}")
        cols = [d.edges[eid].color for eid, _ in nd.cyclic]
        if nd.kind is NodeKind.ROOT:
            if v != 4 or any(cols[t] is cols[(t + 1) % 4] for t in range(4)):
                raise DiagramError(f"root alternation: node {i} is not RE/IM alternating of valency 4")
        elif len(set(cols)) != 1:
            raise DiagramError(f"critical colour: node {i} mixes colours")
    verts = [(LEAF, k) for k in range(L)] + [(NODE, i) for i in range(len(d.nodes))]
    if not _acyclic(verts, [e.ends for e in d.edges]):
        raise DiagramError("forest: the diagram contains a cycle")
    if genus_with_boundary(d) != 0:
        raise DiagramError("planarity: rotation system does not embed in the disc")


# ---------------------------------------------------------------------------
# construction


def from_graph(n: int, kinds, edges, source=None) -> ChordDiagram:
    """Build a diagram from an abstract forest, deriving the rotation system.

    ``edges`` is a list of ``(color, end_a, end_b)``.  In a planar forest whose
    leaves sit on the circle, the branches at a node reach contiguous arcs of
    leaves, so sorting branches by their smallest leaf gives the ccw order.
    """
    L = 4 * n
    adj = {}
    for j, (_, a, b) in enumerate(edges):
        adj.setdefault(a, []).append((j, 0, b))
        adj.setdefault(b, []).append((j, 1, a))
    verts = [(LEAF, k) for k in range(L)] + [(NODE, i) for i in range(len(kinds))]
    if not _acyclic(verts, [(a, b) for _, a, b in edges]):
        raise DiagramError("forest: the diagram contains a cycle")

    def branch_min(start, came_from):
        best = L
        stack = [(start, came_from)]
        while stack:
            v, prev = stack.pop()
            if v[0] == LEAF:
                best = min(best, v[1])
                continue
            for _, _, w in adj.get(v, []):
                if w != prev:
                    stack.append((w, v))
        return best

    nodes = []
    for i, kind in enumerate(kinds):
        v = (NODE, i)
        inc = [(branch_min(w, v), j, end) for j, end, w in adj.get(v, [])]
        inc.sort()
        nodes.append(DNode(NodeKind(kind), tuple((j, end) for _, j, end in inc)))
    dedges = tuple(DEdge(Color(c), (tuple(a), tuple(b))) for c, a, b in edges)
    return ChordDiagram(n, tuple(nodes), dedges, source)


def web_to_diagram(w: Web) -> ChordDiagram:
    """Forget the geometry of a traced web."""
    edges = []
    for c in w.curves:
        ends = []
        for ref in c.endpoints:
            if ref[0] == "leaf":
                ends.append((LEAF, int(ref[1])))
            else:
                ends.append((NODE, int(ref[1])))
        edges.append(DEdge(c.color, tuple(ends)))
    nodes = tuple(DNode(nd.kind, tuple(nd.incidences)) for nd in w.nodes)
    src = w.source.to_text() if w.source is not None else None
    return ChordDiagram(w.n, nodes, tuple(edges), src)


def relabel(d: ChordDiagram, leaf_map, swap_colors=False, reverse=False) -> ChordDiagram:
    """Apply a boundary symmetry: leaf k goes to leaf_map(k).

    ``reverse`` flips every cyclic order (orientation-reversing maps).
    """
    def col(c):
        return c.other if swap_colors else c

    edges = tuple(
        DEdge(col(e.color), tuple((LEAF, leaf_map(r[1])) if r[0] == LEAF else r for r in e.ends))
        for e in d.edges)
    nodes = tuple(DNode(nd.kind, tuple(reversed(nd.cyclic)) if reverse else nd.cyclic)
                  for nd in d.nodes)
    return ChordDiagram(d.n, nodes, edges, None)


# ---------------------------------------------------------------------------
# canonical code

_KIND = {NodeKind.ROOT: "R", NodeKind.CRITICAL: "C"}
_KIND_INV = {v: k for k, v in _KIND.items()}
_COL = {Color.RE: "r", Color.IM: "i"}
_COL_INV = {v: k for k, v in _COL.items()}


def canonical_form(d: ChordDiagram) -> str:
    """Breadth-first code from leaf 0 over the rotation system.

    Nodes are numbered in discovery order and each node's cyclic list is
    written starting from the edge it was discovered through, so the code is
    independent of internal node ids.
    """
    L = 4 * d.n
    leaf_edge = {}
    for j, e in enumerate(d.edges):
        for s, ref in enumerate(e.ends):
            if ref[0] == LEAF:
                leaf_edge[ref[1]] = (j, s)
    new_id = {}
    entry = {}
    queue = deque()

    def target(j, s):
        ref = d.edges[j].ends[1 - s]
        if ref[0] == LEAF:
            return f"L{ref[1]}"
        if ref[1] not in new_id:
            new_id[ref[1]] = len(new_id)
            entry[ref[1]] = (j, 1 - s)
            queue.append(ref[1])
        return f"N{new_id[ref[1]]}"

    leaf_part = []
    for k in range(L):
        j, s = leaf_edge[k]
        leaf_part.append(target(j, s))
    node_part = []
    while queue:
        v = queue.popleft()
        cyc = list(d.nodes[v].cyclic)
        start = cyc.index(entry[v])
        cyc = cyc[start:] + cyc[:start]
        items = [f"{_COL[d.edges[j].color]}{target(j, s)}" for j, s in cyc]
        node_part.append(f"{_KIND[d.nodes[v].kind]}({' '.join(items)})")
    if len(new_id) != len(d.nodes):
        raise DiagramError("node not reachable from any leaf")
    return f"H{d.n}|{' '.join(leaf_part)}|{';'.join(node_part)}"


_CODE_RE = re.compile(r"^H(\d+)\|([^|]*)\|(.*)$")


def parse_code(code: str) -> ChordDiagram:
    """Inverse of canonical_form; edges come out in canonical order."""
    m = _CODE_RE.match(code.strip())
    if not m:
        raise UsageError(f"not a diagram code: {code!r}")
    n = int(m.group(1))
    leaf_targets = m.group(2).split()
    if len(leaf_targets) != 4 * n:
        raise UsageError("code has the wrong number of leaves")
    node_specs = []
    if m.group(3):
        for part in m.group(3).split(";"):
            pm = re.fullmatch(r"([RC])\((.*)\)", part)
            if not pm:
                raise UsageError(f"bad node in code: {part!r}")
            items = [(_COL_INV[t[0]], t[1:]) for t in pm.group(2).split()]
            node_specs.append((_KIND_INV[pm.group(1)], items))

    def ref(tok):
        return (LEAF, int(tok[1:])) if tok[0] == "L" else (NODE, int(tok[1:]))

    edges = []
    slots = [[None] * len(items) for _, items in node_specs]
    edge_at = {}
    for k, tok in enumerate(leaf_targets):
        other = ref(tok)
        if other[0] == LEAF:
            if other[1] > k:
                edges.append(DEdge(slot_color(k), ((LEAF, k), other)))
            continue
        edges.append(DEdge(slot_color(k), ((LEAF, k), other)))
        edge_at[(other[1], f"L{k}")] = (len(edges) - 1, 1)
    for v, (_, items) in enumerate(node_specs):
        for idx, (col, tok) in enumerate(items):
            key = (v, tok)
            if key in edge_at:
                slots[v][idx] = edge_at.pop(key)
                if edges[slots[v][idx][0]].color is not col:
                    raise UsageError("colour mismatch in code")
                continue
            other = ref(tok)
            if other[0] != NODE:
                raise UsageError(f"dangling leaf reference {tok} at node {v}")
            edges.append(DEdge(col, ((NODE, v), other)))
            slots[v][idx] = (len(edges) - 1, 0)
            edge_at[(other[1], f"N{v}")] = (len(edges) - 1, 1)
    if edge_at:
        raise UsageError("unmatched edge references in code")
    nodes = tuple(DNode(kind, tuple(s)) for (kind, _), s in zip(node_specs, slots))
    return ChordDiagram(n, nodes, tuple(edges))


def canonicalize(d: ChordDiagram) -> ChordDiagram:
    out = parse_code(canonical_form(d))
    if d.source is not None:
        out = ChordDiagram(out.n, out.nodes, out.edges, d.source)
    return out


# ---------------------------------------------------------------------------
# derived views


@dataclass(frozen=True)
class ColorForest:
    """Single-colour restriction, with valency-2 ROOT nodes smoothed away."""

    n: int
    color: Color
    leaves: tuple   # the 2n slot indices of this colour
    nodes: tuple    # valency of each surviving critical node
    edges: tuple    # ((kind, id), (kind, id)) in slot indices / node ids

    def is_matching(self) -> bool:
        return not self.nodes and len(self.edges) == len(self.leaves) // 2

    def chords(self):
        """Chords as sorted pairs of subcircle positions 0..2n-1 (matching only)."""
        if not self.is_matching():
            raise DiagramError("forest is not a perfect matching")
        pos = {k: i for i, k in enumerate(self.leaves)}
        return tuple(sorted(tuple(sorted((pos[a[1]], pos[b[1]]))) for a, b in self.edges))

    def components(self) -> int:
        verts = [(LEAF, k) for k in self.leaves] + [(NODE, i) for i in range(len(self.nodes))]
        parent = {v: v for v in verts}
        for a, b in self.edges:
            ra, rb = _uf_find(parent, a), _uf_find(parent, b)
            if ra != rb:
                parent[ra] = rb
        return len({_uf_find(parent, v) for v in verts})


def single_color_forest(d: ChordDiagram, c: Color) -> ColorForest:
    color = Color(c)
    keep = [j for j, e in enumerate(d.edges) if e.color is color]
    # ROOT nodes become valency 2 in one colour: splice their two edges
    parent = {j: j for j in keep}
    crit = {}
    for i, nd in enumerate(d.nodes):
        mine = [eid for eid, _ in nd.cyclic if d.edges[eid].color is color]
        if not mine:
            continue
        if nd.kind is NodeKind.ROOT:
            a, b = _uf_find(parent, mine[0]), _uf_find(parent, mine[1])
            parent[a] = b
        else:
            crit[i] = len(crit)
    groups = {}
    for j in keep:
        groups.setdefault(_uf_find(parent, j), []).append(j)
    edges = []
    for js in groups.values():
        outer = []
        for j in js:
            for ref in d.edges[j].ends:
                if ref[0] == LEAF:
                    outer.append(ref)
                elif ref[1] in crit:
                    outer.append((NODE, crit[ref[1]]))
        if len(outer) != 2:
            raise DiagramError("single-colour restriction is not a forest of paths")
        edges.append(tuple(sorted(outer, key=lambda r: (r[0] != LEAF, r[1]))))
    edges.sort(key=lambda e: (e[0][0] != LEAF, e[0][1], e[1][0] != LEAF, e[1][1]))
    valencies = tuple(d.nodes[i].valency for i in sorted(crit, key=crit.get))
    leaves = tuple(k for k in range(4 * d.n) if slot_color(k) is color)
    return ColorForest(d.n, color, leaves, valencies, tuple(edges))


def is_generic(d: ChordDiagram) -> bool:
    if any(nd.kind is not NodeKind.ROOT for nd in d.nodes):
        return False
    return all(single_color_forest(d, c).is_matching() for c in Color)


def num_components(d: ChordDiagram) -> int:
    verts = [(LEAF, k) for k in range(4 * d.n)] + [(NODE, i) for i in range(len(d.nodes))]
    parent = {v: v for v in verts}
    for e in d.edges:
        a, b = e.ends
        ra, rb = _uf_find(parent, a), _uf_find(parent, b)
        if ra != rb:
            parent[ra] = rb
    return len({_uf_find(parent, v) for v in verts})


def degree1_diagram() -> ChordDiagram:
    """Diagram of z - c: one IM and one RE chord crossing at a root."""
    return from_graph(1, [NodeKind.ROOT], [
        (Color.IM, (LEAF, 0), (NODE, 0)), (Color.RE, (LEAF, 1), (NODE, 0)),
        (Color.IM, (LEAF, 2), (NODE, 0)), (Color.RE, (LEAF, 3), (NODE, 0))])


def real_locus_diagram(n: int) -> ChordDiagram:
    """Diagram of a polynomial with n distinct real roots.

    The real axis is a zero curve of the imaginary part running from leaf 0
    to leaf 2n through the roots and the n-1 real critical points between
    them; through each root passes a curve of the real part, and through
    each critical point a second curve of the imaginary part.
    """
    if n < 1:
        raise UsageError("n must be positive")
    L = 4 * n
    kinds = []
    # along the axis from the right: root_0, crit_0, root_1, ..., root_{n-1}
    axis = []
    for i in range(n):
        axis.append(len(kinds))
        kinds.append(NodeKind.ROOT)
        if i < n - 1:
            axis.append(len(kinds))
            kinds.append(NodeKind.CRITICAL)
    edges = []
    chain = [(LEAF, 0)] + [(NODE, v) for v in axis] + [(LEAF, 2 * n)]
    for a, b in zip(chain, chain[1:]):
        edges.append((Color.IM, a, b))
    for i in range(n):
        r = (NODE, axis[2 * i])
        edges.append((Color.RE, (LEAF, 2 * i + 1), r))
        edges.append((Color.RE, r, (LEAF, L - 1 - 2 * i)))
    for i in range(n - 1):
        c = (NODE, axis[2 * i + 1])
        edges.append((Color.IM, (LEAF, 2 * (i + 1)), c))
        edges.append((Color.IM, c, (LEAF, L - 2 * (i + 1))))
    return from_graph(n, kinds, edges)


# ---------------------------------------------------------------------------
# interchange


def to_dict(d: ChordDiagram) -> dict:
    c = canonicalize(d)
    def end(ref):
        return {"leaf": ref[1]} if ref[0] == LEAF else {"node": ref[1]}
    out = {
        "n": c.n,
        "leaves": [{"index": k, "color": slot_color(k).value} for k in range(4 * c.n)],
        "nodes": [{"id": i, "kind": nd.kind.value, "cyclic": [[eid, end_] for eid, end_ in nd.cyclic]}
                  for i, nd in enumerate(c.nodes)],
        "edges": [{"id": j, "color": e.color.value, "ends": [end(r) for r in e.ends]}
                  for j, e in enumerate(c.edges)],
    }
    if d.source is not None:
        out["source_polynomial"] = d.source
    return out


def from_dict(obj: dict) -> ChordDiagram:
    try:
        n = int(obj["n"])
        for lf in obj["leaves"]:
            if Color(lf["color"]) is not slot_color(int(lf["index"])):
                raise DiagramError(f"leaf {lf['index']} has the wrong colour")
        if len(obj["leaves"]) != 4 * n:
            raise DiagramError("leaf count: wrong number of leaves")
        ids = {int(nd["id"]): i for i, nd in enumerate(obj["nodes"])}
        eids = {int(e["id"]): j for j, e in enumerate(obj["edges"])}
        nodes = tuple(DNode(NodeKind(nd["kind"]),
                            tuple((eids[int(a)], int(b)) for a, b in nd["cyclic"]))
                      for nd in obj["nodes"])

        def ref(x):
            if "leaf" in x:
                return (LEAF, int(x["leaf"]))
            return (NODE, ids[int(x["node"])])
        edges = tuple(DEdge(Color(e["color"]), tuple(ref(x) for x in e["ends"])) for e in obj["edges"])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DiagramError):
            raise
        raise UsageError(f"malformed diagram object: {exc}") from exc
    return ChordDiagram(n, nodes, edges, obj.get("source_polynomial"))


def dumps(d: ChordDiagram) -> str:
    return json.dumps(to_dict(d), indent=1) + "\n"


def loads(text: str) -> ChordDiagram:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"not a diagram file: {exc}") from exc
    return from_dict(obj)


def dumps_list(ds) -> str:
    """A list of interchange objects, in the given order."""
    return json.dumps([to_dict(d) for d in ds], indent=1) + "\n"


def loads_list(text: str) -> list[ChordDiagram]:
    try:
        objs = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"not a diagram list: {exc}") from exc
    if not isinstance(objs, list):
        raise UsageError("not a diagram list")
    return [from_dict(o) for o in objs]
