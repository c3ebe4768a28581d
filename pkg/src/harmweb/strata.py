"""Generic strata, merges of level curves, parenthesised words, dissipation.

Letters name the curves of one colour (IM unless asked otherwise) of the
base diagram, in counterclockwise order of their first leaf.  Merging a run
of adjacent groups of curves at one new critical point adds one parenthesis
pair around their letters; a diagram reached by merges is therefore encoded
by a parenthesised word.
"""
from __future__ import annotations

import copy
import itertools
import math
import string
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import poly as _poly
from .diagram import (LEAF, NODE, ChordDiagram, DNode, canonical_form, from_graph,
                      is_generic, single_color_forest)
from .errors import DiagramError, NumericalError, UsageError
from .poly import MonicPolynomial
from .webtrace import Color, NodeKind, TraceParams

LETTERS = string.ascii_lowercase


def catalan(m: int) -> int:
    return math.comb(2 * m, m) // (m + 1)


# ---------------------------------------------------------------------------
# noncrossing matchings


@dataclass(frozen=True)
class NoncrossingMatching:
    m: int
    pairs: tuple  # sorted (a, b) with a < b, points 0..2m-1

    def __post_init__(self):
        pts = sorted(x for p in self.pairs for x in p)
        if pts != list(range(2 * self.m)) or any(a >= b for a, b in self.pairs):
            raise DiagramError("not a perfect matching of 2m points")
        for a, b in self.pairs:
            for c, d in self.pairs:
                if a < c < b < d:
                    raise DiagramError(f"chords {(a, b)} and {(c, d)} cross")

    def partner(self, x: int) -> int:
        for a, b in self.pairs:
            if x == a:
                return b
            if x == b:
                return a
        raise KeyError(x)


@lru_cache(maxsize=None)
def _matchings(m: int):
    # point 0 pairs with 2k+1; inside and outside are independent
    if m == 0:
        return [()]
    out = []
    for k in range(m):
        for inner in _matchings(k):
            shifted_in = tuple((a + 1, b + 1) for a, b in inner)
            for outer in _matchings(m - 1 - k):
                off = 2 * k + 2
                out.append(((0, 2 * k + 1),) + shifted_in + tuple((a + off, b + off) for a, b in outer))
    return out


def noncrossing_matchings(m: int) -> list[NoncrossingMatching]:
    if not 1 <= m <= 12:
        raise UsageError("m must lie in 1..12")
    return [NoncrossingMatching(m, tuple(sorted(p))) for p in _matchings(m)]


# ---------------------------------------------------------------------------
# generic diagrams


def _interleave(p, q) -> bool:
    a, b = p
    c, d = q
    return (a < c < b) != (a < d < b)


def _superpose(n: int, im_pairs, re_pairs) -> ChordDiagram | None:
    crossings = [(i, j) for i, p in enumerate(im_pairs) for j, q in enumerate(re_pairs) if _interleave(p, q)]
    if len(crossings) != n:
        return None
    edges = []
    for node, (i, j) in enumerate(crossings):
        for color, (a, b) in ((Color.IM, im_pairs[i]), (Color.RE, re_pairs[j])):
            edges.append((color, (LEAF, a), (NODE, node)))
            edges.append((color, (NODE, node), (LEAF, b)))
    return from_graph(n, [NodeKind.ROOT] * n, edges)


def enumerate_generic(n: int) -> list[ChordDiagram]:
    """Every generic diagram of degree n, sorted by canonical code.

    A pair (IM matching on the even leaves, RE matching on the odd leaves)
    qualifies when the chords cross exactly n times; each crossing is a root.
    """
    if not 1 <= n <= 6:
        raise UsageError("n must lie in 1..6")
    L = 4 * n
    ms = noncrossing_matchings(n)
    im_side = [tuple(tuple(sorted((2 * a, 2 * b))) for a, b in m.pairs) for m in ms]
    re_side = [tuple(tuple(sorted(((2 * a + 1) % L, (2 * b + 1) % L))) for a, b in m.pairs) for m in ms]
    found = {}
    for ip in im_side:
        for rp in re_side:
            d = _superpose(n, ip, rp)
            if d is not None:
                found.setdefault(d.code(), d)
    return [found[c] for c in sorted(found)]


# ---------------------------------------------------------------------------
# parenthesised words


@dataclass(frozen=True)
class ParenthesizedWord:
    letters: tuple
    intervals: frozenset = frozenset()  # half-open (i, j), j - i >= 2

    def __post_init__(self):
        n = len(self.letters)
        if len(set(self.letters)) != n:
            raise UsageError("letters must be distinct")
        iv = frozenset((int(i), int(j)) for i, j in self.intervals)
        object.__setattr__(self, "intervals", iv)
        for i, j in iv:
            if not (0 <= i and j <= n and j - i >= 2):
                raise UsageError(f"bad interval {(i, j)}")
        for p in iv:
            for q in iv:
                if p[0] < q[0] < p[1] < q[1]:
                    raise UsageError("intervals overlap without nesting")
        if len(iv) > max(n - 1, 0):
            raise UsageError("too many parenthesis pairs")

    @property
    def pairs(self) -> int:
        return len(self.intervals)

    def multiplicity(self, interval) -> int:
        return interval[1] - interval[0]

    def __str__(self):
        opens = [0] * (len(self.letters) + 1)
        closes = [0] * (len(self.letters) + 1)
        for i, j in self.intervals:
            opens[i] += 1
            closes[j] += 1
        out = []
        for k, x in enumerate(self.letters):
            out.append(")" * closes[k] + "(" * opens[k] + x)
        out.append(")" * closes[len(self.letters)])
        return "".join(out)

    def children(self, interval):
        """Maximal proper sub-intervals and loose letters of an interval, in order."""
        i, j = interval
        inner = [q for q in self.intervals if q != interval and i <= q[0] and q[1] <= j]
        top = [q for q in inner if not any(r != q and r[0] <= q[0] and q[1] <= r[1] for r in inner)]
        out, k = [], i
        for q in sorted(top):
            out.extend((x, x + 1) for x in range(k, q[0]))
            out.append(q)
            k = q[1]
        out.extend((x, x + 1) for x in range(k, j))
        return out


def parse_word(text: str) -> ParenthesizedWord:
    letters, intervals, stack = [], [], []
    for ch in text.replace(" ", ""):
        if ch == "(":
            stack.append(len(letters))
        elif ch == ")":
            if not stack:
                raise UsageError(f"unbalanced word {text!r}")
            intervals.append((stack.pop(), len(letters)))
        elif ch.isalpha():
            letters.append(ch)
        else:
            raise UsageError(f"bad character {ch!r} in word")
    if stack:
        raise UsageError(f"unbalanced word {text!r}")
    return ParenthesizedWord(tuple(letters), frozenset(intervals))


def maximal_parenthesizations(letters) -> list[ParenthesizedWord]:
    """Full binary bracketings (outermost pair included)."""
    letters = tuple(letters)
    n = len(letters)

    @lru_cache(maxsize=None)
    def trees(i, j):
        if j - i == 1:
            return [frozenset()]
        out = []
        for k in range(i + 1, j):
            for a in trees(i, k):
                for b in trees(k, j):
                    out.append(a | b | {(i, j)})
        return out

    if n == 0:
        return []
    return [ParenthesizedWord(letters, t) for t in trees(0, n)]


def all_words(letters) -> list[ParenthesizedWord]:
    """Every parenthesisation (any arity, possibly partial) of the letters."""
    letters = tuple(letters)
    n = len(letters)
    cand = [(i, j) for i in range(n) for j in range(i + 2, n + 1)]
    out = []

    def grow(k, chosen):
        if k == len(cand):
            out.append(ParenthesizedWord(letters, frozenset(chosen)))
            return
        grow(k + 1, chosen)
        p = cand[k]
        if all(not (p[0] < q[0] < p[1] < q[1] or q[0] < p[0] < q[1] < p[1]) for q in chosen):
            grow(k + 1, chosen + [p])

    grow(0, [])
    return out


# ---------------------------------------------------------------------------
# merges on the base diagram


def _letters(n):
    if n > len(LETTERS):
        raise UsageError("at most 26 letters")
    return tuple(LETTERS[:n])


@dataclass
class MergeState:
    """The base diagram together with the merges applied to it so far.

    Letter j is the IM chord (4j, 4j+2) crossed at its root by the RE chord
    (4j+1, 4j+3).  A group of merged curves is a tree; a neighbouring group
    can only touch it along an edge of its outer face, i.e. an edge whose
    removal separates the group's first and last boundary leaves.
    """

    n: int
    color: Color = Color.IM
    letters: tuple = ()
    groups: list = field(default_factory=list)     # (lo, hi) letter intervals, boundary order
    members: dict = field(default_factory=dict)    # group -> set of its node ids
    intervals: list = field(default_factory=list)  # one per merge
    kinds: list = field(default_factory=list)
    im_edges: list = field(default_factory=list)   # [a, b] vertex refs
    re_edges: list = field(default_factory=list)

    @classmethod
    def base(cls, n: int, color: Color = Color.IM) -> "MergeState":
        if n < 1:
            raise UsageError("n must be positive")
        st = cls(n, Color(color), _letters(n))
        for j in range(n):
            st.groups.append((j, j + 1))
            st.members[(j, j + 1)] = {j}
            st.kinds.append(NodeKind.ROOT)
            r = (NODE, j)
            st.im_edges += [[(LEAF, 4 * j), r], [r, (LEAF, 4 * j + 2)]]
            st.re_edges += [[(LEAF, 4 * j + 1), r], [r, (LEAF, (4 * j + 3) % (4 * n))]]
        return st

    def outer_edges(self, g) -> list:
        """Indices of the IM edges on the outer face of group g, left to right."""
        lo, hi = g
        nodes = {(NODE, i) for i in self.members[g]}
        leaves = {(LEAF, 4 * j + o) for j in range(lo, hi) for o in range(4)}
        verts = nodes | leaves
        im = [k for k, e in enumerate(self.im_edges) if e[0] in verts and e[1] in verts]
        re_ = [e for e in self.re_edges if e[0] in verts and e[1] in verts]
        adj = {v: [] for v in verts}
        for k in im:
            a, b = self.im_edges[k]
            adj[a].append((b, k))
            adj[b].append((a, k))
        for a, b in re_:
            adj[a].append((b, None))
            adj[b].append((a, None))
        first, last = (LEAF, 4 * lo), (LEAF, 4 * (hi - 1) + 3)
        out = []
        for k in im:
            seen, stack = {first}, [first]
            while stack:
                v = stack.pop()
                for w, ek in adj[v]:
                    if ek != k and w not in seen:
                        seen.add(w)
                        stack.append(w)
            if last not in seen:
                block = max(v[1] for v in seen if v[0] == LEAF)
                out.append((block, k))
        return [k for _, k in sorted(out)]

    def _group_index(self, name: str) -> int:
        idx = [self.letters.index(ch) for ch in name if ch in self.letters]
        if len(idx) != len(name) or not idx:
            raise UsageError(f"unknown letters {name!r}")
        for gi, g in enumerate(self.groups):
            if (min(idx), max(idx) + 1) == g and len(idx) == g[1] - g[0]:
                return gi
        raise UsageError(f"{name!r} is not a current group of curves")

    def merge(self, *names: str, attach=None) -> "MergeState":
        """Merge adjacent current groups (named by their letters) at one critical point.

        ``attach`` gives, per group, the position in :meth:`outer_edges` of
        the edge where the new critical point sits.  By default the first
        group is met on its rightmost outer edge and the others on their
        leftmost one (the edges nearest to the neighbours).
        """
        if len(names) < 2:
            raise UsageError("a merge needs at least two groups")
        gis = [self._group_index(nm) for nm in names]
        if gis != list(range(gis[0], gis[0] + len(gis))):
            raise UsageError("merged groups must be adjacent and listed in boundary order")
        gs = [self.groups[i] for i in gis]
        choices = [self.outer_edges(g) for g in gs]
        if attach is None:
            attach = [len(choices[0]) - 1] + [0] * (len(gs) - 1)
        attach = list(attach)
        if len(attach) != len(gs) or any(not 0 <= a < len(c) for a, c in zip(attach, choices)):
            raise UsageError("attach needs one outer-edge position per group")
        v = len(self.kinds)
        self.kinds.append(NodeKind.CRITICAL)
        for a, c in zip(attach, choices):
            k = c[a]
            x, y = self.im_edges[k]
            self.im_edges[k] = [x, (NODE, v)]
            self.im_edges.append([(NODE, v), y])
        new = (gs[0][0], gs[-1][1])
        self.members[new] = set().union(*(self.members.pop(g) for g in gs)) | {v}
        self.groups[gis[0]:gis[-1] + 1] = [new]
        self.intervals.append(new)
        return self

    def diagram(self) -> ChordDiagram:
        edges = [(Color.IM, a, b) for a, b in self.im_edges] + [(Color.RE, a, b) for a, b in self.re_edges]
        d = from_graph(self.n, self.kinds, edges)
        if self.color is Color.RE:
            from .dihedral import act_on_diagram, s
            d = act_on_diagram(s(self.n), d)
        return d

    def word(self) -> ParenthesizedWord:
        return ParenthesizedWord(self.letters, frozenset(self.intervals))


def base_diagram(n: int, color: Color = Color.IM) -> ChordDiagram:
    """Adjacent leaves joined pairwise: letter j is the chord (4j, 4j+2) (shifted by one for RE)."""
    return MergeState.base(n, color).diagram()


def _merge_plan(word: ParenthesizedWord):
    return [(iv, word.children(iv)) for iv in sorted(word.intervals, key=lambda p: (p[1] - p[0], p[0]))]


def _start(word, color):
    st = MergeState.base(len(word.letters), color)
    st.letters = word.letters
    return st


def realize_word(word: ParenthesizedWord | str, color: Color = Color.IM, attach=None) -> MergeState:
    """Replay the merges encoded by a word, innermost pairs first.

    ``attach`` maps an interval to the outer-edge positions used by its merge.
    """
    if isinstance(word, str):
        word = parse_word(word)
    st = _start(word, color)
    attach = attach or {}
    for iv, kids in _merge_plan(word):
        st.merge(*("".join(word.letters[a:b]) for a, b in kids), attach=attach.get(iv))
    return st


def word_realizations(word: ParenthesizedWord | str, color: Color = Color.IM) -> list[ChordDiagram]:
    """Diagrams of a word over every admissible choice of meeting edges.

    A choice is admissible when the result is a valid diagram that passes
    :func:`sign_consistent`.
    """
    if isinstance(word, str):
        word = parse_word(word)
    plan = _merge_plan(word)
    out = {}

    def grow(k, st):
        if k == len(plan):
            try:
                d = st.diagram()
            except DiagramError:
                return
            if sign_consistent(d):
                out.setdefault(canonical_form(d), d)
            return
        _, kids = plan[k]
        names = ["".join(word.letters[a:b]) for a, b in kids]
        sizes = [len(st.outer_edges(st.groups[st._group_index(nm)])) for nm in names]
        for attach in itertools.product(*(range(m) for m in sizes)):
            nxt = copy.deepcopy(st)
            nxt.merge(*names, attach=attach)
            grow(k + 1, nxt)

    grow(0, _start(word, color))
    return [out[c] for c in sorted(out)]


# ---------------------------------------------------------------------------
# sign bookkeeping along the curves


def _leaf_sign(n: int, k: int, color: Color) -> int:
    # along a curve Re(w P) = 0 the value Im(w P) is real; at leaf k it tends to
    # the sign of Im(w e^{i n theta_k}) = Im(w i^k) times infinity
    w = 1 if color is Color.RE else -1j
    v = (w * 1j ** k).imag
    return 1 if v > 0 else -1


def sign_consistent(d: ChordDiagram) -> bool:
    """Necessary conditions from monotonicity along the curves.

    On a curve of colour C the conjugate value Im(w P) is real and strictly
    monotone between inner nodes, vanishes exactly at roots, and at a
    critical node of multiplicity k increases and decreases on alternate
    branches.  Checked for both colours.
    """
    n = d.n
    for color in Color:
        mine = [j for j, e in enumerate(d.edges) if e.color is color]
        # components of the curves with the roots cut out
        parent = {}

        def find(x):
            parent.setdefault(x, x)
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def vid(ref, j):
            # a root splits into one vertex per incident edge
            if ref[0] == NODE and d.nodes[ref[1]].kind is NodeKind.ROOT:
                return ("cut", ref[1], j)
            return ref

        for j in mine:
            a, b = d.edges[j].ends
            ra, rb = find(vid(a, j)), find(vid(b, j))
            if ra != rb:
                parent[ra] = rb
        comps = {}
        for j in mine:
            for ref in d.edges[j].ends:
                comps.setdefault(find(vid(ref, j)), set()).add(vid(ref, j))
        sign = {}
        free = []
        for root, verts in comps.items():
            s_ = {_leaf_sign(n, v[1], color) for v in verts if v[0] == LEAF}
            if len(s_) > 1:
                return False
            if s_:
                sign[root] = s_.pop()
            else:
                free.append(root)
        roots_at = {}
        for j in mine:
            for ref in d.edges[j].ends:
                if ref[0] == NODE and d.nodes[ref[1]].kind is NodeKind.ROOT:
                    roots_at.setdefault(ref[1], []).append(find(("cut", ref[1], j)))
        crit = [i for i, nd in enumerate(d.nodes) if nd.kind is NodeKind.CRITICAL
                and d.edges[nd.cyclic[0][0]].color is color]
        ok_any = False
        for assign in itertools.product((1, -1), repeat=len(free)):
            sg = dict(sign)
            sg.update(zip(free, assign))
            if any(sg[a] == sg[b] for a, b in roots_at.values()):
                continue
            good = True
            for i in crit:
                s0 = sg[find((NODE, i))]
                dirs = []
                for j, end in d.nodes[i].cyclic:
                    other = d.edges[j].ends[1 - end]
                    if other[0] == LEAF:
                        dirs.append(_leaf_sign(n, other[1], color))
                    elif d.nodes[other[1]].kind is NodeKind.ROOT:
                        dirs.append(-s0)
                    else:
                        dirs.append(0)
                pat = [1 if m % 2 == 0 else -1 for m in range(len(dirs))]
                if not any(all(x == 0 or x == p * q for x, p in zip(dirs, pat)) for q in (1, -1)):
                    good = False
                    break
            if good:
                ok_any = True
                break
        if not ok_any:
            return False
    return True


@lru_cache(maxsize=16)
def _reachable(n: int, color: Color):
    table = {}
    for w in all_words(_letters(n)):
        for d in word_realizations(w, color):
            table.setdefault(canonical_form(d), []).append(w)
    return table


def words_of_diagram(d: ChordDiagram, color: Color = Color.IM) -> list[ParenthesizedWord]:
    """All words whose merges produce this diagram.

    Different merge orders can end in the same diagram, e.g. (ab)c and a(bc)
    both leave two simple critical points on one tree, so this may list
    several words.
    """
    if d.n > 7:
        raise UsageError("word lookup is limited to n <= 7")
    return sorted(_reachable(d.n, Color(color)).get(canonical_form(d), []), key=str)


def forest_to_word(d, color: Color = Color.IM) -> ParenthesizedWord:
    """The word of a diagram reached from the base diagram by merges.

    A :class:`MergeState` carries its history.  A bare diagram is looked up
    among all merge results of its degree and must determine its word.
    """
    if isinstance(d, MergeState):
        return d.word()
    ws = words_of_diagram(d, color)
    if not ws:
        raise DiagramError("diagram is not reachable from the base diagram by merges")
    if len(ws) > 1:
        raise DiagramError("merge history is ambiguous: " + ", ".join(map(str, ws)))
    return ws[0]


# ---------------------------------------------------------------------------
# edge contraction and the pentagon


def contract(d: ChordDiagram, edge: int) -> ChordDiagram:
    """Contract an edge joining two CRITICAL nodes (a coalescence of critical points)."""
    e = d.edges[edge]
    (ka, u), (kb, w) = e.ends
    if ka != NODE or kb != NODE or u == w:
        raise DiagramError("can only contract an edge between two inner nodes")
    if d.nodes[u].kind is not NodeKind.CRITICAL or d.nodes[w].kind is not NodeKind.CRITICAL:
        raise DiagramError("can only contract an edge between two critical nodes")

    def after(node, end):
        cyc = list(d.nodes[node].cyclic)
        i = cyc.index((edge, end))
        return cyc[i + 1:] + cyc[:i]

    merged = after(u, 0) + after(w, 1)
    remap = {}
    keep = [i for i in range(len(d.nodes)) if i != w]
    for new, old in enumerate(keep):
        remap[old] = new
    remap[w] = remap[u]
    eidx = {j: (j if j < edge else j - 1) for j in range(len(d.edges)) if j != edge}

    def ref(r):
        return r if r[0] == LEAF else (NODE, remap[r[1]])

    from .diagram import DEdge
    edges = tuple(DEdge(x.color, tuple(ref(r) for r in x.ends)) for j, x in enumerate(d.edges) if j != edge)
    nodes = []
    for old in keep:
        cyc = merged if old == u else list(d.nodes[old].cyclic)
        nodes.append(DNode(d.nodes[old].kind, tuple((eidx[j], end) for j, end in cyc)))
    return ChordDiagram(d.n, tuple(nodes), edges, d.source)


def _crit_edges(d: ChordDiagram):
    out = []
    for j, e in enumerate(d.edges):
        (ka, u), (kb, w) = e.ends
        if ka == NODE and kb == NODE and d.nodes[u].kind is NodeKind.CRITICAL \
                and d.nodes[w].kind is NodeKind.CRITICAL:
            out.append(j)
    return out


@dataclass(frozen=True)
class PentagonReport:
    vertices: tuple      # maximal words
    edges: tuple         # (i, j, boundary word)
    realized: bool       # every boundary diagram is a one-edge contraction of both ends
    is_cycle: bool

    def __bool__(self):
        return self.realized and self.is_cycle


def _contractions(d: ChordDiagram) -> set:
    return {canonical_form(contract(d, j)) for j in _crit_edges(d)}


def reassociation_graph(k: int = 4) -> PentagonReport:
    """Maximal bracketings of k letters, joined by single reassociations.

    Two bracketings are adjacent when they differ in exactly one pair; dropping
    that pair gives the boundary word, in which three groups meet at one
    critical point.  Each move is realized on diagrams: the boundary diagram
    must arise from some diagram of either end by letting two adjacent
    critical points coalesce.
    """
    words = maximal_parenthesizations(_letters(k))
    faces = [set().union(*(_contractions(d) for d in word_realizations(w))) for w in words]
    edges = []
    realized = True
    for i in range(len(words)):
        for j in range(i + 1, len(words)):
            a, b = words[i].intervals, words[j].intervals
            if len(a - b) != 1:
                continue
            w0 = ParenthesizedWord(words[i].letters, a & b)
            codes = {canonical_form(d) for d in word_realizations(w0)}
            if not (codes & faces[i] & faces[j]):
                realized = False
            edges.append((i, j, str(w0)))
    deg = [0] * len(words)
    adj = {i: [] for i in range(len(words))}
    for i, j, _ in edges:
        deg[i] += 1
        deg[j] += 1
        adj[i].append(j)
        adj[j].append(i)
    seen, stack = {0}, [0]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    is_cycle = (len(words) >= 3 and len(edges) == len(words) and all(x == 2 for x in deg)
                and len(seen) == len(words))
    return PentagonReport(tuple(str(w) for w in words), tuple(edges), realized, is_cycle)


def pentagon_check() -> bool:
    rep = reassociation_graph(4)
    return len(rep.vertices) == 5 and len(rep.edges) == 5 and bool(rep)


# ---------------------------------------------------------------------------
# dissipation


@dataclass(frozen=True)
class DissipationEvent:
    letters: tuple            # the merged letters
    color: Color
    critical_point: complex
    wall_parameter: float     # shift of Re/Im a_0 reaching the wall
    parameter: float          # shift actually applied (just past the wall)
    wall: MonicPolynomial     # the eps -> 0 limit
    old_code: str
    new_code: str
    word_before: ParenthesizedWord
    word_at_wall: ParenthesizedWord | None


def shift_constant(P: MonicPolynomial, color: Color, tau: float) -> MonicPolynomial:
    """Add tau to Re a_0 (RE) or Im a_0 (IM); critical points stay put."""
    c = list(P.coeffs)
    c[0] = c[0] + (tau if color is Color.RE else 1j * tau)
    return MonicPolynomial(tuple(c))


def _chords(d: ChordDiagram, color: Color):
    f = single_color_forest(d, color)
    return [tuple(sorted((a[1], b[1]))) for a, b in f.edges]


def dissipate(P: MonicPolynomial, target, eps: float = 1e-3, color: Color = Color.IM,
              params: TraceParams | None = None, steps: int = 4):
    """Shift Re/Im a_0 until a critical value of the chosen harmonic part
    vanishes (merging the target curves) and go ``eps`` beyond it.

    Letters name the chords of ``color`` in the traced diagram of P, ordered
    by their smaller leaf.  Returns ``(P_past, event)``.
    """
    from .dihedral import diagram_of

    color = Color(color)
    if eps <= 0:
        raise UsageError("eps must be positive")
    d0 = diagram_of(P, params)
    if not is_generic(d0):
        raise UsageError("dissipation starts from a generic polynomial")
    chords = sorted(_chords(d0, color))
    letters = _letters(len(chords))
    want = tuple(sorted(set(target)))
    if len(want) != 2 or any(x not in letters for x in want):
        raise UsageError("target must name two distinct curves")
    want_chords = {chords[letters.index(x)] for x in want}
    omega = 1.0 if color is Color.RE else -1j

    def crit_value(Q, c):
        return (omega * Q(c)).real

    crits = _poly.critical_points(P)
    order = sorted(range(len(crits)), key=lambda i: abs(crit_value(P, crits[i])))
    last_good = 0.0
    for i in order:
        c = crits[i]
        # Newton on tau for crit_value(P_tau, c) = 0; the derivative in tau is 1
        tau, Q = 0.0, P
        for _ in range(5):
            r = crit_value(Q, c)
            if abs(r) <= 1e-14 * max(1.0, _poly.magnitude(Q, c)):
                break
            tau -= r
            Q = shift_constant(P, color, tau)
        wall = Q
        sgn = 1.0 if tau >= 0 else -1.0
        past = tau + sgn * eps
        # no other critical value may change sign on the way
        others = [crits[k] for k in range(len(crits)) if k != i]
        if any(np.sign(crit_value(P, z)) != np.sign(crit_value(shift_constant(P, color, past), z)) for z in others):
            continue
        # continuation: the diagram must not change before the wall
        ok = True
        for k in range(1, steps):
            tk = tau * k / steps
            try:
                if canonical_form(diagram_of(shift_constant(P, color, tk), params)) != canonical_form(d0):
                    ok = False
                    break
            except NumericalError:
                ok = False
                break
            last_good = tk
        if not ok:
            continue
        P_past = shift_constant(P, color, past)
        try:
            d1 = diagram_of(P_past, params)
        except NumericalError:
            continue
        gone = set(chords) - set(_chords(d1, color))
        if gone != want_chords:
            continue
        lo = min(letters.index(x) for x in want)
        hi = max(letters.index(x) for x in want)
        at_wall = ParenthesizedWord(letters, frozenset({(lo, hi + 1)})) if hi == lo + 1 else None
        ev = DissipationEvent(want, color, complex(c), float(tau), float(past), wall,
                              canonical_form(d0), canonical_form(d1),
                              ParenthesizedWord(letters), at_wall)
        return P_past, ev
    raise NumericalError(f"no critical value merges {''.join(want)}; last good parameter {last_good:.6g}")


def mergeable_pairs(P: MonicPolynomial, color: Color = Color.IM, eps: float = 1e-3,
                    params: TraceParams | None = None) -> list[str]:
    """Targets that :func:`dissipate` can reach from P (pairs of letters)."""
    from .dihedral import diagram_of
    n = len(_chords(diagram_of(P, params), Color(color)))
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            t = _letters(n)[i] + _letters(n)[j]
            try:
                dissipate(P, t, eps, color, params)
            except NumericalError:
                continue
            out.append(t)
    return out


def reverse(P_past: MonicPolynomial, ev: DissipationEvent) -> MonicPolynomial:
    """Walk the dissipation path back to its start."""
    return shift_constant(P_past, ev.color, -ev.parameter)
