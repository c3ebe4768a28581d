"""Chambers of the dihedral action on a set of diagram classes.

Pick one representative per orbit (the real-locus diagram represents its own
orbit).  The closed chamber labelled g is the image g.R of the set R of
representatives; closed chambers meet along diagrams with non-trivial
stabiliser.  For a partition each diagram is assigned to the first closed
chamber containing it, in shortlex order of the labels (a half-open
fundamental domain).  Adjacency of chambers is right multiplication by one
generator.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field

from .diagram import (LEAF, NODE, ChordDiagram, canonical_form, from_graph, is_generic,
                      real_locus_diagram, single_color_forest)
from .dihedral import DihedralElement, act_on_diagram, group_order_report, s, t
from .errors import DiagramError, PreconditionError, UsageError
from .webtrace import Color, NodeKind

__all__ = ["Chamber", "ChamberDecomposition", "Gallery", "chamber_decomposition", "fundamental_chamber",
           "real_locus_diagram", "gallery", "check_path_lifting", "diagram_set", "adjacent_diagrams"]

GENERATORS = ("s", "S", "t")  # S is s^-1


@dataclass(frozen=True)
class Chamber:
    id: int
    label: DihedralElement
    word: str                 # shortlex word for the label, "" for the identity
    representative: str       # label . (representative of the real-locus orbit)
    members: frozenset        # half-open chamber
    closure: frozenset


@dataclass(frozen=True)
class Gallery:
    chambers: tuple
    moves: tuple

    def __len__(self):
        return len(self.moves)


@dataclass
class ChamberDecomposition:
    n: int
    chambers: list
    codes: list                       # diagram classes, sorted
    perm: dict = field(repr=False)    # word -> permutation of code indices
    generators: dict = field(repr=False, default_factory=dict)  # s, S, t as permutations
    kernel: list = field(default_factory=list)
    measured_order: int = 0
    nominal: int = 0
    fundamental_stabilizer: list = field(default_factory=list)
    transitive: bool = False
    real_locus_closures: int = 0

    def __iter__(self):
        return iter(self.chambers)

    def __len__(self):
        return len(self.chambers)

    def __getitem__(self, i):
        return self.chambers[i]

    def chamber_of(self, code: str) -> Chamber:
        for c in self.chambers:
            if code in c.members:
                return c
        raise KeyError(code)

    def by_word(self, word: str) -> Chamber:
        for c in self.chambers:
            if c.word == word:
                return c
        raise KeyError(word)

    def report(self) -> str:
        lines = [f"n={self.n}: {len(self.codes)} diagram classes, {len(self.chambers)} chambers "
                 f"(nominal 4n = {self.nominal}; {'agrees' if len(self.chambers) == self.nominal else 'MISMATCH'})",
                 f"measured group order {self.measured_order}, kernel of the action {len(self.kernel)}",
                 f"stabiliser of the fundamental chamber: {len(self.fundamental_stabilizer)}; "
                 f"transitive: {self.transitive}; closed chambers through the real-locus diagram: "
                 f"{self.real_locus_closures}"]
        for c in self.chambers:
            lines.append(f"chamber {c.id} [{c.word or 'e'}] {len(c.members)} members: " + " ".join(sorted(c.members)))
        return "\n".join(lines)


def _gen(name: str, n: int) -> DihedralElement:
    return {"s": s(n), "S": s(n).inverse(), "t": t(n)}[name]


def diagram_set(n: int) -> list[ChordDiagram]:
    """Generic diagrams of degree n together with the orbit of the real-locus diagram."""
    from .strata import enumerate_generic
    found = {d.code(): d for d in enumerate_generic(n)}
    rl = real_locus_diagram(n)
    orbit = {rl.code(): rl}
    stack = [rl]
    while stack:
        d = stack.pop()
        for x in GENERATORS:
            e = act_on_diagram(_gen(x, n), d)
            if e.code() not in orbit:
                orbit[e.code()] = e
                stack.append(e)
    found.update(orbit)
    return [found[c] for c in sorted(found)]


def _compose(p, q):
    # (p after q) on index tuples
    return tuple(p[i] for i in q)


def chamber_decomposition(n: int, diagrams=None) -> ChamberDecomposition:
    if n < 1:
        raise UsageError("n must be positive")
    if diagrams is None:
        diagrams = diagram_set(n)
    by_code = {}
    for d in diagrams:
        if d.n != n:
            raise UsageError("diagrams of mixed degree")
        by_code.setdefault(d.code(), d)
    codes = sorted(by_code)
    index = {c: i for i, c in enumerate(codes)}
    gen_perm = {}
    escapees = []
    for x in GENERATORS:
        img = []
        for c in codes:
            e = canonical_form(act_on_diagram(_gen(x, n), by_code[c]))
            if e not in index:
                escapees.append(e)
                img.append(-1)
            else:
                img.append(index[e])
        gen_perm[x] = tuple(img)
    if escapees:
        raise PreconditionError(f"diagram set is not closed under the action ({len(escapees)} escapees)",
                                witness=sorted(set(escapees))[:5])

    # effective group: distinct permutations, labelled by shortlex words (right multiplication)
    ident = tuple(range(len(codes)))
    words = {ident: ""}
    elems = {ident: DihedralElement(0, 0, 4 * n)}
    order = [ident]
    queue = deque([ident])
    while queue:
        g = queue.popleft()
        for x in GENERATORS:
            h = _compose(g, gen_perm[x])
            if h not in words:
                words[h] = words[g] + x
                elems[h] = elems[g] * _gen(x, n)
                order.append(h)
                queue.append(h)
    rl = canonical_form(real_locus_diagram(n))
    if rl not in index:
        raise PreconditionError("diagram set does not contain the real-locus diagram", witness=rl)

    # orbit representatives, real locus first; later ones chosen to shrink the common stabiliser
    def stab(i):
        return {g for g in order if g[i] == i}

    seen = set()
    reps = []
    common = set(order)
    orbits = []
    for i in [index[rl]] + list(range(len(codes))):
        if i in seen:
            continue
        orb = sorted({g[i] for g in order})
        seen.update(orb)
        orbits.append(orb)
    for k, orb in enumerate(orbits):
        if k == 0:
            best = index[rl]
        else:
            best = min(orb, key=lambda j: (len(common & stab(j)), j))
        reps.append(best)
        common &= stab(best)

    closures = {g: frozenset(codes[g[r]] for r in reps) for g in order}
    owner = {}
    for g in order:  # shortlex order
        for c in closures[g]:
            owner.setdefault(c, g)
    chambers = []
    for cid, g in enumerate(order):
        members = frozenset(c for c in closures[g] if owner[c] == g)
        chambers.append(Chamber(cid, elems[g], words[g], codes[g[index[rl]]], members, closures[g]))

    # setwise action on closed chambers
    by_closure = {closures[g]: g for g in order}
    transitive = len(by_closure) == len(order)
    for g in order:
        for x in GENERATORS:
            img = frozenset(codes[gen_perm[x][index[c]]] for c in closures[g])
            if by_closure.get(img) != _compose(gen_perm[x], g):
                transitive = False
    reached = {ident}
    queue = deque([ident])
    while queue:
        g = queue.popleft()
        for x in GENERATORS:
            h = _compose(gen_perm[x], g)
            if h not in reached:
                reached.add(h)
                queue.append(h)
    transitive = transitive and len(reached) == len(order)
    fund = closures[ident]
    stab_f = [words[g] for g in order if frozenset(codes[g[index[c]]] for c in fund) == fund]

    rep = group_order_report(n)
    kernel = [g for g in _all_dihedral(n) if all(canonical_form(act_on_diagram(g, by_code[c])) == c for c in codes)]
    return ChamberDecomposition(n, chambers, codes, {words[g]: g for g in order}, gen_perm, kernel,
                                rep.measured, 4 * n, stab_f, transitive,
                                sum(rl in cl for cl in closures.values()))


def _all_dihedral(n):
    from .dihedral import all_elements
    return all_elements(n)


def fundamental_chamber(n: int, decomposition: ChamberDecomposition | None = None) -> Chamber:
    dec = decomposition or chamber_decomposition(n)
    rl = canonical_form(real_locus_diagram(n))
    hits = [c for c in dec.chambers if rl in c.members]
    if len(hits) != 1:
        raise PreconditionError(f"{len(hits)} chambers contain the real-locus diagram")
    return hits[0]


def gallery(c1: Chamber, c2: Chamber, decomposition: ChamberDecomposition) -> Gallery:
    """Shortest gallery: breadth-first search on chamber labels, one generator per step."""
    dec = decomposition
    perm_of = {c.id: dec.perm[c.word] for c in dec.chambers}
    by_perm = {p: cid for cid, p in perm_of.items()}
    start, goal = perm_of[c1.id], perm_of[c2.id]
    prev = {start: None}
    queue = deque([start])
    while queue:
        g = queue.popleft()
        if g == goal:
            break
        for x in GENERATORS:
            h = _compose(g, dec.generators[x])
            if h not in prev:
                prev[h] = (g, x)
                queue.append(h)
    path, moves = [goal], []
    while prev[path[-1]] is not None:
        g, x = prev[path[-1]]
        moves.append(x)
        path.append(g)
    path.reverse()
    moves.reverse()
    return Gallery(tuple(dec.chambers[by_perm[p]] for p in path), tuple(moves))


# ---------------------------------------------------------------------------
# adjacency of diagrams and path lifting


def _matchings(d: ChordDiagram):
    return tuple(frozenset(single_color_forest(d, c).edges) for c in (Color.IM, Color.RE))


def resolutions(d: ChordDiagram) -> list[ChordDiagram]:
    """Generic diagrams obtained by opening every valency-4 critical node one of two ways."""
    crit = [i for i, nd in enumerate(d.nodes) if nd.kind is NodeKind.CRITICAL]
    if any(d.nodes[i].valency != 4 for i in crit):
        raise DiagramError("only simple critical nodes can be resolved")
    out = {}
    for mask in range(2 ** len(crit)):
        join = {}
        for b, i in enumerate(crit):
            cyc = d.nodes[i].cyclic
            pairs = ((0, 1), (2, 3)) if (mask >> b) & 1 else ((1, 2), (3, 0))
            for p, q in pairs:
                join[cyc[p]] = cyc[q]
                join[cyc[q]] = cyc[p]
        # walk each chain of joined edges into one edge
        keep = [i for i in range(len(d.nodes)) if i not in crit]
        remap = {old: new for new, old in enumerate(keep)}
        used = set()
        edges = []
        for j, e in enumerate(d.edges):
            if j in used:
                continue
            ends = []
            for end in (0, 1):
                jj, ee = j, end
                used.add(jj)
                while True:
                    ref = d.edges[jj].ends[ee]
                    if ref[0] == NODE and ref[1] in crit:
                        nxt = join[(jj, ee)]
                        jj, ee = nxt[0], 1 - nxt[1]
                        if jj in used and jj != j:
                            break
                        used.add(jj)
                        continue
                    ends.append(ref if ref[0] == LEAF else (NODE, remap[ref[1]]))
                    break
            if len(ends) == 2:
                edges.append((e.color, ends[0], ends[1]))
        try:
            r = from_graph(d.n, [d.nodes[i].kind for i in keep], edges)
        except DiagramError:
            continue
        if is_generic(r):
            out.setdefault(r.code(), r)
    return [out[c] for c in sorted(out)]


def adjacent_diagrams(diagrams) -> dict:
    """Adjacency on a diagram set.

    Two generic diagrams are adjacent when one colour's chords agree and the
    other's differ by re-pairing two chords (one simple wall crossing); a
    non-generic diagram is adjacent to each of its full resolutions.
    """
    by_code = {d.code(): d for d in diagrams}
    adj = {c: set() for c in by_code}
    gen = {c: _matchings(d) for c, d in by_code.items() if is_generic(d)}
    codes = sorted(gen)
    for i, a in enumerate(codes):
        for b in codes[i + 1:]:
            ma, mb = gen[a], gen[b]
            for k in (0, 1):
                if ma[1 - k] == mb[1 - k] and len(ma[k] - mb[k]) == 2:
                    adj[a].add(b)
                    adj[b].add(a)
    for c, d in by_code.items():
        if c in gen:
            continue
        for r in resolutions(d):
            if r.code() in adj:
                adj[c].add(r.code())
                adj[r.code()].add(c)
    return {c: sorted(v) for c, v in adj.items()}


@dataclass(frozen=True)
class LiftReport:
    samples: int
    lifted: int
    wall_crossings: int       # lifted steps that changed chamber
    equivariant: bool         # adjacency is preserved by the generators

    def __bool__(self):
        return self.equivariant and self.lifted == self.samples


def check_path_lifting(samples: int, n: int = 3, length: int = 10, seed: int = 0,
                       decomposition: ChamberDecomposition | None = None) -> LiftReport:
    """Random walks on the orbit graph, lifted step by step to the diagram set."""
    if samples < 1:
        raise UsageError("samples must be positive")
    dec = decomposition or chamber_decomposition(n)
    diagrams = [_decode(c, n) for c in dec.codes]
    adj = adjacent_diagrams(diagrams)
    index = {c: i for i, c in enumerate(dec.codes)}
    equivariant = all(
        {dec.codes[dec.generators[x][index[b]]] for b in adj[a]} == set(adj[dec.codes[dec.generators[x][index[a]]]])
        for x in GENERATORS for a in dec.codes)
    orbit = {}
    for c in dec.codes:
        if c in orbit:
            continue
        members = {dec.codes[p[index[c]]] for p in dec.perm.values()}
        for m in members:
            orbit[m] = c
    qadj = {}
    for a, nb in adj.items():
        for b in nb:
            qadj.setdefault(orbit[a], set()).add(orbit[b])
    qverts = sorted(set(orbit.values()))
    rng = random.Random(seed)
    lifted = crossings = 0
    for _ in range(samples):
        v = rng.choice(qverts)
        walk = [v]
        for _ in range(length):
            nbrs = sorted(qadj.get(walk[-1], ()))
            if not nbrs:
                break
            walk.append(rng.choice(nbrs))
        starts = sorted(m for m in dec.codes if orbit[m] == walk[0])
        ok = True
        for x0 in starts:
            x = x0
            for target in walk[1:]:
                cand = [y for y in adj[x] if orbit[y] == target]
                if not cand:
                    ok = False
                    break
                y = cand[0]
                if dec.chamber_of(y).id != dec.chamber_of(x).id:
                    crossings += 1
                x = y
            if not ok:
                break
        lifted += ok
    return LiftReport(samples, lifted, crossings, equivariant)


def _decode(code: str, n: int) -> ChordDiagram:
    from .diagram import parse_code
    d = parse_code(code)
    if d.n != n:
        raise UsageError("code of the wrong degree")
    return d
