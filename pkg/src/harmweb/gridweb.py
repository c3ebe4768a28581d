"""Sign-grid extraction of the harmonic web, used as an independent oracle.

Nothing here calls the root finder.  Roots and critical points are located
by winding numbers of P and P' around grid cells, both zero sets come from
marching squares, and every cell that looks unresolved is handed to a finer
aligned sub-grid.  Chains are stitched across sub-grid borders and walked
once at the end.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import ndimage

from . import _kernels
from .errors import NonGenericError, TraceError, UsageError
from .poly import MonicPolynomial, cauchy_radius
from .webtrace import OMEGA, Color, Leaf, NodeKind, TracedCurve, Web, WebNode, check_web

TWO_PI = 2 * math.pi
SUBDIVIDE = 8
MAX_DEPTH = 4


class _Unresolved(Exception):
    pass


def _wrap(a):
    return (a + math.pi) % TWO_PI - math.pi


def _winding(vals):
    """Winding number of complex vertex values around every cell, plus a flag
    for cells where some side turns too far to trust."""
    arg = np.angle(vals)
    dh = _wrap(arg[:, 1:] - arg[:, :-1])
    dv = _wrap(arg[1:, :] - arg[:-1, :])
    w = (dh[:-1, :] + dv[:, 1:] - dh[1:, :] - dv[:, :-1]) / TWO_PI
    lim = 0.9 * math.pi
    big_h = np.abs(dh) > lim
    big_v = np.abs(dv) > lim
    unsure = big_h[:-1, :] | big_h[1:, :] | big_v[:, :-1] | big_v[:, 1:]
    z = vals == 0
    unsure |= z[:-1, :-1] | z[1:, 1:] | z[:-1, 1:] | z[1:, :-1]
    return np.rint(w).astype(int), unsure


def _hermite_multi(f, g, h, axis):
    """Sides along ``axis`` whose cubic Hermite model changes sign more than once."""
    if axis == 1:
        f0, f1, d0, d1 = f[:, :-1], f[:, 1:], g[:, :-1], g[:, 1:]
    else:
        f0, f1, d0, d1 = f[:-1, :], f[1:, :], g[:-1, :], g[1:, :]
    prev = f0 > 0
    changes = np.zeros(f0.shape, dtype=np.int8)
    for k in range(1, 9):
        t = k / 8
        if k == 8:
            val = f1 > 0
        else:
            h00 = 2 * t**3 - 3 * t**2 + 1
            h10 = t**3 - 2 * t**2 + t
            h01 = -2 * t**3 + 3 * t**2
            h11 = t**3 - t**2
            val = (h00 * f0 + h10 * h * d0 + h01 * f1 + h11 * h * d1) > 0
        changes += val != prev
        prev = val
    return changes > 1


def _cell_sides(j, i):
    # counterclockwise around the cell: bottom, right, top, left
    return (("h", j, i), ("v", j, i + 1), ("h", j + 1, i), ("v", j, i))


class _Ctx:
    """State shared by all grid levels of one extraction."""

    def __init__(self, P, R, crit_tol, guard):
        self.P = P
        self.n = P.degree
        self.R = R
        self.crit_tol = crit_tol
        self.abs_coef = np.abs(P.full[::-1])
        self.guard = guard
        self.d1 = np.polyder(P.full[::-1])
        self.d2 = np.polyder(self.d1)
        self.adj = {Color.RE: {}, Color.IM: {}}
        self.pos = {Color.RE: {}, Color.IM: {}}
        self.nodes = []      # [kind, position, (x0, y0, h) of its cell]
        self.tags = 0
        self.roots_found = 0
        self.crits_found = 0

    def new_tag(self):
        self.tags += 1
        return self.tags

    def link(self, color, a, b):
        adj = self.adj[color]
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)

    def newton_critical(self, z0, h):
        z = z0
        for _ in range(60):
            a = np.polyval(self.d1, z)
            b = np.polyval(self.d2, z)
            if b == 0:
                break
            step = a / b
            z -= step
            if abs(step) < 1e-15 * (1 + abs(z)):
                break
        if abs(z - z0) > 0.75 * h * math.sqrt(2):
            return None
        return complex(z)


def _region(ctx: _Ctx, x0: float, y0: float, h: float, Nx: int, Ny: int, depth: int) -> int:
    """Process one rectangular grid (and, recursively, its boxes); returns its tag."""
    tag = ctx.new_tag()
    P = ctx.P
    xs = x0 + h * np.arange(Nx + 1)
    ys = y0 + h * np.arange(Ny + 1)
    re, im = _kernels.eval_grid(P.full, xs, ys)
    Pv = re + 1j * im
    dcoef = np.ascontiguousarray(P.derivative_coeffs(), dtype=np.complex128)
    dre, dim = _kernels.eval_grid(dcoef, xs, ys)
    dPv = dre + 1j * dim
    bad = np.zeros((Ny, Nx), dtype=bool)

    def center(j, i):
        return complex(xs[i] + h / 2, ys[j] + h / 2)

    wr, unsure = _winding(Pv)
    bad |= unsure | (wr < 0) | (wr > 1)
    if ctx.n >= 2:
        wc, unsure_c = _winding(dPv)
        bad |= unsure_c | (wc < 0) | (wc > 1)
    else:
        wc = np.zeros_like(wr)
    root_cells = [(int(j), int(i)) for j, i in np.argwhere((wr == 1) & ~bad)]
    crit_cells = [(int(j), int(i)) for j, i in np.argwhere((wc == 1) & ~bad)]
    cells = root_cells + crit_cells
    for a in range(len(cells)):
        for b in range(a):
            if max(abs(cells[a][0] - cells[b][0]), abs(cells[a][1] - cells[b][1])) <= 1:
                bad[cells[a]] = True
                bad[cells[b]] = True

    # critical points: crossing node, far saddle, or near-miss saddle block
    crit_nodes = {Color.RE: [], Color.IM: []}
    blocks = {Color.RE: [], Color.IM: []}  # (cell, half width, F(c) > 0)
    crit_pos = {}
    for cell in crit_cells:
        if bad[cell]:
            continue
        c = ctx.newton_critical(center(*cell), h)
        if c is None:
            bad[cell] = True
            continue
        crit_pos[cell] = c
        pc = complex(P(c))
        curv = abs(np.polyval(ctx.d2, c))
        for color in Color:
            val = (OMEGA[color] * pc).real
            if abs(val) <= ctx.crit_tol * np.polyval(ctx.abs_coef, abs(c)):
                crit_nodes[color].append(cell)
                continue
            miss = math.sqrt(2 * abs(val) / max(curv, 1e-300))
            if miss < ctx.guard:
                raise NonGenericError(
                    f"{color.value} critical value at {c:.6g} is non-generic within tolerance")
            if miss < 3 * h * math.sqrt(2):
                m = int(math.ceil(1.5 * miss / h)) + 2
                blocks[color].append((cell, m, val > 0))

    def block_rect(cell, m):
        j, i = cell
        return slice(max(j - m, 0), j + m + 1), slice(max(i - m, 0), i + m + 1)

    for color in Color:
        for cell, m, _ in blocks[color]:
            j, i = cell
            inside = m <= j < Ny - m and m <= i < Nx - m
            others = [c for c in cells if c != cell and max(abs(c[0] - j), abs(c[1] - i)) <= m + 1]
            if not inside or others:
                bad[block_rect(cell, m)] = True

    # per-colour sanity checks
    F = {}
    crossings = {}
    for color in Color:
        Fc = (OMEGA[color] * Pv).real
        grad = np.conj(OMEGA[color] * dPv)
        F[color] = Fc
        s = Fc > 0
        hc = s[:, :-1] != s[:, 1:]
        vc = s[:-1, :] != s[1:, :]
        crossings[color] = (hc, vc)
        count = hc[:-1, :].astype(int) + hc[1:, :] + vc[:, :-1] + vc[:, 1:]
        node_mask = np.zeros((Ny, Nx), dtype=bool)
        near = np.zeros((Ny, Nx), dtype=bool)
        for cell in root_cells:
            node_mask[cell] = True
            if count[cell] != 2:
                bad[cell] = True
        for cell in crit_nodes[color]:
            node_mask[cell] = True
            j, i = cell
            near[max(j - 3, 0):j + 4, max(i - 3, 0):i + 4] = True
            if count[cell] != 4:
                bad[cell] = True
        block_mask = np.zeros((Ny, Nx), dtype=bool)
        for cell, m, _ in blocks[color]:
            block_mask[block_rect(cell, m)] = True
            j, i = cell
            near[max(j - m - 3, 0):j + m + 4, max(i - m - 3, 0):i + m + 4] = True
        bad |= (count == 4) & ~node_mask & ~block_mask
        u = grad / np.where(np.abs(grad) == 0, 1, np.abs(grad))
        cs = [u[:-1, :-1], u[:-1, 1:], u[1:, 1:], u[1:, :-1]]
        cmin = np.ones((Ny, Nx))
        for a in range(4):
            for b in range(a + 1, 4):
                cmin = np.minimum(cmin, (cs[a] * np.conj(cs[b])).real)
        bad |= (count > 0) & (cmin < 0.7) & ~near & ~node_mask & ~block_mask
        hm_h = _hermite_multi(Fc, grad.real, h, 1)
        hm_v = _hermite_multi(Fc, grad.imag, h, 0)
        for cell, m, _ in blocks[color]:
            j, i = cell
            hm_h[max(j - m + 1, 0):j + m + 1, max(i - m, 0):i + m + 1] = False
            hm_v[max(j - m, 0):j + m + 1, max(i - m + 1, 0):i + m + 1] = False
        # a suspicious side spoils both cells next to it
        bad |= hm_h[:-1, :] | hm_h[1:, :]
        bad |= hm_v[:, :-1] | hm_v[:, 1:]

    # cluster unresolved cells into boxes for a finer pass
    boxes = []
    mask = bad
    if bad.any():
        if depth >= MAX_DEPTH:
            raise _Unresolved("unresolved cells at the finest level")
        mask = ndimage.binary_dilation(bad, structure=np.ones((5, 5), dtype=bool))
        all_blocks = [block_rect(cell, m) for color in Color for cell, m, _ in blocks[color]]
        while True:
            lab, _ = ndimage.label(mask, structure=np.ones((3, 3), dtype=int))
            boxes = ndimage.find_objects(lab)
            new = np.zeros_like(mask)
            for r in boxes:
                new[r] = True
            for r in all_blocks:
                if new[r].any():
                    new[r] = True
            if (new == mask).all():
                break
            mask = new
        for r in boxes:
            if r[0].start == 0 or r[1].start == 0 or r[0].stop == Ny or r[1].stop == Nx:
                raise _Unresolved("unresolved cells reach the grid border")

    # register nodes outside the boxes
    node_of = {}
    for cell in root_cells:
        if not mask[cell]:
            node_of[cell] = len(ctx.nodes)
            ctx.nodes.append([NodeKind.ROOT, center(*cell), (xs[cell[1]], ys[cell[0]], h)])
            ctx.roots_found += 1
    for cell in crit_cells:
        if not mask[cell]:
            ctx.crits_found += 1
    crit_node_of = {}
    for color in Color:
        for cell in crit_nodes[color]:
            if not mask[cell]:
                crit_node_of[(color, cell)] = len(ctx.nodes)
                ctx.nodes.append([NodeKind.CRITICAL, crit_pos[cell], (xs[cell[1]], ys[cell[0]], h)])

    for color in Color:
        hc, vc = crossings[color]
        Fc = F[color]
        pos = ctx.pos[color]

        def crossing(side, hc=hc, vc=vc):
            kind, j, i = side
            return bool(hc[j, i]) if kind == "h" else bool(vc[j, i])

        def key(side, Fc=Fc, pos=pos):
            k = (tag,) + side
            if k not in pos:
                kind, j, i = side
                if kind == "h":
                    f0, f1 = Fc[j, i], Fc[j, i + 1]
                    pos[k] = complex(xs[i] + h * f0 / (f0 - f1), ys[j])
                else:
                    f0, f1 = Fc[j, i], Fc[j + 1, i]
                    pos[k] = complex(xs[i], ys[j] + h * f0 / (f0 - f1))
            return k

        node_cells = dict(node_of)
        for (col, c), idx in crit_node_of.items():
            if col is color:
                node_cells[c] = idx
        for cell, idx in node_cells.items():
            for side in _cell_sides(*cell):
                if crossing(side):
                    ctx.link(color, ("node", idx), key(side))
        block_mask = np.zeros((Ny, Nx), dtype=bool)
        for cell, m, positive in blocks[color]:
            if mask[cell]:
                continue
            block_mask[block_rect(cell, m)] = True
            jb, ib = cell
            lo_j, hi_j, lo_i, hi_i = jb - m, jb + m, ib - m, ib + m
            # perimeter sides counterclockwise, each with the vertex that follows it
            per = [(("h", lo_j, i), (lo_j, i + 1)) for i in range(lo_i, hi_i + 1)]
            per += [(("v", j, hi_i + 1), (j + 1, hi_i + 1)) for j in range(lo_j, hi_j + 1)]
            per += [(("h", hi_j + 1, i), (hi_j + 1, i)) for i in range(hi_i, lo_i - 1, -1)]
            per += [(("v", j, lo_i), (j, lo_i)) for j in range(hi_j, lo_j - 1, -1)]
            cross = [(sd, after) for sd, after in per if crossing(sd)]
            if len(cross) != 4:
                raise _Unresolved("saddle block does not see four branches")
            signs = [bool(Fc[after] > 0) for _, after in cross]
            if any(signs[k] == signs[(k + 1) % 4] for k in range(4)):
                raise _Unresolved("saddle block signs do not alternate")
            # the region holding the saddle joins the two arcs of its own sign,
            # so each curve cuts off one arc of the opposite sign
            for k in range(4):
                if signs[k] != positive:
                    ctx.link(color, key(cross[k][0]), key(cross[(k + 1) % 4][0]))
        count = hc[:-1, :].astype(int) + hc[1:, :] + vc[:, :-1] + vc[:, 1:]
        plain = (count == 2) & ~mask & ~block_mask
        for cell in node_cells:
            plain[cell] = False
        for j, i in np.argwhere(plain):
            sides = [sd for sd in _cell_sides(int(j), int(i)) if crossing(sd)]
            ctx.link(color, key(sides[0]), key(sides[1]))

    for r in boxes:
        j0, j1 = r[0].start, r[0].stop
        i0, i1 = r[1].start, r[1].stop
        k = SUBDIVIDE
        cNx, cNy = k * (i1 - i0), k * (j1 - j0)
        ctag = _region(ctx, xs[i0], ys[j0], h / k, cNx, cNy, depth + 1)
        for color in Color:
            hc, vc = crossings[color]
            adj = ctx.adj[color]
            parent = [("h", j0, i) for i in range(i0, i1)] + [("h", j1, i) for i in range(i0, i1)]
            parent += [("v", j, i0) for j in range(j0, j1)] + [("v", j, i1) for j in range(j0, j1)]
            parent = [sd for sd in parent if (hc[sd[1], sd[2]] if sd[0] == "h" else vc[sd[1], sd[2]])]
            child = {}
            for v in adj:
                if v[0] != ctag:
                    continue
                _, kind, j, i = v
                if kind == "h" and j in (0, cNy):
                    ps = ("h", j0 if j == 0 else j1, i0 + i // k)
                elif kind == "v" and i in (0, cNx):
                    ps = ("v", j0 + j // k, i0 if i == 0 else i1)
                else:
                    continue
                if ps in child:
                    raise _Unresolved("two fine crossings under one coarse side")
                child[ps] = v
            if set(child) != set(parent):
                raise _Unresolved("fine and coarse crossings disagree on a box border")
            for ps in parent:
                pk = (tag,) + ps
                ctx.pos[color].setdefault(pk, ctx.pos[color][child[ps]])
                ctx.link(color, pk, child[ps])
    return tag


def _assemble(ctx: _Ctx, top_tag: int, N: int) -> Web:
    n = ctx.n
    if ctx.roots_found != n or (n >= 2 and ctx.crits_found != n - 1):
        raise _Unresolved("node census disagrees with the degree")
    curves = []
    incid = {}
    for color in Color:
        adj = ctx.adj[color]
        pos = ctx.pos[color]
        slots = [k for k in range(4 * n) if (k % 2 == 1) == (color is Color.RE)]

        def terminal(v):
            if v[0] == "node":
                return True
            tg, kind, j, i = v
            return tg == top_tag and ((kind == "h" and j in (0, N)) or (kind == "v" and i in (0, N)))

        used = set()
        starts = sorted((v for v in adj if terminal(v)), key=lambda v: (v[0] != "node", str(v)))
        for st in starts:
            for first in adj[st]:
                if (st, first) in used:
                    continue
                path = [st, first]
                prev, cur = st, first
                while not terminal(cur):
                    nxt = list(adj[cur])
                    nxt.remove(prev)
                    if len(nxt) != 1:
                        raise _Unresolved("chain branches")
                    prev, cur = cur, nxt[0]
                    path.append(cur)
                used.add((st, path[1]))
                used.add((cur, path[-2]))
                ends = []
                for term in (path[0], path[-1]):
                    if term[0] == "node":
                        ends.append(("node", term[1]))
                    else:
                        pt = pos[term]
                        phi = math.atan2(pt.imag, pt.real)
                        k = min(slots, key=lambda q: abs(_wrap(q * math.pi / (2 * n) - phi)))
                        ends.append(("leaf", k))
                if ends[0] == ends[1]:
                    raise _Unresolved("chain returns to its start")
                pts = [ctx.nodes[x[1]][1] if x[0] == "node" else pos[x] for x in path]
                cid = len(curves)
                curves.append(TracedCurve(color, np.array(pts), tuple(ends)))
                for e_i, (term, nb) in enumerate(((path[0], path[1]), (path[-1], path[-2]))):
                    if term[0] == "node":
                        incid.setdefault(term[1], []).append((pos[nb], cid, e_i, color))
        links = sum(len(v) for v in adj.values()) // 2
        walked = sum(len(c.polyline) - 1 for c in curves if c.color is color)
        if links != walked:
            raise _Unresolved("closed loop in the sign grid")

    web_nodes = []
    for idx, (kind, p, (cx, cy, h)) in enumerate(ctx.nodes):
        def perimeter(q, cx=cx, cy=cy, h=h):
            # position along the cell boundary, counterclockwise from the lower-left corner
            dx, dy = (q.real - cx) / h, (q.imag - cy) / h
            if abs(dy) < 1e-9:
                return dx
            if abs(dx - 1) < 1e-9:
                return 1 + dy
            if abs(dy - 1) < 1e-9:
                return 3 - dx
            return 4 - dy

        items = sorted(incid.get(idx, []), key=lambda t: perimeter(t[0]))
        angles = tuple(math.atan2((q - p).imag, (q - p).real) % TWO_PI for q, _, _, _ in items)
        web_nodes.append(WebNode(idx, kind, p, angles, tuple(c for _, _, _, c in items),
                                 [(cid, e) for _, cid, e, _ in items]))
    lvs = [Leaf(k, k * math.pi / (2 * n), Color.IM if k % 2 == 0 else Color.RE) for k in range(4 * n)]
    web = Web(n, ctx.R, lvs, curves, web_nodes, ctx.P)
    try:
        check_web(web)
    except TraceError as exc:
        raise _Unresolved(str(exc)) from exc
    return web


def sign_grid_oracle(P: MonicPolynomial, resolution: int = 255, max_resolution: int = 1023,
                     crit_tol: float = 1e-9, guard_frac: float = 1e-3) -> Web:
    """Marching-squares web of P over the square of half-width R = cauchy_radius + 1.

    Unresolved cells are re-extracted on aligned sub-grids; if that fails the
    whole grid is refined (N -> 2N + 1) up to ``max_resolution``.
    """
    if resolution < 64:
        raise UsageError("resolution must be at least 64")
    R = cauchy_radius(P) + 1.0
    N = resolution | 1  # odd, so the grid never passes through the origin
    last = None
    while N <= max(max_resolution, resolution | 1):
        ctx = _Ctx(P, R, crit_tol, guard_frac * R)
        try:
            top = _region(ctx, -R, -R, 2 * R / N, N, N, 0)
            return _assemble(ctx, top, N)
        except _Unresolved as exc:
            last = exc
            N = 2 * N + 1
    raise TraceError(f"sign grid unresolved at resolution {(N - 1) // 2}: {last}")
