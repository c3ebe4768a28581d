"""Trace the zero curves of Re P and Im P inside a disc and assemble the web."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from math import factorial

import numpy as np
from scipy.optimize import brentq

from . import _kernels
from .errors import NonGenericError, TraceError, UsageError
from .poly import (MonicPolynomial, cauchy_radius, cluster, critical_points, evaluate, magnitude, roots,
                   taylor_coeffs)


class Color(str, Enum):
    RE = "RE"
    IM = "IM"

    @property
    def other(self) -> "Color":
        return Color.IM if self is Color.RE else Color.RE


# F = Re(omega * P) picks out Re P (omega = 1) or Im P (omega = -i)
OMEGA = {Color.RE: 1.0 + 0j, Color.IM: -1j}


class NodeKind(str, Enum):
    ROOT = "ROOT"
    CRITICAL = "CRITICAL"


def slot_color(k: int) -> Color:
    return Color.IM if k % 2 == 0 else Color.RE


def harmonic_value(P: MonicPolynomial, color: Color, z):
    return (OMEGA[color] * evaluate(P, z)).real


@dataclass(frozen=True)
class TraceParams:
    """Tolerances, mostly as fractions of the boundary radius R."""

    h0_frac: float = 1 / 200
    hmin_frac: float = 1 / 20000
    merge_tol_frac: float = 1e-4
    ftol_frac: float = 1e-12      # times R^n
    gfloor_frac: float = 1e-14    # times R^(n-1)
    crit_tol_frac: float = 1e-9   # critical value counted as zero, relative to sum |a_k||c|^k
    guard: float = 10.0           # refuse when features are closer than guard * merge_tol
    max_steps: int = 40000
    radius: float | None = None   # override R (must exceed the Cauchy radius)

    def __post_init__(self):
        for name in ("h0_frac", "hmin_frac", "merge_tol_frac", "ftol_frac", "crit_tol_frac"):
            if getattr(self, name) <= 0:
                raise UsageError(f"{name} must be positive")


@dataclass(frozen=True)
class Leaf:
    index: int
    angle: float
    color: Color

    @property
    def point(self) -> complex:
        return complex(np.exp(1j * self.angle))


@dataclass
class TracedCurve:
    color: Color
    polyline: np.ndarray
    endpoints: tuple  # two refs: ("leaf", k) or ("node", node_id, slot)


@dataclass
class WebNode:
    id: int
    kind: NodeKind
    position: complex
    slot_angles: tuple        # ccw-sorted branch directions
    slot_colors: tuple
    incidences: list = field(default_factory=list)  # (curve_id, end) per slot, ccw

    @property
    def valency(self) -> int:
        return len(self.slot_angles)


@dataclass
class Web:
    n: int
    radius: float
    leaves: list
    curves: list
    nodes: list
    source: MonicPolynomial | None = None

    def leaf_ends(self) -> int:
        return sum(1 for c in self.curves for e in c.endpoints if e[0] == "leaf")

    def dump(self) -> str:
        """Plain-text debug dump: LEAVES / CURVES / NODES sections."""
        f = lambda x: f"{x:.9g}"  # noqa: E731
        lines = [f"WEB n={self.n} R={f(self.radius)}", "LEAVES"]
        for lf in self.leaves:
            lines.append(f"{lf.index} {lf.color.value} {f(lf.angle)}")
        lines.append("CURVES")
        for i, c in enumerate(self.curves):
            ends = " ".join(":".join(str(x) for x in e) for e in c.endpoints)
            lines.append(f"{i} {c.color.value} {ends} {len(c.polyline)}")
            lines.extend(f"  {f(p.real)} {f(p.imag)}" for p in c.polyline)
        lines.append("NODES")
        for nd in self.nodes:
            inc = " ".join(f"{cid}.{end}" for cid, end in nd.incidences)
            lines.append(f"{nd.id} {nd.kind.value} {f(nd.position.real)} {f(nd.position.imag)} "
                         f"{nd.valency} {inc}")
        return "\n".join(lines) + "\n"


def boundary_radius(P: MonicPolynomial, params: TraceParams | None = None) -> float:
    if params is not None and params.radius is not None:
        if params.radius <= cauchy_radius(P):
            raise UsageError("boundary radius must exceed the Cauchy radius")
        return float(params.radius)
    return cauchy_radius(P) + 1.0


def leaves(P: MonicPolynomial, R: float) -> list[Leaf]:
    """The 4n boundary leaves, each refined to an exact zero on the circle |z| = R.

    On the circle each harmonic part has a strict sign at the neighbouring
    slots of the other colour, which brackets exactly the zero we want.
    """
    n = P.degree
    if R <= cauchy_radius(P):
        raise UsageError("R must exceed the Cauchy radius")
    step = math.pi / (2 * n)
    out = []
    for k in range(4 * n):
        color = slot_color(k)
        a, b = (k - 1) * step, (k + 1) * step

        def g(theta, color=color):
            return harmonic_value(P, color, R * np.exp(1j * theta))

        ga, gb = g(a), g(b)
        if ga == 0:
            theta = a
        elif gb == 0:
            theta = b
        elif ga * gb > 0:
            raise TraceError(f"leaf {k}: no sign change bracketing angle {k * step:.6f}")
        else:
            theta = brentq(g, a, b, xtol=1e-15, rtol=1e-15)
        out.append(Leaf(k, theta % (2 * math.pi), color))
    return out


def _angle_diff(a: float, b: float) -> float:
    d = (a - b) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


def trace_curve(P: MonicPolynomial, color: Color, start: complex, R: float,
                params: TraceParams | None = None, direction: complex | None = None,
                specials=None, capture=None):
    """Follow the zero curve of the ``color`` part of P from ``start``.

    Stops on the boundary circle or inside a capture disc.  Returns
    ``(polyline, status, hit_index)``.
    """
    params = params or TraceParams()
    n = P.degree
    scale = R ** n
    z0 = complex(start)
    if abs(harmonic_value(P, color, z0)) > 1e-6 * scale:
        raise UsageError("start point is not on the zero set")
    if direction is None:
        direction = -z0 / abs(z0)
    specials = np.asarray(specials if specials is not None else np.zeros(0), dtype=np.complex128)
    capture = np.asarray(capture if capture is not None else np.zeros(0), dtype=np.complex128)
    pts, npts, status, hit = _kernels.trace(
        P.full, OMEGA[color], z0, complex(direction), float(R), specials, capture,
        params.merge_tol_frac * R, params.h0_frac * R, params.hmin_frac * R,
        params.ftol_frac * scale, params.gfloor_frac * R ** (n - 1), params.max_steps)
    if status == _kernels.STEP_BUDGET:
        raise TraceError(f"step budget exhausted tracing {color.value} from {z0:.6g}")
    if status == _kernels.STEP_UNDERFLOW:
        raise TraceError(f"step size underflow tracing {color.value} from {z0:.6g}")
    if status == _kernels.GRADIENT_FLOOR:
        raise NonGenericError(f"gradient vanished near {pts[-1]:.6g} ({color.value})")
    return np.asarray(pts), int(status), int(hit)


def _project(P, color, z, iters=8):
    omega = OMEGA[color]
    for _ in range(iters):
        t = taylor_coeffs(P, z)
        f = (omega * t[0]).real
        g = (omega * t[1]).conjugate()
        if abs(g) == 0:
            break
        z = z - f * g / abs(g) ** 2
    return z


@dataclass
class _NodeSpec:
    kind: NodeKind
    position: complex
    colors: tuple          # colours whose zero set passes through
    slots: list            # [(angle, colour)]


def _node_specs(P: MonicPolynomial, R: float, params: TraceParams):
    n = P.degree
    merge_tol = params.merge_tol_frac * R
    guard = params.guard * merge_tol
    scale = R ** n
    rts = roots(P)
    for c, mult in cluster(rts):
        if mult > 1:
            raise NonGenericError(f"multiple root near {c:.6g} (non-generic within tolerance)")
    specs = []
    for r in rts:
        d = taylor_coeffs(P, r)[1]
        arg = math.atan2(d.imag, d.real)
        slots = []
        for m in range(2):
            slots.append(((math.pi / 2 - arg + m * math.pi) % (2 * math.pi), Color.RE))
            slots.append(((-arg + m * math.pi) % (2 * math.pi), Color.IM))
        specs.append(_NodeSpec(NodeKind.ROOT, complex(r), (Color.RE, Color.IM), slots))
    crits = critical_points(P) if n >= 2 else np.zeros(0, dtype=np.complex128)
    for c, mult in cluster(crits):
        t = taylor_coeffs(P, c)
        k = mult + 1
        ak = t[k] if abs(t[k]) > 0 else t[min(k + 1, n)]
        for color in (Color.RE, Color.IM):
            omega = OMEGA[color]
            val = (omega * t[0]).real
            if abs(val) <= params.crit_tol_frac * magnitude(P, c):
                phase = math.atan2((omega * ak).imag, (omega * ak).real)
                slots = [(((math.pi / 2 - phase + m * math.pi) / k) % (2 * math.pi), color)
                         for m in range(2 * k)]
                specs.append(_NodeSpec(NodeKind.CRITICAL, complex(c), (color,), slots))
            else:
                # distance at which the two nearby branches pass the saddle
                miss = (abs(val) / max(abs(ak), 1e-300)) ** (1.0 / k)
                if miss < guard:
                    raise NonGenericError(
                        f"{color.value} critical value {val:.3g} at {c:.6g} is non-generic within tolerance")
    pos = [s.position for s in specs]
    for i in range(len(pos)):
        for j in range(i):
            if abs(pos[i] - pos[j]) < guard:
                raise NonGenericError(
                    f"nodes at {pos[i]:.6g} and {pos[j]:.6g} closer than {guard:.3g} "
                    "(non-generic within tolerance)")
    for s in specs:
        if abs(s.position) >= R - guard:
            raise TraceError(f"node {s.position:.6g} outside the tracing disc")
    return rts, crits, specs


def extract_web(P: MonicPolynomial, params: TraceParams | None = None) -> Web:
    """Trace the full harmonic web of P.

    Every leaf and every node branch is traced; each edge is therefore
    followed from both of its ends and the two traces must agree.
    """
    params = params or TraceParams()
    n = P.degree
    R = boundary_radius(P, params)
    lvs = leaves(P, R)
    rts, crits, specs = _node_specs(P, R, params)
    merge_tol = params.merge_tol_frac * R
    specials = np.concatenate([rts, crits]).astype(np.complex128)
    by_color = {c: [i for i, s in enumerate(specs) if c in s.colors] for c in Color}

    # terminals: ("leaf", k) or ("node", node_id, slot_index)
    starts = []
    for lf in lvs:
        z = R * np.exp(1j * lf.angle)
        starts.append((("leaf", lf.index), lf.color, complex(z), complex(-z / abs(z))))
    for i, s in enumerate(specs):
        for j, (ang, color) in enumerate(s.slots):
            e = complex(np.exp(1j * ang))
            z = _project(P, color, s.position + 3 * merge_tol * e)
            starts.append((("node", i, j), color, z, e))

    leaf_angles = {c: [(lf.angle, lf.index) for lf in lvs if lf.color is c] for c in Color}
    partner = {}
    polylines = {}
    for term, color, z0, d0 in starts:
        idx = by_color[color]
        capture = np.array([specs[i].position for i in idx], dtype=np.complex128)
        pts, status, hit = trace_curve(P, color, z0, R, params, d0, specials, capture)
        if status == _kernels.HIT_BOUNDARY:
            phi = math.atan2(pts[-1].imag, pts[-1].real)
            best = min(leaf_angles[color], key=lambda a: _angle_diff(a[0], phi))
            if _angle_diff(best[0], phi) > math.pi / (4 * n):
                raise TraceError(f"{color.value} curve left the disc at angle {phi:.6f}, away from any leaf")
            end = ("leaf", best[1])
        else:
            node_id = idx[hit]
            spec = specs[node_id]
            vec = pts[-1] - spec.position
            phi = math.atan2(vec.imag, vec.real)
            cands = [(j, a) for j, (a, c) in enumerate(spec.slots) if c is color]
            j = min(cands, key=lambda t: _angle_diff(t[1], phi))[0]
            end = ("node", node_id, j)
        if end == term:
            raise TraceError(f"curve from {term} returned to its start")
        partner[term] = end
        polylines[term] = pts

    curves = []
    seen = set()
    for term, color, _, _ in starts:
        if term in seen:
            continue
        end = partner[term]
        if partner.get(end) != term:
            label = end if end[0] == "leaf" else term
            raise TraceError(f"leaf pairing inconsistency at {label}: traces from "
                             f"{term} and {end} disagree")
        seen.add(term)
        seen.add(end)
        curves.append(TracedCurve(color, polylines[term], (term, end)))

    # ccw incidence lists
    nodes = []
    slot_to_curve = {}
    for cid, c in enumerate(curves):
        for e_i, ref in enumerate(c.endpoints):
            if ref[0] == "node":
                slot_to_curve[(ref[1], ref[2])] = (cid, e_i)
    for i, s in enumerate(specs):
        order = sorted(range(len(s.slots)), key=lambda j: s.slots[j][0])
        inc = [slot_to_curve[(i, j)] for j in order]
        nodes.append(WebNode(i, s.kind, s.position, tuple(s.slots[j][0] for j in order),
                             tuple(s.slots[j][1] for j in order), inc))
    # rewrite node refs as (node, id) - the slot is recorded by the incidence list
    for c in curves:
        c.endpoints = tuple(ref if ref[0] == "leaf" else ("node", ref[1]) for ref in c.endpoints)
    web = Web(n, R, lvs, curves, nodes, P)
    check_web(web)
    return web


def check_web(web: Web) -> None:
    """Raise TraceError if the web breaks a structural invariant."""
    n = web.n
    leaf_hits = [0] * (4 * n)
    for c in web.curves:
        for ref in c.endpoints:
            if ref[0] == "leaf":
                leaf_hits[ref[1]] += 1
                if slot_color(ref[1]) is not c.color:
                    raise TraceError(f"{c.color.value} curve attached to leaf {ref[1]} of the other colour")
    bad = [k for k, h in enumerate(leaf_hits) if h != 1]
    if bad:
        raise TraceError(f"leaves {bad} not used exactly once")
    for nd in web.nodes:
        if nd.valency % 2 or nd.valency < 4:
            raise TraceError(f"node {nd.id} has valency {nd.valency}")
        if nd.kind is NodeKind.ROOT:
            cols = nd.slot_colors
            if nd.valency != 4 or any(cols[i] is cols[(i + 1) % 4] for i in range(4)):
                raise TraceError(f"root node {nd.id} does not alternate RE/IM")
