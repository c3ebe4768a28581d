"""The dihedral action on monic polynomials and on chord diagrams.

Generators:

* ``s``: P(z) -> i P(e^{-i pi/2n} z).  The leading coefficient becomes
  i e^{-i pi/2} = 1, so the image is already monic.  On diagrams it moves
  every leaf one slot counterclockwise and swaps RE and IM.
* ``t``: P(z) -> conj(P(conj z)).  On diagrams it reflects slot k to -k,
  keeps colours and reverses every cyclic order.

Elements are kept in the normal form s^k t^e and act as "t^e first, then s^k".
"""
from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass

from . import _perm
from .diagram import ChordDiagram, canonical_form, relabel, web_to_diagram
from .errors import UsageError
from .poly import MonicPolynomial
from .webtrace import TraceParams, extract_web


@dataclass(frozen=True)
class DihedralElement:
    k: int
    e: int
    order: int  # rotation order of s (4n on diagrams)

    def __post_init__(self):
        if self.order < 1 or self.e not in (0, 1):
            raise UsageError("bad dihedral element")
        object.__setattr__(self, "k", self.k % self.order)

    def __mul__(self, other: "DihedralElement") -> "DihedralElement":
        if other.order != self.order:
            raise UsageError("elements of different dihedral groups")
        sign = -1 if self.e else 1
        return DihedralElement(self.k + sign * other.k, (self.e + other.e) % 2, self.order)

    def inverse(self) -> "DihedralElement":
        if self.e:
            return self
        return DihedralElement(-self.k, 0, self.order)

    def __pow__(self, m: int) -> "DihedralElement":
        out = identity(self.order)
        base = self if m >= 0 else self.inverse()
        for _ in range(abs(m)):
            out = out * base
        return out

    def is_identity(self) -> bool:
        return self.k == 0 and self.e == 0

    def slot(self, x: int) -> int:
        """Image of leaf slot x (slots mod the rotation order)."""
        return (self.k + (-x if self.e else x)) % self.order

    def __str__(self):
        return f"s^{self.k} t^{self.e}"


def identity(order: int) -> DihedralElement:
    return DihedralElement(0, 0, order)


def s(n: int) -> DihedralElement:
    return DihedralElement(1, 0, 4 * n)


def t(n: int) -> DihedralElement:
    return DihedralElement(0, 1, 4 * n)


def parse_element(text: str, n: int) -> DihedralElement:
    """Parse ``s^k t^e`` (either factor optional; ``1`` or ``e`` is the identity)."""
    txt = text.replace(" ", "").replace("*", "")
    if txt in ("", "1", "e", "id"):
        return identity(4 * n)
    m = re.fullmatch(r"(?:s(?:\^(-?\d+))?)?(?:t(?:\^([01]))?)?", txt)
    if not m or not txt:
        raise UsageError(f"not a dihedral element: {text!r}")
    has_s = txt.startswith("s")
    k = int(m.group(1)) if m.group(1) is not None else (1 if has_s else 0)
    has_t = "t" in txt
    e = int(m.group(2)) if m.group(2) is not None else (1 if has_t else 0)
    return DihedralElement(k, e, 4 * n)


def all_elements(n: int):
    M = 4 * n
    return [DihedralElement(k, e, M) for e in (0, 1) for k in range(M)]


# ---------------------------------------------------------------------------
# action on polynomials


def act_on_poly(g: DihedralElement, P: MonicPolynomial) -> MonicPolynomial:
    n = P.degree
    if g.order % (4 * n):
        raise UsageError("element does not belong to the group of this degree")
    coeffs = list(P.coeffs)
    if g.e:
        coeffs = [c.conjugate() for c in coeffs]
    if g.k:
        w = cmath.exp(-1j * math.pi / (2 * n))
        # s^k multiplies a_j by (i w^j)^k
        coeffs = [c * (1j * w**j) ** g.k for j, c in enumerate(coeffs)]
    return MonicPolynomial(tuple(coeffs))


def leading_phase(g: DihedralElement, n: int) -> complex:
    """Phase picked up by the leading coefficient under g (always 1 here)."""
    w = cmath.exp(-1j * math.pi / (2 * n))
    return (1j * w**n) ** g.k


# ---------------------------------------------------------------------------
# action on diagrams


def act_on_diagram(g: DihedralElement, d: ChordDiagram) -> ChordDiagram:
    if g.order != 4 * d.n:
        raise UsageError("element does not belong to the group of this degree")
    return relabel(d, g.slot, swap_colors=bool(g.k % 2), reverse=bool(g.e))


def act_on_code(g: DihedralElement, code: str) -> str:
    from .diagram import parse_code
    return canonical_form(act_on_diagram(g, parse_code(code)))


def diagram_of(P: MonicPolynomial, params: TraceParams | None = None) -> ChordDiagram:
    return web_to_diagram(extract_web(P, params))


def check_equivariance(P: MonicPolynomial, g: DihedralElement, params: TraceParams | None = None) -> bool:
    """Does tracing commute with g?  Tracing failures propagate."""
    d = diagram_of(P, params)
    lhs = canonical_form(act_on_diagram(g, d))
    rhs = canonical_form(diagram_of(act_on_poly(g, P), params))
    return lhs == rhs


# ---------------------------------------------------------------------------
# the group actually generated on coloured slots


def _colored_slot_perm(g: DihedralElement, n: int):
    # points (slot, colour flag) flattened to slot * 2 + flag; flag 1 = "colour swapped"
    M = 4 * n
    out = []
    for x in range(M):
        for c in (0, 1):
            out.append(g.slot(x) * 2 + (c ^ (g.k % 2)))
    return tuple(out)


def generator_perms(n: int):
    return _colored_slot_perm(s(n), n), _colored_slot_perm(t(n), n)


@dataclass(frozen=True)
class GroupOrderReport:
    n: int
    measured: int
    nominal: int
    order_s: int
    order_t: int

    @property
    def mismatch(self) -> bool:
        return self.measured != self.nominal

    def __str__(self):
        flag = "MISMATCH" if self.mismatch else "agrees"
        return (f"n={self.n}: measured |<s,t>| = {self.measured}, nominal 4n = {self.nominal} "
                f"({flag}); ord(s) = {self.order_s}, ord(t) = {self.order_t}")


def measured_group_order(n: int) -> int:
    return group_order_report(n).measured


def group_order_report(n: int) -> GroupOrderReport:
    if n < 1:
        raise UsageError("n must be positive")
    ps, pt = generator_perms(n)
    elems = _perm.closure([ps, pt])
    return GroupOrderReport(n, len(elems), 4 * n, _perm.order(ps), _perm.order(pt))
