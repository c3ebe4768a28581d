"""Finite levels mGT_q inside Sym(Z/qZ) and the tower maps between them.

mGT_q is generated by the multiplications a -> d a (d a unit mod q) and the
involution theta_q: a -> 1 - a.  Elements are stored as permutation tables;
the closure is a plain breadth-first search, and the affine shape of every
element is read off afterwards rather than assumed.

Words in the generators are lists of tokens ``m{d}`` and ``theta`` composed
as functions: the rightmost token acts first.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import OracleMismatch, PreconditionError, UsageError

Q_MAX = 200


@dataclass(frozen=True)
class ModularPermutation:
    q: int
    table: tuple

    def __post_init__(self):
        if self.q < 2 or len(self.table) != self.q or sorted(self.table) != list(range(self.q)):
            raise UsageError("not a permutation of Z/q")

    def __call__(self, a: int) -> int:
        return self.table[a % self.q]

    def __mul__(self, other: "ModularPermutation") -> "ModularPermutation":
        """Composition, other first."""
        if other.q != self.q:
            raise UsageError("different moduli")
        return ModularPermutation(self.q, tuple(self.table[x] for x in other.table))

    def order(self) -> int:
        k, p = 1, self
        ident = identity(self.q)
        while p != ident:
            p = p * self
            k += 1
        return k


@dataclass(frozen=True)
class AffineNormalForm:
    d: int
    e: int
    q: int

    def __post_init__(self):
        if math.gcd(self.d, self.q) != 1:
            raise UsageError("d must be a unit")

    def __mul__(self, other: "AffineNormalForm") -> "AffineNormalForm":
        # (d1 a + e1) o (d2 a + e2) = d1 d2 a + d1 e2 + e1
        return AffineNormalForm(self.d * other.d % self.q, (self.d * other.e + self.e) % self.q, self.q)

    def permutation(self) -> ModularPermutation:
        return ModularPermutation(self.q, tuple((self.d * a + self.e) % self.q for a in range(self.q)))


def totient(q: int) -> int:
    return sum(1 for d in range(1, q + 1) if math.gcd(d, q) == 1)


def identity(q: int) -> ModularPermutation:
    return ModularPermutation(q, tuple(range(q)))


@lru_cache(maxsize=4096)
def mult(q: int, d: int) -> ModularPermutation:
    if math.gcd(d, q) != 1:
        raise UsageError(f"{d} is not a unit mod {q}")
    return ModularPermutation(q, tuple(d * a % q for a in range(q)))


@lru_cache(maxsize=512)
def theta(q: int) -> ModularPermutation:
    return ModularPermutation(q, tuple((1 - a) % q for a in range(q)))


def units(q: int) -> list[int]:
    return [d for d in range(1, q) if math.gcd(d, q) == 1] or [1]


def generators(q: int) -> dict:
    gens = {f"m{d}": mult(q, d) for d in units(q)}
    gens["theta"] = theta(q)
    return gens


def _check_q(q):
    if not isinstance(q, int) or q < 2 or q > Q_MAX:
        raise UsageError(f"modulus must lie in 2..{Q_MAX}")


def _closure(q: int, gens: dict) -> dict:
    """BFS closure; returns table bytes -> generator word (rightmost acts first)."""
    arrs = [(name, np.asarray(g.table, dtype=np.int16)) for name, g in gens.items()]
    start = np.arange(q, dtype=np.int16)
    words = {start.tobytes(): ()}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        wx = words[x.tobytes()]
        for name, g in arrs:
            y = g[x]  # g o x
            key = y.tobytes()
            if key not in words:
                words[key] = (name,) + wx
                queue.append(y)
    return words


def _from_bytes(q, key) -> ModularPermutation:
    return ModularPermutation(q, tuple(int(v) for v in np.frombuffer(key, dtype=np.int16)))


def mgt_group_words(q: int) -> dict:
    """Elements of mGT_q with a shortest generator word each."""
    return dict(_group_words(q))


@lru_cache(maxsize=64)
def _group_words(q: int):
    _check_q(q)
    return tuple((_from_bytes(q, k), w) for k, w in _closure(q, generators(q)).items())


def mgt_group(q: int) -> set:
    return set(mgt_group_words(q))


def affine_normal_form(p: ModularPermutation):
    """(d, e) with p(a) = d a + e, or the string "not affine"."""
    q = p.q
    e = p(0)
    d = (p(1) - e) % q
    if math.gcd(d, q) != 1:
        return "not affine"
    if all(p(a) == (d * a + e) % q for a in range(q)):
        return AffineNormalForm(d, e, q)
    return "not affine"


def dihedral_subgroup(q: int) -> set:
    if q < 3:
        raise UsageError("q must be at least 3")
    _check_q(q)
    gens = {"neg": mult(q, q - 1), "theta": theta(q)}
    return {_from_bytes(q, k) for k in _closure(q, gens)}


def dihedral_presentation_ok(q: int) -> bool:
    """Two involutions whose product has order q, generating a group of order 2q."""
    a, b = mult(q, q - 1), theta(q)
    ident = identity(q)
    return (a * a == ident and b * b == ident and a != ident and b != ident
            and (a * b).order() == q and len(dihedral_subgroup(q)) == 2 * q)


# ---------------------------------------------------------------------------
# the tower


def parse_word(word) -> list[str]:
    toks = word.split() if isinstance(word, str) else list(word)
    for tk in toks:
        if tk != "theta" and not (tk.startswith("m") and tk[1:].lstrip("-").isdigit()):
            raise UsageError(f"bad generator token {tk!r}")
    return toks


def evaluate(q: int, word) -> ModularPermutation:
    out = identity(q)
    for tk in reversed(parse_word(word)):
        g = theta(q) if tk == "theta" else mult(q, int(tk[1:]) % q)
        out = g * out
    return out


def _map_word(word, p: int) -> list[str]:
    return ["theta" if tk == "theta" else f"m{int(tk[1:]) % p}" for tk in parse_word(word)]


def tower_map(q: int, p: int, word) -> ModularPermutation:
    """u_{q,p} on an element of mGT_q given as a word; image in mGT_p.

    Generator-wise: m_d -> m_{d mod p}, theta_q -> theta_p.  The result is
    cross-checked against the affine reduction (d, e) -> (d mod p, e mod p).
    """
    if p < 1 or q % p:
        raise PreconditionError(f"{p} does not divide {q}")
    if p == 1:
        raise UsageError("target modulus must be at least 2")
    x = evaluate(q, word)
    img = evaluate(p, _map_word(word, p))
    nf = affine_normal_form(x)
    if nf == "not affine":
        raise OracleMismatch(f"element {word!r} of mGT_{q} is not affine")
    red = AffineNormalForm(nf.d % p, nf.e % p, p).permutation()
    if red != img:
        raise OracleMismatch("tower map is not well defined", witness=(word, img.table, red.table))
    return img


def check_well_defined(q: int, p: int):
    """Exhaustive check on the Cayley graph of mGT_q: for every element x and
    generator g, the images of word(g x) and g.word(x) agree in mGT_p.

    Returns None, or a witness pair of words with equal value mod q and different images.
    """
    if q % p:
        raise PreconditionError(f"{p} does not divide {q}")
    elems = mgt_group_words(q)
    gens = generators(q)
    image = {x: evaluate(p, _map_word(w, p)) for x, w in elems.items()}
    gimage = {name: evaluate(p, _map_word([name], p)) for name in gens}
    for x, wx in elems.items():
        for name, g in gens.items():
            if gimage[name] * image[x] != image[g * x]:
                return (" ".join((name,) + tuple(wx)), " ".join(elems[g * x]))
    return None


def reduce_normal_form(nf: AffineNormalForm, p: int) -> AffineNormalForm:
    return AffineNormalForm(nf.d % p, nf.e % p, p)


def tower_compatibility(q: int, p: int, r: int) -> bool:
    if q % p or p % r:
        raise PreconditionError("need r | p | q")
    for x, w in mgt_group_words(q).items():
        via = tower_map(p, r, _map_word(w, p)) if r >= 2 else None
        direct = tower_map(q, r, w) if r >= 2 else None
        if via != direct:
            return False
    return True


def homomorphism_on_normal_forms(q: int, p: int) -> bool:
    """(x y) reduced equals x reduced times y reduced, over all pairs of mGT_q."""
    forms = [affine_normal_form(x) for x in mgt_group(q)]
    if any(f == "not affine" for f in forms):
        return False
    pairs = [(f.d, f.e) for f in forms]
    for d1, e1 in pairs:
        for d2, e2 in pairs:
            # reduce(x y) versus reduce(x) reduce(y), on plain integers
            lhs = (d1 * d2 % q % p, (d1 * e2 + e1) % q % p)
            rhs = (d1 % p * (d2 % p) % p, (d1 % p * (e2 % p) + e1 % p) % p)
            if lhs != rhs:
                return False
    return True


# ---------------------------------------------------------------------------
# table


@dataclass(frozen=True)
class MgtRow:
    q: int
    order: int
    q_phi: int
    dihedral: int
    affine: bool

    @property
    def ok(self) -> bool:
        return self.order == self.q_phi and self.affine and (self.q < 3 or self.dihedral == 2 * self.q)


def table(qs) -> list[MgtRow]:
    rows = []
    for q in qs:
        G = mgt_group(q)
        dih = len(dihedral_subgroup(q)) if q >= 3 else 2
        rows.append(MgtRow(q, len(G), q * totient(q), dih,
                           all(affine_normal_form(x) != "not affine" for x in G)))
    return rows


def format_table(rows, machine: bool = False) -> str:
    if machine:
        lines = ["q,order,q_phi,dihedral,affine"]
        lines += [f"{r.q},{r.order},{r.q_phi},{r.dihedral},{int(r.affine)}" for r in rows]
    else:
        lines = [f"{'q':>4} {'|mGT_q|':>8} {'q*phi(q)':>9} {'|D|':>5} affine"]
        lines += [f"{r.q:>4} {r.order:>8} {r.q_phi:>9} {r.dihedral:>5} {'yes' if r.affine else 'no'}"
                  for r in rows]
    return "\n".join(lines) + "\n"
