"""Monic complex polynomials and their harmonic real/imaginary parts."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from math import comb

import numpy as np

from . import _kernels
from .errors import RootFindingError, UsageError

ABERTH_MAXITER = 200
CLUSTER_RTOL = 1e-6


@dataclass(frozen=True)
class MonicPolynomial:
    """z^n + a_{n-1} z^{n-1} + ... + a_0, stored as (a_0, ..., a_{n-1})."""

    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) < 1:
            raise UsageError("degree must be at least 1")
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    @property
    def full(self) -> np.ndarray:
        """Coefficients low -> high including the leading 1."""
        return np.array(self.coeffs + (1.0 + 0j,), dtype=np.complex128)

    def __call__(self, z):
        return evaluate(self, z)

    def derivative_coeffs(self) -> np.ndarray:
        c = self.full
        return np.array([k * c[k] for k in range(1, len(c))], dtype=np.complex128)

    @classmethod
    def from_roots(cls, roots) -> "MonicPolynomial":
        c = np.array([1.0 + 0j])
        for r in roots:
            # multiply by (z - r); c is low -> high
            c = np.concatenate(([0j], c)) - r * np.concatenate((c, [0j]))
        return cls(tuple(c[:-1]))

    def to_text(self) -> str:
        parts = [str(self.degree)] + [f"{_num(c.real)},{_num(c.imag)}" for c in self.coeffs]
        return "; ".join(parts)

    def __str__(self) -> str:
        return format_expression(self)


def _num(x: float) -> str:
    return repr(float(x)) if x != 0 else "0"


def evaluate(P: MonicPolynomial, z):
    """Horner evaluation; works on scalars and numpy arrays."""
    p = np.ones_like(np.asarray(z, dtype=np.complex128)) if np.ndim(z) else 1.0 + 0j
    for a in reversed(P.coeffs):
        p = p * z + a
    return p


def magnitude(P: MonicPolynomial, z) -> float:
    """sum |a_k| |z|^k: the size of the terms summed when evaluating P(z)."""
    return float(np.polyval(np.abs(P.full[::-1]), abs(z)))


def cauchy_radius(P: MonicPolynomial) -> float:
    return 1.0 + max(abs(a) for a in P.coeffs)


def taylor_coeffs(P: MonicPolynomial, c: complex) -> np.ndarray:
    """Coefficients t_k with P(z) = sum t_k (z - c)^k (repeated synthetic division)."""
    work = list(P.full[::-1])  # high -> low
    out = []
    for _ in range(P.degree + 1):
        acc = 0j
        quotient = []
        for a in work:
            acc = acc * c + a
            quotient.append(acc)
        out.append(quotient[-1])
        work = quotient[:-1]
    return np.array(out, dtype=np.complex128)


def _polish(coef: np.ndarray, z: np.ndarray) -> np.ndarray:
    hi = coef[::-1]
    dhi = np.polyder(hi)
    for _ in range(3):
        dp = np.polyval(dhi, z)
        step = np.where(dp != 0, np.polyval(hi, z) / np.where(dp != 0, dp, 1.0), 0.0)
        z = z - step
    return z


def _monic_roots(coef: np.ndarray, tol: float) -> np.ndarray:
    n = coef.shape[0] - 1
    if n == 1:
        return np.array([-coef[0]])
    radius = 1.0 + float(np.max(np.abs(coef[:-1])))
    # fixed seed: results must not depend on global RNG state
    rng = np.random.default_rng(0x5EED + n)
    for attempt in range(4):
        phase = rng.uniform(0, 2 * np.pi)
        angles = phase + 2 * np.pi * np.arange(n) / n + rng.uniform(-0.2, 0.2, n)
        start = 0.5 * radius * np.exp(1j * angles)
        z, converged, _ = _kernels.aberth(coef, start.astype(np.complex128), ABERTH_MAXITER, 1e-15)
        z = np.asarray(z)
        if not np.all(np.isfinite(z)):
            continue
        # simple roots get a Newton polish; clustered ones are left alone
        close = np.abs(z[:, None] - z[None, :]) + np.eye(n) * 1e300
        simple = np.min(close, axis=1) > 1e-6 * (1 + np.abs(z))
        z = np.where(simple, _polish(coef, z), z)
        resid = np.abs(np.polyval(coef[::-1], z))
        if np.all(resid < tol * (1 + np.abs(z)) ** n):
            return z
    raise RootFindingError(f"Aberth iteration did not converge within {ABERTH_MAXITER} sweeps")


def roots(P: MonicPolynomial, tol: float = 1e-9) -> np.ndarray:
    """All n roots with multiplicity, sorted by (real, imag)."""
    if tol <= 0:
        raise UsageError("tol must be positive")
    z = _monic_roots(P.full, tol)
    return z[np.lexsort((z.imag, z.real))]


def critical_points(P: MonicPolynomial, tol: float = 1e-9) -> np.ndarray:
    """Roots of P'."""
    if P.degree < 2:
        raise UsageError("critical points need degree >= 2")
    d = P.derivative_coeffs() / P.degree
    z = _monic_roots(d, tol)
    return z[np.lexsort((z.imag, z.real))]


def cluster(values, rtol: float = CLUSTER_RTOL):
    """Group nearly-equal complex values; returns [(centre, multiplicity), ...]."""
    vals = list(values)
    groups: list[list[complex]] = []
    for v in vals:
        for g in groups:
            c = sum(g) / len(g)
            if abs(v - c) <= rtol * (1 + abs(c)):
                g.append(v)
                break
        else:
            groups.append([v])
    return [(complex(sum(g) / len(g)), len(g)) for g in groups]


# ---------------------------------------------------------------------------
# harmonic parts


@dataclass(frozen=True)
class BivariatePolynomial:
    """Real polynomial in x, y as a mapping (i, j) -> coefficient of x^i y^j."""

    terms: tuple  # sorted ((i, j), c) pairs with c != 0

    @classmethod
    def from_dict(cls, d) -> "BivariatePolynomial":
        return cls(tuple(sorted((k, float(v)) for k, v in d.items() if v != 0)))

    def as_dict(self) -> dict:
        return dict(self.terms)

    @property
    def degree(self) -> int:
        return max((i + j for (i, j), _ in self.terms), default=0)

    def __call__(self, x, y):
        return sum(c * x**i * y**j for (i, j), c in self.terms)

    def gradient_at(self, x, y):
        gx = sum(c * i * x ** (i - 1) * y**j for (i, j), c in self.terms if i)
        gy = sum(c * j * x**i * y ** (j - 1) for (i, j), c in self.terms if j)
        return gx, gy

    def laplacian(self) -> "BivariatePolynomial":
        out: dict = {}
        for (i, j), c in self.terms:
            if i >= 2:
                out[(i - 2, j)] = out.get((i - 2, j), 0.0) + c * i * (i - 1)
            if j >= 2:
                out[(i, j - 2)] = out.get((i, j - 2), 0.0) + c * j * (j - 1)
        scale = max((abs(c) for _, c in self.terms), default=1.0)
        return BivariatePolynomial.from_dict(
            {k: v for k, v in out.items() if abs(v) > 1e-12 * scale * 64})

    def is_harmonic(self) -> bool:
        return not self.laplacian().terms


@dataclass(frozen=True)
class HarmonicPair:
    re_part: BivariatePolynomial
    im_part: BivariatePolynomial


def harmonic_parts(P: MonicPolynomial) -> HarmonicPair:
    """Expand P(x + iy) = re(x, y) + i im(x, y) monomial by monomial."""
    re_d: dict = {}
    im_d: dict = {}
    for k, a in enumerate(P.full):
        if a == 0:
            continue
        for j in range(k + 1):
            # C(k, j) x^(k-j) (iy)^j
            w = a * comb(k, j) * (1j) ** j
            key = (k - j, j)
            re_d[key] = re_d.get(key, 0.0) + w.real
            im_d[key] = im_d.get(key, 0.0) + w.imag
    return HarmonicPair(BivariatePolynomial.from_dict(re_d), BivariatePolynomial.from_dict(im_d))


# ---------------------------------------------------------------------------
# sampling


def random_monic(rng: np.random.Generator, n: int, scale: float = 1.0) -> MonicPolynomial:
    """Monic polynomial with i.i.d. complex Gaussian roots."""
    r = scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2)
    return MonicPolynomial.from_roots(r)


def random_real_rooted(rng: np.random.Generator, n: int, min_gap: float = 0.2) -> MonicPolynomial:
    """Real coefficients, n distinct real roots at least ``min_gap`` apart."""
    while True:
        r = np.sort(rng.uniform(-2.0, 2.0, n))
        if n == 1 or np.min(np.diff(r)) >= min_gap:
            return MonicPolynomial.from_roots(r.astype(np.complex128))


# ---------------------------------------------------------------------------
# text formats

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)|(?P<sym>[-+*^()zi]))")


def _tokens(s: str):
    pos = 0
    s = s.strip()
    out = []
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m or m.end() == pos:
            raise UsageError(f"cannot parse polynomial near {s[pos:]!r}")
        out.append(m.group("num") if m.group("num") is not None else m.group("sym"))
        pos = m.end()
    return out


def _parse_complex(tok, i):
    """Parse `(a+bi)`-style or bare real/imaginary coefficient at tok[i]."""
    if tok[i] == "(":
        j = tok.index(")", i) if ")" in tok[i:] else -1
        if j < 0:
            raise UsageError("unbalanced parenthesis in coefficient")
        inner = re.sub(r"(?<![\d.])i", "1i", "".join(tok[i + 1:j])).replace("i", "j")
        if not inner:
            raise UsageError("empty coefficient")
        try:
            return complex(inner), j + 1
        except ValueError:
            raise UsageError(f"bad complex coefficient ({''.join(tok[i + 1:j])})") from None
    if tok[i] == "i":
        return 1j, i + 1
    if re.fullmatch(r"[\d.].*", tok[i]):
        v = float(tok[i])
        if i + 1 < len(tok) and tok[i + 1] == "i":
            return 1j * v, i + 2
        return complex(v), i + 1
    return None, i


def parse_expression(s: str) -> MonicPolynomial:
    """Parse sums of `c z^k` terms, e.g. ``z^3 - (1+2i)z + 0.5``."""
    tok = _tokens(s)
    if not tok:
        raise UsageError("empty polynomial")
    terms: dict[int, complex] = {}
    i = 0
    while i < len(tok):
        sign = 1
        while i < len(tok) and tok[i] in "+-":
            sign = -sign if tok[i] == "-" else sign
            i += 1
        if i >= len(tok):
            raise UsageError("dangling operator")
        coef, i = _parse_complex(tok, i)
        if i < len(tok) and tok[i] == "*":
            i += 1
        power = 0
        if i < len(tok) and tok[i] == "z":
            power = 1
            i += 1
            if i < len(tok) and tok[i] == "^":
                if i + 1 >= len(tok) or not tok[i + 1].isdigit():
                    raise UsageError("exponent must be a non-negative integer")
                power = int(tok[i + 1])
                i += 2
        elif coef is None:
            raise UsageError(f"unexpected token {tok[i]!r}")
        if coef is None:
            coef = 1.0
        terms[power] = terms.get(power, 0) + sign * coef
        if i < len(tok) and tok[i] not in "+-":
            raise UsageError(f"unexpected token {tok[i]!r}")
    n = max((k for k, v in terms.items() if v != 0), default=0)
    if n < 1:
        raise UsageError("polynomial must have degree >= 1")
    if terms[n] != 1:
        raise UsageError("polynomial must be monic (leading coefficient 1)")
    return MonicPolynomial(tuple(terms.get(k, 0j) for k in range(n)))


def parse_text(line: str) -> MonicPolynomial:
    """Parse the line format ``n; re0,im0; re1,im1; ...``."""
    parts = [p.strip() for p in line.strip().split(";")]
    try:
        n = int(parts[0])
        coeffs = []
        for p in parts[1:]:
            re_s, im_s = p.split(",")
            coeffs.append(complex(float(re_s), float(im_s)))
    except ValueError:
        raise UsageError(f"malformed polynomial line {line!r}") from None
    if n < 1 or len(coeffs) != n:
        raise UsageError(f"expected {n} coefficients, got {len(coeffs)}")
    return MonicPolynomial(tuple(coeffs))


def parse_polynomial(s: str) -> MonicPolynomial:
    return parse_text(s) if ";" in s else parse_expression(s)


def format_expression(P: MonicPolynomial) -> str:
    out = [f"z^{P.degree}" if P.degree > 1 else "z"]
    for k in range(P.degree - 1, -1, -1):
        a = P.coeffs[k]
        if a == 0:
            continue
        mono = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
        if a.imag == 0:
            c = a.real
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            body = (f"{mag:g}" if (mag != 1 or not mono) else "") + mono
            out.append(f"{sign} {body}")
        else:
            out.append(f"+ ({a.real:g}{a.imag:+g}i){mono}")
    return " ".join(out)
