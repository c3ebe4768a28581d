"""Numeric inner loops.

Every kernel has two implementations: a numba ``@njit`` version and a plain
numpy/python version.  The numba path is used when numba imports and the
environment variable ``HARMWEB_NUMBA`` is not set to ``0``.  Both paths take
and return the same array types so callers never branch on the backend.
"""
import os

import numpy as np

_WANT_NUMBA = os.environ.get("HARMWEB_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")

try:
    if not _WANT_NUMBA:
        raise ImportError
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised through the env flag
    HAS_NUMBA = False

BACKEND = "numba" if HAS_NUMBA else "numpy"

# trace_curve status codes
HIT_BOUNDARY = 0
HIT_NODE = 1
STEP_BUDGET = 2
GRADIENT_FLOOR = 3
STEP_UNDERFLOW = 4


# ---------------------------------------------------------------------------
# polynomial evaluation


def _horner2_py(coef, z):
    # coef is low -> high, full length n+1
    p = 0j
    dp = 0j
    for k in range(coef.shape[0] - 1, -1, -1):
        dp = dp * z + p
        p = p * z + coef[k]
    return p, dp


# ---------------------------------------------------------------------------
# Aberth-Ehrlich simultaneous root iteration


def _aberth_py(coef, z, maxiter, tol):
    n = z.shape[0]
    z = z.copy()
    converged = False
    it = 0
    for it in range(maxiter):
        biggest = 0.0
        for i in range(n):
            p, dp = _horner2(coef, z[i])
            if p == 0:
                continue
            ratio = p / dp if dp != 0 else p
            s = 0j
            for j in range(n):
                if j != i:
                    diff = z[i] - z[j]
                    if diff != 0:
                        s += 1.0 / diff
            denom = 1.0 - ratio * s
            w = ratio / denom if denom != 0 else ratio
            z[i] -= w
            rel = abs(w) / (1.0 + abs(z[i]))
            if rel > biggest:
                biggest = rel
        if biggest < tol:
            converged = True
            break
    return z, converged, it + 1


def _aberth_np(coef, z, maxiter, tol):
    """Vectorised (Jacobi-style) Aberth sweep; same fixed point as the loop."""
    z = z.astype(np.complex128).copy()
    n = z.shape[0]
    hi = coef[::-1]
    dhi = np.polyder(hi) if n > 0 else hi
    eye = np.eye(n, dtype=bool)
    for it in range(maxiter):
        p = np.polyval(hi, z)
        dp = np.polyval(dhi, z)
        safe_dp = np.where(dp == 0, 1.0, dp)
        ratio = np.where(dp == 0, p, p / safe_dp)
        diff = z[:, None] - z[None, :]
        diff[eye] = 1.0
        inv = np.where(diff == 0, 0.0, 1.0 / np.where(diff == 0, 1.0, diff))
        inv[eye] = 0.0
        s = inv.sum(axis=1)
        denom = 1.0 - ratio * s
        w = np.where(denom == 0, ratio, ratio / np.where(denom == 0, 1.0, denom))
        w = np.where(p == 0, 0.0, w)
        z = z - w
        if np.max(np.abs(w) / (1.0 + np.abs(z))) < tol:
            return z, True, it + 1
    return z, False, maxiter


# ---------------------------------------------------------------------------
# harmonic parts on a grid


def _eval_grid_py(coef, xs, ys):
    ny = ys.shape[0]
    nx = xs.shape[0]
    re = np.empty((ny, nx))
    im = np.empty((ny, nx))
    m = coef.shape[0]
    for j in range(ny):
        for i in range(nx):
            z = complex(xs[i], ys[j])
            p = 0j
            for k in range(m - 1, -1, -1):
                p = p * z + coef[k]
            re[j, i] = p.real
            im[j, i] = p.imag
    return re, im


def _eval_grid_np(coef, xs, ys):
    zz = xs[None, :] + 1j * ys[:, None]
    p = np.zeros_like(zz)
    for k in range(coef.shape[0] - 1, -1, -1):
        p = p * zz + coef[k]
    return np.ascontiguousarray(p.real), np.ascontiguousarray(p.imag)


# ---------------------------------------------------------------------------
# predictor-corrector tracing of {Re(omega * P) = 0}


def _trace_py(coef, omega, z0, d0, radius, specials, capture, capture_r,
              h0, hmin, ftol, gfloor, max_steps):
    """Follow one branch of the zero set of F = Re(omega * P) from ``z0``.

    Returns ``(points, npts, status, hit)``; ``hit`` is the capture index when
    ``status == HIT_NODE``.
    """
    pts = np.empty(max_steps + 2, dtype=np.complex128)
    pts[0] = z0
    npts = 1
    z = z0
    t = d0 / abs(d0)
    # start along the true tangent, oriented like the requested direction
    p, dp = _horner2(coef, z0)
    g = (omega * dp).conjugate()
    if abs(g) > gfloor:
        t0 = 1j * g / abs(g)
        if t0.real * t.real + t0.imag * t.imag < 0:
            t0 = -t0
        t = t0
    h = h0
    status = STEP_BUDGET
    hit = -1
    start_outside = abs(z0) >= radius * (1.0 - 1e-12)
    cos_max = 0.94  # ~20 degrees of turning per step
    xtol2 = (1e-6 * hmin) ** 2
    steps = 0
    tn = t
    while steps < max_steps:
        steps += 1
        dmin = 1e300
        for s in range(specials.shape[0]):
            d = abs(z - specials[s])
            if d < dmin:
                dmin = d
        hh = h
        cap = 0.3 * dmin
        if cap < hh:
            hh = cap
        if hh < hmin:
            hh = hmin
        zp = z + hh * t
        ok = False
        g = 0j
        for _ in range(6):
            p, dp = _horner2(coef, zp)
            f = (omega * p).real
            g = (omega * dp).conjugate()
            gn = g.real * g.real + g.imag * g.imag
            if gn == 0.0:
                break
            # residual small and the Newton displacement below the position tolerance
            if abs(f) < ftol and f * f < xtol2 * gn:
                ok = True
                break
            zp = zp - f * g / gn
        if ok:
            p, dp = _horner2(coef, zp)
            g = (omega * dp).conjugate()
            # a small gradient is expected next to a known node
            if abs(g) < gfloor and dmin > 10.0 * capture_r:
                pts[npts] = zp
                npts += 1
                status = GRADIENT_FLOOR
                break
            tn = 1j * g / abs(g)
            c = tn.real * t.real + tn.imag * t.imag
            if c < 0:
                tn = -tn
                c = -c
            if abs(zp - (z + hh * t)) > 0.5 * hh or c < cos_max:
                ok = False
        if not ok:
            if hh <= hmin * (1.0 + 1e-12):
                status = STEP_UNDERFLOW
                break
            h = hh * 0.5
            continue
        prev = z
        z = zp
        t = tn
        pts[npts] = z
        npts += 1
        h = min(hh * 1.6, h0)
        captured = False
        for c_i in range(capture.shape[0]):
            if abs(z - capture[c_i]) < capture_r:
                hit = c_i
                captured = True
                break
        if captured:
            status = HIT_NODE
            break
        if abs(z) >= radius:
            if start_outside and abs(prev) >= radius:
                continue
            # pull the last point back onto the circle along the chord
            a = prev
            b = z - prev
            bb = (b.real * b.real + b.imag * b.imag)
            ab = a.real * b.real + a.imag * b.imag
            aa = a.real * a.real + a.imag * a.imag
            disc = ab * ab - bb * (aa - radius * radius)
            if disc < 0:
                disc = 0.0
            s = (-ab + disc ** 0.5) / bb
            zb = a + s * b
            # then slide along the circle onto the curve
            phi = np.arctan2(zb.imag, zb.real)
            for _ in range(4):
                zb = radius * (np.cos(phi) + 1j * np.sin(phi))
                p, dp = _horner2(coef, zb)
                fb = (omega * p).real
                db = (omega * dp * 1j * zb).real
                if db == 0.0:
                    break
                phi -= fb / db
            zb = radius * (np.cos(phi) + 1j * np.sin(phi))
            if abs(zb - (a + s * b)) < hh:
                pts[npts - 1] = zb
            else:
                pts[npts - 1] = a + s * b
            status = HIT_BOUNDARY
            break
        start_outside = False
    return pts[:npts].copy(), npts, status, hit


if HAS_NUMBA:
    _horner2 = njit(cache=True)(_horner2_py)
    aberth = njit(cache=True)(_aberth_py)
    eval_grid = njit(cache=True)(_eval_grid_py)
    trace = njit(cache=True)(_trace_py)
else:
    _horner2 = _horner2_py
    aberth = _aberth_np
    eval_grid = _eval_grid_np
    trace = _trace_py


def warmup():
    """Compile the numba kernels once; a no-op on the numpy path."""
    coef = np.array([-1.0 + 0j, 0j, 1.0 + 0j])
    aberth(coef, np.array([0.5 + 0.5j, -0.4 - 0.3j]), 5, 1e-14)
    eval_grid(coef, np.linspace(-1, 1, 3), np.linspace(-1, 1, 3))
    trace(coef, 1.0 + 0j, 3.0 + 0j, -1.0 + 0j, 3.0, np.array([1.0 + 0j]),
          np.array([1.0 + 0j]), 1e-3, 0.01, 1e-5, 1e-10, 1e-14, 100)
