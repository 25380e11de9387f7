"""Pure-Python/numpy twin of the compiled kernel module.

Same public API and the same log-space adaptive Gauss-Kronrod scheme as
``hsmdp._kernels``, implemented with numpy node batches.  Selected by
``hsmdp.backend`` when the compiled extension is unavailable (or forced via
``HSMDP_BACKEND=py``).  Expect it to be one to two orders of magnitude slower;
``benchmarks/bench_backends.py`` quantifies the gap.
"""

from __future__ import annotations

import math

import numpy as np

backend_name = "py"

_LOG_2PI = math.log(2.0 * math.pi)
_LOG_2_OVER_PI = math.log(2.0 / math.pi)
_LOG_4_OVER_PI2 = math.log(4.0 / math.pi**2)

# QUADPACK dqk15 rule (positive half).
_XGK = np.array([
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0,
])
_WGK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
])
_WG = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469,
])

# full 15-node layout: mid - h*xgk[0..6], mid, mid + h*xgk[6..0]
_NODES = np.concatenate([-_XGK[:7], [0.0], _XGK[6::-1]])
_W15 = np.concatenate([_WGK[:7], [_WGK[7]], _WGK[6::-1]])
_W7 = np.zeros(15)
_W7[1:7:2] = _WG[:3]
_W7[7] = _WG[3]
_W7[9:15:2] = _WG[2::-1]

_GLX = None
_GLW = None


def init_gl(xs, ws):
    global _GLX, _GLW
    _GLX = np.asarray(xs, dtype=float)
    _GLW = np.asarray(ws, dtype=float)
    if not (4 <= _GLX.size <= 32) or _GLX.shape != _GLW.shape:
        raise ValueError("expected a 4..32 point rule")


def _hsplus_log_weight(lam):
    lam = np.asarray(lam, dtype=float)
    u = lam - 1.0
    near = np.abs(u) < 1e-5
    safe = np.where(near, 2.0, lam)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.log(np.log(safe) / (safe * safe - 1.0))
    series = np.log((1.0 - 0.5 * u + u * u / 3.0) / (2.0 + u))
    return np.where(near, series, r)


def _logf(fid, par, x):
    x = np.asarray(x, dtype=float)
    if fid == 1:
        ax = par[0]
        lam = x / (1.0 - x)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (_LOG_2_OVER_PI - np.log1p(lam * lam) - 0.5 * _LOG_2PI
                   - np.log(lam) - ax * ax / (2.0 * lam * lam)
                   - 2.0 * np.log1p(-x))
        return np.where((x <= 0.0) | (x >= 1.0), -np.inf, out)
    if fid == 2:
        z2, t2, p = par
        s = np.sin(x)
        c = np.cos(x)
        k = s * s
        with np.errstate(divide="ignore"):
            out = (math.log(2.0) + (1.0 + 2.0 * p) * np.log(s)
                   - 0.5 * z2 * k - np.log(t2 * k + c * c))
        return np.where(s <= 0.0, -np.inf, out)
    if fid == 3:
        z2, t2 = par
        lam = np.tan(x)
        v = 1.0 + t2 * lam * lam
        return _LOG_2_OVER_PI - 0.5 * (_LOG_2PI + np.log(v)) - z2 / (2.0 * v)
    if fid in (4, 5):
        z2, t2 = par[0], par[1]
        p = par[2] if fid == 5 else 0.0
        lam = np.tan(x)
        c = np.cos(x)
        v = 1.0 + t2 * lam * lam
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (_LOG_4_OVER_PI2 + _hsplus_log_weight(lam) - 2.0 * np.log(c)
                   - 0.5 * (_LOG_2PI + np.log(v)) - z2 / (2.0 * v)
                   - p * np.log(v))
        return np.where(lam <= 0.0, -np.inf, out)
    if fid == 6:
        z, inv_b, p = par
        lf = -0.5 * (z - x) ** 2 - np.abs(x) * inv_b
        if p != 0.0:
            with np.errstate(divide="ignore"):
                lf = lf + p * np.log(np.abs(x))
            lf = np.where(x == 0.0, -np.inf, lf)
        return lf
    raise ValueError(f"unknown integrand id {fid}")


def _panel(fid, par, a, b):
    h = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    lf = _logf(fid, par, mid + h * _NODES)
    m = np.max(lf)
    if not np.isfinite(m):
        return -np.inf, -np.inf
    w = np.exp(lf - m)
    resk = float(np.dot(_W15, w))
    resg = float(np.dot(_W7, w))
    err = abs(resk - resg)
    logI = m + math.log(resk * h) if resk > 0 else -np.inf
    logE = m + math.log(err * h + 1e-300)
    return logI, logE


def _logsumexp(vals):
    m = max(vals)
    if m == -np.inf:
        return -np.inf
    return m + math.log(sum(math.exp(v - m) for v in vals))


def _adaptive(fid, par, breaks, abs_tol, rel_tol, max_panels):
    pa, pb, pI, pE = [], [], [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        if b - a <= 0.0:
            continue
        i, e = _panel(fid, par, a, b)
        pa.append(a)
        pb.append(b)
        pI.append(i)
        pE.append(e)
    if not pa:
        raise RuntimeError("empty integration range")
    cap = min(max(max_panels, len(pa)), 500)
    while True:
        log_tot = _logsumexp(pI)
        log_err = _logsumexp(pE)
        tol_log = math.log(abs_tol)
        if log_tot > -np.inf:
            tol_log = max(tol_log, math.log(rel_tol) + log_tot)
        if log_err <= tol_log:
            return log_tot
        if len(pa) >= cap:
            raise RuntimeError(f"quadrature failure (fid={fid})")
        j = int(np.argmax(pE))
        a, b = pa[j], pb[j]
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            pE[j] = -np.inf
            continue
        i1, e1 = _panel(fid, par, a, mid)
        i2, e2 = _panel(fid, par, mid, b)
        pa[j], pb[j], pI[j], pE[j] = a, mid, i1, e1
        pa.append(mid)
        pb.append(b)
        pI.append(i2)
        pE.append(e2)


def _breaks(points, lo, hi):
    pts = sorted({lo, hi, *(p for p in points if lo < p < hi)})
    out = [pts[0]]
    for p in pts[1:]:
        if p - out[-1] > 1e-15:
            out.append(p)
    return out


# ---------------------------------------------------------------------------
# public API (mirrors the compiled module)
# ---------------------------------------------------------------------------

def hs_log_marginal(x, abs_tol=1e-14, rel_tol=1e-10, max_panels=200):
    ax = abs(x)
    brk = _breaks([ax / (1 + ax), 0.5 * ax / (1 + ax), 0.5, 0.9], 0.0, 1.0)
    return _adaptive(1, (ax,), brk, abs_tol, rel_tol, max_panels)


def hs_log_marginal_batch(xs, abs_tol=1e-14, rel_tol=1e-10, max_panels=200):
    return np.array([hs_log_marginal(x, abs_tol, rel_tol, max_panels)
                     for x in np.asarray(xs, dtype=float)])


def _kappa_log_moment(z, t, p, rel_tol, max_panels):
    az = abs(z)
    te = min(t, 0.3)
    pts = [math.pi / 4, math.pi / 2 - 10 * te, math.pi / 2 - te]
    if az > 10.0:
        pts.append(0.1)
    if az > 1.0:
        pts.append(1.5 / az)
    brk = _breaks(pts, 0.0, math.pi / 2)
    return _adaptive(2, (z * z, t * t, p), brk, 1e-305, rel_tol, max_panels)


def hs_kappa_log_norm(z, t, rel_tol=1e-10, max_panels=200):
    return _kappa_log_moment(z, t, 0.0, rel_tol, max_panels)


def hs_kappa_moments(z, t, rel_tol=1e-10, max_panels=200):
    l0 = _kappa_log_moment(z, t, 0.0, rel_tol, max_panels)
    l1 = _kappa_log_moment(z, t, 1.0, rel_tol, max_panels)
    l2 = _kappa_log_moment(z, t, 2.0, rel_tol, max_panels)
    return math.exp(l1 - l0), math.exp(l2 - l0)


def hs_kappa_mean_batch(zs, ts, rel_tol=1e-9, max_panels=200):
    zs = np.asarray(zs, dtype=float)
    ts = np.asarray(ts, dtype=float)
    if ts.shape == (1,):
        ts = np.full_like(zs, ts[0])
    out = np.empty_like(zs)
    for i, (z, t) in enumerate(zip(zs, ts)):
        l0 = _kappa_log_moment(z, t, 0.0, rel_tol, max_panels)
        l1 = _kappa_log_moment(z, t, 1.0, rel_tol, max_panels)
        out[i] = math.exp(l1 - l0)
    return out


def hsplus_kappa_moments(z, t, rel_tol=1e-9, max_panels=300):
    az = abs(z)
    pts = [math.pi / 4, math.atan(0.05), math.atan(1.0 / t),
           math.atan(max(az, 1.0) / t)]
    brk = _breaks(pts, 0.0, math.pi / 2)
    ls = [_adaptive(5, (z * z, t * t, p), brk, 1e-305, rel_tol, max_panels)
          for p in (0.0, 1.0, 2.0)]
    return math.exp(ls[1] - ls[0]), math.exp(ls[2] - ls[0])


def _obs_breaks(z, t, plus=False):
    zm = max(abs(z), 1.0)
    pts = [math.atan(0.05 / t), math.atan(0.25 / t), math.atan(1.0 / t),
           math.atan(zm / t), math.atan(4.0 * zm / t), math.pi / 4]
    if plus:
        pts += [math.atan(0.002), math.atan(0.05), math.atan(0.3)]
    return _breaks(pts, 0.0, math.pi / 2)


def obs_log_marginal(z, t, plus=False, rel_tol=1e-10, max_panels=300):
    fid = 4 if plus else 3
    par = (z * z, t * t, 0.0) if plus else (z * z, t * t)
    return _adaptive(fid, par, _obs_breaks(z, t, plus), 1e-305, rel_tol,
                     max_panels)


def obs_log_marginal_fixed(z, t, plus=False):
    if _GLX is None:
        raise RuntimeError("init_gl() was not called")
    fid = 4 if plus else 3
    par = (z * z, t * t, 0.0) if plus else (z * z, t * t)
    brk = _obs_breaks(z, t, plus)
    logs = []
    for a, b in zip(brk[:-1], brk[1:]):
        h = 0.5 * (b - a)
        mid = 0.5 * (a + b)
        lf = _logf(fid, par, mid + h * _GLX) + np.log(h * _GLW)
        logs.append(lf)
    lf = np.concatenate(logs)
    m = np.max(lf)
    if not np.isfinite(m):
        return -np.inf
    return float(m + np.log(np.sum(np.exp(lf - m))))


def obs_log_marginal_grid(zs, ts, plus=False):
    zs = np.asarray(zs, dtype=float)
    ts = np.asarray(ts, dtype=float)
    out = np.empty((zs.size, ts.size))
    for i, z in enumerate(zs):
        for j, t in enumerate(ts):
            out[i, j] = obs_log_marginal_fixed(z, t, plus)
    return out


def laplace_posterior_mean(z, b, rel_tol=1e-10, max_panels=300):
    lo = min(0.0, z) - 9.0
    hi = max(0.0, z) + 9.0
    pts = [0.0, z, z - b, z + b, b, -b]
    l0 = _adaptive(6, (z, 1.0 / b, 0.0), _breaks(pts, lo, hi),
                   1e-305, rel_tol, max_panels)
    lpos = _adaptive(6, (z, 1.0 / b, 1.0), _breaks(pts, 0.0, hi),
                     1e-305, rel_tol, max_panels)
    lneg = _adaptive(6, (z, 1.0 / b, 1.0), _breaks(pts, lo, 0.0),
                     1e-305, rel_tol, max_panels)
    return math.exp(lpos - l0) - math.exp(lneg - l0)


def laplace_mean_batch(zs, b, rel_tol=1e-9, max_panels=300):
    return np.array([laplace_posterior_mean(z, b, rel_tol, max_panels)
                     for z in np.asarray(zs, dtype=float)])
