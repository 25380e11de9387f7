# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled numerical kernels: log-space adaptive Gauss-Kronrod quadrature
specialised to the handful of integrands that dominate runtime.

Every integral is accumulated in log space (panel values are kept as
``log(scale) + log(mantissa)``), which keeps global scales as small as
``tau = 1e-8`` and observations as large as ``20 sigma`` inside double range.

The pure-Python twin of this module is ``hsmdp._kernels_py``; both expose the
same functions and are selected at import time by ``hsmdp.backend``.
"""

import numpy as np

from libc.math cimport (atan, cos, exp, fabs, isfinite, log, log1p, sin,
                        sqrt, tan, INFINITY)

cdef double PI = 3.141592653589793
cdef double LOG_2PI = 1.8378770664093453
cdef double LOG_2_OVER_PI = -0.45158270528945486   # log(2/pi)
cdef double LOG_4_OVER_PI2 = -0.9031654105789097   # log(4/pi^2)
cdef double NEG_INF = -INFINITY

# QUADPACK dqk15 nodes (positive half, descending) and weights.
cdef double[8] XGK
XGK[0] = 0.991455371120813
XGK[1] = 0.949107912342759
XGK[2] = 0.864864423359769
XGK[3] = 0.741531185599394
XGK[4] = 0.586087235467691
XGK[5] = 0.405845151377397
XGK[6] = 0.207784955007898
XGK[7] = 0.0

cdef double[8] WGK
WGK[0] = 0.022935322010529
WGK[1] = 0.063092092629979
WGK[2] = 0.104790010322250
WGK[3] = 0.140653259715525
WGK[4] = 0.169004726639267
WGK[5] = 0.190350578064785
WGK[6] = 0.204432940075298
WGK[7] = 0.209482141084728

cdef double[4] WG
WG[0] = 0.129484966168870
WG[1] = 0.279705391489277
WG[2] = 0.381830050505119
WG[3] = 0.417959183673469

# Gauss-Legendre rule (<= 32 nodes) for the fixed-rule marginal grid; filled
# by init_gl() at import time (nodes on [-1, 1]).
cdef double[32] GLX
cdef double[32] GLW
cdef int GL_N = 0
cdef int GL_READY = 0

backend_name = "c"


def init_gl(xs, ws):
    """Install the Gauss-Legendre rule (called once by the backend)."""
    global GL_READY, GL_N
    cdef int i, n
    n = len(xs)
    if n != len(ws) or n < 4 or n > 32:
        raise ValueError("expected a 4..32 point rule")
    for i in range(n):
        GLX[i] = xs[i]
        GLW[i] = ws[i]
    GL_N = n
    GL_READY = 1


# ---------------------------------------------------------------------------
# integrands (log densities); fid selects the formula
# ---------------------------------------------------------------------------
# fid 1: horseshoe marginal (tau = 1) at par[0] = x, variable u in (0,1),
#        lambda = u/(1-u).
# fid 2: shrinkage-weight posterior moment, variable phi in (0, pi/2),
#        kappa = sin^2(phi); par = [z^2, t^2, p].
# fid 3: observation marginal (HS), variable psi = arctan(lambda);
#        par = [z^2, t^2].
# fid 4: observation marginal (HS+), same variable; par = [z^2, t^2].
# fid 5: shrinkage-weight posterior moment (HS+), psi variable;
#        par = [z^2, t^2, p].
# fid 6: Laplace(0, b) posterior kernel in theta; par = [z, 1/b, p] with the
#        extra weight |theta|^p.

cdef inline double _hsplus_log_weight(double lam) nogil:
    # log of ln(lam)/(lam^2 - 1), the half-Cauchy-mixed local density of HS+
    # up to the 4/pi^2 constant; removable singularity at lam = 1.
    cdef double u = lam - 1.0
    cdef double r
    if fabs(u) < 1e-5:
        r = (1.0 - 0.5 * u + u * u / 3.0) / (2.0 + u)
        return log(r)
    return log(log(lam) / (lam * lam - 1.0))


cdef double _logf(int fid, double* par, double x) nogil:
    cdef double lam, u, s, c, k, v, z2, t2, p, lf, th
    if fid == 1:
        u = x
        if u <= 0.0 or u >= 1.0:
            return NEG_INF
        lam = u / (1.0 - u)
        return (LOG_2_OVER_PI - log1p(lam * lam) - 0.5 * LOG_2PI - log(lam)
                - par[0] * par[0] / (2.0 * lam * lam) - 2.0 * log1p(-u))
    elif fid == 2:
        z2 = par[0]; t2 = par[1]; p = par[2]
        s = sin(x)
        if s <= 0.0:
            return NEG_INF
        c = cos(x)
        k = s * s
        return (0.6931471805599453 + (1.0 + 2.0 * p) * log(s)
                - 0.5 * z2 * k - log(t2 * k + c * c))
    elif fid == 3:
        z2 = par[0]; t2 = par[1]
        lam = tan(x)
        v = 1.0 + t2 * lam * lam
        return LOG_2_OVER_PI - 0.5 * (LOG_2PI + log(v)) - z2 / (2.0 * v)
    elif fid == 4:
        z2 = par[0]; t2 = par[1]
        lam = tan(x)
        if lam <= 0.0:
            return NEG_INF
        c = cos(x)
        v = 1.0 + t2 * lam * lam
        return (LOG_4_OVER_PI2 + _hsplus_log_weight(lam) - 2.0 * log(c)
                - 0.5 * (LOG_2PI + log(v)) - z2 / (2.0 * v))
    elif fid == 5:
        z2 = par[0]; t2 = par[1]; p = par[2]
        lam = tan(x)
        if lam <= 0.0:
            return NEG_INF
        c = cos(x)
        v = 1.0 + t2 * lam * lam
        return (LOG_4_OVER_PI2 + _hsplus_log_weight(lam) - 2.0 * log(c)
                - 0.5 * (LOG_2PI + log(v)) - z2 / (2.0 * v) - p * log(v))
    else:
        # fid 6
        th = x
        lf = -0.5 * (par[0] - th) * (par[0] - th) - fabs(th) * par[1]
        if par[2] != 0.0:
            if th == 0.0:
                return NEG_INF
            lf += par[2] * log(fabs(th))
        return lf


# ---------------------------------------------------------------------------
# log-space adaptive Gauss-Kronrod driver
# ---------------------------------------------------------------------------

cdef void _panel(int fid, double* par, double a, double b,
                 double* logI, double* logE) nogil:
    cdef double h = 0.5 * (b - a)
    cdef double mid = 0.5 * (a + b)
    cdef double[15] lf
    cdef double m = NEG_INF
    cdef int i, j
    cdef double xk, resk, resg, err
    for i in range(7):
        xk = h * XGK[i]
        lf[i] = _logf(fid, par, mid - xk)
        lf[14 - i] = _logf(fid, par, mid + xk)
        if lf[i] > m:
            m = lf[i]
        if lf[14 - i] > m:
            m = lf[14 - i]
    lf[7] = _logf(fid, par, mid)
    if lf[7] > m:
        m = lf[7]
    if m == NEG_INF:
        logI[0] = NEG_INF
        logE[0] = NEG_INF
        return
    resk = 0.0
    resg = 0.0
    for i in range(7):
        resk += WGK[i] * (exp(lf[i] - m) + exp(lf[14 - i] - m))
    resk += WGK[7] * exp(lf[7] - m)
    for i in range(3):
        j = 2 * i + 1
        resg += WG[i] * (exp(lf[j] - m) + exp(lf[14 - j] - m))
    resg += WG[3] * exp(lf[7] - m)
    err = fabs(resk - resg)
    logI[0] = m + log(resk * h) if resk > 0.0 else NEG_INF
    logE[0] = m + log(err * h + 1e-300)


cdef inline double _logsumexp_arr(double* v, int n) nogil:
    cdef double m = NEG_INF
    cdef double s = 0.0
    cdef int i
    for i in range(n):
        if v[i] > m:
            m = v[i]
    if m == NEG_INF:
        return NEG_INF
    for i in range(n):
        s += exp(v[i] - m)
    return m + log(s)


cdef double _adaptive(int fid, double* par, double* brk, int nbrk,
                      double abs_tol, double rel_tol, int max_panels,
                      int* fail) nogil:
    """Return log of the integral of exp(logf) over [brk[0], brk[nbrk-1]]."""
    cdef double[512] pa
    cdef double[512] pb
    cdef double[512] pI
    cdef double[512] pE
    cdef int n = 0
    cdef int i, jmax, cap
    cdef double logTot, logErr, tol_log, a, b, mid
    fail[0] = 0
    cap = max_panels
    if cap > 500:
        cap = 500
    if cap < nbrk:
        cap = nbrk
    for i in range(nbrk - 1):
        if brk[i + 1] - brk[i] <= 0.0:
            continue
        pa[n] = brk[i]
        pb[n] = brk[i + 1]
        _panel(fid, par, pa[n], pb[n], &pI[n], &pE[n])
        n += 1
    if n == 0:
        fail[0] = 1
        return NEG_INF
    while True:
        logTot = _logsumexp_arr(pI, n)
        logErr = _logsumexp_arr(pE, n)
        tol_log = log(abs_tol)
        if logTot > NEG_INF and log(rel_tol) + logTot > tol_log:
            tol_log = log(rel_tol) + logTot
        if logErr <= tol_log:
            return logTot
        if n >= cap:
            fail[0] = 1
            return logTot
        jmax = 0
        for i in range(1, n):
            if pE[i] > pE[jmax]:
                jmax = i
        a = pa[jmax]
        b = pb[jmax]
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            # interval at floating-point resolution; freeze its error
            pE[jmax] = NEG_INF
            continue
        pa[jmax] = a
        pb[jmax] = mid
        _panel(fid, par, a, mid, &pI[jmax], &pE[jmax])
        pa[n] = mid
        pb[n] = b
        _panel(fid, par, mid, b, &pI[n], &pE[n])
        n += 1


cdef int _build_brk(double* brk, double* pts, int npts, double lo, double hi) nogil:
    """Clip candidate points to (lo, hi), sort, dedupe; returns count."""
    cdef double[16] tmp
    cdef int n = 0, i, j
    cdef double t
    tmp[0] = lo
    n = 1
    for i in range(npts):
        t = pts[i]
        if t > lo and t < hi:
            tmp[n] = t
            n += 1
    tmp[n] = hi
    n += 1
    # insertion sort
    for i in range(1, n):
        t = tmp[i]
        j = i - 1
        while j >= 0 and tmp[j] > t:
            tmp[j + 1] = tmp[j]
            j -= 1
        tmp[j + 1] = t
    j = 0
    brk[0] = tmp[0]
    for i in range(1, n):
        if tmp[i] - brk[j] > 1e-15:
            j += 1
            brk[j] = tmp[i]
    return j + 1


# ---------------------------------------------------------------------------
# horseshoe marginal density (tau = 1, log scale)
# ---------------------------------------------------------------------------

cdef double _hs_log_marginal(double x, double abs_tol, double rel_tol,
                             int max_panels, int* fail) nogil:
    cdef double[1] par
    cdef double[8] pts
    cdef double[16] brk
    cdef double ax = fabs(x)
    cdef int nb
    par[0] = ax
    pts[0] = ax / (1.0 + ax)          # Gaussian-kernel knee lambda = |x|
    pts[1] = 0.5 * ax / (1.0 + ax)
    pts[2] = 0.5                      # lambda = 1
    pts[3] = 0.9
    nb = _build_brk(brk, pts, 4, 0.0, 1.0)
    return _adaptive(1, par, brk, nb, abs_tol, rel_tol, max_panels, fail)


def hs_log_marginal(double x, double abs_tol=1e-14, double rel_tol=1e-10,
                    int max_panels=200):
    """log pi_H(x) for the unit-scale horseshoe marginal; x must be nonzero."""
    cdef int fail = 0
    cdef double v = _hs_log_marginal(x, abs_tol, rel_tol, max_panels, &fail)
    if fail:
        raise RuntimeError("quadrature failure in hs_log_marginal(%r)" % x)
    return v


def hs_log_marginal_batch(double[::1] xs, double abs_tol=1e-14,
                          double rel_tol=1e-10, int max_panels=200):
    cdef Py_ssize_t n = xs.shape[0], i
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef int fail = 0, bad = 0
    with nogil:
        for i in range(n):
            out[i] = _hs_log_marginal(xs[i], abs_tol, rel_tol, max_panels, &fail)
            if fail:
                bad = 1
    if bad:
        raise RuntimeError("quadrature failure in hs_log_marginal_batch")
    return out_arr


# ---------------------------------------------------------------------------
# shrinkage-weight posterior moments
# ---------------------------------------------------------------------------

cdef double _kappa_log_moment(double z, double t, double p,
                              double rel_tol, int max_panels, int* fail) nogil:
    cdef double[3] par
    cdef double[8] pts
    cdef double[16] brk
    cdef double az = fabs(z)
    cdef double te = t if t < 0.3 else 0.3
    cdef int nb
    par[0] = z * z
    par[1] = t * t
    par[2] = p
    pts[0] = 0.25 * PI
    pts[1] = 0.5 * PI - 10.0 * te
    pts[2] = 0.5 * PI - te
    pts[3] = 0.1 if az > 10.0 else 0.5 * PI   # small-phi feature for huge z
    if az > 1.0:
        pts[4] = 1.5 / az
        nb = _build_brk(brk, pts, 5, 0.0, 0.5 * PI)
    else:
        nb = _build_brk(brk, pts, 4, 0.0, 0.5 * PI)
    return _adaptive(2, par, brk, nb, 1e-305, rel_tol, max_panels, fail)


cdef void _kappa_moments(double z, double t, double* m1, double* m2,
                         double rel_tol, int max_panels, int* fail) nogil:
    cdef int f0 = 0, f1 = 0, f2 = 0
    cdef double l0, l1, l2
    l0 = _kappa_log_moment(z, t, 0.0, rel_tol, max_panels, &f0)
    l1 = _kappa_log_moment(z, t, 1.0, rel_tol, max_panels, &f1)
    l2 = _kappa_log_moment(z, t, 2.0, rel_tol, max_panels, &f2)
    fail[0] = f0 | f1 | f2
    m1[0] = exp(l1 - l0)
    m2[0] = exp(l2 - l0)


def hs_kappa_log_norm(double z, double t, double rel_tol=1e-10,
                      int max_panels=200):
    """log of the kappa-posterior normalising constant (the p = 0 moment)."""
    cdef int fail = 0
    cdef double v
    with nogil:
        v = _kappa_log_moment(z, t, 0.0, rel_tol, max_panels, &fail)
    if fail:
        raise RuntimeError("quadrature failure in hs_kappa_log_norm(%r, %r)" % (z, t))
    return v


def hs_kappa_moments(double z, double t, double rel_tol=1e-10,
                     int max_panels=200):
    """(E[kappa], E[kappa^2]) for one standardised observation z = y/sigma
    under the horseshoe with standardised global scale t = tau/sigma."""
    cdef double m1 = 0.0, m2 = 0.0
    cdef int fail = 0
    with nogil:
        _kappa_moments(z, t, &m1, &m2, rel_tol, max_panels, &fail)
    if fail:
        raise RuntimeError("quadrature failure in hs_kappa_moments(%r, %r)" % (z, t))
    return m1, m2


cdef double _kappa_mean(double z, double t, double rel_tol, int max_panels,
                        int* fail) nogil:
    cdef int f0 = 0, f1 = 0
    cdef double l0, l1
    l0 = _kappa_log_moment(z, t, 0.0, rel_tol, max_panels, &f0)
    l1 = _kappa_log_moment(z, t, 1.0, rel_tol, max_panels, &f1)
    fail[0] = f0 | f1
    return exp(l1 - l0)


def hs_kappa_mean_batch(double[::1] zs, double[::1] ts, double rel_tol=1e-9,
                        int max_panels=200):
    """E[kappa | z_i, t_i] for paired arrays (ts may have length 1 = shared)."""
    cdef Py_ssize_t n = zs.shape[0], i
    cdef bint shared = ts.shape[0] == 1
    if not shared and ts.shape[0] != n:
        raise ValueError("ts must have length 1 or len(zs)")
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double t
    cdef int fail = 0, bad = 0
    with nogil:
        for i in range(n):
            t = ts[0] if shared else ts[i]
            out[i] = _kappa_mean(zs[i], t, rel_tol, max_panels, &fail)
            if fail:
                bad = 1
    if bad:
        raise RuntimeError("quadrature failure in hs_kappa_mean_batch")
    return out_arr


def hsplus_kappa_moments(double z, double t, double rel_tol=1e-9,
                         int max_panels=300):
    """(E[kappa], E[kappa^2]) under the horseshoe+ local mixture."""
    cdef double[3] par
    cdef double[8] pts
    cdef double[16] brk
    cdef double az = fabs(z)
    cdef double l0, l1, l2
    cdef int nb, f0 = 0, f1 = 0, f2 = 0
    par[0] = z * z
    par[1] = t * t
    pts[0] = 0.25 * PI
    pts[1] = atan(0.05)
    pts[2] = atan(1.0 / t) if t > 0 else 0.5 * PI
    pts[3] = atan((az if az > 1.0 else 1.0) / t) if t > 0 else 0.5 * PI
    nb = _build_brk(brk, pts, 4, 0.0, 0.5 * PI)
    with nogil:
        par[2] = 0.0
        l0 = _adaptive(5, par, brk, nb, 1e-305, rel_tol, max_panels, &f0)
        par[2] = 1.0
        l1 = _adaptive(5, par, brk, nb, 1e-305, rel_tol, max_panels, &f1)
        par[2] = 2.0
        l2 = _adaptive(5, par, brk, nb, 1e-305, rel_tol, max_panels, &f2)
    if f0 | f1 | f2:
        raise RuntimeError("quadrature failure in hsplus_kappa_moments(%r, %r)" % (z, t))
    return exp(l1 - l0), exp(l2 - l0)


# ---------------------------------------------------------------------------
# observation marginals m(z | t) (signal-plus-noise convolution), unit noise
# ---------------------------------------------------------------------------

cdef int _obs_brk(double* brk, double z, double t) nogil:
    cdef double[8] pts
    cdef double az = fabs(z)
    cdef double zm = az if az > 1.0 else 1.0
    pts[0] = atan(0.05 / t)
    pts[1] = atan(0.25 / t)
    pts[2] = atan(1.0 / t)
    pts[3] = atan(zm / t)
    pts[4] = atan(4.0 * zm / t)
    pts[5] = 0.25 * PI
    return _build_brk(brk, pts, 6, 0.0, 0.5 * PI)


cdef double _obs_log_marginal(double z, double t, bint plus, double rel_tol,
                              int max_panels, int* fail) nogil:
    cdef double[2] par
    cdef double[16] brk
    cdef int nb
    par[0] = z * z
    par[1] = t * t
    nb = _obs_brk_plus(brk, z, t) if plus else _obs_brk(brk, z, t)
    return _adaptive(4 if plus else 3, par, brk, nb, 1e-305, rel_tol,
                     max_panels, fail)


def obs_log_marginal(double z, double t, bint plus=False, double rel_tol=1e-10,
                     int max_panels=300):
    """Adaptive log m(z | t): the per-observation marginal likelihood factor."""
    cdef int fail = 0
    cdef double v
    with nogil:
        v = _obs_log_marginal(z, t, plus, rel_tol, max_panels, &fail)
    if fail:
        raise RuntimeError("quadrature failure in obs_log_marginal(%r, %r)" % (z, t))
    return v


cdef int _obs_brk_plus(double* brk, double z, double t) nogil:
    # the HS+ local weight has an integrable log pole at lambda -> 0 and a
    # removable singularity at lambda = 1; pin both with extra small-psi splits
    cdef double[12] pts
    cdef double az = fabs(z)
    cdef double zm = az if az > 1.0 else 1.0
    pts[0] = atan(0.002)
    pts[1] = atan(0.05)
    pts[2] = atan(0.3)
    pts[3] = 0.25 * PI
    pts[4] = atan(0.05 / t)
    pts[5] = atan(0.25 / t)
    pts[6] = atan(1.0 / t)
    pts[7] = atan(zm / t)
    pts[8] = atan(4.0 * zm / t)
    return _build_brk(brk, pts, 9, 0.0, 0.5 * PI)


cdef double _obs_log_marginal_fixed(double z, double t, bint plus) nogil:
    """Fixed-rule (32-pt GL per segment) variant for n x grid matrices."""
    cdef double[16] brk
    cdef double[2] par
    cdef int nb, i, j, fid
    cdef double a, b, h, mid, m, s, lf
    cdef double[160] buf
    cdef int nbuf = 0
    par[0] = z * z
    par[1] = t * t
    fid = 4 if plus else 3
    nb = _obs_brk_plus(brk, z, t) if plus else _obs_brk(brk, z, t)
    m = NEG_INF
    for i in range(nb - 1):
        a = brk[i]
        b = brk[i + 1]
        h = 0.5 * (b - a)
        mid = 0.5 * (a + b)
        for j in range(GL_N):
            lf = _logf(fid, par, mid + h * GLX[j]) + log(h * GLW[j])
            buf[nbuf] = lf
            nbuf += 1
            if lf > m:
                m = lf
        if nbuf > 96:
            # compress to keep the buffer bounded (3 segments expected)
            s = 0.0
            for j in range(nbuf):
                s += exp(buf[j] - m)
            buf[0] = m + log(s)
            nbuf = 1
    if m == NEG_INF:
        return NEG_INF
    s = 0.0
    for j in range(nbuf):
        s += exp(buf[j] - m)
    return m + log(s)


def obs_log_marginal_grid(double[::1] zs, double[::1] ts, bint plus=False):
    """len(zs) x len(ts) matrix of log m(z_i | t_g) via the fixed rule."""
    if not GL_READY:
        raise RuntimeError("init_gl() was not called")
    cdef Py_ssize_t n = zs.shape[0], g = ts.shape[0], i, j
    out_arr = np.empty((n, g), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    with nogil:
        for i in range(n):
            for j in range(g):
                out[i, j] = _obs_log_marginal_fixed(zs[i], ts[j], plus)
    return out_arr


def obs_log_marginal_fixed(double z, double t, bint plus=False):
    """Scalar fixed-rule marginal (same path as the grid)."""
    if not GL_READY:
        raise RuntimeError("init_gl() was not called")
    cdef double v
    with nogil:
        v = _obs_log_marginal_fixed(z, t, plus)
    return v


# ---------------------------------------------------------------------------
# Laplace-prior posterior mean (quadrature)
# ---------------------------------------------------------------------------

cdef double _laplace_mean(double z, double b, double rel_tol, int max_panels,
                          int* fail) nogil:
    cdef double[3] par
    cdef double[8] pts
    cdef double[16] brk
    cdef double lo, hi, l0, lpos, lneg, inv_b
    cdef int nb, f0 = 0, f1 = 0, f2 = 0
    inv_b = 1.0 / b
    par[0] = z
    par[1] = inv_b
    lo = (z if z < 0.0 else 0.0) - 9.0
    hi = (z if z > 0.0 else 0.0) + 9.0
    pts[0] = 0.0
    pts[1] = z
    pts[2] = z - b          # exponential-tilt shifts of the Gaussian factor
    pts[3] = z + b
    pts[4] = b              # prior spike width around the origin
    pts[5] = -b
    par[2] = 0.0
    nb = _build_brk(brk, pts, 6, lo, hi)
    l0 = _adaptive(6, par, brk, nb, 1e-305, rel_tol, max_panels, &f0)
    par[2] = 1.0
    nb = _build_brk(brk, pts, 6, 0.0, hi)
    lpos = _adaptive(6, par, brk, nb, 1e-305, rel_tol, max_panels, &f1)
    nb = _build_brk(brk, pts, 6, lo, 0.0)
    lneg = _adaptive(6, par, brk, nb, 1e-305, rel_tol, max_panels, &f2)
    fail[0] = f0 | f1 | f2
    return exp(lpos - l0) - exp(lneg - l0)


def laplace_posterior_mean(double z, double b, double rel_tol=1e-10,
                           int max_panels=300):
    """Posterior mean of theta for y = z, sigma = 1, theta ~ Laplace(0, b)."""
    cdef int fail = 0
    cdef double v
    with nogil:
        v = _laplace_mean(z, b, rel_tol, max_panels, &fail)
    if fail:
        raise RuntimeError("quadrature failure in laplace_posterior_mean(%r, %r)" % (z, b))
    return v


def laplace_mean_batch(double[::1] zs, double b, double rel_tol=1e-9,
                       int max_panels=300):
    cdef Py_ssize_t n = zs.shape[0], i
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef int fail = 0, bad = 0
    with nogil:
        for i in range(n):
            out[i] = _laplace_mean(zs[i], b, rel_tol, max_panels, &fail)
            if fail:
                bad = 1
    if bad:
        raise RuntimeError("quadrature failure in laplace_mean_batch")
    return out_arr
