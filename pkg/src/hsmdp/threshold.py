"""Rejection thresholds for sparse testing, tail approximations, and the
oracle testing risk.

Two threshold scales coexist.  The moderate-deviation threshold
sqrt(log(pi n / 2)) is the equal-odds Bayes-factor boundary when each of the
n observations informs a single coordinate (two-sided tails of order
n^{-1/2}).  The sparse-testing threshold sqrt(2 log(n / p0)) is the two-groups
boundary at sparsity p0/n (tails of order p0/n).  Keeping the two apart
matters: several tail identities hold at one scale and not the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import special

from .density import BOUND_CONSTANT
from .errors import DomainError, NoRootInBracket


@dataclass(frozen=True)
class ThresholdReport:
    t_mdp: float
    t_abos: float
    t_equiboundary: float
    n: int
    p0: int


def mdp_threshold(n: int) -> float:
    """Moderate-deviation rejection boundary sqrt(log(pi n / 2))."""
    if n < 2:
        raise DomainError("need n >= 2 so that pi*n/2 > 1")
    return math.sqrt(math.log(math.pi * n / 2.0))


def abos_threshold(n: int, p0: int) -> float:
    """Two-groups testing boundary sqrt(2 log(n / p0))."""
    if not 1 <= p0 < n:
        raise DomainError("need 1 <= p0 < n")
    return math.sqrt(2.0 * math.log(n / p0))


def mills_tail(t: float) -> tuple[float, float]:
    """(exact, approx) two-sided normal tail: 2*Phi_bar(t) and 2*phi(t)/t."""
    if t <= 0:
        raise DomainError("t must be positive")
    exact = float(special.erfc(t / math.sqrt(2.0)))
    approx = 2.0 * math.exp(-0.5 * t * t) / (t * math.sqrt(2.0 * math.pi))
    return exact, approx


def log_normal_tail(t: float) -> float:
    """log Phi_bar(t), stable for large t via erfcx."""
    return float(math.log(0.5) + math.log(special.erfcx(t / math.sqrt(2.0)))
                 - 0.5 * t * t)


def _bisect_then_secant(f, lo: float, hi: float, root_tol: float,
                        max_iter: int = 200) -> float:
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise NoRootInBracket(
            f"no sign change on [{lo:.6g}, {hi:.6g}] (f: {flo:.3e}, {fhi:.3e})")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0 or hi - lo < 1e-15 * max(1.0, abs(mid)):
            lo = hi = mid
            break
        if flo * fm < 0:
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
        if abs(fm) < root_tol and hi - lo < 1e-9:
            break
    # secant polish from the bisection bracket
    x0, x1 = lo, hi if hi > lo else lo * (1 + 1e-9)
    f0, f1 = f(x0), f(x1)
    for _ in range(60):
        if f1 == f0:
            break
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        if not (min(lo, hi) - 1e-12 <= x2 <= max(lo, hi) + 1e-12):
            break
        x0, f0, x1, f1 = x1, f1, x2, f(x2)
        if abs(f1) <= root_tol:
            return x1
    return 0.5 * (lo + hi) if abs(f(0.5 * (lo + hi))) < abs(f1) else x1


def equiboundary_solve(n: int, root_tol: float = 1e-10) -> float:
    """Threshold equating the Type I tail with the near-origin prior mass.

    Balances sqrt(2/pi) exp(-t^2/2) / t against the horseshoe mass of the
    undetectable window.  With n observations per coordinate the window on the
    observation scale |z| < t maps to effects |theta| < t/sqrt(n), where the
    near-origin mass formula 2 K (t/sqrt(n)) log(sqrt(n)/t) is valid and
    positive (the log factor is evaluated at the effect scale; at the raw
    observation scale t > 1 it would turn negative).  The root satisfies
    t^2 = log(pi n / 2) + O(log log n).
    """
    if n < 10:
        raise DomainError("need n >= 10")
    rn = math.sqrt(float(n))

    def f(t: float) -> float:
        lhs = math.sqrt(2.0 / math.pi) * math.exp(-0.5 * t * t) / t
        rhs = 2.0 * BOUND_CONSTANT * (t / rn) * abs(math.log(rn / t))
        return lhs - rhs

    hi = math.sqrt(4.0 * math.log(n))
    return _bisect_then_secant(f, 1.0, hi, root_tol)


def saddle_point_threshold(n: int, p0: int, prior_density_at,
                           root_tol: float = 1e-10) -> float:
    """Root of (1 - p0/n) 2 phi(t) = (p0/n) 2 pi(t) phi(0) on (0.5, sqrt(6 log n)).

    ``prior_density_at`` supplies the signal-size density at the threshold.
    The Bayes-optimal boundary balances the null density of |Y| against the
    prior-weighted density of alternatives.
    """
    if not 1 <= p0 < n:
        raise DomainError("need 1 <= p0 < n")
    w = p0 / n
    phi0 = 1.0 / math.sqrt(2.0 * math.pi)

    def f(t: float) -> float:
        pd = prior_density_at(t)
        if pd <= 0:
            raise DomainError(f"prior density must be positive at t={t}")
        lhs = 2.0 * math.exp(-0.5 * t * t) * phi0 * (1.0 - w)
        rhs = 2.0 * w * pd * phi0
        return lhs - rhs

    hi = math.sqrt(6.0 * math.log(n))
    return _bisect_then_secant(f, 0.5, hi, root_tol)


def mdp_regime_saddle_threshold(n: int, root_tol: float = 1e-10) -> float:
    """Saddle-point threshold in the moderate-deviation regime.

    Uses sparsity p0 = round(sqrt(2 pi n)) (tails of order n^{-1/2}) with the
    Cauchy signal prior evaluated at the per-observation effect scale
    t / sqrt(n).  The root converges to the moderate-deviation boundary:
    root^2 - log(n) -> log(pi / 2).
    """
    p0 = max(1, round(math.sqrt(2.0 * math.pi * n)))
    rn = math.sqrt(float(n))

    def cauchy_effect_scale(t: float) -> float:
        x = t / rn
        return 1.0 / (math.pi * (1.0 + x * x))

    return saddle_point_threshold(n, p0, cauchy_effect_scale, root_tol)


def oracle_bayes_risk(n: int, p0: int) -> float:
    """Oracle two-groups testing risk (p0/n) / sqrt(pi log(n/p0))."""
    if not 1 <= p0 < n:
        raise DomainError("need 1 <= p0 < n")
    if p0 / n > 0.1:
        raise DomainError("sparse regime guard requires p0/n <= 0.1")
    return (p0 / n) / math.sqrt(math.pi * math.log(n / p0))


def threshold_report(n: int, p0: int) -> ThresholdReport:
    return ThresholdReport(
        t_mdp=mdp_threshold(n),
        t_abos=abos_threshold(n, p0),
        t_equiboundary=equiboundary_solve(n),
        n=n,
        p0=p0,
    )
