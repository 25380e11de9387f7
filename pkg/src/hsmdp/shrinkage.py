"""Shrinkage-weight (kappa) transforms, prior/posterior, and shrinkage profiles.

The shrinkage weight kappa = 1/(1 + lambda^2 tau^2) carries the whole story:
the half-Cauchy local scale induces the arcsine Beta(1/2, 1/2) law on kappa at
tau = sigma, and the posterior given one observation decides between total
shrinkage (kappa near 1) and none (kappa near 0).

Posterior moments use the substitution kappa = sin^2(phi), which absorbs both
endpoint singularities of the arcsine weight; the integrals themselves run in
the compiled kernel.  For general sigma the posterior weight is
kappa = sigma^2/(sigma^2 + tau^2 lambda^2), which reduces to the tau-only form
at sigma = 1 and keeps the identity post_mean = (1 - E[kappa]) y exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .backend import kernels
from .errors import OutOfDomain, QuadratureFailure
from .quadrature import DEFAULT_QUAD, QuadratureSpec


@dataclass(frozen=True)
class ShrinkageSummary:
    """Posterior shrinkage functionals of one observation."""

    e_kappa: float
    var_kappa: float
    post_mean_theta: float


def kappa_from_lambda(lam: float, tau: float) -> float:
    """Shrinkage weight 1/(1 + lambda^2 tau^2); kappa = 1 is total shrinkage."""
    if lam < 0:
        raise OutOfDomain("lambda must be nonnegative")
    if tau <= 0:
        raise ValueError("tau must be positive")
    return 1.0 / (1.0 + (lam * tau) ** 2)


def lambda_from_kappa(kappa: float, tau: float) -> float:
    """Inverse of kappa_from_lambda on (0, 1]."""
    if not 0 < kappa <= 1:
        raise OutOfDomain("kappa must lie in (0, 1]")
    return math.sqrt((1.0 - kappa) / kappa) / tau


def kappa_prior_density(kappa: float) -> float:
    """Beta(1/2, 1/2) (arcsine) density induced on kappa at unit scales."""
    if not 0 < kappa < 1:
        raise OutOfDomain("kappa must lie strictly inside (0, 1)")
    return 1.0 / (math.pi * math.sqrt(kappa * (1.0 - kappa)))


def _std(y: float, tau: float, sigma: float) -> tuple[float, float]:
    if tau <= 0 or sigma <= 0:
        raise ValueError("tau and sigma must be positive")
    return y / sigma, tau / sigma


def kappa_posterior_density(kappa: float, y: float, tau: float,
                            sigma: float = 1.0,
                            quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Normalized posterior density of kappa given one observation.

    The kernel is the exact change of variables of the lambda posterior:
    (1-kappa)^{-1/2} exp(-kappa y^2 / (2 sigma^2)) / (kappa tau^2/sigma^2 + 1-kappa),
    divided by its integral over (0, 1).
    """
    if not 0 < kappa < 1:
        raise OutOfDomain("kappa must lie strictly inside (0, 1)")
    z, t = _std(y, tau, sigma)
    log_kernel = (-0.5 * math.log1p(-kappa) - 0.5 * z * z * kappa
                  - math.log(kappa * t * t + (1.0 - kappa)))
    try:
        log_norm = kernels.hs_kappa_log_norm(z, t, rel_tol=quad.rel_tol,
                                             max_panels=quad.max_subdivisions)
    except RuntimeError as exc:
        raise QuadratureFailure(str(exc)) from exc
    return math.exp(log_kernel - log_norm)


def posterior_summary(y: float, tau: float, sigma: float = 1.0,
                      quad: QuadratureSpec = DEFAULT_QUAD) -> ShrinkageSummary:
    """First two posterior moments of kappa and the posterior mean of theta."""
    z, t = _std(y, tau, sigma)
    try:
        m1, m2 = kernels.hs_kappa_moments(z, t, rel_tol=quad.rel_tol,
                                          max_panels=quad.max_subdivisions)
    except RuntimeError as exc:
        raise QuadratureFailure(str(exc)) from exc
    var = min(max(m2 - m1 * m1, 0.0), 0.25)
    return ShrinkageSummary(e_kappa=m1, var_kappa=var,
                            post_mean_theta=(1.0 - m1) * y)


def hsplus_posterior_summary(y: float, tau: float, sigma: float = 1.0,
                             quad: QuadratureSpec = DEFAULT_QUAD) -> ShrinkageSummary:
    """Posterior shrinkage under the horseshoe+ local mixture (nested layer
    integrated out analytically inside the kernel)."""
    z, t = _std(y, tau, sigma)
    try:
        m1, m2 = kernels.hsplus_kappa_moments(z, t, rel_tol=quad.rel_tol,
                                              max_panels=quad.max_subdivisions)
    except RuntimeError as exc:
        raise QuadratureFailure(str(exc)) from exc
    var = min(max(m2 - m1 * m1, 0.0), 0.25)
    return ShrinkageSummary(e_kappa=m1, var_kappa=var,
                            post_mean_theta=(1.0 - m1) * y)


def shrinkage_profile(y_grid, tau: float, sigma: float = 1.0,
                      quad: QuadratureSpec = DEFAULT_QUAD) -> list[ShrinkageSummary]:
    """Element-wise posterior_summary over a grid of observations."""
    y_grid = list(y_grid)
    if not y_grid:
        raise ValueError("grid must be nonempty")
    out = []
    for i, y in enumerate(y_grid):
        try:
            out.append(posterior_summary(y, tau, sigma, quad))
        except QuadratureFailure as exc:
            raise QuadratureFailure(f"at grid index {i} (y={y}): {exc}") from exc
    return out


def crossover_observation(tau: float, sigma: float = 1.0,
                          y_tol: float = 1e-6) -> float:
    """|y| at which E[kappa | y] = 1/2, by bisection on the monotone map.

    Bisection runs on |y| in [1e-3, 1e2] and exploits that E[kappa | y] is
    nonincreasing in |y|.
    """
    lo, hi = 1e-3, 1e2
    f = lambda y: posterior_summary(y, tau, sigma).e_kappa - 0.5
    if f(lo) < 0 or f(hi) > 0:
        raise OutOfDomain("crossover not bracketed in [1e-3, 1e2]")
    while hi - lo > y_tol:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
