"""Kullback-Leibler risk of Bayes predictive densities.

The predictive is reduced to its location family: after seeing data, the
predictive for a new draw is N(theta_hat, sigma^2) with theta_hat the
posterior mean, so KL(N(theta0, sigma^2) || predictive) =
(theta_hat - theta0)^2 / (2 sigma^2).  All risks are Monte Carlo averages
with deterministic per-replication streams.

A caution from measurement rather than theory: with the exact posterior mean,
the horseshoe's null-coordinate KL risk scales like tau * polylog(1/tau)
(the half-Cauchy tail leaves Theta(tau) posterior mass on "no shrinkage"),
not like tau^4; see the risk-scaling tests for the measured exponents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .backend import kernels
from .density import BOUND_CONSTANT, PriorKind, PriorSpec
from .errors import UnsupportedKind
from .rng import rep_rng


@dataclass(frozen=True)
class RiskEstimate:
    """Monte Carlo mean, standard error (sample sd / sqrt(reps)), and seed."""

    mean: float
    std_err: float
    reps: int
    seed: int


@dataclass(frozen=True)
class SlopeFit:
    """Least-squares fit of log(risk) against log(scale)."""

    exponent: float
    intercept: float
    r_squared: float


def kl_location(theta_hat: float, sigma: float) -> float:
    """KL between N(0, sigma^2) and the location predictive N(theta_hat, sigma^2)."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    return theta_hat * theta_hat / (2.0 * sigma * sigma)


def laplace_equivalent_scale(tau: float, sigma: float = 1.0) -> float:
    """Laplace scale whose prior variance matches the horseshoe's central
    second moment (about 4 K tau sigma^2 inside |theta| <= sigma)."""
    return sigma * math.sqrt(2.0 * BOUND_CONSTANT * tau)


def _draw_null(reps: int, seed: int, sigma: float) -> np.ndarray:
    ys = np.empty(reps)
    for r in range(reps):
        ys[r] = sigma * rep_rng(seed, r).standard_normal()
    return ys


def _posterior_means(ys: np.ndarray, prior: PriorSpec) -> np.ndarray:
    """Posterior means for a vector of observations under one prior."""
    sigma = prior.sigma
    zs = np.ascontiguousarray(ys / sigma)
    t = prior.tau / sigma
    if prior.kind is PriorKind.HORSESHOE:
        ek = kernels.hs_kappa_mean_batch(zs, np.array([t]))
        return (1.0 - ek) * ys
    if prior.kind is PriorKind.HORSESHOE_PLUS:
        out = np.empty_like(ys)
        for i, z in enumerate(zs):
            m1, _ = kernels.hsplus_kappa_moments(float(z), t)
            out[i] = (1.0 - m1) * ys[i]
        return out
    if prior.kind is PriorKind.LAPLACE:
        b = prior.aux / sigma
        return sigma * kernels.laplace_mean_batch(zs, b)
    raise UnsupportedKind(f"posterior mean not available for {prior.kind.value}")


def _estimate(vals: np.ndarray, reps: int, seed: int) -> RiskEstimate:
    mean = float(np.mean(vals))
    sd = float(np.std(vals, ddof=1)) if reps > 1 else 0.0
    return RiskEstimate(mean=mean, std_err=sd / math.sqrt(reps),
                        reps=reps, seed=seed)


def null_kl_risk(prior: PriorSpec, reps: int, seed: int) -> RiskEstimate:
    """KL risk of the Bayes predictive at a null coordinate (theta = 0)."""
    if prior.kind not in (PriorKind.HORSESHOE, PriorKind.HORSESHOE_PLUS,
                          PriorKind.LAPLACE):
        raise UnsupportedKind(f"null_kl_risk does not support {prior.kind.value}")
    if reps < 1:
        raise ValueError("reps must be positive")
    ys = _draw_null(reps, seed, prior.sigma)
    th = _posterior_means(ys, prior)
    kl = th * th / (2.0 * prior.sigma**2)
    return _estimate(kl, reps, seed)


def signal_kl_risk(theta0: float, prior: PriorSpec, reps: int,
                   seed: int) -> RiskEstimate:
    """KL risk at a fixed signal coordinate theta0 != 0."""
    ys = theta0 + _draw_null(reps, seed, prior.sigma)
    th = _posterior_means(ys, prior)
    kl = (th - theta0) ** 2 / (2.0 * prior.sigma**2)
    return _estimate(kl, reps, seed)


def _fit_loglog(xs, ys) -> SlopeFit:
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    A = np.vstack([lx, np.ones_like(lx)]).T
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    pred = A @ coef
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - np.mean(ly)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return SlopeFit(exponent=float(coef[0]), intercept=float(coef[1]),
                    r_squared=min(max(r2, 0.0), 1.0))


def superefficiency_exponent(taus, reps: int, seed: int,
                             kind: PriorKind = PriorKind.HORSESHOE) -> SlopeFit:
    """Fitted scale exponent of the null KL risk over a tau grid.

    For the Laplace comparison the scale is matched per tau via
    laplace_equivalent_scale, and the fit still runs against tau.
    """
    taus = sorted(float(t) for t in taus)
    if len(taus) < 4:
        raise ValueError("need at least 4 tau values")
    if taus[0] <= 0 or taus[-1] > 0.1:
        raise ValueError("all tau values must lie in (0, 0.1]")
    if math.log10(taus[-1] / taus[0]) < 2.0 - 1e-9:
        raise ValueError("tau values must span at least two decades")
    risks = []
    for i, tau in enumerate(taus):
        if kind is PriorKind.LAPLACE:
            prior = PriorSpec(kind=kind, tau=tau,
                              aux=laplace_equivalent_scale(tau))
        else:
            prior = PriorSpec(kind=kind, tau=tau)
        risks.append(null_kl_risk(prior, reps, seed + i).mean)
    return _fit_loglog(taus, risks)


def cumulative_kl(theta0: float, n: int, prior: PriorSpec, reps: int,
                  seed: int) -> RiskEstimate:
    """Cumulative KL risk of the sequential Bayes predictive over n steps.

    One coordinate is observed n times; the posterior is tracked through the
    sufficient statistic (running mean, effective noise sd sigma/sqrt(t)); the
    global scale stays fixed over time.  Step t uses the predictive after
    t - 1 observations (the first step is the prior predictive, whose
    posterior mean is 0).
    """
    if n < 10:
        raise ValueError("need n >= 10")
    if prior.kind not in (PriorKind.HORSESHOE, PriorKind.HORSESHOE_PLUS,
                          PriorKind.LAPLACE):
        raise UnsupportedKind(f"cumulative_kl does not support {prior.kind.value}")
    sigma = prior.sigma
    totals = np.empty(reps)
    for r in range(reps):
        rng = rep_rng(seed, r)
        ys = theta0 + sigma * rng.standard_normal(n)
        means = np.cumsum(ys)[: n - 1] / np.arange(1, n)
        counts = np.arange(1, n, dtype=float)
        sig_eff = sigma / np.sqrt(counts)
        zs = np.ascontiguousarray(means / sig_eff)
        t_eff = np.ascontiguousarray(prior.tau / sig_eff)
        if prior.kind is PriorKind.HORSESHOE:
            ek = kernels.hs_kappa_mean_batch(zs, t_eff, rel_tol=1e-8)
            th = (1.0 - ek) * means
        elif prior.kind is PriorKind.HORSESHOE_PLUS:
            th = np.empty(n - 1)
            for i in range(n - 1):
                m1, _ = kernels.hsplus_kappa_moments(float(zs[i]), float(t_eff[i]))
                th[i] = (1.0 - m1) * means[i]
        else:
            th = np.empty(n - 1)
            for i in range(n - 1):
                th[i] = sig_eff[i] * kernels.laplace_posterior_mean(
                    float(zs[i]), prior.aux / sig_eff[i])
        kl_steps = (th - theta0) ** 2 / (2.0 * sigma**2)
        totals[r] = theta0**2 / (2.0 * sigma**2) + float(np.sum(kl_steps))
    return _estimate(totals, reps, seed)


def cumulative_kl_slope(theta0: float, ns, prior: PriorSpec, reps: int,
                        seed: int) -> SlopeFit:
    """Fit cumulative KL against log(n) over a grid of horizon lengths."""
    ns = sorted(int(n) for n in ns)
    cums = [cumulative_kl(theta0, n, prior, reps, seed).mean for n in ns]
    lx = np.log(np.asarray(ns, dtype=float))
    ly = np.asarray(cums)
    A = np.vstack([lx, np.ones_like(lx)]).T
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    pred = A @ coef
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - np.mean(ly)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return SlopeFit(exponent=float(coef[0]), intercept=float(coef[1]),
                    r_squared=min(max(r2, 0.0), 1.0))


def hellinger_location(theta_hat: float, sigma: float) -> float:
    """Squared Hellinger distance between N(0, s^2) and N(theta_hat, s^2):
    1 - exp(-theta_hat^2 / (8 s^2)), always below theta_hat^2/(8 s^2)."""
    return -math.expm1(-theta_hat * theta_hat / (8.0 * sigma * sigma))
