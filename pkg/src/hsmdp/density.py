"""Marginal prior densities and the exact two-sided horseshoe bounds.

The horseshoe marginal has no elementary closed form; it is evaluated by
adaptive quadrature of the scale-mixture integral (in log space, with the
integration variable mapped so the Gaussian-kernel knee is resolved).  The
horseshoe+ marginal adds a second half-Cauchy mixing layer and is evaluated by
nested quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .backend import kernels
from .errors import DivergesAtOrigin, OutOfDomain, QuadratureFailure, UnsupportedKind
from .quadrature import DEFAULT_QUAD, QuadratureSpec, integrate_to_tol

#: Constant in the two-sided density bounds: K = (2 pi^3)^{-1/2}.
BOUND_CONSTANT = 1.0 / math.sqrt(2.0 * math.pi**3)


class PriorKind(Enum):
    HORSESHOE = "horseshoe"
    HORSESHOE_PLUS = "horseshoe_plus"
    LAPLACE = "laplace"
    RIDGE = "ridge"
    CAUCHY = "cauchy"
    STUDENT_T = "student_t"


_NEEDS_AUX = {PriorKind.LAPLACE, PriorKind.RIDGE, PriorKind.STUDENT_T}


@dataclass(frozen=True)
class PriorSpec:
    """A prior choice with its scale parameters.

    ``aux`` is the Laplace scale, the ridge standard deviation, or the
    Student-t degrees of freedom, depending on ``kind``.  Student-t requires
    ``aux > 2`` so the finite-variance comparisons apply.
    """

    kind: PriorKind
    tau: float = 1.0
    sigma: float = 1.0
    aux: float = 1.0

    def __post_init__(self) -> None:
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.kind in _NEEDS_AUX and self.aux <= 0:
            raise ValueError(f"{self.kind.value} requires aux > 0")
        if self.kind is PriorKind.STUDENT_T and self.aux <= 2:
            raise ValueError("student_t requires aux > 2 degrees of freedom")


@dataclass(frozen=True)
class DensityBounds:
    """Exact two-sided bounds on the unit-scale horseshoe marginal."""

    lower: float
    upper: float
    K: float = BOUND_CONSTANT


def hs_density_bounds(theta: float) -> DensityBounds:
    """Lower/upper bounds (K/2)log(1 + 4/theta^2) and K log(1 + 2/theta^2)."""
    if theta == 0:
        raise DivergesAtOrigin("the horseshoe density diverges at theta = 0")
    t2 = theta * theta
    return DensityBounds(
        lower=0.5 * BOUND_CONSTANT * math.log1p(4.0 / t2),
        upper=BOUND_CONSTANT * math.log1p(2.0 / t2),
    )


def hs_log_marginal_density(theta: float, tau: float = 1.0,
                            quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """log of the horseshoe marginal at global scale tau (by rescaling)."""
    if theta == 0:
        raise DivergesAtOrigin("the horseshoe density diverges at theta = 0")
    if tau <= 0:
        raise ValueError("tau must be positive")
    try:
        v = kernels.hs_log_marginal(theta / tau, abs_tol=quad.abs_tol,
                                    rel_tol=quad.rel_tol,
                                    max_panels=quad.max_subdivisions)
    except RuntimeError as exc:
        raise QuadratureFailure(str(exc)) from exc
    return v - math.log(tau)


def hs_marginal_density(theta: float, tau: float = 1.0,
                        quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Horseshoe marginal density pi_H(theta; tau) by adaptive quadrature."""
    return math.exp(hs_log_marginal_density(theta, tau, quad))


def hs_marginal_density_grid(thetas, tau: float = 1.0,
                             quad: QuadratureSpec = DEFAULT_QUAD):
    thetas = np.asarray(thetas, dtype=float)
    if np.any(thetas == 0):
        raise DivergesAtOrigin("grid contains theta = 0")
    try:
        logs = kernels.hs_log_marginal_batch(
            np.ascontiguousarray(np.abs(thetas) / tau),
            abs_tol=quad.abs_tol, rel_tol=quad.rel_tol,
            max_panels=quad.max_subdivisions)
    except RuntimeError as exc:
        raise QuadratureFailure(str(exc)) from exc
    return np.exp(logs) / tau


def _half_cauchy_pdf(x, scale):
    return (2.0 / math.pi) * scale / (scale * scale + x * x)


def hsplus_marginal_density(theta: float, tau: float = 1.0,
                            quad: QuadratureSpec | None = None) -> float:
    """Horseshoe+ marginal by nested quadrature over (lambda, eta).

    The eta integral is innermost (a smooth Cauchy-in-Cauchy integrand); the
    lambda integral is outermost with the usual knee split.  The normalisation
    contract is 1e-4, looser than the single-layer marginal because of the
    double integral.
    """
    if theta == 0:
        raise DivergesAtOrigin("the horseshoe+ density diverges at theta = 0")
    if tau <= 0:
        raise ValueError("tau must be positive")
    quad = quad or QuadratureSpec(abs_tol=1e-12, rel_tol=1e-7,
                                  max_subdivisions=200)
    x = abs(theta) / tau

    def local_weight(lam: float) -> float:
        # int_0^inf C+(lam; 0, eta) C+(eta; 0, 1) deta in eta = tan(chi);
        # the unit half-Cauchy density exactly cancels the Jacobian
        def inner(chi: float) -> float:
            return _half_cauchy_pdf(lam, math.tan(chi)) * (2.0 / math.pi)
        return integrate_to_tol(inner, 0.0, math.pi / 2.0,
                                QuadratureSpec(1e-13, 1e-9, 100),
                                points=[math.atan(lam)])

    def outer(psi: float) -> float:
        lam = math.tan(psi)
        if lam <= 0:
            return 0.0
        sec2 = 1.0 + lam * lam
        gauss = math.exp(-x * x / (2.0 * lam * lam)) / (lam * math.sqrt(2.0 * math.pi))
        return gauss * local_weight(lam) * sec2

    pts = [math.atan(x), math.atan(1.0), math.atan(0.05)]
    val = integrate_to_tol(outer, 0.0, math.pi / 2.0, quad, points=pts)
    return val / tau


def comparison_density(spec: PriorSpec, theta: float) -> float:
    """Closed-form density for the non-horseshoe comparison priors."""
    k = spec.kind
    if k is PriorKind.LAPLACE:
        b = spec.aux
        return math.exp(-abs(theta) / b) / (2.0 * b)
    if k is PriorKind.RIDGE:
        s = spec.aux
        return math.exp(-theta * theta / (2 * s * s)) / (s * math.sqrt(2 * math.pi))
    if k is PriorKind.CAUCHY:
        return 1.0 / (math.pi * (1.0 + theta * theta))
    if k is PriorKind.STUDENT_T:
        from scipy import stats
        return float(stats.t.pdf(theta, df=spec.aux))
    raise UnsupportedKind(
        f"{k.value} has no closed form; use the quadrature operations")


def origin_density_from_mixing(mixing_density, s_min: float, s_max: float,
                               quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Prior density at zero induced by a truncated variance-mixing measure.

    Returns (2 pi)^{-1/2} * int_{s_min}^{s_max} s^{-1/2} nu(ds); the truncation
    keeps the integrand clear of the pole at s = 0.
    """
    if s_min <= 0 or s_max <= s_min:
        raise OutOfDomain("need 0 < s_min < s_max")

    def f(s: float) -> float:
        return mixing_density(s) / math.sqrt(s)

    val = integrate_to_tol(f, s_min, s_max, quad)
    return val / math.sqrt(2.0 * math.pi)
