"""Quadrature configuration and generic helpers for the non-hot paths."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import QuadratureFailure


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerance contract for adaptive quadrature.

    The defaults leave slack well below the gap between the two-sided density
    bounds, which is what the sandwich checks need.
    """

    abs_tol: float = 1e-12
    rel_tol: float = 1e-8
    max_subdivisions: int = 200

    def __post_init__(self) -> None:
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be positive")


DEFAULT_QUAD = QuadratureSpec()


def integrate_to_tol(f, a: float, b: float, quad: QuadratureSpec,
                     points=None) -> float:
    """scipy.quad wrapper that enforces the QuadratureSpec contract."""
    kwargs = dict(epsabs=quad.abs_tol, epsrel=quad.rel_tol,
                  limit=max(quad.max_subdivisions, 50))
    if points is not None and np.isfinite(a) and np.isfinite(b):
        pts = [p for p in points if a < p < b]
        if pts:
            kwargs["points"] = sorted(pts)
    try:
        val, err = integrate.quad(f, a, b, **kwargs)
    except Exception as exc:  # pragma: no cover - scipy-internal failures
        raise QuadratureFailure(str(exc)) from exc
    if not np.isfinite(val):
        raise QuadratureFailure(f"non-finite integral over [{a}, {b}]")
    if err > max(quad.abs_tol, quad.rel_tol * abs(val)) * 50:
        raise QuadratureFailure(
            f"estimated error {err:.3e} exceeds tolerance for integral {val:.6e}")
    return val
