"""Semantic exception hierarchy shared by all modules."""


class HsmdpError(Exception):
    """Base class for all package errors."""


class DivergesAtOrigin(HsmdpError):
    """The horseshoe-type marginal density has a log pole at theta = 0."""


class QuadratureFailure(HsmdpError):
    """Adaptive quadrature could not reach the requested tolerance."""


class UnsupportedKind(HsmdpError):
    """Prior kind not supported by this operation."""


class OutOfDomain(HsmdpError):
    """Argument outside the mathematical domain of the function."""


class DomainError(HsmdpError):
    """Invalid parameter combination (sample sizes, sparsity guards)."""


class NoRootInBracket(HsmdpError):
    """Root finder could not bracket a sign change."""


class LengthMismatch(HsmdpError):
    """Paired sequences have different lengths."""


class ConfigError(HsmdpError):
    """Malformed or unknown experiment configuration."""
