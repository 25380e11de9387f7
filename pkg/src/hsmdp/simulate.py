"""Two-groups sparse-testing experiments.

Data: p0 of n coordinates carry signals of fixed amplitude
mu_n = A sqrt(2 log(n/p0)) with random signs, the rest are null; observations
add N(0, sigma^2) noise.  Decision rules:

* ``hard``: reject when |y| exceeds a fixed threshold.
* ``kappa``: reject when the posterior shrinkage weight E[kappa | y, tau_hat]
  drops below 1/2 (the horseshoe testing rule).
* ``posterior_prob``: reject when the two-groups posterior signal probability
  exceeds a cut.  The signal component is the same fixed-amplitude alternative
  the generator uses, and the sparsity weight is the arm's calibrated
  estimate: the oracle arm plugs in the true p0/n, point arms plug in tau_hat
  (the tau = p0/n calibration identity), and fully Bayes arms average the
  probability over the tau posterior grid before thresholding.

Replication-level determinism: every replication derives its stream from
(seed, rep_index), and aggregates reduce in replication order, so results are
independent of scheduling.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .backend import kernels, thread_count
from .calibration import (TauMethod, TauMethodKind, UNTRUNCATED_CEILING,
                          log_likelihood_over_grid, tau_posterior_from_loglik)
from .errors import ConfigError, LengthMismatch
from .rng import rep_rng
from .threshold import oracle_bayes_risk


class RuleKind(Enum):
    HARD_THRESHOLD = "hard"
    KAPPA_HALF = "kappa"
    POSTERIOR_PROB = "posterior_prob"


@dataclass(frozen=True)
class DecisionRule:
    kind: RuleKind
    threshold: float = math.inf   # hard rule only
    cut: float = 0.5              # posterior_prob rule only

    def __post_init__(self) -> None:
        if self.kind is RuleKind.POSTERIOR_PROB and not 0 < self.cut < 1:
            raise ValueError("cut must lie in (0, 1)")


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    p0: int
    amplitude: float
    tau_method: TauMethod
    rule: DecisionRule
    reps: int
    seed: int
    sigma: float = 1.0
    hsplus: bool = False   # calibrate tau through the horseshoe+ marginal

    def __post_init__(self) -> None:
        if not 0 <= self.p0 <= self.n:
            raise ConfigError("need 0 <= p0 <= n")
        if self.reps < 1:
            raise ConfigError("reps must be positive")
        if self.sigma <= 0 or self.amplitude <= 0:
            raise ConfigError("sigma and amplitude must be positive")

    @property
    def mu_n(self) -> float:
        """Signal strength A sqrt(2 log(n/p0)); requires p0 >= 1."""
        if self.p0 < 1:
            raise ConfigError("mu_n undefined for p0 = 0")
        return self.amplitude * math.sqrt(2.0 * math.log(self.n / self.p0))


@dataclass(frozen=True)
class ExperimentResult:
    scaled_risk: float
    type1: float
    type2: float
    tau_hat_mean: float
    rel_efficiency: float
    se_scaled_risk: float


def generate_two_groups(cfg: ExperimentConfig, rep_index: int):
    """One replication of the two-groups data: (observations, truth mask)."""
    rng = rep_rng(cfg.seed, rep_index)
    theta = np.zeros(cfg.n)
    truth = np.zeros(cfg.n, dtype=bool)
    if cfg.p0 > 0:
        idx = rng.choice(cfg.n, size=cfg.p0, replace=False)
        signs = rng.integers(0, 2, size=cfg.p0) * 2 - 1
        theta[idx] = cfg.mu_n * signs
        truth[idx] = True
    y = theta + cfg.sigma * rng.standard_normal(cfg.n)
    return y, truth


def _log_alt_ratio(y: np.ndarray, mu: float, sigma: float) -> np.ndarray:
    """log f1(y) - log f0(y) for the +-mu fixed-amplitude alternative."""
    z = y / sigma
    m = mu / sigma
    a = -0.5 * (z - m) ** 2
    b = -0.5 * (z + m) ** 2
    return np.logaddexp(a, b) - math.log(2.0) + 0.5 * z * z


def two_groups_signal_probability(y: np.ndarray, w: float, mu: float,
                                  sigma: float) -> np.ndarray:
    """Posterior probability that each coordinate is a signal under the
    two-groups model with signal weight w and alternative +-mu."""
    w = min(max(w, 1e-12), 1.0 - 1e-12)
    llr = _log_alt_ratio(np.asarray(y, dtype=float), mu, sigma)
    log_odds = math.log(w / (1.0 - w)) + llr
    return 1.0 / (1.0 + np.exp(-log_odds))


def apply_rule(y, cfg: ExperimentConfig, tau_hat: float) -> np.ndarray:
    """Decisions for one dataset under a point-calibrated rule."""
    if tau_hat <= 0:
        raise ConfigError("tau_hat must be positive")
    y = np.asarray(y, dtype=float)
    rule = cfg.rule
    if rule.kind is RuleKind.HARD_THRESHOLD:
        return np.abs(y) > rule.threshold
    if rule.kind is RuleKind.KAPPA_HALF:
        zs = np.ascontiguousarray(y / cfg.sigma)
        ek = kernels.hs_kappa_mean_batch(zs, np.array([tau_hat / cfg.sigma]),
                                         rel_tol=1e-7)
        return ek < 0.5
    # posterior_prob: sparsity weight = the calibrated estimate
    p = two_groups_signal_probability(y, min(tau_hat, 0.5), cfg.mu_n, cfg.sigma)
    return p > rule.cut


def _grid_decisions(y: np.ndarray, cfg: ExperimentConfig, grid: np.ndarray,
                    weights: np.ndarray) -> np.ndarray:
    """Decisions that average the posterior signal probability over tau."""
    rule = cfg.rule
    if rule.kind is RuleKind.HARD_THRESHOLD:
        return np.abs(y) > rule.threshold
    if rule.kind is RuleKind.KAPPA_HALF:
        zs = np.ascontiguousarray(y / cfg.sigma)
        acc = np.zeros(y.size)
        for tau, w in zip(grid, weights):
            ek = kernels.hs_kappa_mean_batch(zs, np.array([tau / cfg.sigma]),
                                             rel_tol=1e-6)
            acc += w * (1.0 - ek)
        return acc > 0.5
    mu = cfg.mu_n
    acc = np.zeros(y.size)
    for tau, w in zip(grid, weights):
        acc += w * two_groups_signal_probability(y, min(tau, 0.5), mu, cfg.sigma)
    return acc > rule.cut


def bayes_risk(decisions, truth, cfg: ExperimentConfig):
    """Empirical (risk, type1, type2) under the two-groups 0-1 loss."""
    decisions = np.asarray(decisions, dtype=bool)
    truth = np.asarray(truth, dtype=bool)
    if decisions.shape != truth.shape:
        raise LengthMismatch("decisions and truth differ in length")
    n_null = int(np.sum(~truth))
    n_sig = int(np.sum(truth))
    fp = int(np.sum(decisions & ~truth))
    fn = int(np.sum(~decisions & truth))
    type1 = fp / max(1, n_null)
    type2 = fn / max(1, n_sig)
    w = cfg.p0 / cfg.n
    risk = (1.0 - w) * type1 + w * type2
    return risk, type1, type2


# ---------------------------------------------------------------------------
# experiment harness
# ---------------------------------------------------------------------------

_GRID_KINDS = (TauMethodKind.TRUNCATED_HALF_CAUCHY,
               TauMethodKind.UNTRUNCATED_HALF_CAUCHY,
               TauMethodKind.UNIFORM)


@dataclass(frozen=True)
class Arm:
    """One calibration arm of a shared-data experiment."""

    label: str
    method: TauMethod
    hsplus: bool = False
    grid_points: int = 200   # grid resolution for this arm's tau posterior


def _suite_grid(cfg: ExperimentConfig, points: int,
                need_untruncated: bool) -> tuple[np.ndarray, int]:
    """Shared log-spaced grid: `points` cells on [1/n, 1], continued with the
    same spacing up to the untruncated ceiling when needed.  Returns the grid
    and the count of points with tau <= 1."""
    lo = math.log(1.0 / cfg.n)
    base = np.linspace(lo, 0.0, points)
    if not need_untruncated:
        return np.exp(base), points
    step = base[1] - base[0]
    ext = np.arange(step, math.log(UNTRUNCATED_CEILING) + step, step)
    return np.exp(np.concatenate([base, ext])), points


def _mmle_from_scan(y, cfg, grid, loglik, n_trunc, plus) -> float:
    from .calibration import _golden_max, _log_likelihood_at
    j = int(np.argmax(loglik[:n_trunc]))
    lo = grid[max(j - 1, 0)]
    hi = grid[min(j + 1, n_trunc - 1)]
    tau = _golden_max(lambda t: _log_likelihood_at(y, t, cfg.sigma, plus),
                      lo, hi)
    if _log_likelihood_at(y, tau, cfg.sigma, plus) < loglik[j]:
        tau = grid[j]
    return float(min(max(tau, grid[0]), grid[n_trunc - 1]))


def run_experiment_suite(cfg: ExperimentConfig,
                         arms: list[Arm]) -> list[ExperimentResult]:
    """Run several calibration arms on shared datasets (paired seeds).

    The per-observation marginal-likelihood matrix over the tau grid is
    computed once per replication and shared by every horseshoe grid arm
    (horseshoe+ arms get their own, coarser scan); an oracle arm always runs
    alongside for the paired relative efficiency.
    """
    reps = cfg.reps
    n_arms = len(arms)
    hs_grid_needed = any(not a.hsplus and a.method.kind in
                         (TauMethodKind.MMLE, *_GRID_KINDS) for a in arms)
    plus_grid_needed = any(a.hsplus and a.method.kind in
                           (TauMethodKind.MMLE, *_GRID_KINDS) for a in arms)
    need_untrunc = any(a.method.kind is TauMethodKind.UNTRUNCATED_HALF_CAUCHY
                       for a in arms)
    grid_pts = max((a.grid_points for a in arms), default=200)
    grid, n_trunc = _suite_grid(cfg, grid_pts, need_untrunc)
    # horseshoe+ calibration runs on a decimated scan of the truncated range
    plus_pts = min(64, grid_pts)
    stride = max(1, (n_trunc - 1) // (plus_pts - 1))
    plus_idx = np.unique(np.r_[np.arange(0, n_trunc, stride), n_trunc - 1])
    plus_grid = grid[plus_idx]

    risks = np.zeros((n_arms, reps))
    t1s = np.zeros((n_arms, reps))
    t2s = np.zeros((n_arms, reps))
    taus = np.zeros((n_arms, reps))
    oracle_risks = np.zeros(reps)

    def one_rep(r: int) -> None:
        y, truth = generate_two_groups(cfg, r)
        hs_ll = (log_likelihood_over_grid(y, grid, cfg.sigma, plus=False)
                 if hs_grid_needed else None)
        plus_ll = (log_likelihood_over_grid(y, plus_grid, cfg.sigma, plus=True)
                   if plus_grid_needed else None)
        w0 = cfg.p0 / cfg.n
        d_oracle = apply_rule(y, cfg, w0 if w0 > 0 else 1.0 / cfg.n)
        oracle_risks[r] = bayes_risk(d_oracle, truth, cfg)[0]
        for k, arm in enumerate(arms):
            kind = arm.method.kind
            if kind is TauMethodKind.ORACLE:
                tau = arm.method.oracle_value or cfg.p0 / cfg.n
                d = apply_rule(y, cfg, tau)
                tau_summary = tau
            elif kind is TauMethodKind.MMLE:
                if arm.hsplus:
                    tau = _mmle_from_scan(y, cfg, plus_grid, plus_ll,
                                          len(plus_grid), True)
                else:
                    tau = _mmle_from_scan(y, cfg, grid, hs_ll, n_trunc, False)
                d = apply_rule(y, cfg, tau)
                tau_summary = tau
            else:
                if arm.hsplus:
                    g, ll = plus_grid, plus_ll
                else:
                    stop = (len(grid)
                            if kind is TauMethodKind.UNTRUNCATED_HALF_CAUCHY
                            else n_trunc)
                    g, ll = grid[:stop], hs_ll[:stop]
                post = tau_posterior_from_loglik(
                    g, ll, TauMethod(kind, grid_points=max(len(g), 8)))
                d = _grid_decisions(y, cfg, post.grid, post.weights)
                tau_summary = float(np.sum(post.grid * post.weights))
            risks[k, r], t1s[k, r], t2s[k, r] = bayes_risk(d, truth, cfg)
            taus[k, r] = tau_summary

    workers = thread_count()
    if workers > 1 and reps > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            list(ex.map(one_rep, range(reps)))
    else:
        for r in range(reps):
            one_rep(r)

    scale = cfg.n / max(cfg.p0, 1)
    oracle_scaled = float(np.mean(oracle_risks)) * scale
    out = []
    for k in range(n_arms):
        mean_risk = float(np.mean(risks[k]))
        sd = float(np.std(risks[k], ddof=1)) if reps > 1 else 0.0
        scaled = mean_risk * scale
        rel = oracle_scaled / scaled if scaled > 0 else 1.0
        out.append(ExperimentResult(
            scaled_risk=scaled,
            type1=float(np.mean(t1s[k])),
            type2=float(np.mean(t2s[k])),
            tau_hat_mean=float(np.mean(taus[k])),
            rel_efficiency=rel,
            se_scaled_risk=sd / math.sqrt(reps) * scale,
        ))
    return out


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Single-method experiment (see run_experiment_suite for shared runs)."""
    arm = Arm(label=cfg.tau_method.kind.value, method=cfg.tau_method,
              hsplus=cfg.hsplus, grid_points=cfg.tau_method.grid_points)
    return run_experiment_suite(cfg, [arm])[0]


def scaling_study(n_values, p0: int, amplitude: float,
                  methods: list[TauMethod], reps: int, seed: int,
                  rule: DecisionRule | None = None,
                  hsplus_flags: list[bool] | None = None):
    """Risk ratios R_n / R_n* across sample sizes at fixed p0.

    Emits one row per (n, method) in CSV order (n ascending, methods in the
    given order): (n, method label, ratio, se_ratio).
    """
    rule = rule or DecisionRule(RuleKind.POSTERIOR_PROB)
    hsplus_flags = hsplus_flags or [False] * len(methods)
    arms = [Arm(label=m.kind.value + ("_hsplus" if plus else ""), method=m,
                hsplus=plus)
            for m, plus in zip(methods, hsplus_flags)]
    rows = []
    for n in sorted(int(v) for v in n_values):
        r_star = oracle_bayes_risk(n, p0) * n / p0
        cfg = ExperimentConfig(n=n, p0=p0, amplitude=amplitude,
                               tau_method=methods[0], rule=rule, reps=reps,
                               seed=seed)
        for arm, res in zip(arms, run_experiment_suite(cfg, arms)):
            rows.append((n, arm.label, res.scaled_risk / r_star,
                         res.se_scaled_risk / r_star))
    return rows


def regime_sweep(cfg: ExperimentConfig, tau_multipliers):
    """Oracle-rule experiments with tau misset to multiplier * p0/n.

    Returns rows (multiplier, mean risk, type1, type2).  Requires the oracle
    tau method; the rule is applied with the misset scale so over- and
    under-shrinkage regimes surface as Type II / Type I domination.
    """
    if cfg.tau_method.kind is not TauMethodKind.ORACLE:
        raise ConfigError("regime_sweep requires the oracle tau method")
    tau0 = cfg.tau_method.oracle_value or cfg.p0 / cfg.n
    rows = []
    for mult in tau_multipliers:
        tau = tau0 * float(mult)
        risks = np.zeros(cfg.reps)
        t1 = np.zeros(cfg.reps)
        t2 = np.zeros(cfg.reps)
        for r in range(cfg.reps):
            y, truth = generate_two_groups(cfg, r)
            d = apply_rule(y, cfg, tau)
            risks[r], t1[r], t2[r] = bayes_risk(d, truth, cfg)
        rows.append((float(mult), float(np.mean(risks)),
                     float(np.mean(t1)), float(np.mean(t2))))
    return rows
