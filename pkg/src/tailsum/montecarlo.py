"""Empirical verification harness.

``run_experiment`` replays the limit theorems at finite sample sizes:
it draws replicated samples, normalizes the statistic ladder under either
the random-threshold or the deterministic-threshold centering, and compares
empirical moments against the covariance model.  ``limit_covariance_quadrature``
is a deterministic 2-D Simpson oracle for the unit limit covariance, used by
``adjudicate_covariance`` to cross-examine the recursion, the closed form,
and a previously tabulated matrix whose off-diagonal entries are in doubt.
"""

import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .distributions import sample_iid, tau_p, tau_p_at
from .errors import DomainError
from .estimators import TailWindow, sum_product_ladder
from .limits import CovarianceModel, DomainKind, covariance, covariance_closed

__all__ = [
    "Tolerances",
    "ExperimentConfig",
    "ExperimentReport",
    "run_experiment",
    "QuadratureConfig",
    "limit_covariance_quadrature",
    "adjudicate_covariance",
    "REFERENCE_COVARIANCE",
]


@dataclass(frozen=True)
class Tolerances:
    """Acceptance tolerances applied to the model comparisons."""

    var_rtol_low: float = 0.10   # orders 1 and 2
    var_rtol_high: float = 0.15  # orders >= 3
    cov_rtol: float = 0.15
    mean_atol: float = 0.10

    def var_rtol(self, p):
        return self.var_rtol_low if p <= 2 else self.var_rtol_high


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte Carlo experiment.

    ``centering`` selects the limit being exercised: "random" centers each
    replication at the centering value evaluated at the sample's own window
    threshold, "fixed" centers at the deterministic threshold and targets
    the reduced covariance model.
    """

    dist: object
    n: int
    k: int
    l: int
    pmax: int
    reps: int
    seed: int
    centering: str = "random"
    tolerances: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self):
        TailWindow(self.n, self.k, self.l)  # validates the window
        if self.pmax < 1:
            raise DomainError(f"pmax must be >= 1, got {self.pmax}")
        if self.reps < 2:
            raise DomainError(f"need reps >= 2, got {self.reps}")
        if self.centering not in ("random", "fixed"):
            raise DomainError(f"centering must be 'random' or 'fixed', got {self.centering!r}")


@dataclass(frozen=True)
class ExperimentReport:
    """Aggregated Monte Carlo moments next to their model predictions."""

    config: ExperimentConfig
    means: np.ndarray
    mean_se: np.ndarray
    covariance: np.ndarray
    variance_se: np.ndarray
    covariance_se: np.ndarray
    predicted: np.ndarray
    comparisons: list
    passed: bool

    def variance(self, p):
        return float(self.covariance[p - 1, p - 1])

    def to_dict(self):
        cfg = self.config
        dist = cfg.dist
        pairs = [
            (r, rho) for r in range(1, cfg.pmax + 1) for rho in range(r + 1, cfg.pmax + 1)
        ]
        return {
            "distribution": {
                "name": dist.name,
                "gamma": getattr(dist, "gamma", None),
                "x0": getattr(dist, "x0", None),
            },
            "n": cfg.n,
            "k": cfg.k,
            "l": cfg.l,
            "pmax": cfg.pmax,
            "reps": cfg.reps,
            "seed": cfg.seed,
            "centering": cfg.centering,
            "means": list(self.means),
            "mean_standard_errors": list(self.mean_se),
            "empirical_covariance": [list(row) for row in self.covariance],
            "variance_standard_errors": list(self.variance_se),
            "covariance_standard_errors": {
                f"{r},{rho}": float(self.covariance_se[r - 1, rho - 1]) for r, rho in pairs
            },
            "predicted_covariance": [list(row) for row in self.predicted],
            "comparisons": self.comparisons,
            "passed": self.passed,
        }


def _rep_seed(seed, rep):
    digest = hashlib.sha256(f"{seed}:{rep}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _one_replication(config, window, tau_fixed, rep):
    sample = sample_iid(config.dist, _rep_seed(config.seed, rep), config.n)
    ladder = sum_product_ladder(sample, window, config.pmax)
    if config.centering == "fixed":
        center = tau_fixed
    else:
        threshold = float(sample.values[config.n - config.k - 1])
        center = [
            tau_p_at(config.dist, p, window, threshold) for p in range(1, config.pmax + 1)
        ]
    root_k = math.sqrt(config.k)
    return [
        root_k * (ladder[p - 1] - center[p - 1]) / tau_fixed[p - 1]
        for p in range(1, config.pmax + 1)
    ]


def run_experiment(config, workers=1):
    """
    Run the replicated experiment and aggregate moments.

    Replication results are stored by replication index and reduced in that
    fixed order, so the report is bit-identical for any ``workers`` count.
    """
    window = TailWindow(config.n, config.k, config.l)
    tau_fixed = [tau_p(config.dist, p, window) for p in range(1, config.pmax + 1)]

    stats = np.empty((config.reps, config.pmax))
    if workers <= 1:
        for rep in range(config.reps):
            stats[rep] = _one_replication(config, window, tau_fixed, rep)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = pool.map(
                lambda rep: _one_replication(config, window, tau_fixed, rep),
                range(config.reps),
            )
            for rep, row in enumerate(rows):
                stats[rep] = row

    reps = config.reps
    means = stats.mean(axis=0)
    centered = stats - means
    cov = centered.T @ centered / (reps - 1)
    var = np.diag(cov)
    mean_se = np.sqrt(var / reps)
    m4 = (centered**4).mean(axis=0)
    variance_se = np.sqrt(np.maximum(m4 - var**2, 0.0) / reps)
    sq = centered**2
    m22 = sq.T @ sq / reps
    covariance_se = np.sqrt(np.maximum(m22 - cov**2, 0.0) / reps)

    reduced = config.centering == "fixed"
    model = CovarianceModel.build(config.dist.domain(), config.pmax)
    predicted = model.reduced_matrix() if reduced else model.sigma

    tol = config.tolerances
    comparisons = []
    for p in range(1, config.pmax + 1):
        target = model.predicted_variance(p, reduced)
        observed = float(var[p - 1])
        rel = abs(observed - target) / abs(target)
        comparisons.append(
            {
                "quantity": "variance",
                "orders": [p, p],
                "observed": observed,
                "predicted": target,
                "relative_error": rel,
                "tolerance": tol.var_rtol(p),
                "pass": bool(rel <= tol.var_rtol(p)),
            }
        )
    for r in range(1, config.pmax + 1):
        for rho in range(r + 1, config.pmax + 1):
            target = model.predicted_covariance(r, rho, reduced)
            observed = float(cov[r - 1, rho - 1])
            rel = abs(observed - target) / abs(target)
            comparisons.append(
                {
                    "quantity": "covariance",
                    "orders": [r, rho],
                    "observed": observed,
                    "predicted": target,
                    "relative_error": rel,
                    "tolerance": tol.cov_rtol,
                    "pass": bool(rel <= tol.cov_rtol),
                }
            )
    for p in range(1, config.pmax + 1):
        observed = float(means[p - 1])
        comparisons.append(
            {
                "quantity": "mean",
                "orders": [p],
                "observed": observed,
                "predicted": 0.0,
                "absolute_error": abs(observed),
                "tolerance": tol.mean_atol,
                "pass": bool(abs(observed) <= tol.mean_atol),
            }
        )

    return ExperimentReport(
        config=config,
        means=means,
        mean_se=mean_se,
        covariance=cov,
        variance_se=variance_se,
        covariance_se=covariance_se,
        predicted=predicted,
        comparisons=comparisons,
        passed=all(c["pass"] for c in comparisons),
    )


@dataclass(frozen=True)
class QuadratureConfig:
    """Panel count and truncation for the limit covariance quadrature."""

    grid: int = 1024
    truncation: float = 60.0

    def __post_init__(self):
        if self.grid < 64 or self.grid % 2 != 0:
            raise DomainError(f"grid must be even and >= 64, got {self.grid}")
        if self.truncation < 40.0:
            raise DomainError(f"truncation must be >= 40, got {self.truncation}")


def _simpson_weights(panels):
    w = np.ones(panels + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w / 3.0


def limit_covariance_quadrature(r, rho, config=None):
    """
    Unit limit covariance at orders (r, rho) as the double integral of
    exp(-max(s,t)) s^(r-1) t^(rho-1) / ((r-1)! (rho-1)!) over [0, S]^2,
    by composite Simpson with ``config.grid`` panels per axis.

    The integrand's derivative jumps across the diagonal, so the inner
    integral is split there and each smooth piece gets its own composite
    rule; the result is then accurate to far better than 1e-4 at the
    default grid.
    """
    if not (1 <= r <= 8 and 1 <= rho <= 8):
        raise DomainError(f"orders must lie in [1, 8], got ({r}, {rho})")
    config = config or QuadratureConfig()
    g, S = config.grid, config.truncation

    s = np.linspace(0.0, S, g + 1)
    frac = np.linspace(0.0, 1.0, g + 1)
    w_unit = _simpson_weights(g) / g  # weights on [0, 1]
    outer_w = _simpson_weights(g) * (S / g)
    outer_f = outer_w * s ** (r - 1) / math.factorial(r - 1)
    norm_rho = math.factorial(rho - 1)

    inner = np.empty(g + 1)
    chunk = 128
    for lo in range(0, g + 1, chunk):
        hi = min(lo + chunk, g + 1)
        sc = s[lo:hi, None]
        t_lo = sc * frac[None, :]
        t_hi = sc + (S - sc) * frac[None, :]
        f_lo = np.exp(-sc) * t_lo ** (rho - 1) / norm_rho
        f_hi = np.exp(-t_hi) * t_hi ** (rho - 1) / norm_rho
        inner[lo:hi] = (sc[:, 0]) * (f_lo @ w_unit) + (S - sc[:, 0]) * (f_hi @ w_unit)
    return float(outer_f @ inner)


# previously tabulated limit covariance values under audit; the printed
# off-diagonals at orders (2,3), (2,4) and (3,4) disagree with every
# independent route computed here
REFERENCE_COVARIANCE = {
    (1, 1): 2,
    (1, 2): 3,
    (2, 2): 6,
    (1, 3): 4,
    (2, 3): 9,
    (3, 3): 20,
    (1, 4): 5,
    (2, 4): 11,
    (3, 4): 29,
    (4, 4): 70,
}

_ADJUDICATION_RTOL = 1e-3


def adjudicate_covariance(pmax, config=None):
    """
    For every pair 1 <= r <= rho <= pmax, compare the recursion value, the
    closed-form binomial, the quadrature oracle, and (where available) the
    previously tabulated value.  The verdict is "consistent" when all
    computed routes agree within 1e-3 relative and the tabulated value
    (if any) matches; a tabulated value contradicted by agreeing routes is
    flagged "reference-discrepancy".
    """
    if not (1 <= pmax <= 8):
        raise DomainError(f"pmax must lie in [1, 8], got {pmax}")
    frechet = DomainKind.frechet()
    rows = []
    for r in range(1, pmax + 1):
        for rho in range(r, pmax + 1):
            recursion = covariance(r, rho, frechet)
            closed = covariance_closed(r, rho)
            quad = limit_covariance_quadrature(r, rho, config)
            routes_agree = (
                abs(recursion - closed) <= _ADJUDICATION_RTOL * closed
                and abs(quad - closed) <= _ADJUDICATION_RTOL * closed
            )
            reference = REFERENCE_COVARIANCE.get((r, rho))
            if not routes_agree:
                verdict = "oracle-mismatch"
            elif reference is not None and reference != round(recursion):
                verdict = "reference-discrepancy"
            else:
                verdict = "consistent"
            rows.append(
                {
                    "orders": [r, rho],
                    "recursion": int(round(recursion)),
                    "closed_form": int(closed),
                    "quadrature": quad,
                    "reference": reference,
                    "verdict": verdict,
                }
            )
    return rows
