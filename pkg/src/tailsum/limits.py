"""Covariance model of the limiting Gaussian process.

The normalized sum-product statistics converge to a centered Gaussian
ladder whose variance at order r is a domain factor times the exact integer
``variance_number(r)`` and whose covariance couples a second domain factor
with ``covariance_number(r, rho)``.  Replacing the random centering by a
deterministic one shifts the process by an index-dependent multiple of a
common standard Gaussian, which the reduced formulas absorb.
"""

import math
from dataclasses import dataclass

import numpy as np

from .combinatorics import covariance_number, variance_number
from .errors import DomainError

__all__ = [
    "DomainKind",
    "variance_factor",
    "covariance_factor",
    "shift_factor",
    "variance",
    "covariance",
    "covariance_closed",
    "reduced_variance",
    "reduced_covariance",
    "lil_envelope",
    "CovarianceModel",
]


@dataclass(frozen=True)
class DomainKind:
    """Domain of attraction of the underlying distribution.

    ``weibull`` (finite right endpoint) keeps a finite shape parameter;
    ``frechet`` and ``gumbel`` use the infinite-shape convention under
    which every domain factor collapses to 1.
    """

    kind: str
    gamma: float | None = None

    def __post_init__(self):
        if self.kind not in ("frechet", "weibull", "gumbel"):
            raise DomainError(f"unknown domain kind {self.kind!r}")
        if self.kind == "weibull":
            if self.gamma is None or not math.isfinite(self.gamma) or self.gamma <= 0:
                raise DomainError("the weibull domain needs a finite gamma > 0")
        elif self.gamma is not None and (not math.isfinite(self.gamma) or self.gamma <= 0):
            raise DomainError("gamma must be finite and positive when given")

    @classmethod
    def frechet(cls, gamma=None):
        return cls("frechet", gamma)

    @classmethod
    def weibull(cls, gamma):
        return cls("weibull", gamma)

    @classmethod
    def gumbel(cls):
        return cls("gumbel", None)

    @property
    def uses_shape(self):
        return self.kind == "weibull"


def variance_factor(r, domain):
    """Variance correction: prod_{j=1..r} (g+j)/(g+r+j) in the weibull
    domain, 1 elsewhere."""
    if r < 1:
        raise DomainError(f"order must be >= 1, got {r}")
    if not domain.uses_shape:
        return 1.0
    g = domain.gamma
    out = 1.0
    for j in range(1, r + 1):
        out *= (g + j) / (g + r + j)
    return out


def covariance_factor(r, rho, domain):
    """Covariance correction: prod_{j=1..r} (g+j)/(g+rho+j) for r < rho in
    the weibull domain, 1 elsewhere."""
    if not (1 <= r < rho):
        raise DomainError(f"orders must satisfy 1 <= r < rho, got ({r}, {rho})")
    if not domain.uses_shape:
        return 1.0
    g = domain.gamma
    out = 1.0
    for j in range(1, r + 1):
        out *= (g + j) / (g + rho + j)
    return out


def shift_factor(p, domain):
    """Deterministic-centering shift coefficient: (g+p)/g in the weibull
    domain, 1 elsewhere."""
    if p < 1:
        raise DomainError(f"order must be >= 1, got {p}")
    if not domain.uses_shape:
        return 1.0
    return (domain.gamma + p) / domain.gamma


def variance(r, domain):
    """Limit variance at order r under random centering."""
    return variance_factor(r, domain) * variance_number(r)


def covariance(r, rho, domain):
    """Limit covariance at orders (r, rho); symmetric, diagonal delegates
    to ``variance``."""
    if r < 1 or rho < 1:
        raise DomainError(f"orders must be >= 1, got ({r}, {rho})")
    if r == rho:
        return variance(r, domain)
    if r > rho:
        r, rho = rho, r
    return covariance_factor(r, rho, domain) * covariance_number(r, rho)


def covariance_closed(r, rho):
    """Closed-form oracle for the unit covariance: binomial(r+rho, r).

    With unit-exponential spacing limits the order-p statistic is a sample
    mean of E^p/p!, so the unit covariance is 1 + Cov(E^r/r!, E^rho/rho!)
    = (r+rho)!/(r! rho!).
    """
    if r < 1 or rho < 1:
        raise DomainError(f"orders must be >= 1, got ({r}, {rho})")
    return math.comb(r + rho, r)


def reduced_variance(r, domain):
    """Limit variance at order r under deterministic centering."""
    e = shift_factor(r, domain)
    return variance(r, domain) - 2.0 * e + e * e


def reduced_covariance(r, rho, domain):
    """Limit covariance at orders (r, rho) under deterministic centering."""
    if r == rho:
        return reduced_variance(r, domain)
    return (
        covariance(r, rho, domain)
        - shift_factor(r, domain)
        - shift_factor(rho, domain)
        + shift_factor(r, domain) * shift_factor(rho, domain)
    )


def lil_envelope(p, domain, k, n):
    """
    Iterated-logarithm fluctuation envelope for the relative error of the
    order-p statistic: sqrt(reduced_variance(p)) * sqrt(2 loglog(n) / k).
    """
    if p < 1:
        raise DomainError(f"order must be >= 1, got {p}")
    if not (3 <= k < n):
        raise DomainError(f"need 3 <= k < n, got k={k}, n={n}")
    loglog = math.log(math.log(n))
    if loglog <= 0.0:
        raise DomainError(f"loglog(n) must be positive, got n={n}")
    return math.sqrt(reduced_variance(p, domain)) * math.sqrt(2.0 * loglog / k)


@dataclass(frozen=True)
class CovarianceModel:
    """Evaluated limit model up to a maximal order.

    ``sigma`` holds the full symmetric covariance matrix under random
    centering; ``sigma2`` its diagonal; ``e`` the shift coefficients.
    """

    domain: DomainKind
    pmax: int
    sigma2: tuple
    sigma: np.ndarray
    e: tuple

    @classmethod
    def build(cls, domain, pmax):
        if pmax < 1:
            raise DomainError(f"pmax must be >= 1, got {pmax}")
        sig = np.empty((pmax, pmax))
        for r in range(1, pmax + 1):
            for rho in range(r, pmax + 1):
                sig[r - 1, rho - 1] = sig[rho - 1, r - 1] = covariance(r, rho, domain)
        e = tuple(shift_factor(p, domain) for p in range(1, pmax + 1))
        model = cls(domain, pmax, tuple(np.diag(sig)), sig, e)
        model._validate()
        return model

    def _validate(self):
        if not np.all(np.isfinite(self.sigma)) or np.any(self.sigma <= 0):
            raise DomainError("covariance entries must be finite and positive")
        for r in range(1, self.pmax + 1):
            if reduced_variance(r, self.domain) < 0:
                raise DomainError(f"reduced variance negative at order {r}")

    def reduced_matrix(self):
        """Covariance matrix under deterministic centering."""
        e = np.asarray(self.e)
        return self.sigma - np.add.outer(e, e) + np.outer(e, e)

    def predicted_variance(self, p, reduced):
        return reduced_variance(p, self.domain) if reduced else float(self.sigma2[p - 1])

    def predicted_covariance(self, r, rho, reduced):
        if reduced:
            return reduced_covariance(r, rho, self.domain)
        return float(self.sigma[r - 1, rho - 1])
