"""Sum-product statistics of the upper order statistics.

The order-p statistic averages, over all ordered compositions of p and all
strictly decreasing index chains inside a tail window, weighted products of
powers of the log-spacings.  Two independent algorithms are provided: a
brute-force enumeration over chains (``sum_product_enum``) and an exact
dynamic program over the spacing intervals (``sum_product``), together with
the classical Hill statistic and the moment form available when l = 0.
"""

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .combinatorics import compositions
from .errors import DomainError, EnumerationBudgetError, UndefinedEstimateError

__all__ = [
    "SortedSample",
    "TailWindow",
    "SpacingSet",
    "log_transform",
    "spacings",
    "hill",
    "sum_product",
    "sum_product_enum",
    "sum_product_ladder",
    "tail_moment",
    "tail_index",
]

# chain budget for the brute-force enumeration
_ENUM_LIMIT = 20_000_000


@dataclass(frozen=True)
class SortedSample:
    """Ascending log-scale observations.

    ``below_support`` flags data whose raw values dipped below 1 (negative
    logs); such samples are processed normally but the flag is carried so
    callers can surface it.
    """

    values: np.ndarray
    below_support: bool = False

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 1 or vals.size < 2:
            raise DomainError("a sample needs at least two observations")
        if not np.all(np.isfinite(vals)):
            raise DomainError("sample values must be finite")
        if np.any(np.diff(vals) < 0):
            raise DomainError("sample values must be sorted ascending")

    @property
    def n(self):
        return int(self.values.size)


@dataclass(frozen=True)
class TailWindow:
    """Index triple (n, k, l) selecting the upper order statistics used."""

    n: int
    k: int
    l: int = 0

    def __post_init__(self):
        if not (0 <= self.l < self.k < self.n):
            raise DomainError(
                f"window must satisfy 0 <= l < k < n, got n={self.n}, k={self.k}, l={self.l}"
            )

    def check(self, sample):
        if sample.n != self.n:
            raise DomainError(f"window n={self.n} does not match sample size {sample.n}")


@dataclass(frozen=True)
class SpacingSet:
    """Consecutive top-spacing differences D_i for i = first_index .. last."""

    first_index: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if np.any(vals < 0):
            raise DomainError("spacings cannot be negative")

    @property
    def is_degenerate(self):
        """True when every spacing in the window is zero (all ties)."""
        return bool(np.all(self.values == 0.0))

    def value(self, i):
        return float(self.values[i - self.first_index])


def log_transform(raw):
    """
    Natural logs of positive raw observations, sorted ascending.

    Raises DomainError on non-positive values.  Values below 1 are legal
    but set the ``below_support`` flag on the returned sample.
    """
    arr = np.asarray(raw, dtype=float)
    if arr.size and (np.any(~np.isfinite(arr)) or np.any(arr <= 0.0)):
        raise DomainError("observations must be positive and finite for the log transform")
    y = np.sort(np.log(arr))
    return SortedSample(y, below_support=bool(np.any(arr < 1.0)))


def spacings(sample, window):
    """Spacing vector D_i = Y_{n-i+1,n} - Y_{n-i,n} for i = l+1 .. k."""
    window.check(sample)
    n, k, l = window.n, window.k, window.l
    seg = sample.values[n - k - 1 : n - l]
    return SpacingSet(first_index=l + 1, values=np.diff(seg)[::-1].copy())


def hill(sample, window):
    """
    Hill's statistic (1/k) * sum_{j=l+1..k} j * D_j, accumulated with
    compensated summation.
    """
    d = spacings(sample, window)
    idx = np.arange(window.l + 1, window.k + 1, dtype=float)
    return math.fsum(idx * d.values) / window.k


def _ladder_values(sample, window, pmax):
    """Iterated-integral dynamic program shared by the order-1..pmax statistics.

    Walking the spacing intervals from the top of the window downward, the
    running iterated integrals F_1..F_pmax of the empirical tail step
    function are pushed across each interval of width D by

        F_m(left) = sum_{q=0..m-1} F_{m-q}(right) D^q/q!  +  (i/n) D^m/m!

    and the order-m statistic is (n/k) F_m at the lower window edge.
    """
    window.check(sample)
    if pmax < 1:
        raise DomainError(f"order must be >= 1, got {pmax}")
    n, k, l = window.n, window.k, window.l
    y = sample.values
    inv_fact = [1.0 / math.factorial(q) for q in range(pmax + 1)]
    F = [0.0] * (pmax + 1)
    for i in range(l + 1, k + 1):
        d = y[n - i] - y[n - i - 1]
        c = i / n
        pw = [1.0] * (pmax + 1)
        for q in range(1, pmax + 1):
            pw[q] = pw[q - 1] * d
        for q in range(pmax + 1):
            pw[q] *= inv_fact[q]
        new = [0.0] * (pmax + 1)
        for m in range(1, pmax + 1):
            new[m] = math.fsum([F[m - q] * pw[q] for q in range(m)] + [c * pw[m]])
        F = new
    return [(n / k) * F[m] for m in range(1, pmax + 1)]


def sum_product(sample, window, p):
    """
    Order-p sum-product statistic via the exact interval dynamic program.

    Parameters
    ----------
    sample : SortedSample
        Log-scale observations.
    window : TailWindow
        Which upper order statistics enter the statistic.
    p : int
        Order of the statistic; p = 1 recovers Hill's statistic.

    Returns
    -------
    float
        The statistic value; non-negative, and zero exactly when every
        spacing in the window is zero.
    """
    return _ladder_values(sample, window, p)[p - 1]


def sum_product_ladder(sample, window, pmax):
    """All statistics of order 1..pmax from one dynamic-programming pass."""
    return _ladder_values(sample, window, pmax)


def _enum_chain_count(m, p):
    return sum(math.comb(p - 1, h - 1) * math.comb(m, h) for h in range(1, min(p, m) + 1))


def sum_product_enum(sample, window, p):
    """
    Order-p statistic by brute-force enumeration over ordered compositions
    and strictly decreasing index chains.  Exponential-cost oracle intended
    for small windows; raises EnumerationBudgetError when the chain count
    is too large (use ``sum_product`` instead).
    """
    if p < 1:
        raise DomainError(f"order must be >= 1, got {p}")
    d = spacings(sample, window)
    k, l = window.k, window.l
    m = k - l
    if _enum_chain_count(m, p) > _ENUM_LIMIT:
        raise EnumerationBudgetError(
            f"enumeration over {_enum_chain_count(m, p)} chains exceeds the budget; "
            "use sum_product for large windows"
        )
    # pw[s][i-(l+1)] = D_i^s / s!
    pw = [None] + [d.values**s / math.factorial(s) for s in range(1, p + 1)]

    def terms():
        for h in range(1, p + 1):
            for comp in compositions(p, h):
                s = comp.parts
                for chain in combinations(range(k, l, -1), h):
                    prod = float(chain[-1])
                    for mth in range(h):
                        prod *= pw[s[mth]][chain[mth] - (l + 1)]
                    yield prod

    return math.fsum(terms()) / k


def tail_moment(sample, window, p):
    """
    Moment form (1/k) sum_{i=1..k} (Y_{n-i+1,n} - Y_{n-k,n})^p / p!,
    defined for l = 0 windows only, where it coincides with the order-p
    sum-product statistic.
    """
    window.check(sample)
    if window.l != 0:
        raise DomainError("the moment form requires l = 0")
    if p < 1:
        raise DomainError(f"order must be >= 1, got {p}")
    n, k = window.n, window.k
    y = sample.values
    excess = y[n - k :] - y[n - k - 1]
    return math.fsum(excess**p) / (k * math.factorial(p))


def tail_index(sample, window, p):
    """
    Index estimate T^(-1/p) from the order-p statistic.  Raises
    UndefinedEstimateError when the statistic vanishes (fully tied window).
    """
    t = sum_product(sample, window, p)
    if t <= 0.0:
        raise UndefinedEstimateError(
            f"order-{p} statistic is {t}; the index estimate is undefined"
        )
    return t ** (-1.0 / p)
