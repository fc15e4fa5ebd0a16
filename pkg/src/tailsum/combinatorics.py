"""Exact-integer combinatorics: ordered compositions, the three recursive
number families behind the limiting covariance of the sum-product tail
statistics, and a brute-force lattice-path counter used as a cross-check.

All values are Python integers, so results are exact at any size.
"""

from dataclasses import dataclass
from itertools import combinations

from .errors import DomainError

__all__ = [
    "Composition",
    "compositions",
    "type_i",
    "type_ii",
    "type_iii",
    "variance_number",
    "covariance_number",
    "lattice_path_count",
    "NumberTable",
]


@dataclass(frozen=True)
class Composition:
    """An ordered tuple of positive integers; order is significant."""

    parts: tuple

    def __post_init__(self):
        if len(self.parts) == 0 or any(s != int(s) or s < 1 for s in self.parts):
            raise DomainError(f"composition parts must be positive integers: {self.parts}")
        object.__setattr__(self, "parts", tuple(int(s) for s in self.parts))

    @property
    def total(self):
        return sum(self.parts)

    def __len__(self):
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)


def compositions(p, h):
    """
    All ordered compositions of p into exactly h positive parts,
    in lexicographic order.  There are binomial(p-1, h-1) of them.
    """
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    if h < 1 or h > p:
        raise DomainError(f"h must satisfy 1 <= h <= p, got h={h}, p={p}")
    out = []
    for cuts in combinations(range(1, p), h - 1):
        bounds = (0,) + cuts + (p,)
        out.append(Composition(tuple(bounds[i + 1] - bounds[i] for i in range(h))))
    return out


def _check_vr(v, r, rname="r"):
    if v < 0:
        raise DomainError(f"v must be >= 0, got {v}")
    if r < 1:
        raise DomainError(f"{rname} must be >= 1, got {r}")


def type_i(v, r):
    """
    Type I number at (v, r).

    Columns r = 1, 2 are all ones; for r >= 3 each column is filled from
    the previous one by the two-cell addition rule
        value(0, r) = value(1, r-1)
        value(v, r) = value(v+1, r-1) + value(v-1, r),  v >= 1.
    """
    _check_vr(v, r)
    if r <= 2:
        return 1
    # column c must extend to row v + (r - c) to feed the next column
    col = [1] * (v + r - 1)
    for c in range(3, r + 1):
        need = v + r - c
        new = [0] * (need + 1)
        new[0] = col[1]
        for vv in range(1, need + 1):
            new[vv] = col[vv + 1] + new[vv - 1]
        col = new
    return col[v]


def _type_ii_column(tau, delta, vmax):
    """Column of type II numbers for fixed delta, rows v = 0..vmax."""
    col = [1] * (vmax + 1)  # delta == tau column
    for _ in range(tau - 1, delta - 1, -1):
        new = [1] * (vmax + 1)
        for vv in range(1, vmax + 1):
            new[vv] = new[vv - 1] + col[vv]
        col = new
    return col


def type_ii(tau, v, delta):
    """
    Type II number at (v, delta) within the tau-class.

    The rightmost column (delta = tau) and the top row (v = 0) are ones;
    interior cells satisfy value(v, d) = value(v-1, d) + value(v, d+1).
    """
    if tau < 1:
        raise DomainError(f"tau must be >= 1, got {tau}")
    if v < 0:
        raise DomainError(f"v must be >= 0, got {v}")
    if delta < 1 or delta > tau:
        raise DomainError(f"delta must lie in [1, {tau}], got {delta}")
    return _type_ii_column(tau, delta, v)[v]


def _type_iii_seed_column(tau, vmax):
    """delta = 2 column: running sums of the type II delta = 1 column."""
    base = _type_ii_column(tau, 1, vmax + 1)
    out = [0] * (vmax + 1)
    acc = 0
    for vv in range(vmax + 1):
        acc += base[vv + 1]
        out[vv] = acc
    return out


def type_iii(tau, v, delta):
    """
    Type III number at (v, delta) within the tau-class.

    Conventions: delta = 0 gives 1 and delta = 1 returns the type II
    value at (v, 1).  The delta = 2 column seeds the recursion as the
    running sum of the type II delta = 1 column; columns delta >= 3 obey
    the same two-cell rule as the type I family.
    """
    if tau < 1:
        raise DomainError(f"tau must be >= 1, got {tau}")
    if v < 0:
        raise DomainError(f"v must be >= 0, got {v}")
    if delta < 0:
        raise DomainError(f"delta must be >= 0, got {delta}")
    if delta == 0:
        return 1
    if delta == 1:
        return type_ii(tau, v, 1)
    col = _type_iii_seed_column(tau, v + delta - 2)
    for d in range(3, delta + 1):
        need = v + delta - d
        new = [0] * (need + 1)
        new[0] = col[1]
        for vv in range(1, need + 1):
            new[vv] = col[vv + 1] + new[vv - 1]
        col = new
    return col[v]


def variance_number(r):
    """
    Exact variance of the unit limit process at order r: a(0) = 1 and
    a(r) = 2 * sum_{j=1..r} type_i(1, j) * a(r-j).
    """
    if r < 0:
        raise DomainError(f"r must be >= 0, got {r}")
    a = [1]
    t1 = [None] + [type_i(1, j) for j in range(1, r + 1)]
    for m in range(1, r + 1):
        a.append(2 * sum(t1[j] * a[m - j] for j in range(1, m + 1)))
    return a[r]


def covariance_number(r, rho):
    """
    Exact covariance of the unit limit process at orders (r, rho),
    symmetric in its arguments.  For r < rho it is

        sum_{j=0..r} type_iii(rho - r, 1, j) * a(r - j)

    with the delta = 0 and delta = 1 conventions of ``type_iii``.
    """
    if r < 1 or rho < 1:
        raise DomainError(f"orders must be >= 1, got ({r}, {rho})")
    if r == rho:
        return variance_number(r)
    if r > rho:
        r, rho = rho, r
    tau = rho - r
    return sum(type_iii(tau, 1, j) * variance_number(r - j) for j in range(r + 1))


def lattice_path_count(width, height, lower=None, upper=None):
    """
    Count monotone unit-step paths from (0,0) to (width, height) that stay
    within [lower[x], upper[x]] at every column x, by dynamic programming.

    ``lower`` and ``upper`` are sequences of length width+1 holding the
    inclusive y-bounds per column; omitted bounds default to the full
    rectangle.  Boundaries must be monotone staircases that admit both the
    origin and the target corner.
    """
    if width < 0 or height < 0:
        raise DomainError(f"grid size must be non-negative, got {width}x{height}")
    lo = list(lower) if lower is not None else [0] * (width + 1)
    hi = list(upper) if upper is not None else [height] * (width + 1)
    if len(lo) != width + 1 or len(hi) != width + 1:
        raise DomainError("boundary length must equal width + 1")
    if any(lo[x] > lo[x + 1] for x in range(width)) or any(hi[x] > hi[x + 1] for x in range(width)):
        raise DomainError("boundaries must be monotone non-decreasing")
    if any(lo[x] < 0 or hi[x] > height or lo[x] > hi[x] for x in range(width + 1)):
        raise DomainError("boundaries must stay inside the grid and not cross")
    if not (lo[0] <= 0 <= hi[0]) or not (lo[width] <= height <= hi[width]):
        raise DomainError("boundaries must contain the origin and the target corner")

    ways = [0] * (height + 1)
    for y in range(lo[0], hi[0] + 1):
        ways[y] = 1 if y == 0 else ways[y - 1]
    for x in range(1, width + 1):
        new = [0] * (height + 1)
        for y in range(lo[x], hi[x] + 1):
            new[y] = ways[y] + (new[y - 1] if y > lo[x] else 0)
        ways = new
    return ways[height]


_FAMILIES = ("type_i", "type_ii", "type_iii")


@dataclass(frozen=True)
class NumberTable:
    """A rectangular table of one number family, keyed by (v, column)."""

    family: str
    tau: int | None
    vmax: int
    dmax: int
    entries: dict

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise DomainError(f"unknown family {self.family!r}")
        if any(x < 1 for x in self.entries.values()):
            raise DomainError("number tables contain positive integers only")

    @classmethod
    def build(cls, family, vmax, dmax, tau=None):
        if vmax < 0 or dmax < 1:
            raise DomainError("table shape must satisfy vmax >= 0, dmax >= 1")
        if family == "type_i":
            fn = lambda v, c: type_i(v, c)
            tau = None
        elif family == "type_ii":
            if tau is None:
                raise DomainError("type_ii tables need tau")
            dmax = min(dmax, tau)
            fn = lambda v, c: type_ii(tau, v, c)
        elif family == "type_iii":
            if tau is None:
                raise DomainError("type_iii tables need tau")
            fn = lambda v, c: type_iii(tau, v, c)
        else:
            raise DomainError(f"unknown family {family!r}")
        entries = {(v, c): fn(v, c) for v in range(vmax + 1) for c in range(1, dmax + 1)}
        return cls(family, tau, vmax, dmax, entries)

    def value(self, v, c):
        return self.entries[(v, c)]

    def row(self, v):
        return [self.entries[(v, c)] for c in range(1, self.dmax + 1)]
