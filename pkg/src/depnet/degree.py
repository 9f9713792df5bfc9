"""Degree distributions and discrete power-law fitting.

The fitting pipeline follows Clauset, Shalizi & Newman: maximum-likelihood
exponent for a given lower cutoff, cutoff chosen by minimising the
Kolmogorov-Smirnov distance, and a semi-parametric bootstrap for the
goodness-of-fit p-value.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from .errors import (DegenerateTail, EmptyDistribution, EmptyTail,
                     InsufficientPoints, InvalidParameter)
from .graph import DependencyGraph, Direction, EntityKind
from .zeta import DiscretePowerLaw, ZetaAtXmin, upper_sums

GAMMA_LO = 1.01
GAMMA_HI = 6.0
GAMMA_TOL = 1e-4
MIN_TAIL = 50

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class DegreeDistribution:
    direction: Direction
    histogram: dict[int, int]
    n: int

    def degrees(self) -> np.ndarray:
        return np.array(sorted(self.histogram), dtype=np.int64)

    def counts(self) -> np.ndarray:
        return np.array([self.histogram[d] for d in sorted(self.histogram)], dtype=np.int64)

    def pmf(self) -> dict[int, float]:
        """Counts divided by ``n`` (the y-axis of a Pr(k) plot)."""
        return {d: c / self.n for d, c in sorted(self.histogram.items())}

    def samples(self) -> np.ndarray:
        """Expand the histogram back into one degree per counted node."""
        return np.repeat(self.degrees(), self.counts())


@dataclass(frozen=True)
class PowerLawFit:
    gamma: float
    xmin: int
    ks_distance: float
    n_tail: int
    log_likelihood: float
    p_value: float | None = None
    at_bound: bool = False


def degree_histogram(graph: DependencyGraph, direction: Direction | str = Direction.IN,
                     node_kinds: Iterable[EntityKind] | None = None) -> DegreeDistribution:
    """Histogram of node degrees.

    Degrees are always taken on the full graph; ``node_kinds`` only selects
    which nodes are counted.
    """
    direction = Direction(direction)
    deg = graph.degrees(direction)
    if node_kinds is not None:
        codes = [EntityKind(k).code for k in node_kinds]
        deg = deg[np.isin(graph.kind_codes, codes)]
    counts = np.bincount(deg) if len(deg) else np.zeros(0, dtype=np.int64)
    present = np.flatnonzero(counts)
    return DegreeDistribution(direction, {int(d): int(counts[d]) for d in present}, int(len(deg)))


def ccdf(dist: DegreeDistribution) -> list[tuple[int, float]]:
    """Fraction of samples with degree >= d, for each present degree d."""
    if dist.n < 1 or not dist.histogram:
        raise EmptyDistribution("distribution has no samples")
    degs = dist.degrees()
    counts = dist.counts()
    at_least = np.cumsum(counts[::-1])[::-1]
    return [(int(d), float(c / dist.n)) for d, c in zip(degs, at_least)]


def _as_samples(samples) -> np.ndarray:
    x = np.asarray(samples)
    if x.size and not np.issubdtype(x.dtype, np.integer):
        if not np.all(np.equal(np.mod(x, 1), 0)):
            raise InvalidParameter("samples must be integers")
    x = x.astype(np.int64, copy=False).ravel()
    if x.size and x.min() < 0:
        raise InvalidParameter("samples must be non-negative")
    return x


class _Tail:
    """Sorted samples with prefix sums so any cutoff is O(log n) to set up."""

    def __init__(self, samples):
        x = np.sort(_as_samples(samples))
        self.x = x
        pos = x[x > 0]
        self.values, self.first = np.unique(pos, return_index=True)
        self.offset = len(x) - len(pos)
        logs = np.log(pos.astype(np.float64))
        self.log_suffix = np.concatenate([np.cumsum(logs[::-1])[::-1], [0.0]])

    def n_tail(self, xmin):
        return len(self.x) - int(np.searchsorted(self.x, xmin, side="left"))

    def distinct_from(self, xmin):
        return len(self.values) - int(np.searchsorted(self.values, xmin, side="left"))

    def fit(self, xmin) -> PowerLawFit:
        xmin = int(xmin)
        if xmin < 1:
            raise InvalidParameter("xmin must be >= 1")
        n = self.n_tail(xmin)
        if n == 0:
            raise EmptyTail(f"no samples >= {xmin}")
        if self.distinct_from(xmin) < 2:
            raise DegenerateTail(f"fewer than 2 distinct values >= {xmin}")
        start = int(np.searchsorted(self.x, xmin, side="left")) - self.offset
        sum_log = float(self.log_suffix[start])
        zeta = ZetaAtXmin(xmin)

        def loglik(g):
            return -n * math.log(zeta(g)) - g * sum_log

        gamma, ll = _golden_max(loglik, GAMMA_LO, GAMMA_HI, GAMMA_TOL)
        at_bound = gamma - GAMMA_LO < 2 * GAMMA_TOL or GAMMA_HI - gamma < 2 * GAMMA_TOL
        ks = self._ks(xmin, gamma, zeta(gamma))
        return PowerLawFit(gamma, xmin, ks, n, ll, None, at_bound)

    def _ks(self, xmin, gamma, z):
        i = int(np.searchsorted(self.values, xmin, side="left"))
        vals = self.values[i:]
        n = self.n_tail(xmin)
        # empirical CDF at each distinct value: samples <= v over tail size
        le = np.searchsorted(self.x, vals, side="right") - (len(self.x) - n)
        emp = le / n
        model = 1.0 - upper_sums(gamma, xmin, vals, z) / z
        return float(np.max(np.abs(emp - model)))


def _golden_max(f, lo, hi, tol):
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    best = max(((f(x), x) for x in (a, b, 0.5 * (a + b))), key=lambda t: t[0])
    return best[1], best[0]


def power_law_loglik(samples, gamma: float, xmin: int) -> float:
    """Discrete power-law log-likelihood of the samples >= ``xmin``."""
    x = _as_samples(samples)
    x = x[x >= xmin]
    return float(-len(x) * math.log(ZetaAtXmin(xmin)(gamma)) - gamma * np.log(x).sum())


def fit_power_law(samples, xmin: int) -> PowerLawFit:
    """Maximum-likelihood discrete power law for the samples >= ``xmin``.

    The exponent is searched by golden section on [1.01, 6.0] to 1e-4;
    ``at_bound`` flags an optimum sitting on the bracket edge.
    """
    return _Tail(samples).fit(xmin)


def select_xmin(samples, min_tail: int = MIN_TAIL) -> PowerLawFit:
    """Fit at every candidate cutoff and keep the smallest KS distance.

    Candidates are the distinct positive sample values that leave at least
    ``min_tail`` samples (and two distinct values) in the tail. If no value
    qualifies, the smallest positive value is used. Ties go to the smaller
    cutoff.
    """
    tail = _Tail(samples)
    if len(tail.values) < 2:
        raise DegenerateTail("fewer than 2 distinct positive values")
    cands = [int(v) for v in tail.values
             if tail.n_tail(v) >= min_tail and tail.distinct_from(v) >= 2]
    if not cands:
        cands = [int(tail.values[0])]
    best = None
    for v in cands:
        f = tail.fit(v)
        if best is None or f.ks_distance < best.ks_distance:
            best = f
    return best


def candidate_fits(samples, min_tail: int = MIN_TAIL) -> list[PowerLawFit]:
    """Fits at every cutoff :func:`select_xmin` considers (for inspection)."""
    tail = _Tail(samples)
    return [tail.fit(int(v)) for v in tail.values
            if tail.n_tail(v) >= min_tail and tail.distinct_from(v) >= 2]


def _threads():
    try:
        return max(1, int(os.environ.get("DEPNET_THREADS", "1")))
    except ValueError:
        return 1


def _replicate(args):
    head, n, n_tail, gamma, xmin, seed_seq, min_tail = args
    rng = np.random.default_rng(seed_seq)
    k = int(rng.binomial(n, n_tail / n))
    model = _sampler(gamma, xmin)
    parts = [model.sample(k, rng)]
    if n - k:
        parts.append(head[rng.integers(0, len(head), n - k)] if len(head) else model.sample(n - k, rng))
    try:
        return select_xmin(np.concatenate(parts), min_tail).ks_distance
    except (DegenerateTail, EmptyTail):
        return None


_SAMPLER_CACHE: dict = {}


def _sampler(gamma, xmin):
    key = (gamma, xmin)
    s = _SAMPLER_CACHE.get(key)
    if s is None:
        _SAMPLER_CACHE.clear()
        s = _SAMPLER_CACHE[key] = DiscretePowerLaw(gamma, xmin)
    return s


def bootstrap_pvalue(samples, fit: PowerLawFit, n_boot: int, seed: int,
                     min_tail: int = MIN_TAIL, workers: int | None = None) -> float:
    """Semi-parametric bootstrap p-value of a power-law fit.

    Each replicate has the size of the data: with probability
    ``n_tail / n`` a value comes from the fitted model, otherwise it is drawn
    uniformly from the observed values below ``xmin``. Replicates are refit
    with :func:`select_xmin`; the p-value is the fraction whose KS distance
    reaches the observed one. Replicate ``i`` uses child ``i`` of
    ``SeedSequence(seed)``, so results do not depend on ``workers``
    (default: ``DEPNET_THREADS`` or 1).
    """
    if n_boot < 1:
        raise InvalidParameter("n_boot must be >= 1")
    x = _as_samples(samples)
    n = len(x)
    n_tail = int(np.count_nonzero(x >= fit.xmin))
    if n_tail == 0:
        raise EmptyTail(f"no samples >= {fit.xmin}")
    head = np.sort(x[x < fit.xmin])
    children = np.random.SeedSequence(seed).spawn(n_boot)
    jobs = [(head, n, n_tail, fit.gamma, fit.xmin, c, min_tail) for c in children]
    workers = workers or _threads()
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            ks = list(ex.map(_replicate, jobs, chunksize=max(1, n_boot // (4 * workers))))
    else:
        ks = [_replicate(j) for j in jobs]
    ks = [k for k in ks if k is not None]
    if not ks:
        return 0.0
    return float(np.mean(np.asarray(ks) >= fit.ks_distance))


def fit_with_pvalue(samples, n_boot: int, seed: int, min_tail: int = MIN_TAIL) -> PowerLawFit:
    fit = select_xmin(samples, min_tail)
    return replace(fit, p_value=bootstrap_pvalue(samples, fit, n_boot, seed, min_tail))


def loglog_slope(dist: DegreeDistribution, min_degree: int = 1,
                 min_count: int = 1) -> tuple[float, float, float]:
    """OLS line through ``(ln d, ln count)`` for degrees >= ``min_degree``.

    Returns ``(slope, intercept, r_squared)``; degree 0 is always skipped.
    On sampled data the sparse tail (counts of 1) flattens the line; raise
    ``min_count`` to fit only well-populated degrees.
    """
    pts = [(d, c) for d, c in sorted(dist.histogram.items())
           if d >= max(min_degree, 1) and c >= max(min_count, 1)]
    if len(pts) < 2:
        raise InsufficientPoints(f"need 2 points, have {len(pts)}")
    lx = np.log([p[0] for p in pts])
    ly = np.log([p[1] for p in pts])
    mx, my = lx.mean(), ly.mean()
    sxx = np.sum((lx - mx) ** 2)
    slope = float(np.sum((lx - mx) * (ly - my)) / sxx)
    intercept = float(my - slope * mx)
    resid = ly - (intercept + slope * lx)
    sst = np.sum((ly - my) ** 2)
    r2 = float(1.0 - np.sum(resid ** 2) / sst) if sst > 0 else 1.0
    return slope, intercept, r2
