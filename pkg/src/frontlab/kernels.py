"""Discrete and continuum heat-kernel quantities.

The discrete walk is the rate-1 continuous-time simple random walk on Z
(jumps +-1 with probability 1/2 each).  Its marginal law is computed by
uniformization: a Poisson(t) mixture of symmetric binomial steps, truncated
once the neglected Poisson and spatial tails drop below a configurable
tolerance.  These quantities feed the centering of the noise term, window
sizing, and expectation diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numba import njit
from scipy import special, stats

__all__ = [
    "KernelTable",
    "discrete_heat_kernel",
    "tail_distribution",
    "centering",
    "kernel_table",
    "reach_probability",
    "reach_probability_mc",
    "walk_tail_chernoff",
    "continuum_heat_kernel",
    "continuum_tail",
]

DEFAULT_TOL = 1e-12


def walk_tail_chernoff(t: float, x: float) -> float:
    """Rigorous upper bound on P(W(t) >= x) for x >= 0 (Chernoff on cosh)."""
    if x <= 0:
        return 1.0
    if t == 0:
        return 0.0
    lam = math.asinh(x / t)
    return math.exp(t * (math.cosh(lam) - 1.0) - lam * x)


def _support_halfwidth(t: float, tol: float) -> int:
    """Smallest L with P(|W(t)| > L) <= tol, via the Chernoff bound."""
    L = max(8, int(math.ceil(4.0 * math.sqrt(t + 1.0))))
    while 2.0 * walk_tail_chernoff(t, L) > tol:
        L *= 2
    return L


def _poisson_window(t: float, tol: float):
    lo = int(stats.poisson.ppf(tol / 4.0, t)) if t > 0 else 0
    hi = int(stats.poisson.isf(tol / 4.0, t)) + 1 if t > 0 else 0
    return max(lo, 0), hi


def _binomial_rows(m_range: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """P(S_m = x) for the +-1 walk after m steps; rows m, columns x."""
    m = m_range[:, None].astype(float)
    k2 = m + xs[None, :]  # = 2k where k = number of +1 steps
    valid = (k2 >= 0) & (k2 <= 2 * m) & (k2 % 2 == 0)
    k = np.where(valid, k2 / 2.0, 0.0)
    logp = (
        special.gammaln(m + 1.0)
        - special.gammaln(k + 1.0)
        - special.gammaln(m - k + 1.0)
        - m * math.log(2.0)
    )
    return np.where(valid, np.exp(logp), 0.0)


@dataclass(frozen=True)
class KernelTable:
    """hk, erf and V at one time, over the symmetric site range ``xs``."""

    t: float
    xs: np.ndarray      # -L..L
    hk: np.ndarray      # P(W(t) = x)
    erf: np.ndarray     # P(W(t) >= x), same indexing
    v: float            # sum_{y>0} erf(t, y) = E[W(t)_+]

    @property
    def psi_bound(self) -> np.ndarray:
        """Reflection bound on the reach probability, min(1, 2 erf)."""
        return np.minimum(1.0, 2.0 * self.erf)

    def mass(self) -> float:
        return float(self.hk.sum())

    def to_csv(self, path) -> None:
        arr = np.column_stack((self.xs, self.hk, self.erf, self.psi_bound))
        np.savetxt(path, arr, delimiter=",", header="x,hk,erf,psi_bound",
                   comments="")


def kernel_table(t: float, tol: float = DEFAULT_TOL, halfwidth: int | None = None) -> KernelTable:
    """Tabulate hk(t, .), erf(t, .) and V(t) on |x| <= halfwidth."""
    if t < 0:
        raise ValueError("t must be >= 0")
    L = halfwidth if halfwidth is not None else _support_halfwidth(t, tol)
    xs = np.arange(-L, L + 1)
    if t == 0:
        hk0 = (xs == 0).astype(float)
    else:
        m_lo, m_hi = _poisson_window(t, tol)
        m_range = np.arange(m_lo, m_hi + 1)
        pois = stats.poisson.pmf(m_range, t)
        hk0 = pois @ _binomial_rows(m_range, xs)
    # erf by suffix summation, then hk re-derived as its increments so the
    # telescoping identity erf(t,x) - erf(t,x+1) = hk(t,x) is exact in floats
    erf = np.cumsum(hk0[::-1])[::-1]
    hk = erf - np.concatenate((erf[1:], [0.0]))
    v = float(erf[xs > 0].sum())
    return KernelTable(t=float(t), xs=xs, hk=hk, erf=erf, v=v)


@lru_cache(maxsize=512)
def _cached_table(t: float, tol: float) -> KernelTable:
    return kernel_table(t, tol)


def discrete_heat_kernel(t: float, x: int, tol: float = DEFAULT_TOL) -> float:
    """P(W(t) = x) by uniformization."""
    tab = _cached_table(float(t), tol)
    x = abs(int(x))
    if x > tab.xs[-1]:
        return 0.0
    return float(tab.hk[x + len(tab.hk) // 2])


def tail_distribution(t: float, x: int, tol: float = DEFAULT_TOL) -> float:
    """erf(t, x) = P(W(t) >= x)."""
    tab = _cached_table(float(t), tol)
    x = int(x)
    if x > tab.xs[-1]:
        return 0.0
    if x < tab.xs[0]:
        return 1.0
    return float(tab.erf[x + len(tab.hk) // 2])


def centering(t: float, tol: float = DEFAULT_TOL) -> float:
    """V(t) = sum_{y>0} erf(t, y), the expected positive part of W(t)."""
    return _cached_table(float(t), tol).v


def reach_probability(t: float, x: int) -> float:
    """Upper bound on P(W visits x within [0, t]): Psi <= min(1, 2 erf)."""
    x = abs(int(x))
    if x == 0:
        return 1.0
    return min(1.0, 2.0 * tail_distribution(t, x))


@njit(cache=True)
def _reach_mc_kernel(t, x, n_walks, seed):
    state = np.uint64(seed)
    hits = 0
    for _ in range(n_walks):
        pos = 0
        s = 0.0
        while True:
            # splitmix64 draws
            state += np.uint64(0x9E3779B97F4A7C15)
            z = state
            z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
            z = z ^ (z >> np.uint64(31))
            u = (z >> np.uint64(11)) * 1.1102230246251565e-16
            s -= math.log(1.0 - u)
            if s > t:
                break
            state += np.uint64(0x9E3779B97F4A7C15)
            z = state
            z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
            z = z ^ (z >> np.uint64(31))
            pos += 1 if (z & np.uint64(1)) else -1
            if pos == x:
                hits += 1
                break
    return hits


def reach_probability_mc(t: float, x: int, n_walks: int = 100_000,
                         seed: int = 0) -> tuple[float, float]:
    """Monte Carlo estimate of Psi(t, x) with its standard error."""
    x = abs(int(x))
    if x == 0:
        return 1.0, 0.0
    hits = _reach_mc_kernel(float(t), x, int(n_walks), seed)
    p = hits / n_walks
    return p, math.sqrt(max(p * (1.0 - p), 1e-300) / n_walks)


# -- continuum counterparts ---------------------------------------------------


def continuum_heat_kernel(t: float, xi: float) -> float:
    """Hk(t, xi) = exp(-xi^2 / 2t) / sqrt(2 pi t)."""
    if t <= 0:
        raise ValueError("t must be > 0")
    return math.exp(-xi * xi / (2.0 * t)) / math.sqrt(2.0 * math.pi * t)


def continuum_tail(t: float, xi: float) -> float:
    """Erf(t, xi) = integral of Hk(t, .) over [xi, inf)."""
    if t <= 0:
        raise ValueError("t must be > 0")
    return 0.5 * special.erfc(xi / math.sqrt(2.0 * t))
