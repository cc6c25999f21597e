"""Sampling and evaluation of the limiting front objects.

The limiting hitting-time process integrates twice the positive part of a
(scaled) Brownian path; its monotone inverse is the limiting front, a
flat-then-jump process.  A deterministic counterpart driven by a sine
fluctuation has closed forms used as oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .stepfn import StepFunction, invert

__all__ = [
    "LimitPath",
    "sample_limit_front",
    "refine_path",
    "sample_front_values",
    "hit_sine",
    "front_sine",
    "deterministic_front",
]


@dataclass(frozen=True)
class LimitPath:
    """Brownian driver, cumulative hitting-time path, and inverted front."""

    sigma: float
    dxi: float
    grid: np.ndarray       # xi grid, uniform step dxi, starts at 0
    brownian: np.ndarray   # B(xi) on the grid
    hit: np.ndarray        # trapezoid cumulative of 2 sigma [B]_+
    frnt: StepFunction     # inverse of the step-represented hit

    def hit_step(self) -> StepFunction:
        return StepFunction(self.grid, self.hit)

    def front_value(self, t: float) -> float:
        return self.frnt(t)

    def to_csv(self, path) -> None:
        arr = np.column_stack((self.grid, self.brownian, self.hit))
        np.savetxt(path, arr, delimiter=",", header="xi,B,hit", comments="")


def _hit_from_brownian(sigma: float, dxi: float, brownian: np.ndarray) -> np.ndarray:
    pos = np.maximum(brownian, 0.0)
    inc = 2.0 * sigma * 0.5 * (pos[:-1] + pos[1:]) * dxi
    return np.concatenate(([0.0], np.cumsum(inc)))


def sample_limit_front(sigma: float, xi_max: float, dxi: float, seed: int,
                       horizon: float | None = None,
                       max_extensions: int = 12) -> LimitPath:
    """Sample B, accumulate the hitting-time path, invert to get the front.

    Clipping the negative part before the trapezoid rule keeps the path
    exactly flat across negative excursions at grid resolution, which is
    what produces the jumps of the inverted front.  If ``horizon`` is given
    the grid is doubled until the path exceeds it.
    """
    if sigma <= 0 or dxi <= 0 or xi_max <= dxi:
        raise ValueError("need sigma > 0, dxi > 0, xi_max > dxi")
    rng = np.random.default_rng(np.random.SeedSequence([0xB0, seed]))
    n = int(round(xi_max / dxi))
    b = np.concatenate(([0.0], np.cumsum(rng.standard_normal(n) * math.sqrt(dxi))))
    hit = _hit_from_brownian(sigma, dxi, b)
    if horizon is not None:
        for _ in range(max_extensions):
            if hit[-1] > horizon:
                break
            ext = np.cumsum(rng.standard_normal(len(b) - 1) * math.sqrt(dxi)) + b[-1]
            b = np.concatenate((b, ext))
            hit = _hit_from_brownian(sigma, dxi, b)
        else:
            raise RuntimeError("hit path did not reach the horizon; raise xi_max")
    grid = dxi * np.arange(len(b))
    frnt = invert(StepFunction(grid, hit))
    return LimitPath(sigma=float(sigma), dxi=float(dxi), grid=grid,
                     brownian=b, hit=hit, frnt=frnt)


def refine_path(path: LimitPath, seed: int = 0) -> LimitPath:
    """Halve the grid step with Brownian-bridge midpoints (shared coarse noise)."""
    rng = np.random.default_rng(np.random.SeedSequence([0xBB, seed]))
    b = path.brownian
    mids = 0.5 * (b[:-1] + b[1:]) + rng.standard_normal(len(b) - 1) * math.sqrt(path.dxi / 4.0)
    fine = np.empty(2 * len(b) - 1)
    fine[0::2] = b
    fine[1::2] = mids
    dxi = path.dxi / 2.0
    hit = _hit_from_brownian(path.sigma, dxi, fine)
    grid = dxi * np.arange(len(fine))
    return LimitPath(sigma=path.sigma, dxi=dxi, grid=grid, brownian=fine,
                     hit=hit, frnt=invert(StepFunction(grid, hit)))


def sample_front_values(sigma: float, t: float, n: int, seed: int,
                        dxi: float = 2e-3, xi_cap: float = 2e4) -> np.ndarray:
    """n independent samples of the limiting front evaluated at time t.

    Works chunk by chunk with constant memory: accumulate the hitting-time
    path until it first exceeds t and return that grid point.  Paths whose
    driver lingers negative past ``xi_cap`` (far-tail mass of order 1e-5)
    are returned as +inf, matching the right-censoring convention of the
    particle ensembles.
    """
    chunk = 32768
    out = np.empty(n)
    for k in range(n):
        rng = np.random.default_rng(np.random.SeedSequence([0xB1, seed, k]))
        b_last = 0.0
        hit_last = 0.0
        xi_base = 0.0
        out[k] = math.inf
        while xi_base < xi_cap:
            b = b_last + np.cumsum(rng.standard_normal(chunk) * math.sqrt(dxi))
            full = np.concatenate(([b_last], b))
            pos = np.maximum(full, 0.0)
            hit = hit_last + np.concatenate(
                ([0.0], np.cumsum(2.0 * sigma * 0.5 * (pos[:-1] + pos[1:]) * dxi)))
            idx = np.searchsorted(hit, t, side="right")
            if idx < len(hit):
                xi = xi_base + idx * dxi
                # first grid point whose hit value exceeds t, unless the
                # crossing falls beyond the cap (censored)
                if xi <= xi_cap:
                    out[k] = xi
                break
            b_last = float(full[-1])
            hit_last = float(hit[-1])
            xi_base += chunk * dxi
    return out


# -- deterministic sine limit -------------------------------------------------


def hit_sine(xi: float) -> float:
    """Closed form of twice the integrated positive part of sin on [0, xi]."""
    if xi < 0:
        raise ValueError("xi must be >= 0")
    k, u = divmod(xi, 2.0 * math.pi)
    return 4.0 * k + (2.0 * (1.0 - math.cos(u)) if u <= math.pi else 4.0)


def front_sine(t: float) -> float:
    """Inverse of hit_sine: arccos branch on [0, pi], then a jump each period."""
    if t < 0:
        raise ValueError("t must be >= 0")
    k, s = divmod(t, 4.0)
    return 2.0 * math.pi * k + math.acos(1.0 - s / 2.0)


def deterministic_front(ict: str, t: float) -> float:
    """Limiting front for a named closed-form fluctuation profile."""
    if ict != "sine":
        raise ValueError("only the sine profile has a closed form here")
    return front_sine(t)
