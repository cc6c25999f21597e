"""Subcritical continuum reference: the explicit square-root front.

For density rho in (0,1) the moving-boundary problem has the similarity
solution u(t, xi) with front kappa * sqrt(t), where kappa solves
rho = kappa * Erf(1, kappa) / Hk(1, kappa).  Densities >= 1 are rejected:
there the continuum problem explodes instantaneously.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .kernels import continuum_heat_kernel, continuum_tail

__all__ = ["StefanSolution", "g_of_kappa", "solve_kappa", "flux_identity_residual"]

_SQRT_PI_OVER_2 = math.sqrt(math.pi / 2.0)


def g_of_kappa(kappa: float) -> float:
    """g(kappa) = kappa * Erf(1, kappa) / Hk(1, kappa), increasing 0 -> 1.

    Evaluated through the scaled complementary error function, which keeps
    the ratio stable for large kappa where Erf and Hk underflow separately.
    """
    if kappa < 0:
        raise ValueError("kappa must be >= 0")
    return kappa * _SQRT_PI_OVER_2 * special.erfcx(kappa / math.sqrt(2.0))


def _g_prime(kappa: float) -> float:
    z = kappa / math.sqrt(2.0)
    return _SQRT_PI_OVER_2 * (1.0 + kappa * kappa) * special.erfcx(z) - kappa


def solve_kappa(rho: float, tol: float = 1e-12) -> float:
    """Unique positive root of g(kappa) = rho, for rho in (0, 1).

    Bracketing bisection brings the root within Newton's basin, then a few
    Newton steps polish it well below the requested tolerance.
    """
    if not (0.0 < rho < 1.0):
        raise ValueError("rho must lie in (0, 1); the front explodes otherwise")
    lo, hi = 0.0, 1.0
    while g_of_kappa(hi) < rho:
        hi *= 2.0
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        if g_of_kappa(mid) < rho:
            lo = mid
        else:
            hi = mid
    kappa = 0.5 * (lo + hi)
    for _ in range(8):
        step = (g_of_kappa(kappa) - rho) / _g_prime(kappa)
        kappa -= step
        if abs(step) < tol * max(kappa, 1.0):
            break
    return float(kappa)


@dataclass(frozen=True)
class StefanSolution:
    """Explicit subcritical solution: density profile and sqrt-t front."""

    rho: float
    kappa: float

    @classmethod
    def solve(cls, rho: float) -> "StefanSolution":
        return cls(rho=float(rho), kappa=solve_kappa(rho))

    def front(self, t: float) -> float:
        return self.kappa * math.sqrt(t)

    def profile(self, t: float, xi) -> np.ndarray:
        """u(t, xi): zero on the aggregate side, rising to rho far ahead."""
        if t <= 0:
            raise ValueError("t must be > 0")
        xi = np.asarray(xi, dtype=float)
        erf1k = continuum_tail(1.0, self.kappa)
        vals = self.rho / erf1k * (erf1k - 0.5 * special.erfc(xi / math.sqrt(2.0 * t)))
        out = np.where(xi >= self.front(t), vals, 0.0)
        return float(out) if out.ndim == 0 else out

    def profile_table(self, t: float, n: int = 200, span: float = 6.0) -> np.ndarray:
        """Sampled (xi, u) rows from the front out to span diffusive lengths."""
        r = self.front(t)
        xs = np.linspace(r, r + span * math.sqrt(t), n)
        return np.column_stack((xs, self.profile(t, xs)))


def flux_identity_residual(sol: StefanSolution, t: float) -> float:
    """| integral of (rho - u(t,.)1_{xi>r}) over [0, inf) - kappa sqrt(t) |.

    The mass absorbed by the front equals its position; the residual is
    pure quadrature error.
    """
    if t <= 0:
        raise ValueError("t must be > 0")
    r = sol.front(t)
    erf1k = continuum_tail(1.0, sol.kappa)

    def integrand(xi):
        return sol.rho / erf1k * continuum_tail(t, xi)

    tail, err = integrate.quad(integrand, r, np.inf, limit=200)
    if err > 1e-8:
        raise RuntimeError(f"quadrature did not converge (err estimate {err:.2e})")
    return abs(sol.rho * r + tail - sol.kappa * math.sqrt(t))
