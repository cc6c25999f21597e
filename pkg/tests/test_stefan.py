import math

import numpy as np
import pytest

from frontlab import stefan
from frontlab.kernels import continuum_tail


def bisect_oracle(rho, iters=200):
    lo, hi = 0.0, 10.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if stefan.g_of_kappa(mid) < rho:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class TestKappaSolver:
    def test_defining_equation_round_trip(self):
        for rho in np.arange(0.1, 0.95, 0.1):
            kappa = stefan.solve_kappa(float(rho))
            assert abs(stefan.g_of_kappa(kappa) - rho) <= 1e-10

    def test_against_bisection_oracle(self):
        assert abs(stefan.solve_kappa(0.5) - bisect_oracle(0.5)) < 1e-8

    def test_half_density_value(self):
        assert abs(stefan.solve_kappa(0.5) - 0.612) < 5e-3

    def test_monotone_in_rho(self):
        k = [stefan.solve_kappa(r) for r in (0.1, 0.5, 0.9)]
        assert k[0] < k[1] < k[2]

    def test_rejects_supercritical(self):
        for rho in (1.0, 1.5, 0.0, -0.2):
            with pytest.raises(ValueError):
                stefan.solve_kappa(rho)

    def test_g_stable_for_large_kappa(self):
        assert 0.999 < stefan.g_of_kappa(60.0) < 1.0


class TestSolution:
    def test_zero_on_the_front(self):
        sol = stefan.StefanSolution.solve(0.5)
        for t in (0.5, 1.0, 4.0):
            assert abs(sol.profile(t, sol.front(t))) < 1e-14

    def test_profile_below_density(self):
        sol = stefan.StefanSolution.solve(0.7)
        xs = np.linspace(sol.front(1.0), sol.front(1.0) + 10, 50)
        u = sol.profile(1.0, xs)
        assert np.all(u <= 0.7)          # strict inequality saturates in floats
        assert np.all(u[:20] < 0.7)      # resolvable near the front
        assert np.all(np.diff(u) >= 0)

    def test_flux_identity(self):
        sol = stefan.StefanSolution.solve(0.5)
        residuals = [stefan.flux_identity_residual(sol, t) for t in (0.5, 1.0, 4.0)]
        assert max(residuals) <= 1e-6
        # residual tracks quadrature error, not t
        assert max(residuals) < 100 * (min(residuals) + 1e-12)

    def test_heat_equation_residual(self):
        # centered differences: |u_t - u_xx / 2| = O(h^2) in the interior
        sol = stefan.StefanSolution.solve(0.5)
        t, h = 1.0, 1e-3
        for xi in sol.front(t) + np.array([0.5, 1.0, 2.0]):
            ut = (sol.profile(t + h, xi) - sol.profile(t - h, xi)) / (2 * h)
            uxx = (sol.profile(t, xi + h) - 2 * sol.profile(t, xi)
                   + sol.profile(t, xi - h)) / h**2
            assert abs(ut - 0.5 * uxx) < 1e-5

    def test_stefan_velocity(self):
        # dr/dt = (1/2) d_xi u at the front
        sol = stefan.StefanSolution.solve(0.5)
        t, h = 2.0, 1e-6
        drdt = sol.kappa / (2 * math.sqrt(t))
        r = sol.front(t)
        slope = (sol.profile(t, r + h) - sol.profile(t, r)) / h
        assert abs(drdt - 0.5 * slope) < 1e-4

    def test_profile_table_shape(self):
        sol = stefan.StefanSolution.solve(0.3)
        tab = sol.profile_table(2.0, n=50)
        assert tab.shape == (50, 2)
        assert tab[0, 1] < 1e-12
