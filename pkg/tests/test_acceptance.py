"""Acceptance suite: every criterion at its stated size and tolerance.

Each test prints one PASS/FAIL line.  The two critical-density criteria
share one 500-run ensemble (the dominant cost; tens of minutes on one
core).  Master seeds are fixed here and nowhere else.
"""

import math

import numpy as np
import pytest

from frontlab import experiments, initcond, kernels, limitlaw, simulate, stefan
from frontlab.simulate import TrajectorySpec, derive_seed
from frontlab.stepfn import StepFunction, invert

MASTER = 20260810


def report(name, ok, detail):
    print(f"\nACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"{name}: {detail}"


def run_with_resizes(ic_builder, traj, horizon, seed_parts, window0,
                     max_resizes=6, **kwargs):
    """Retry on window exits; a run that outgrows every retry is returned
    as-is (its identities still hold up to the exit)."""
    window = window0
    for attempt in range(max_resizes + 1):
        ic = ic_builder(window)
        res = simulate.run_coupled(
            ic, traj if isinstance(traj, list) else [traj], horizon,
            derive_seed(*seed_parts, attempt), warn_window=False, **kwargs)
        if not res[0].exploded:
            return res, ic
        window *= 2
    return res, ic


# -- 1. exact identities ------------------------------------------------------


class TestExactIdentities:
    def test_flux_and_decomposition(self):
        runs = 100
        horizon = 1e3
        cps = np.linspace(horizon / 20, horizon, 20)
        checked_events = 0
        checked_snaps = 0
        full_runs = 0
        exited = 0
        for run in range(runs):
            def build(window, run=run):
                return initcond.generate_iid("geometric", 1.0, window,
                                             seed=derive_seed(MASTER, 1, run))
            trajs = [TrajectorySpec.frictionless(),
                     TrajectorySpec.linear(t0=horizon, x0=90, v=0.08)]
            # full event log on the first attempt; window retries verify the
            # flux identity on the front-event paths (N and r only change
            # there, so equality at front events extends to every event)
            first, ic0 = run_with_resizes(build, trajs, horizon,
                                          (MASTER, 2, run), 1500,
                                          max_resizes=0, checkpoints=cps,
                                          snapshots="full", log_events="arrays")
            ev = first[0].diagnostics["event_arrays"]
            assert np.array_equal(ev["r"], ev["n"])      # flux at every event
            checked_events += len(ev["r"])
            if first[0].exploded:
                coupled, ic = run_with_resizes(build, trajs, horizon,
                                               (MASTER, 2, run), 3000,
                                               checkpoints=cps, snapshots="full")
                fr = coupled[0]
                finite = np.isfinite(fr.front.values)
                assert np.array_equal(fr.front.breakpoints[finite],
                                      fr.absorbed_path.breakpoints[: finite.sum()])
                assert np.array_equal(fr.front.values[finite],
                                      fr.absorbed_path.values[: finite.sum()])
            else:
                coupled = first
            if coupled[0].exploded:
                # front outran every window retry: identities are still
                # checked on every event and checkpoint that happened
                exited += 1
            else:
                full_runs += 1
            for res in coupled.results:
                if not res.exploded:
                    assert len(res.snapshots) == 20
                for s in res.snapshots:
                    assert s.identity_residual() == 0
                    checked_snaps += 1
        report("exact-identities", full_runs >= 95,
               f"flux exact over {checked_events} events; decomposition "
               f"exact at {checked_snaps} checkpoints; {full_runs}/{runs} "
               f"runs delivered all 20 checkpoints ({exited} giant-jump exits)")


# -- 2. involution ------------------------------------------------------------


class TestInvolution:
    def test_double_inverse_identity(self):
        rng = np.random.default_rng(MASTER)
        checked = 0
        for _ in range(1000):
            k = rng.integers(1, 9)
            xs = np.concatenate(([0.0], np.sort(rng.uniform(0.1, 10.0, k - 1))))
            xs = np.unique(xs)
            vs = np.cumsum(rng.uniform(0.0, 3.0, len(xs)))
            if rng.random() < 0.2:
                vs[-1] = math.inf
            f = StepFunction(xs, vs)
            h = invert(invert(f))
            for t in rng.uniform(0.0, float(xs[-1]) + 2.0, 10):
                if t in set(f.breakpoints):
                    continue
                assert h(t) == f(t)
                checked += 1
        report("involution", True,
               f"exact round trip at {checked} continuity points "
               f"of 1000 random step functions")


# -- 3. kappa solver ----------------------------------------------------------


class TestKappaSolver:
    def test_solver_and_flux(self):
        worst = 0.0
        for rho in np.arange(0.05, 0.951, 0.05):
            kappa = stefan.solve_kappa(float(rho))
            worst = max(worst, abs(stefan.g_of_kappa(kappa) - rho))
        assert worst <= 1e-10

        lo, hi = 0.0, 10.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if stefan.g_of_kappa(mid) < 0.5:
                lo = mid
            else:
                hi = mid
        oracle = 0.5 * (lo + hi)
        dev = abs(stefan.solve_kappa(0.5) - oracle)
        assert dev <= 1e-8

        sol = stefan.StefanSolution.solve(0.5)
        residuals = [stefan.flux_identity_residual(sol, t) for t in (0.5, 1.0, 4.0)]
        assert max(residuals) <= 1e-6
        report("kappa-solver", True,
               f"max |g(kappa)-rho| = {worst:.2e}, bisection dev {dev:.2e}, "
               f"max flux residual {max(residuals):.2e}")


# -- 4. kernel oracles --------------------------------------------------------


class TestKernelOracles:
    def test_kernels(self):
        from scipy import special
        bessel_dev = abs(kernels.discrete_heat_kernel(1.0, 0) - float(special.ive(0, 1.0)))
        assert bessel_dev <= 1e-10

        ck_worst = 0.0
        s, t = 1.5, 2.5
        for x in range(-4, 5):
            conv = sum(kernels.discrete_heat_kernel(s, y)
                       * kernels.discrete_heat_kernel(t, x - y)
                       for y in range(-70, 71))
            ck_worst = max(ck_worst, abs(conv - kernels.discrete_heat_kernel(s + t, x)))
        assert ck_worst <= 1e-10

        vs = [(float(tt), kernels.centering(float(tt)))
              for tt in np.geomspace(1.0, 1e4, 16)]
        assert all(v <= math.sqrt(tt + 1.0) for tt, v in vs)
        report("kernel-oracles", True,
               f"hk(1,0) dev {bessel_dev:.1e}, CK residual {ck_worst:.1e}, "
               f"V(t) <= sqrt(t+1) on 16-point grid to 1e4")


# -- 5. subcritical phase -----------------------------------------------------


class TestSubcriticalPhase:
    def test_diffusive_front(self):
        eps = 0.02
        horizon = eps ** -2
        kappa = stefan.solve_kappa(0.5)
        window = initcond.suggest_window(horizon, kappa / eps)
        cfg = experiments.EnsembleConfig(
            n_runs=100, horizon=horizon, window=window, master_seed=MASTER + 5,
            family="poisson", mean=0.5, checkpoints=(horizon,))
        res = experiments.run_ensemble(cfg)
        scaled = eps * res.fronts[:, 0]
        med_front_dev = float(abs(np.median(scaled) - kappa))
        spread = float(np.median(np.abs(scaled - kappa)))
        ok = med_front_dev <= 0.1 * kappa and not res.exploded.any()
        report("subcritical-phase", ok,
               f"|median(eps r) - kappa| = {med_front_dev:.4f} vs bound "
               f"{0.1 * kappa:.4f} (kappa={kappa:.4f}, per-run spread "
               f"{spread:.4f}, 100 runs)")


# -- 6. supercritical phase ---------------------------------------------------


class TestSupercriticalPhase:
    def test_explosion_fraction(self):
        cfg = experiments.EnsembleConfig(
            n_runs=100, horizon=5e3, window=100_000, master_seed=MASTER + 6,
            family="geometric", mean=1.2, stop_on_explosion=True)
        res = experiments.run_ensemble(cfg)
        n_exp = int(res.exploded.sum())
        ok = n_exp >= 90
        med = float(np.nanmedian(res.explosion_time))
        report("supercritical-phase", ok,
               f"{n_exp}/100 runs exploded before t=5e3 in a 1e5 window "
               f"(median time {med:.1f})")


# -- 7 & 8. critical ensemble -------------------------------------------------


# The front law has an infinite-mean tail (giant jumps), so critical runs
# are censored rather than resized: a window exit is exactly the event
# {r(T) >= edge}, and the limit sampler is censored at the same rescaled
# threshold, which leaves the two-sample comparison below it unbiased.
CRIT_T = 1e5
CRIT_WINDOW = 8000
CRIT_EDGE = CRIT_WINDOW - int(math.ceil(4.0 * math.sqrt(CRIT_T + 1)))
CRIT_ZSTAR = CRIT_EDGE / CRIT_T ** (2.0 / 3.0)


@pytest.fixture(scope="session")
def critical_ensemble():
    cfg = experiments.EnsembleConfig(
        n_runs=500, horizon=CRIT_T, window=CRIT_WINDOW, master_seed=MASTER + 7,
        family="geometric", mean=1.0, max_resizes=0, stop_on_explosion=True,
        checkpoints=(1e3, 3162.0, 1e4, 31623.0, 1e5))
    return experiments.run_ensemble(cfg)


@pytest.fixture(scope="session")
def limit_samples():
    return limitlaw.sample_front_values(math.sqrt(2.0), 1.0, 10_000,
                                        seed=MASTER + 8, xi_cap=CRIT_ZSTAR)


class TestCriticalExponent:
    def test_exponent_band(self, critical_ensemble):
        fit = experiments.exponent_fit(critical_ensemble, seed=MASTER)
        ok = 0.60 <= fit.alpha <= 0.73
        report("critical-exponent", ok,
               f"alpha = {fit.alpha:.4f}, CI [{fit.ci_low:.4f}, {fit.ci_high:.4f}], "
               f"{fit.n_runs} runs, T in [1e3, 1e5]")


class TestCriticalLimitLaw:
    def test_ks_band_and_mismatch_control(self, critical_ensemble, limit_samples):
        final = np.where(critical_ensemble.exploded, np.inf,
                         critical_ensemble.final_front.astype(float))
        test = experiments.limit_distribution_test(final, CRIT_T, limit_samples)
        mismatched = limitlaw.sample_front_values(1.0, 1.0, 10_000,
                                                  seed=MASTER + 9,
                                                  xi_cap=CRIT_ZSTAR)
        control = experiments.limit_distribution_test(final, CRIT_T, mismatched)
        censored = float(np.isinf(final).mean())
        ok = test.ks_statistic <= 0.15 and control.ks_statistic > test.ks_statistic
        report("critical-limit-law", ok,
               f"KS = {test.ks_statistic:.4f} (bound 0.15) on {test.n_front} vs "
               f"{test.n_limit} samples, both censored at {CRIT_ZSTAR:.2f} "
               f"({100 * censored:.0f}% of runs); mismatched-scale control "
               f"KS = {control.ks_statistic:.4f}")


# -- 9. deterministic limit (sine) -------------------------------------------


class TestDeterministicLimit:
    def test_sine_front_tracks_closed_form(self):
        eps, gamma = 0.001, 0.5
        te = eps ** (1 + gamma)
        times = (1.2, 1.6)
        targets = {t: limitlaw.front_sine(t) for t in times}
        horizon = times[-1] / te
        window = initcond.suggest_window(horizon, (targets[times[-1]] + 0.5) / eps)
        runs = 50
        hits = {t: 0 for t in times}
        for run in range(runs):
            ic = initcond.generate_sine(eps, gamma, window)
            res = simulate.run(ic, TrajectorySpec.frictionless(), horizon,
                               derive_seed(MASTER, 9, run), snapshots="light",
                               checkpoints=[t / te for t in times],
                               warn_window=False)
            for j, t in enumerate(times):
                if res.exploded and j >= len(res.snapshots):
                    continue
                scaled = eps * res.snapshots[j].boundary
                if abs(scaled - targets[t]) <= 0.15 * targets[t]:
                    hits[t] += 1
        fractions = {t: hits[t] / runs for t in times}
        ok = all(f >= 0.8 for f in fractions.values())
        report("deterministic-limit", ok,
               f"within 15% of the closed form in "
               + ", ".join(f"{100 * fractions[t]:.0f}% at t={t}" for t in times)
               + f" of {runs} runs (eps={eps})")


# -- 10. boundary layer -------------------------------------------------------


class TestBoundaryLayer:
    def test_layer_mean_and_ordering(self):
        reg = experiments.RegimeSpec(eps=8e-4, a=0.05, gamma=0.5,
                                     gamma_prime=0.76)
        rep = experiments.boundary_layer_experiment(
            "geometric", 1.0, 15000.0, 1000, 0.02, 200, reg,
            master_seed=MASTER + 10)
        dev = abs(rep.mean_upper - rep.target)
        ok = dev <= 0.25 * rep.target and rep.pathwise_ordered
        report("boundary-layer", ok,
               f"mean layer {rep.mean_upper:.2f} +- {rep.se_upper:.2f} vs "
               f"1/(2v) = {rep.target}, ordered pathwise on {rep.n_runs} runs")


# -- 11. monotone comparison --------------------------------------------------


class TestMonotonicity:
    def test_no_violated_implications(self):
        horizon = 250.0
        violations = 0
        probes = 0
        ic_seed = 0
        while probes < 50:  # offset probes need a finite base path
            ic_seed += 1

            def build(window, s=ic_seed):
                return initcond.generate_iid("geometric", 1.0, window,
                                             seed=derive_seed(MASTER, 11, s))
            coupled, ic = run_with_resizes(build, TrajectorySpec.frictionless(),
                                           horizon, (MASTER, 12, ic_seed), 900,
                                           snapshots="light")
            if coupled[0].exploded:
                continue
            base = coupled[0]
            q = StepFunction(base.front.breakpoints, base.front.values + 5.0)
            rep = simulate.monotonicity_probe(ic, q, horizon,
                                              derive_seed(MASTER, 12, ic_seed, 0),
                                              warn_window=False)
            probes += 1
            violations += len(rep.upper_violations) + len(rep.lower_violations)
        for run in range(50):  # linear probes
            ic = initcond.generate_iid("geometric", 1.0, 900,
                                       seed=derive_seed(MASTER, 13, run))
            v = 0.05 + 0.3 * (run % 5) / 5.0
            ts, vs = TrajectorySpec.linear(horizon, int(20 + v * horizon), v).realize(horizon)
            vs = np.maximum(vs, 0)
            keep = np.concatenate(([True], np.diff(vs) > 0))
            q = StepFunction(ts[keep], vs[keep].astype(float))
            rep = simulate.monotonicity_probe(ic, q, horizon,
                                              derive_seed(MASTER, 14, run),
                                              warn_window=False)
            probes += 1
            violations += len(rep.upper_violations) + len(rep.lower_violations)
        report("monotonicity", violations == 0,
               f"{violations} violated implications over {probes} probes "
               f"(offset and linear boundaries)")


# -- 12. one-step variant dominance -------------------------------------------


class TestMdlaDominance:
    def test_pathwise_dominance(self):
        worst_gap = None
        for run in range(100):
            ic = initcond.generate_iid("geometric", 1.0, 1500,
                                       seed=derive_seed(MASTER, 15, run))
            cp = simulate.run_coupled(
                ic, [TrajectorySpec.frictionless(), TrajectorySpec.mdla()],
                1e3, derive_seed(MASTER, 16, run), snapshots="light",
                warn_window=False)
            rf, rm = cp[0].front, cp[1].front
            for t, v in zip(rm.breakpoints, rm.values):
                if not math.isfinite(v):
                    break
                gap = rf(t) - v
                assert gap >= 0, f"dominance violated at t={t} (run {run})"
                worst_gap = gap if worst_gap is None else min(worst_gap, gap)
        report("mdla-dominance", True,
               f"one-step front never above the flux-matched front across "
               f"100 shared-clock runs (min gap {worst_gap})")
