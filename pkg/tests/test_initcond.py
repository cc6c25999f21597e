import math

import numpy as np
import pytest

from frontlab import initcond


class TestIidGeneration:
    def test_geometric_mean_and_variance(self):
        ic = initcond.generate_iid("geometric", 1.0, 10**6, seed=1)
        se = math.sqrt(2.0) / 1000.0  # sigma/sqrt(n)
        assert abs(ic.mean_density() - 1.0) <= 3 * se
        assert ic.descriptor["variance"] == 2.0

    def test_poisson_nonnegative_and_descriptor(self):
        ic = initcond.generate_iid("poisson", 0.5, 10_000, seed=2)
        assert np.all(ic.counts >= 0)
        assert ic.descriptor["mean"] == 0.5

    def test_bernoulli_mixture_support(self):
        ic = initcond.generate_iid("bernoulli-mixture", 1.0, 50_000, seed=3)
        assert set(np.unique(ic.counts)) <= {0, 2}
        assert ic.descriptor["variance"] == 1.0
        assert abs(ic.mean_density() - 1.0) < 0.02

    def test_same_seed_identical(self):
        a = initcond.generate_iid("geometric", 1.0, 1000, seed=9)
        b = initcond.generate_iid("geometric", 1.0, 1000, seed=9)
        assert np.array_equal(a.counts, b.counts)

    def test_rejects_bad_mean(self):
        with pytest.raises(ValueError):
            initcond.generate_iid("poisson", -1.0, 10, seed=0)
        with pytest.raises(ValueError):
            initcond.generate_iid("bernoulli-mixture", 0.75, 10, seed=0)

    def test_standard_error_halves_with_quadrupled_window(self):
        # doubling the window shrinks the mean's standard error like 1/sqrt
        errs = []
        for window in (10_000, 40_000):
            devs = [abs(initcond.generate_iid("poisson", 1.0, window, seed=s).mean_density() - 1.0)
                    for s in range(40)]
            errs.append(np.sqrt(np.mean(np.square(devs))))
        assert errs[1] < errs[0] * 0.75


class TestSineGeneration:
    def test_fluctuation_matches_closed_form(self):
        for eps, gamma in [(0.1, 0.5), (0.05, 0.7), (0.9, 0.2)]:
            ic = initcond.generate_sine(eps, gamma, 500)
            x = np.arange(0, 501)
            want = np.floor(eps ** (-gamma) * np.sin(eps * x)).astype(np.int64)
            assert np.array_equal(ic.fluctuation, want - want[0])

    def test_value_at_15(self):
        # floor(10^0.5 * sin(1.5)) = floor(3.1623 * 0.99749) = 3
        ic = initcond.generate_sine(0.1, 0.5, 100)
        assert ic.fluctuation[15] == 3

    def test_counts_nonnegative(self):
        for eps in (0.9, 0.3, 0.01):
            ic = initcond.generate_sine(eps, 0.5, 2000)
            assert np.all(ic.counts >= 0)

    def test_rescaled_fluctuation_tracks_sine(self):
        eps, gamma = 0.02, 0.5
        ic = initcond.generate_sine(eps, gamma, 5000)
        xs = np.arange(1, 5001)
        err = np.abs(eps**gamma * ic.fluctuation[xs] - np.sin(eps * xs))
        assert err.max() <= eps**gamma + eps ** (1 - gamma)

    def test_telescoping_exact(self):
        ic = initcond.generate_sine(0.07, 0.4, 300)
        for x1, x2 in [(0, 10), (5, 200), (100, 300)]:
            assert ic.pair_fluctuation(x1, x2) == int((1 - ic.counts[x1:x2]).sum())


class TestShapeExponentCheck:
    def test_sine_matching_gamma_bounded(self):
        # integer rounding puts the floored profile a bounded constant above
        # the ideal envelope min(eps^{1-g} d, 2 eps^-g); assert that bound
        eps, gamma = 0.1, 0.5
        ic = initcond.generate_sine(eps, gamma, 1000)
        report = initcond.shape_exponent_check(ic, gamma, 100_000, seed=4)
        xs = np.arange(0, 1001)
        f = ic.fluctuation
        d = np.abs(xs[:, None] - xs[None, :])[np.triu_indices(1001, k=1)]
        df = np.abs(f[:, None] - f[None, :])[np.triu_indices(1001, k=1)]
        envelope = np.minimum(eps ** (1 - gamma) * d, 2 * eps ** (-gamma)) + 1.0
        assert np.all(df <= envelope)
        assert report.max_ratio <= float((envelope / d**gamma).max())

    def test_iid_tail_decays(self):
        ic = initcond.generate_iid("geometric", 1.0, 100_000, seed=5)
        report = initcond.shape_exponent_check(ic, 0.5, 100_000, seed=6)
        tail = report.survival_tail[report.r_grid > 3.0]
        assert np.all(np.diff(tail) <= 1e-12)  # nonincreasing beyond r=3
        assert tail[-1] <= tail[0]

    def test_excludes_equal_pairs(self):
        ic = initcond.generate_iid("poisson", 1.0, 100, seed=7)
        report = initcond.shape_exponent_check(ic, 0.5, 5000, seed=8)
        assert np.all(np.isfinite(report.survival_tail))
        assert ic.pair_fluctuation(37, 37) == 0


class TestWindowSuggestion:
    def test_monotone_in_horizon(self):
        w1 = initcond.suggest_window(100.0, 50.0)
        w2 = initcond.suggest_window(10_000.0, 50.0)
        assert w2 > w1 > 50

    def test_confidence_tightens_window(self):
        loose = initcond.suggest_window(1000.0, 0.0, delta=1e-1)
        tight = initcond.suggest_window(1000.0, 0.0, delta=1e-8)
        assert tight > loose


class TestSerialization:
    def test_csv_round_trip(self, tmp_path):
        ic = initcond.generate_iid("geometric", 1.0, 200, seed=11)
        p = tmp_path / "ic.csv"
        s = tmp_path / "ic.json"
        ic.to_csv(p, sidecar=str(s))
        back = initcond.InitialCondition.from_csv(p)
        assert np.array_equal(back.counts, ic.counts)
        assert np.array_equal(back.fluctuation, ic.fluctuation)
        import json
        meta = json.loads(s.read_text())
        assert meta["family"] == "geometric"
