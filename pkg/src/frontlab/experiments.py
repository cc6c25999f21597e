"""Ensemble orchestration and quantitative desk-scale experiments.

Ensembles draw an independent initial condition per run, then simulate with
a window-doubling retry: a run that exits its window (a giant critical
jump, or a genuine blow-up at supercritical density) is rerun on the same
initial-condition stream extended to twice the window.  Supercritical
studies interpret the exit as the explosion result instead.  All results
are reproducible from (config, master seed) and independent of worker
count: merging is by run index.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from . import initcond, kernels, simulate
from .simulate import TrajectorySpec, derive_seed
from .stepfn import StepFunction

__all__ = [
    "RegimeSpec",
    "EnsembleConfig",
    "EnsembleResult",
    "run_ensemble",
    "exponent_fit",
    "phase_report",
    "limit_distribution_test",
    "boundary_layer_experiment",
    "ansatz_check",
    "worker_count",
]


def worker_count() -> int:
    env = os.environ.get("FRONTLAB_THREADS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


# -- regimes ------------------------------------------------------------------


@dataclass(frozen=True)
class RegimeSpec:
    """Membership predicates for the admissible parameter regions.

    ``a`` is the slack exponent, ``gamma`` the shape exponent of the
    initial condition, ``gamma_prime`` the truncation-depth exponent.
    """

    eps: float
    a: float
    gamma: float
    gamma_prime: float

    def in_bulk_region(self, t: float, x: int) -> bool:
        """(t, x) in the super-diffusive bulk window."""
        e = self.eps
        return (0 <= t <= e ** (-1 - self.gamma - self.a)
                and 0 <= x <= e ** (-1 - self.a)
                and (t == 0 or x / math.sqrt(t) >= e ** (-self.a)))

    def sigma_failures(self, t0: float, x0: int, v: float) -> list:
        """Why (t0, x0, v) is not an admissible trajectory point (empty if it is)."""
        e = self.eps
        bad = []
        if not (1.0 <= t0 <= e ** (-1 - self.gamma - self.a)):
            bad.append("t0 outside [1, eps^-(1+gamma+a)]")
        if not (e ** (-self.gamma_prime - self.a) <= x0 <= e ** (-1 - self.a)):
            bad.append("x0 outside [eps^-(gamma'+a), eps^-(1+a)]")
        if not (e ** (self.gamma + self.a) <= v <= e ** (self.gamma - self.a)):
            bad.append("v outside [eps^(gamma+a), eps^(gamma-a)]")
        if not (v * math.sqrt(t0) >= e ** (-self.a)):
            bad.append("v sqrt(t0) < eps^-a (not super-diffusive)")
        return bad

    def in_sigma(self, t0: float, x0: int, v: float) -> bool:
        return not self.sigma_failures(t0, x0, v)

    def in_sigma_tilde(self, t0: float, x0: int, v: float) -> bool:
        e = self.eps
        return (0 <= t0 <= e ** (-1 - self.gamma - self.a)
                and 0 <= x0 <= e ** (-1 - self.a)
                and e ** (self.gamma + self.a) <= v <= e ** self.a)


# -- ensembles ----------------------------------------------------------------


@dataclass(frozen=True)
class EnsembleConfig:
    """Reproducible specification of one ensemble."""

    n_runs: int
    horizon: float
    window: int
    master_seed: int
    mode: str = "frictionless"          # frictionless | mdla | pushed
    ic_kind: str = "iid"                # iid | sine
    family: str = "geometric"
    mean: float = 1.0
    eps: float = 0.0                    # sine parameters
    gamma: float = 0.0
    checkpoints: tuple = ()
    max_resizes: int = 6
    snapshots: str = "light"
    stop_on_explosion: bool = False     # supercritical studies keep the exit

    def trajectory(self) -> TrajectorySpec:
        if self.mode == "frictionless":
            return TrajectorySpec.frictionless()
        if self.mode == "mdla":
            return TrajectorySpec.mdla()
        if self.mode == "pushed":
            return TrajectorySpec.pushed()
        raise ValueError(f"unknown mode {self.mode!r}")

    def initial_condition(self, run: int, window: int) -> initcond.InitialCondition:
        if self.ic_kind == "iid":
            return initcond.generate_iid(self.family, self.mean, window,
                                         seed=derive_seed(self.master_seed, run, 0))
        if self.ic_kind == "sine":
            return initcond.generate_sine(self.eps, self.gamma, window)
        raise ValueError(f"unknown ic_kind {self.ic_kind!r}")


@dataclass
class EnsembleResult:
    config: EnsembleConfig
    checkpoints: np.ndarray
    fronts: np.ndarray           # (runs, checkpoints), -1 where not reached
    absorbed: np.ndarray
    final_front: np.ndarray
    exploded: np.ndarray         # bool
    explosion_time: np.ndarray   # nan where finite
    resizes: np.ndarray
    snapshots: list              # per run: list of DecompositionSnapshot

    def clean_runs(self) -> np.ndarray:
        return ~self.exploded


def _single_run(cfg: EnsembleConfig, run: int):
    window = cfg.window
    for attempt in range(cfg.max_resizes + 1):
        ic = cfg.initial_condition(run, window)
        res = simulate.run(
            ic, cfg.trajectory(), cfg.horizon,
            derive_seed(cfg.master_seed, run, 1, attempt),
            checkpoints=cfg.checkpoints, snapshots=cfg.snapshots,
            warn_window=False)
        if not res.exploded or cfg.stop_on_explosion:
            return res, attempt
        window *= 2
    return res, cfg.max_resizes


def run_ensemble(cfg: EnsembleConfig) -> EnsembleResult:
    cps = np.asarray(cfg.checkpoints, dtype=float)
    k = len(cps)
    n = cfg.n_runs
    fronts = np.full((n, k), -1, dtype=np.int64)
    absorbed = np.full((n, k), -1, dtype=np.int64)
    final_front = np.zeros(n, dtype=np.int64)
    exploded = np.zeros(n, dtype=bool)
    explosion_time = np.full(n, np.nan)
    resizes = np.zeros(n, dtype=np.int64)
    all_snaps = [None] * n

    def do(run):
        return run, _single_run(cfg, run)

    workers = worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(do, range(n)))
    else:
        outputs = [do(run) for run in range(n)]

    for run, (res, attempts) in sorted(outputs):
        resizes[run] = attempts
        final_front[run] = res.final_front
        exploded[run] = res.exploded
        if res.exploded:
            explosion_time[run] = res.explosion_time
        for j, s in enumerate(res.snapshots):
            fronts[run, j] = s.boundary
            absorbed[run, j] = s.absorbed
        all_snaps[run] = res.snapshots

    return EnsembleResult(config=cfg, checkpoints=cps, fronts=fronts,
                          absorbed=absorbed, final_front=final_front,
                          exploded=exploded, explosion_time=explosion_time,
                          resizes=resizes, snapshots=all_snaps)


# -- exponent fit -------------------------------------------------------------


@dataclass(frozen=True)
class ExponentFit:
    alpha: float
    ci_low: float
    ci_high: float
    medians: np.ndarray
    times: np.ndarray
    n_runs: int


def exponent_fit(result: EnsembleResult, bootstrap: int = 400,
                 seed: int = 0) -> ExponentFit:
    """Slope of log median front against log time, with a bootstrap CI.

    Medians rather than means: the critical front law is jump-skewed, and
    runs that outgrew every window retry enter as right-censored (+inf)
    values, which leaves medians exact while the censored fraction stays
    below one half.
    """
    ts = result.checkpoints
    if len(ts) < 3 or ts[-1] / ts[0] < 99.0:
        raise ValueError("need checkpoints spanning at least two decades")
    fronts = np.where(result.fronts < 0, np.inf, result.fronts.astype(float))
    if fronts.shape[0] < 100:
        raise ValueError("need at least 100 runs")
    censored = np.isinf(fronts).mean()
    if censored > 0.2:
        raise ValueError(f"{censored:.0%} of checkpoints censored; widen the window")

    def slope(rows):
        med = np.median(rows, axis=0)
        med = np.maximum(med, 1.0)
        return np.polyfit(np.log(ts), np.log(med), 1)[0], med

    alpha, med = slope(fronts)
    rng = np.random.default_rng(np.random.SeedSequence([0xE0, seed]))
    boots = np.empty(bootstrap)
    for b in range(bootstrap):
        idx = rng.integers(0, fronts.shape[0], size=fronts.shape[0])
        boots[b] = slope(fronts[idx])[0]
    lo, hi = np.quantile(boots, [0.025, 0.975])
    return ExponentFit(alpha=float(alpha), ci_low=float(lo), ci_high=float(hi),
                       medians=med, times=ts, n_runs=int(fronts.shape[0]))


# -- phase report -------------------------------------------------------------


@dataclass(frozen=True)
class PhaseReport:
    rho: float
    kind: str                       # subcritical | supercritical | critical
    detail: dict


def phase_report(rho: float, result: EnsembleResult,
                 eps: Optional[float] = None) -> PhaseReport:
    """Summarize which phase an ensemble realizes.

    Below density one, compares the diffusively rescaled front against the
    continuum square-root trajectory; above one, reports the explosion-time
    distribution; at one, the growth of r(T)/sqrt(T).
    """
    if rho < 1.0:
        from .stefan import solve_kappa
        if eps is None:
            raise ValueError("subcritical report needs the scaling eps")
        kappa = solve_kappa(rho)
        ok = result.clean_runs()
        devs = {}
        for j, t in enumerate(result.checkpoints):
            scaled = eps * result.fronts[ok, j]
            target = kappa * math.sqrt(eps * eps * t)
            devs[float(t)] = {
                "median_abs_dev": float(np.median(np.abs(scaled - target))),
                "target": target,
                "n": int(ok.sum()),
            }
        return PhaseReport(rho=rho, kind="subcritical",
                           detail={"kappa": kappa, "deviations": devs})
    if rho > 1.0:
        times = result.explosion_time[result.exploded]
        return PhaseReport(rho=rho, kind="supercritical", detail={
            "n_runs": int(len(result.exploded)),
            "n_exploded": int(result.exploded.sum()),
            "fraction": float(result.exploded.mean()),
            "times": times,
            "median_time": float(np.median(times)) if len(times) else math.nan,
        })
    ok = result.clean_runs()
    ratio = {float(t): float(np.median(result.fronts[ok, j] / math.sqrt(t)))
             for j, t in enumerate(result.checkpoints)}
    return PhaseReport(rho=rho, kind="critical",
                       detail={"front_over_sqrt_t": ratio, "n": int(ok.sum())})


# -- distribution comparison --------------------------------------------------


@dataclass(frozen=True)
class DistributionTest:
    ks_statistic: float
    n_front: int
    n_limit: int


def limit_distribution_test(front_values: np.ndarray, horizon: float,
                            limit_samples: np.ndarray) -> DistributionTest:
    """Two-sample KS between T^(-2/3) r(T) and the sampled limit law."""
    front_values = np.asarray(front_values, dtype=float)
    limit_samples = np.asarray(limit_samples, dtype=float)
    if len(front_values) < 300 or len(limit_samples) < 300:
        raise ValueError("need at least 300 samples on each side")
    rescaled = front_values / horizon ** (2.0 / 3.0)
    ks = stats.ks_2samp(rescaled, limit_samples)
    return DistributionTest(ks_statistic=float(ks.statistic),
                            n_front=len(front_values),
                            n_limit=len(limit_samples))


# -- boundary layer -----------------------------------------------------------


@dataclass(frozen=True)
class BoundaryLayerReport:
    t0: float
    x0: int
    v: float
    mean_upper: float
    se_upper: float
    mean_lower: float
    se_lower: float
    target: float                 # 1 / (2 v)
    pathwise_ordered: bool        # G_upper >= G_lower on every run
    plain_mean: Optional[float]
    plain_bound_multiple: Optional[float]   # v * mean(G_plain)
    n_runs: int


def boundary_layer_experiment(family: str, mean: float, t0: float, x0: int,
                              v: float, runs: int, regime: RegimeSpec,
                              master_seed: int, window: Optional[int] = None,
                              include_plain: bool = False) -> BoundaryLayerReport:
    """Ensemble mean of the layer behind truncated ramps vs 1/(2v).

    The two truncated trajectories ride the same particle cloud in each
    run, so their layer sizes compare pathwise.  Refuses parameter points
    outside the admissible region, naming the failed predicate.
    """
    bad = regime.sigma_failures(t0, x0, v)
    if bad:
        raise ValueError("parameter point rejected: " + "; ".join(bad))
    if include_plain and not regime.in_sigma_tilde(t0, x0, v):
        raise ValueError("parameter point rejected for the plain ramp: "
                         "outside the wide admissible region")
    if window is None:
        window = initcond.suggest_window(t0, float(x0), density=mean)
    up = TrajectorySpec.truncated_upper(t0, x0, v, regime.gamma_prime, regime.eps)
    lo = TrajectorySpec.truncated_lower(t0, x0, v, regime.gamma_prime, regime.eps)
    g_up = np.empty(runs)
    g_lo = np.empty(runs)
    g_plain = np.empty(runs) if include_plain else None
    ordered = True
    for run in range(runs):
        ic = initcond.generate_iid(family, mean, window,
                                   seed=derive_seed(master_seed, run, 0))
        cp = simulate.run_coupled(ic, [up, lo], t0,
                                  derive_seed(master_seed, run, 1),
                                  checkpoints=[t0], snapshots="full",
                                  warn_window=False)
        g_up[run] = cp[0].snapshots[-1].boundary_layer
        g_lo[run] = cp[1].snapshots[-1].boundary_layer
        if g_up[run] < g_lo[run]:
            ordered = False
        if include_plain:
            plain = TrajectorySpec.linear(t0, x0, v)
            res = simulate.run(ic, plain, t0, derive_seed(master_seed, run, 2),
                               checkpoints=[t0], snapshots="full",
                               warn_window=False)
            g_plain[run] = res.snapshots[-1].boundary_layer
    return BoundaryLayerReport(
        t0=t0, x0=x0, v=v,
        mean_upper=float(g_up.mean()), se_upper=float(g_up.std(ddof=1) / math.sqrt(runs)),
        mean_lower=float(g_lo.mean()), se_lower=float(g_lo.std(ddof=1) / math.sqrt(runs)),
        target=1.0 / (2.0 * v), pathwise_ordered=ordered,
        plain_mean=float(g_plain.mean()) if include_plain else None,
        plain_bound_multiple=float(v * g_plain.mean()) if include_plain else None,
        n_runs=runs)


# -- heuristic ansatz ---------------------------------------------------------


@dataclass(frozen=True)
class AnsatzReport:
    slope: float                    # target 1
    n_increments: int
    noise_mean: float               # mean inflow toward the bulk at (t, x)
    noise_target: float             # centering V(t)
    noise_se: float
    count_mean: float               # mean cumulative count left of x
    count_target: float             # kernel prediction
    count_se: float


def ansatz_check(ic_builder, horizon: float, runs: int, master_seed: int,
                 probe_t: float, probe_x: int,
                 n_windows: int = 4) -> AnsatzReport:
    """Regress elapsed time against the deficiency-velocity ansatz on
    mesoscopic windows, and verify the noise-term centering against the
    kernel prediction.

    Aggregation over windows matters: a single trigger can advance the
    front several sites at once, so event-level pairs are anti-correlated
    with the per-site ansatz; over windows the dispersion averages out.
    Windows touching nonpositive deficiency are dropped.
    """
    xs_all, dts_all = [], []
    m_minus = np.empty(runs)
    counts = np.empty(runs)
    rho = None
    const_q = TrajectorySpec.custom(
        StepFunction(np.array([0.0]), np.array([float(probe_x)])))
    win_len = horizon / n_windows
    for run in range(runs):
        ic = ic_builder(run)
        rho = ic.descriptor.get("mean", ic.mean_density())
        res = simulate.run(ic, TrajectorySpec.frictionless(), horizon,
                           snapshots="light", seed=derive_seed(master_seed, run, 1),
                           warn_window=False)
        bp, vals = res.front.breakpoints, res.front.values
        fl = ic.fluctuation
        acc_x, acc_t, w_end, good = 0.0, 0.0, win_len, True
        for j in range(1, len(bp)):
            if not math.isfinite(vals[j]):
                break
            if bp[j] > w_end:
                if good and acc_x > 0:
                    xs_all.append(acc_x)
                    dts_all.append(acc_t)
                acc_x, acc_t, good = 0.0, 0.0, True
                w_end = (math.floor(bp[j] / win_len) + 1.0) * win_len
            r_prev = int(vals[j - 1])
            f = fl[r_prev] if r_prev <= ic.window else fl[-1]
            if f <= 0:
                good = False
            acc_x += 2.0 * max(f, 0) * (vals[j] - vals[j - 1])
            acc_t += bp[j] - bp[j - 1]
        # the final accumulator never saw its closing event: drop it, the
        # stretch from the last move to the horizon is unresolved waiting
        probe = simulate.run(ic, const_q, probe_t,
                             derive_seed(master_seed, run, 2),
                             checkpoints=[probe_t], snapshots="full",
                             warn_window=False)
        s = probe.snapshots[-1]
        m_minus[run] = s.noise_minus
        # cumulative count left of x in the free cloud
        counts[run] = s.noise + (probe_x - s.fluctuation)
    xs = np.asarray(xs_all)
    dts = np.asarray(dts_all)
    slope = float((xs * dts).sum() / (xs * xs).sum()) if len(xs) else math.nan
    v_target = kernels.centering(probe_t)
    tail = sum(kernels.tail_distribution(probe_t, y + 1)
               for y in range(probe_x, probe_x + 10 * int(math.sqrt(probe_t) + 1)))
    count_target = rho * probe_x + rho * tail
    return AnsatzReport(
        slope=slope, n_increments=len(xs),
        noise_mean=float(m_minus.mean()), noise_target=float(v_target),
        noise_se=float(m_minus.std(ddof=1) / math.sqrt(runs)),
        count_mean=float(counts.mean()), count_target=float(count_target),
        count_se=float(counts.std(ddof=1) / math.sqrt(runs)))
