"""Public simulation API: trajectories, runs, decomposition, probes.

A run owns one shared cloud of walkers and one or more observers (front
rules or prescribed boundaries) evaluated against it.  Coupled observers
see identical particle randomness, which is what makes the pathwise
comparisons (one-step variant below the flux-matched front, truncated
trajectories ordered by their shaded regions) exact statements rather
than statistical ones.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import engine
from .initcond import InitialCondition, suggest_window
from .stepfn import StepFunction, invert

__all__ = [
    "TrajectorySpec",
    "DecompositionSnapshot",
    "EventRecord",
    "SimulationResult",
    "CoupledResult",
    "ProbeReport",
    "WindowTooSmallWarning",
    "compute_k",
    "run",
    "run_coupled",
    "monotonicity_probe",
    "write_event_log",
    "derive_seed",
]

FRONT_KINDS = {"frictionless": engine.FRICTIONLESS,
               "mdla": engine.MDLA_SITE,
               "mdla-jumper": engine.MDLA_JUMPER}
PRESCRIBED_KINDS = ("linear", "truncated-upper", "truncated-lower", "custom")


class WindowTooSmallWarning(UserWarning):
    pass


def derive_seed(*parts: int) -> int:
    """Stable 64-bit stream seed from integer parts (master seed, run index...)."""
    ss = np.random.SeedSequence(list(parts))
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class TrajectorySpec:
    """A front rule or a deterministic boundary to absorb against."""

    kind: str
    t0: float = 0.0
    x0: int = 0
    v: float = 0.0
    eps: float = 0.0
    gamma_prime: float = 0.0
    path: Optional[StepFunction] = None

    # -- constructors --------------------------------------------------------

    @classmethod
    def frictionless(cls):
        return cls(kind="frictionless")

    @classmethod
    def mdla(cls, absorb: str = "site"):
        if absorb not in ("site", "jumper"):
            raise ValueError("absorb must be 'site' or 'jumper'")
        return cls(kind="mdla" if absorb == "site" else "mdla-jumper")

    @classmethod
    def pushed(cls):
        return cls(kind="pushed")

    @classmethod
    def linear(cls, t0: float, x0: int, v: float):
        if v <= 0:
            raise ValueError("v must be > 0")
        return cls(kind="linear", t0=float(t0), x0=int(x0), v=float(v))

    @classmethod
    def truncated_upper(cls, t0, x0, v, gamma_prime, eps):
        return cls(kind="truncated-upper", t0=float(t0), x0=int(x0), v=float(v),
                   eps=float(eps), gamma_prime=float(gamma_prime))

    @classmethod
    def truncated_lower(cls, t0, x0, v, gamma_prime, eps):
        return cls(kind="truncated-lower", t0=float(t0), x0=int(x0), v=float(v),
                   eps=float(eps), gamma_prime=float(gamma_prime))

    @classmethod
    def custom(cls, path: StepFunction):
        if np.any(path.values != np.floor(path.values)):
            raise ValueError("custom trajectories must be integer-valued")
        if np.any(np.isinf(path.values)):
            raise ValueError("custom trajectories must be finite")
        return cls(kind="custom", path=path)

    # -- realization ---------------------------------------------------------

    @property
    def is_front(self) -> bool:
        return self.kind in FRONT_KINDS

    def mode_code(self) -> int:
        if self.is_front:
            return FRONT_KINDS[self.kind]
        if self.kind in PRESCRIBED_KINDS:
            return engine.PRESCRIBED
        raise ValueError(f"{self.kind} has no observer mode")

    def _linear_values(self, horizon: float):
        """Breakpoints/values of x0 - ceil(v (t0 - t)) on [0, horizon]."""
        ts = [0.0]
        vs = [self.x0 - math.ceil(self.v * self.t0 - 1e-12)]
        j = math.ceil(self.v * self.t0 - 1e-12) - 1
        while True:
            t = self.t0 - j / self.v
            if t > horizon:
                break
            if t > 0:
                ts.append(t)
                vs.append(self.x0 - j)
            else:
                vs[0] = self.x0 - j
            j -= 1
        return np.array(ts), np.array(vs, dtype=np.int64)

    def realize(self, horizon: float):
        """(times, integer values) arrays for prescribed kinds."""
        if self.kind == "linear":
            return self._linear_values(horizon)
        if self.kind in ("truncated-upper", "truncated-lower"):
            ts, vs = self._linear_values(horizon)
            cutoff = self.x0 - math.floor(self.eps ** (-self.gamma_prime))
            if self.kind == "truncated-upper":
                vs = np.maximum(vs, cutoff)
            else:
                vs = np.where(vs >= cutoff, np.maximum(vs, 0), 0)
            keep = np.concatenate(([True], np.diff(vs) > 0))
            return ts[keep], vs[keep]
        if self.kind == "custom":
            p = self.path
            keep = p.breakpoints <= horizon
            return p.breakpoints[keep].copy(), p.values[keep].astype(np.int64)
        raise ValueError(f"{self.kind} is not a prescribed trajectory")


@dataclass(frozen=True)
class DecompositionSnapshot:
    """Exact integer decomposition of the absorbed count at one time.

    absorbed = boundary - fluctuation + noise + boundary_layer, where
    noise is the net count change left of the boundary in the free cloud
    and boundary_layer counts absorbed particles currently to its right.
    """

    time: float
    boundary: int
    absorbed: int
    fluctuation: int
    noise: int
    noise_minus: int
    noise_plus: int
    boundary_layer: int
    dead_count: int

    def identity_residual(self) -> int:
        return self.absorbed - (self.boundary - self.fluctuation
                                + self.noise + self.boundary_layer)


@dataclass(frozen=True)
class EventRecord:
    t: float
    type: str            # walk | front | absorb
    pid: int
    src: int
    dst: int
    k: int
    r: int
    n: int


@dataclass(frozen=True)
class SimulationResult:
    traj: TrajectorySpec
    front: StepFunction
    hitting: StepFunction
    snapshots: list
    exploded: bool
    explosion_time: Optional[float]
    final_front: int
    final_absorbed: int
    absorbed_path: StepFunction
    diagnostics: dict
    events: Optional[list] = None
    bond_crossings: Optional[np.ndarray] = None


@dataclass(frozen=True)
class CoupledResult:
    results: list
    status: str
    final_time: float

    def __getitem__(self, i: int) -> SimulationResult:
        return self.results[i]


def compute_k(occupancy: Sequence[int]) -> Optional[int]:
    """Smallest j >= 1 with sum(occupancy[:j]) == j; None means explosion.

    ``occupancy[0]`` is the site just right of the front at the trigger
    instant and must include the triggering particle.
    """
    if len(occupancy) == 0 or occupancy[0] < 1:
        raise ValueError("the triggering particle must sit on the first site")
    c = 0
    for j, site in enumerate(occupancy, start=1):
        c += site
        if c == j:
            return j
    return None


def _event_type_name(code: int) -> str:
    return ("walk", "front", "absorb")[code]


def run_coupled(ic: InitialCondition, trajs: Sequence[TrajectorySpec],
                horizon: float, seed: int,
                checkpoints: Sequence[float] = (),
                snapshots: str = "full",
                log_events: bool = False,
                record_bonds: bool = False,
                freeze_dead: Optional[bool] = None,
                window_pad: Optional[int] = None,
                explosion_buffer: Optional[int] = None,
                warn_window: bool = True) -> CoupledResult:
    """Run several observers against one shared particle cloud."""
    trajs = list(trajs)
    if not trajs:
        raise ValueError("need at least one trajectory")
    if any(t.kind == "pushed" for t in trajs):
        if len(trajs) != 1:
            raise ValueError("the pushed variant cannot be coupled")
        return _run_pushed(ic, trajs[0], horizon, seed, checkpoints,
                           log_events, window_pad, explosion_buffer)
    full = snapshots == "full"
    if full and any(t.kind == "mdla-jumper" for t in trajs):
        raise ValueError("decomposition snapshots are undefined for the "
                         "jumper-only variant; use snapshots='light'")
    if freeze_dead is None:
        freeze_dead = not full and not log_events and not record_bonds

    cps = np.asarray(sorted(checkpoints), dtype=float)
    if np.any(cps > horizon):
        raise ValueError("checkpoints must lie within the horizon")

    if warn_window:
        needed = suggest_window(horizon, 0.0, density=max(ic.mean_density(), 1e-9))
        if ic.window < needed:
            warnings.warn(
                f"window {ic.window} below the suggested {needed}; omitted "
                "particles may reach the front within the horizon",
                WindowTooSmallWarning)

    n_obs = len(trajs)
    modes = np.array([t.mode_code() for t in trajs], dtype=np.int64)

    qt_list, qv_list = [], []
    for t in trajs:
        if t.mode_code() == engine.PRESCRIBED:
            ts, vs = t.realize(horizon)
            if np.any(np.diff(vs) < 0):
                raise ValueError("prescribed trajectories must be nondecreasing")
            qt_list.append(ts)
            qv_list.append(vs)
        else:
            qt_list.append(np.zeros(1))
            qv_list.append(np.zeros(1, dtype=np.int64))
    qlen = np.array([len(x) for x in qt_list], dtype=np.int64)
    qmax = max(len(x) for x in qt_list)
    qt = np.zeros((n_obs, qmax))
    qv = np.zeros((n_obs, qmax), dtype=np.int64)
    for o in range(n_obs):
        qt[o, : qlen[o]] = qt_list[o]
        qv[o, : qlen[o]] = qv_list[o]

    min_q0 = min([int(qv_list[o][0]) for o in range(n_obs)
                  if modes[o] == engine.PRESCRIBED], default=0)
    off = max(0, -(min(min_q0, 0)) + 1)

    pad = window_pad if window_pad is not None else int(math.ceil(6.0 * math.sqrt(horizon + 1))) + 64
    w = ic.window
    occ_len = off + w + pad + 1
    occ = np.zeros((n_obs, occ_len), dtype=np.int64)
    occ[:, off + 1: off + w + 1] = ic.counts[None, :]
    buf = explosion_buffer if explosion_buffer is not None else int(math.ceil(4.0 * math.sqrt(horizon + 1)))
    explosion_edge = max(w - buf, 1)

    pos0 = np.repeat(np.arange(1, w + 1, dtype=np.int64), ic.counts)
    pos = pos0.copy()
    n = len(pos)
    alive = np.ones((n_obs, n), dtype=np.uint8)
    fl = ic.fluctuation.astype(np.int64)

    ncp = len(cps)
    cap_ev = occ_len + 16
    ev_t = np.zeros((n_obs, cap_ev))
    ev_r = np.zeros((n_obs, cap_ev), dtype=np.int64)
    ev_n = np.zeros((n_obs, cap_ev), dtype=np.int64)
    ev_count = np.zeros(n_obs, dtype=np.int64)
    cap_nev = n + qmax + 16
    nev_t = np.zeros((n_obs, cap_nev))
    nev_v = np.zeros((n_obs, cap_nev), dtype=np.int64)
    nev_count = np.zeros(n_obs, dtype=np.int64)

    snap = {name: np.zeros((n_obs, max(ncp, 1)), dtype=np.int64)
            for name in ("q", "n", "f", "m", "mm", "mp", "g", "dead")}

    if log_events:
        cap_log = int(n * horizon * 1.3 + 10 * n + 1000)
        log_t = np.zeros(cap_log)
        log_type = np.zeros(cap_log, dtype=np.int8)
        log_pid = np.zeros(cap_log, dtype=np.int64)
        log_from = np.zeros(cap_log, dtype=np.int64)
        log_to = np.zeros(cap_log, dtype=np.int64)
        log_k = np.zeros(cap_log, dtype=np.int64)
        log_r = np.zeros(cap_log, dtype=np.int64)
        log_n = np.zeros(cap_log, dtype=np.int64)
    else:
        log_t = np.zeros(1)
        log_type = np.zeros(1, dtype=np.int8)
        log_pid = np.zeros(1, dtype=np.int64)
        log_from = np.zeros(1, dtype=np.int64)
        log_to = np.zeros(1, dtype=np.int64)
        log_k = np.zeros(1, dtype=np.int64)
        log_r = np.zeros(1, dtype=np.int64)
        log_n = np.zeros(1, dtype=np.int64)
    log_count = np.zeros(1, dtype=np.int64)

    if record_bonds:
        jmax_bond_off = off + 8
        jmat = np.zeros((int(math.ceil(horizon)) + 1, occ_len + 16), dtype=np.int64)
    else:
        jmax_bond_off = 0
        jmat = np.zeros((1, 1), dtype=np.int64)

    out_status = np.zeros(1, dtype=np.int64)
    out_time = np.zeros(1)
    out_front = np.zeros(n_obs, dtype=np.int64)
    out_absorbed = np.zeros(n_obs, dtype=np.int64)
    active_ids = np.arange(n, dtype=np.int64)
    id_slot = np.arange(n, dtype=np.int64)

    n_cp_done = engine.run_observers(
        pos, pos0, n_obs, modes, occ, off, alive, fl, qt, qv, qlen,
        float(horizon), np.uint64(seed % (2**64)), cps, full, freeze_dead,
        explosion_edge,
        ev_t, ev_r, ev_n, ev_count, nev_t, nev_v, nev_count,
        snap["q"], snap["n"], snap["f"], snap["m"], snap["mm"], snap["mp"],
        snap["g"], snap["dead"],
        bool(log_events), log_t, log_type, log_pid, log_from, log_to, log_k,
        log_r, log_n, log_count,
        record_bonds, jmat, jmax_bond_off,
        out_status, out_time, out_front, out_absorbed, active_ids, id_slot)

    status = int(out_status[0])
    if status == engine.WINDOW_OVERFLOW:
        raise RuntimeError("a live particle left the padded window; increase window_pad")
    if status == engine.LOG_OVERFLOW:
        raise RuntimeError("event log capacity exceeded")
    exploded = status == engine.EXPLODED
    final_time = float(out_time[0])

    events = None
    event_arrays = None
    if log_events:
        c = int(log_count[0])
        event_arrays = {"t": log_t[:c], "type": log_type[:c],
                        "pid": log_pid[:c], "from": log_from[:c],
                        "to": log_to[:c], "k": log_k[:c],
                        "r": log_r[:c], "n": log_n[:c]}
        if log_events != "arrays":
            events = [EventRecord(t=float(log_t[j]),
                                  type=_event_type_name(log_type[j]),
                                  pid=int(log_pid[j]), src=int(log_from[j]),
                                  dst=int(log_to[j]), k=int(log_k[j]),
                                  r=int(log_r[j]), n=int(log_n[j]))
                      for j in range(c)]

    results = []
    for o in range(n_obs):
        ne = int(ev_count[o])
        init_val = float(qv_list[o][0]) if modes[o] == engine.PRESCRIBED else 0.0
        bps = np.concatenate(([0.0], ev_t[o, :ne]))
        vals = np.concatenate(([init_val], ev_r[o, :ne].astype(float)))
        if exploded:
            bps = np.concatenate((bps, [final_time]))
            vals = np.concatenate((vals, [math.inf]))
        if vals.min() >= 0:
            front_path = StepFunction(bps, vals)
            hitting = invert(front_path)
        else:
            # trajectories with a negative stretch fall outside the
            # nonnegative path space; keep the raw pairs instead
            front_path = None
            hitting = None
        nn = int(nev_count[o])
        abps = np.concatenate(([0.0], nev_t[o, :nn], ev_t[o, :ne]))
        avals = np.concatenate(([0.0], nev_v[o, :nn].astype(float),
                                ev_n[o, :ne].astype(float)))
        order = np.argsort(abps, kind="stable")
        abps, avals = abps[order], avals[order]
        keep = np.concatenate(([True], np.diff(abps) > 0))
        # on ties keep the latest value at that instant
        idx = np.nonzero(keep)[0]
        ends = np.concatenate((idx[1:] - 1, [len(abps) - 1]))
        absorbed_path = StepFunction(abps[idx], avals[ends])

        snaps = []
        for j in range(min(n_cp_done, ncp)):
            snaps.append(DecompositionSnapshot(
                time=float(cps[j]), boundary=int(snap["q"][o, j]),
                absorbed=int(snap["n"][o, j]), fluctuation=int(snap["f"][o, j]),
                noise=int(snap["m"][o, j]), noise_minus=int(snap["mm"][o, j]),
                noise_plus=int(snap["mp"][o, j]),
                boundary_layer=int(snap["g"][o, j]),
                dead_count=int(snap["dead"][o, j])))

        if modes[o] == engine.MDLA_JUMPER:
            alive_now = alive[o].astype(bool)
        else:
            # raw flags are lazy; a raised flag at or below the boundary
            # means "swept but not yet touched"
            alive_now = (alive[o] == 1) & (pos > out_front[o])
        results.append(SimulationResult(
            traj=trajs[o], front=front_path, hitting=hitting,
            snapshots=snaps, exploded=exploded,
            explosion_time=final_time if exploded else None,
            final_front=int(out_front[o]), final_absorbed=int(out_absorbed[o]),
            absorbed_path=absorbed_path,
            diagnostics={"n_particles": n, "window": w, "pad": pad,
                         "offset": off, "explosion_edge": explosion_edge,
                         "final_time": final_time, "seed": int(seed),
                         "full_snapshots": full, "freeze_dead": bool(freeze_dead),
                         "trajectory": (bps, vals),
                         "positions": pos, "initial_positions": pos0,
                         "alive": alive_now,
                         "event_arrays": event_arrays if o == 0 else None},
            events=events if o == 0 else None,
            bond_crossings=jmat if (record_bonds and o == 0) else None))

    return CoupledResult(results=results,
                         status="exploded" if exploded else "ok",
                         final_time=final_time)


def run(ic: InitialCondition, traj: TrajectorySpec, horizon: float, seed: int,
        checkpoints: Sequence[float] = (), **kwargs) -> SimulationResult:
    """Single-observer run; see :func:`run_coupled` for options."""
    return run_coupled(ic, [traj], horizon, seed, checkpoints, **kwargs)[0]


def decomposition_at(result: SimulationResult, t: float) -> DecompositionSnapshot:
    """The recorded decomposition snapshot at checkpoint time t.

    Snapshots are taken along the run (free positions are not kept per
    time), so t must be one of the run's checkpoint times.
    """
    for s in result.snapshots:
        if s.time == t:
            return s
    raise ValueError(f"t={t} is not among the run's checkpoint times; "
                     f"pass it via checkpoints= when running")


def _run_pushed(ic, traj, horizon, seed, checkpoints, log_events,
                window_pad, explosion_buffer) -> CoupledResult:
    cps = np.asarray(sorted(checkpoints), dtype=float)
    pad = window_pad if window_pad is not None else int(math.ceil(6.0 * math.sqrt(horizon + 1))) + 64
    w = ic.window
    off = 0
    occ = np.zeros(off + w + pad + 1, dtype=np.int64)
    occ[off + 1: off + w + 1] = ic.counts
    buf = explosion_buffer if explosion_buffer is not None else int(math.ceil(4.0 * math.sqrt(horizon + 1)))
    explosion_edge = max(w - buf, 1)
    pos = np.repeat(np.arange(1, w + 1, dtype=np.int64), ic.counts)
    n = len(pos)
    alive = np.ones(n, dtype=np.uint8)

    cap_ev = len(occ) + 16
    ev_t = np.zeros(cap_ev)
    ev_r = np.zeros(cap_ev, dtype=np.int64)
    ev_n = np.zeros(cap_ev, dtype=np.int64)
    ev_count = np.zeros(1, dtype=np.int64)
    ncp = len(cps)
    snap_q = np.zeros(max(ncp, 1), dtype=np.int64)
    snap_n = np.zeros(max(ncp, 1), dtype=np.int64)

    if log_events:
        cap_log = int(n * horizon * 1.3 + 10 * n + 1000)
    else:
        cap_log = 1
    log_t = np.zeros(cap_log)
    log_type = np.zeros(cap_log, dtype=np.int8)
    log_pid = np.zeros(cap_log, dtype=np.int64)
    log_from = np.zeros(cap_log, dtype=np.int64)
    log_to = np.zeros(cap_log, dtype=np.int64)
    log_k = np.zeros(cap_log, dtype=np.int64)
    log_r = np.zeros(cap_log, dtype=np.int64)
    log_n = np.zeros(cap_log, dtype=np.int64)
    log_count = np.zeros(1, dtype=np.int64)

    out_status = np.zeros(1, dtype=np.int64)
    out_time = np.zeros(1)
    out_front = np.zeros(1, dtype=np.int64)
    out_absorbed = np.zeros(1, dtype=np.int64)

    n_cp_done = engine.run_pushed(
        pos, occ, off, alive, float(horizon), np.uint64(seed % (2**64)), cps,
        explosion_edge, ev_t, ev_r, ev_n, ev_count, snap_q, snap_n,
        log_events, log_t, log_type, log_pid, log_from, log_to, log_k,
        log_r, log_n, log_count, out_status, out_time, out_front, out_absorbed)

    status = int(out_status[0])
    if status == engine.WINDOW_OVERFLOW:
        raise RuntimeError("particle or push left the padded window; increase window_pad")
    if status == engine.LOG_OVERFLOW:
        raise RuntimeError("event log capacity exceeded")
    exploded = status == engine.EXPLODED
    final_time = float(out_time[0])

    ne = int(ev_count[0])
    bps = np.concatenate(([0.0], ev_t[:ne]))
    vals = np.concatenate(([0.0], ev_r[:ne].astype(float)))
    if exploded:
        bps = np.concatenate((bps, [final_time]))
        vals = np.concatenate((vals, [math.inf]))
    front_path = StepFunction(bps, vals)
    absorbed_path = StepFunction(np.concatenate(([0.0], ev_t[:ne])),
                                 np.concatenate(([0.0], ev_n[:ne].astype(float))))

    events = None
    if log_events:
        events = [EventRecord(t=float(log_t[j]), type=_event_type_name(log_type[j]),
                              pid=int(log_pid[j]), src=int(log_from[j]),
                              dst=int(log_to[j]), k=int(log_k[j]),
                              r=int(log_r[j]), n=int(log_n[j]))
                  for j in range(int(log_count[0]))]

    snaps = [DecompositionSnapshot(time=float(cps[j]), boundary=int(snap_q[j]),
                                   absorbed=int(snap_n[j]), fluctuation=0,
                                   noise=0, noise_minus=0, noise_plus=0,
                                   boundary_layer=0, dead_count=int(snap_n[j]))
             for j in range(min(n_cp_done, ncp))]

    # stored positions go stale when the front sweeps a live site; the true
    # position is then one step ahead of the front
    pos = np.where((alive == 1) & (pos <= out_front[0]), out_front[0] + 1, pos)

    result = SimulationResult(
        traj=traj, front=front_path, hitting=invert(front_path),
        snapshots=snaps, exploded=exploded,
        explosion_time=final_time if exploded else None,
        final_front=int(out_front[0]), final_absorbed=int(out_absorbed[0]),
        absorbed_path=absorbed_path,
        diagnostics={"n_particles": n, "window": w, "pad": pad, "offset": off,
                     "explosion_edge": explosion_edge, "final_time": final_time,
                     "seed": int(seed), "alive": alive, "positions": pos},
        events=events)
    return CoupledResult(results=[result],
                         status="exploded" if exploded else "ok",
                         final_time=final_time)


@dataclass(frozen=True)
class ProbeReport:
    """Outcome of one monotone-comparison probe against a boundary Q."""

    upper_hypothesis_until: float   # N <= Q held strictly before this time
    lower_hypothesis_until: float   # N >= Q held strictly before this time
    upper_violations: list          # (t, Q(t), r(t)) with Q(t) < r(t)
    lower_violations: list          # (t, Q(t), r(t)) with Q(t) > r(t)

    @property
    def passed(self) -> bool:
        return not self.upper_violations and not self.lower_violations


def monotonicity_probe(ic: InitialCondition, q: StepFunction, horizon: float,
                       seed: int, **kwargs) -> ProbeReport:
    """Coupled run of the flux-matched front and the boundary Q.

    While the absorbed count along Q stays at or below Q, the front must
    not exceed Q; while it stays at or above Q (and Q starts at 0), Q must
    not exceed the front.  Violations are collected, not raised.
    """
    coupled = run_coupled(ic, [TrajectorySpec.frictionless(),
                               TrajectorySpec.custom(q)],
                          horizon, seed, snapshots="light", **kwargs)
    r_path = coupled[0].front
    n_path = coupled[1].absorbed_path
    q_path = coupled[1].front

    # hypotheses can first fail where their moving side jumps
    upper_until = math.inf
    for t, nv in zip(n_path.breakpoints, n_path.values):
        if nv > q_path(t):
            upper_until = t
            break
    lower_until = math.inf
    if q_path(0.0) != 0:
        lower_until = 0.0
    else:
        for t, qv_ in zip(q_path.breakpoints, q_path.values):
            if qv_ > n_path(t):
                lower_until = t
                break

    upper_viol = []
    for t, rv in zip(r_path.breakpoints, r_path.values):
        if t >= upper_until or t > horizon:
            break
        if q_path(t) < rv:
            upper_viol.append((float(t), float(q_path(t)), float(rv)))
    lower_viol = []
    for t, qv_ in zip(q_path.breakpoints, q_path.values):
        if t >= lower_until or t > horizon:
            break
        if qv_ > r_path(t):
            lower_viol.append((float(t), float(qv_), float(r_path(t))))

    return ProbeReport(upper_hypothesis_until=upper_until,
                       lower_hypothesis_until=lower_until,
                       upper_violations=upper_viol,
                       lower_violations=lower_viol)


def write_event_log(result: SimulationResult, path) -> None:
    """JSONL event log, one record per event."""
    if result.events is None:
        raise ValueError("run was executed without log_events=True")
    with open(path, "w") as fh:
        for e in result.events:
            fh.write(json.dumps({"t": e.t, "type": e.type, "pid": e.pid,
                                 "from": e.src, "to": e.dst, "k": e.k,
                                 "r": e.r, "N": e.n}) + "\n")
