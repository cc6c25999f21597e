"""Event-driven core of the particle simulation (numba kernels).

One shared cloud of free walkers drives up to several "observers", each an
absorption rule evaluated against the same particle randomness: the
flux-matched front (minimal k absorbed per trigger), the one-step variant
(whole-site or jumper-only absorption), or a prescribed nondecreasing
integer trajectory.  Observers never alter the walks, so coupled runs give
pathwise comparisons; the pushed variant relocates particles and therefore
runs in its own kernel.

Bookkeeping invariants the kernels maintain:

* ``occ[o, site+off]`` counts particles currently alive under observer o at
  the site.  Sweeps zero ranges eagerly; individual alive flags are updated
  lazily, which stays exact because trajectories are nondecreasing: a flag
  still raised with position <= boundary means "swept earlier".
* ``absorbed[o]`` (N) is incremented eagerly at sweeps and single deaths.
* the jumper-only variant has no sweeps; stranded particles at or below the
  front stay alive until their own left jump.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

# observer mode codes
OFF = 0
FRICTIONLESS = 1
MDLA_SITE = 2
MDLA_JUMPER = 3
PRESCRIBED = 4

# status codes
OK = 0
EXPLODED = 1
WINDOW_OVERFLOW = 2
LOG_OVERFLOW = 3

SM64_GAMMA = np.uint64(0x9E3779B97F4A7C15)
SM64_M1 = np.uint64(0xBF58476D1CE4E5B9)
SM64_M2 = np.uint64(0x94D049BB133111EB)
TO_DOUBLE = 1.1102230246251565e-16  # 2^-53


@njit(inline="always")
def _sm64(state):
    state += SM64_GAMMA
    z = state
    z = (z ^ (z >> np.uint64(30))) * SM64_M1
    z = (z ^ (z >> np.uint64(27))) * SM64_M2
    z = z ^ (z >> np.uint64(31))
    return state, z


@njit(inline="always")
def _uniform(state):
    state, z = _sm64(state)
    return state, (z >> np.uint64(11)) * TO_DOUBLE


@njit(cache=True)
def _fluct_at(fl, x):
    # cumulative fluctuation extended below 0 (identity) and beyond the window
    if x < 0:
        return x
    w = len(fl) - 1
    if x > w:
        return fl[w] + (x - w)
    return fl[x]


@njit(cache=True)
def _sweep(occ_row, off, lo, hi, edge):
    """Zero alive occupancy on sites (lo, hi]; return count removed."""
    cnt = 0
    a = lo + 1 + off
    b = hi + off
    if a < 0:
        a = 0
    if b > edge:
        b = edge
    for j in range(a, b + 1):
        cnt += occ_row[j]
        occ_row[j] = 0
    return cnt


@njit(cache=True)
def _snapshot(pos, pos0, alive, fl, q, full):
    """(M, M-, M+, G, dead) at boundary q; full=False skips the O(n) pass."""
    if not full:
        return 0, 0, 0, 0, 0
    m_minus = 0
    m_plus = 0
    g = 0
    dead = 0
    n = len(pos)
    for i in range(n):
        p = pos[i]
        if p <= q:
            if pos0[i] > q:
                m_minus += 1
        else:
            if pos0[i] <= q:
                m_plus += 1
        if alive[i] == 0:
            dead += 1
            if p > q:
                g += 1
        elif p <= q:
            dead += 1  # swept but not yet touched; position cannot exceed q
    return m_minus - m_plus, m_minus, m_plus, g, dead


@njit(cache=True, nogil=True)
def run_observers(pos, pos0, n_obs, modes, occ, off, alive, fl,
                  qt, qv, qlen,
                  horizon, seed, cps, full_snapshots, freeze_dead,
                  explosion_edge,
                  ev_t, ev_r, ev_n, ev_count,
                  nev_t, nev_v, nev_count,
                  snap_q, snap_n, snap_f, snap_m, snap_mm, snap_mp, snap_g, snap_dead,
                  log_on, log_t, log_type, log_pid, log_from, log_to, log_k,
                  log_r, log_n, log_count,
                  jrec_on, jmat, jmax_bond_off,
                  out_status, out_time, out_front, out_absorbed,
                  active_ids, id_slot):
    """Advance the coupled system to the horizon.  See module docstring."""
    n = len(pos)
    edge = occ.shape[1] - 1
    state = np.uint64(seed)

    front = np.zeros(n_obs, dtype=np.int64)
    absorbed = np.zeros(n_obs, dtype=np.int64)
    qptr = np.zeros(n_obs, dtype=np.int64)

    # initial trajectory values and the sweep of anything starting at or
    # below them (prescribed trajectories may start above 0)
    for o in range(n_obs):
        if modes[o] == PRESCRIBED:
            front[o] = qv[o, 0]
            qptr[o] = 1
            cnt = _sweep(occ[o], off, -off - 1, front[o], edge)
            if cnt > 0:
                absorbed[o] += cnt
                nev_t[o, nev_count[o]] = 0.0
                nev_v[o, nev_count[o]] = absorbed[o]
                nev_count[o] += 1
            # mark flags lazily; occupancy already cleared

    n_active = n
    ncp = len(cps)
    cp_ptr = 0
    t = 0.0
    status = OK
    stop_time = horizon

    while True:
        if n_active == 0:
            t_next = horizon + 1.0
        else:
            state, u = _uniform(state)
            t_next = t + (-math.log(1.0 - u)) / n_active

        # scheduled items (prescribed steps, checkpoints) before the event
        while True:
            tmin = horizon + 1.0
            what = -1
            who = -1
            for o in range(n_obs):
                if modes[o] == PRESCRIBED and qptr[o] < qlen[o]:
                    if qt[o, qptr[o]] < tmin:
                        tmin = qt[o, qptr[o]]
                        what = 0
                        who = o
            if cp_ptr < ncp and cps[cp_ptr] < tmin and cps[cp_ptr] < t_next:
                # snapshot state as of the checkpoint time
                for o in range(n_obs):
                    if modes[o] == OFF:
                        continue
                    q = front[o]
                    m, mm, mp, g, dead = _snapshot(pos, pos0, alive[o], fl, q,
                                                   full_snapshots)
                    k = cp_ptr
                    snap_q[o, k] = q
                    snap_n[o, k] = absorbed[o]
                    snap_f[o, k] = _fluct_at(fl, q)
                    snap_m[o, k] = m
                    snap_mm[o, k] = mm
                    snap_mp[o, k] = mp
                    snap_g[o, k] = g
                    snap_dead[o, k] = dead
                cp_ptr += 1
                continue
            if what == 0 and tmin < t_next and tmin <= horizon:
                o = who
                newq = qv[o, qptr[o]]
                qptr[o] += 1
                if newq > front[o]:
                    cnt = _sweep(occ[o], off, front[o], newq, edge)
                    front[o] = newq
                    if cnt > 0:
                        absorbed[o] += cnt
                    nev_t[o, nev_count[o]] = tmin
                    nev_v[o, nev_count[o]] = absorbed[o]
                    nev_count[o] += 1
                    ev_t[o, ev_count[o]] = tmin
                    ev_r[o, ev_count[o]] = front[o]
                    ev_n[o, ev_count[o]] = absorbed[o]
                    ev_count[o] += 1
                continue
            break

        if t_next > horizon:
            t = horizon
            break

        t = t_next

        # pick a particle and a direction
        state, u = _uniform(state)
        slot = int(u * n_active)
        if slot >= n_active:
            slot = n_active - 1
        i = active_ids[slot]
        state, z = _sm64(state)
        step = 1 if (z & np.uint64(1)) else -1
        x_old = pos[i]
        y = x_old + step

        ev_type = 0
        ev_k = 0
        all_dead = True

        for o in range(n_obs):
            mode = modes[o]
            if mode == OFF:
                continue
            a = alive[o, i]
            if a == 1 and mode != MDLA_JUMPER and x_old <= front[o]:
                alive[o, i] = 0  # swept earlier; occupancy already cleared
                a = 0
            if a == 0:
                continue

            if mode == FRICTIONLESS:
                if y <= front[o]:
                    # trigger: minimal k with exactly k particles over (r, r+k]
                    r0 = front[o]
                    cum = 0
                    k = 0
                    jmax = edge - off - r0
                    for j in range(1, jmax + 1):
                        cum += occ[o, r0 + j + off]
                        if cum == j:
                            k = j
                            break
                    if k == 0 or r0 + k >= explosion_edge:
                        status = EXPLODED
                        stop_time = t
                        out_front[o] = front[o]
                        out_absorbed[o] = absorbed[o]
                        alive[o, i] = 0
                        ev_type = 1
                        break
                    _sweep(occ[o], off, r0, r0 + k, edge)
                    front[o] = r0 + k
                    absorbed[o] += k
                    alive[o, i] = 0
                    ev_type = 1
                    ev_k = k
                    ev_t[o, ev_count[o]] = t
                    ev_r[o, ev_count[o]] = front[o]
                    ev_n[o, ev_count[o]] = absorbed[o]
                    ev_count[o] += 1
                else:
                    occ[o, x_old + off] -= 1
                    if y + off > edge:
                        status = WINDOW_OVERFLOW
                        stop_time = t
                        break
                    occ[o, y + off] += 1
                    all_dead = False
            elif mode == MDLA_SITE:
                if y <= front[o]:
                    cnt = occ[o, x_old + off]  # entire site at t-, jumper included
                    occ[o, x_old + off] = 0
                    front[o] += 1
                    absorbed[o] += cnt
                    alive[o, i] = 0
                    if front[o] >= explosion_edge:
                        status = EXPLODED
                        stop_time = t
                        break
                    ev_type = 1
                    ev_k = 1
                    ev_t[o, ev_count[o]] = t
                    ev_r[o, ev_count[o]] = front[o]
                    ev_n[o, ev_count[o]] = absorbed[o]
                    ev_count[o] += 1
                else:
                    occ[o, x_old + off] -= 1
                    if y + off > edge:
                        status = WINDOW_OVERFLOW
                        stop_time = t
                        break
                    occ[o, y + off] += 1
                    all_dead = False
            elif mode == MDLA_JUMPER:
                if step < 0 and x_old == front[o] + 1:
                    occ[o, x_old + off] -= 1
                    front[o] += 1
                    absorbed[o] += 1
                    alive[o, i] = 0
                    if front[o] >= explosion_edge:
                        status = EXPLODED
                        stop_time = t
                        break
                    ev_type = 1
                    ev_k = 1
                    ev_t[o, ev_count[o]] = t
                    ev_r[o, ev_count[o]] = front[o]
                    ev_n[o, ev_count[o]] = absorbed[o]
                    ev_count[o] += 1
                elif step < 0 and x_old <= front[o]:
                    # stranded inside the aggregate; absorbed silently
                    occ[o, x_old + off] -= 1
                    absorbed[o] += 1
                    alive[o, i] = 0
                    ev_type = 2
                else:
                    occ[o, x_old + off] -= 1
                    if y + off > edge:
                        status = WINDOW_OVERFLOW
                        stop_time = t
                        break
                    occ[o, y + off] += 1
                    all_dead = False
            else:  # PRESCRIBED
                if y <= front[o]:
                    occ[o, x_old + off] -= 1
                    absorbed[o] += 1
                    alive[o, i] = 0
                    ev_type = 2
                    nev_t[o, nev_count[o]] = t
                    nev_v[o, nev_count[o]] = absorbed[o]
                    nev_count[o] += 1
                else:
                    occ[o, x_old + off] -= 1
                    if y + off > edge:
                        status = WINDOW_OVERFLOW
                        stop_time = t
                        break
                    occ[o, y + off] += 1
                    all_dead = False

        if status != OK:
            break

        pos[i] = y

        if jrec_on:
            bond = x_old if step > 0 else y
            bi = bond + jmax_bond_off
            ti = int(t)
            if 0 <= bi < jmat.shape[1] and ti < jmat.shape[0]:
                jmat[ti, bi] += 1

        if log_on:
            c = log_count[0]
            if c >= len(log_t):
                status = LOG_OVERFLOW
                stop_time = t
                break
            log_t[c] = t
            log_type[c] = ev_type
            log_pid[c] = i
            log_from[c] = x_old
            log_to[c] = y
            log_k[c] = ev_k
            log_r[c] = front[0]
            log_n[c] = absorbed[0]
            log_count[0] = c + 1

        if freeze_dead and all_dead:
            dead_in_all = True
            for o in range(n_obs):
                if modes[o] != OFF and alive[o, i] == 1:
                    dead_in_all = False
                    break
            if dead_in_all:
                slot_i = id_slot[i]
                last = active_ids[n_active - 1]
                active_ids[slot_i] = last
                id_slot[last] = slot_i
                n_active -= 1

    # flush remaining checkpoints only on a clean finish; an exploded or
    # aborted run keeps just the checkpoints it actually reached
    while cp_ptr < ncp and cps[cp_ptr] <= horizon and status == OK:
        for o in range(n_obs):
            if modes[o] == OFF:
                continue
            q = front[o]
            m, mm, mp, g, dead = _snapshot(pos, pos0, alive[o], fl, q, full_snapshots)
            k = cp_ptr
            snap_q[o, k] = q
            snap_n[o, k] = absorbed[o]
            snap_f[o, k] = _fluct_at(fl, q)
            snap_m[o, k] = m
            snap_mm[o, k] = mm
            snap_mp[o, k] = mp
            snap_g[o, k] = g
            snap_dead[o, k] = dead
        cp_ptr += 1

    out_status[0] = status
    out_time[0] = stop_time if status != OK else t
    for o in range(n_obs):
        out_front[o] = front[o]
        out_absorbed[o] = absorbed[o]
    return cp_ptr


@njit(cache=True, nogil=True)
def run_pushed(pos, occ, off, alive, horizon, seed, cps, explosion_edge,
               ev_t, ev_r, ev_n, ev_count,
               snap_q, snap_n,
               log_on, log_t, log_type, log_pid, log_from, log_to, log_k,
               log_r, log_n, log_count,
               out_status, out_time, out_front, out_absorbed):
    """One-step front that displaces excess particles one site right.

    Relocations break the free coupling, so no decomposition bookkeeping is
    attempted here.  A particle's stored position can go stale only when
    the front has swept over its site, in which case its true position is
    front + 1 (each sweep pushed it one step); positions are reconciled
    lazily on the particle's own events.
    """
    n = len(pos)
    edge = len(occ) - 1
    state = np.uint64(seed)
    front = 0
    absorbed = 0
    t = 0.0
    ncp = len(cps)
    cp_ptr = 0
    status = OK
    stop_time = horizon

    while True:
        state, u = _uniform(state)
        t_next = t + (-math.log(1.0 - u)) / n
        while cp_ptr < ncp and cps[cp_ptr] < t_next:
            snap_q[cp_ptr] = front
            snap_n[cp_ptr] = absorbed
            cp_ptr += 1
        if t_next > horizon:
            t = horizon
            break
        t = t_next

        state, u = _uniform(state)
        i = int(u * n)
        if i >= n:
            i = n - 1
        state, z = _sm64(state)
        step = 1 if (z & np.uint64(1)) else -1

        ev_type = 0
        x_true = pos[i]
        if alive[i] == 1:
            if x_true <= front:
                x_true = front + 1  # pushed along since the last touch
            y = x_true + step
            if y <= front:
                # trigger: advance one step, absorb the jumper only,
                # push everything else off the new front site
                newf = front + 1
                extra = occ[x_true + off] - 1
                occ[x_true + off] = 0
                if extra > 0:
                    if x_true + 1 + off > edge:
                        status = WINDOW_OVERFLOW
                        stop_time = t
                        break
                    occ[x_true + 1 + off] += extra
                front = newf
                absorbed += 1
                alive[i] = 0
                pos[i] = y
                if front >= explosion_edge:
                    status = EXPLODED
                    stop_time = t
                    break
                ev_type = 1
                ev_t[ev_count[0]] = t
                ev_r[ev_count[0]] = front
                ev_n[ev_count[0]] = absorbed
                ev_count[0] += 1
            else:
                occ[x_true + off] -= 1
                if y + off > edge:
                    status = WINDOW_OVERFLOW
                    stop_time = t
                    break
                occ[y + off] += 1
                pos[i] = y
        else:
            pos[i] = x_true + step

        if log_on:
            c = log_count[0]
            if c >= len(log_t):
                status = LOG_OVERFLOW
                stop_time = t
                break
            log_t[c] = t
            log_type[c] = ev_type
            log_pid[c] = i
            log_from[c] = x_true
            log_to[c] = pos[i]
            log_k[c] = 1 if ev_type == 1 else 0
            log_r[c] = front
            log_n[c] = absorbed
            log_count[0] = c + 1

    while cp_ptr < ncp and cps[cp_ptr] <= horizon and status == OK:
        snap_q[cp_ptr] = front
        snap_n[cp_ptr] = absorbed
        cp_ptr += 1

    out_status[0] = status
    out_time[0] = stop_time if status != OK else t
    out_front[0] = front
    out_absorbed[0] = absorbed
    return cp_ptr
