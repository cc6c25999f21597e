"""Figure builders, one per kind.

Every builder takes parsed inputs and returns a matplotlib figure; saving
is centralized so outputs carry no volatile metadata and re-rendering the
same inputs is byte-identical.
"""

from __future__ import annotations

import math

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .io import read_events, read_table

KINDS = ("trajectory", "exponent", "cdf-overlay", "stefan-profile",
         "stefan-compare", "schematic")


def save(fig, out_path):
    fig.savefig(out_path, dpi=110, metadata={"Software": None})
    plt.close(fig)


def render(kind, inputs, out_path, options=None):
    """Dispatch on figure kind; ``inputs`` is a list of file paths."""
    options = options or {}
    if kind not in KINDS:
        raise ValueError(f"unknown figure kind {kind!r}; choose from {KINDS}")
    builder = {
        "trajectory": trajectory_figure,
        "exponent": exponent_figure,
        "cdf-overlay": cdf_overlay_figure,
        "stefan-profile": stefan_profile_figure,
        "stefan-compare": stefan_compare_figure,
        "schematic": schematic_figure,
    }[kind]
    save(builder(inputs, **options), out_path)


def trajectory_figure(inputs, kappa=None):
    """Front paths with their jump structure, from hitting-time tables."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for path in inputs:
        tab = read_table(path, required=("level", "time"))
        finite = np.isfinite(tab["time"])
        ax.step(tab["time"][finite], tab["level"][finite], where="post",
                lw=1.2)
    if kappa is not None:
        tmax = ax.get_xlim()[1]
        ts = np.linspace(0, tmax, 200)
        ax.plot(ts, float(kappa) * np.sqrt(ts), "k--", lw=1.0,
                label=f"{kappa} sqrt(t)")
        ax.legend()
    ax.set_xlabel("t")
    ax.set_ylabel("front position")
    ax.set_title("front trajectory")
    return fig


def exponent_figure(inputs):
    """Log-log median growth from an ensemble table, slope annotated."""
    tab = read_table(inputs[0])
    t_cols = [c for c in tab if c.startswith("r_at_")]
    if not t_cols:
        raise ValueError("ensemble table has no r_at_* checkpoint columns")
    ts = np.array([float(c[len("r_at_"):]) for c in t_cols])
    order = np.argsort(ts)
    ts = ts[order]
    censored = tab.get("exploded", np.zeros_like(tab[t_cols[0]]))
    meds = []
    for i in order:
        vals = tab[t_cols[i]].astype(float)
        vals = np.where((vals < 0) & (censored > 0), np.inf, vals)
        meds.append(max(float(np.median(vals)), 1.0))
    meds = np.array(meds)
    slope, intercept = np.polyfit(np.log(ts), np.log(meds), 1)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.loglog(ts, meds, "o-", label="median front")
    ax.loglog(ts, np.exp(intercept) * ts ** slope, "k--",
              label=f"slope {slope:.3f}")
    ax.set_xlabel("T")
    ax.set_ylabel("median r(T)")
    ax.set_title("growth exponent")
    ax.legend()
    return fig


def cdf_overlay_figure(inputs, horizon=None):
    """Empirical CDFs: rescaled ensemble fronts vs sampled limit values."""
    ens = read_table(inputs[0], required=("final_front",))
    lim = read_table(inputs[1], required=("front_value",))
    final = ens["final_front"].astype(float)
    if "exploded" in ens:
        final = np.where(ens["exploded"] > 0, np.inf, final)
    if horizon is None:
        raise ValueError("cdf-overlay needs the ensemble horizon")
    rescaled = final / float(horizon) ** (2.0 / 3.0)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for vals, label in ((rescaled, "rescaled particle fronts"),
                        (lim["front_value"], "limit samples")):
        vals = np.sort(vals[np.isfinite(vals)])
        ax.step(vals, np.arange(1, len(vals) + 1) / len(vals), where="post",
                label=label)
    ax.set_xlabel("value")
    ax.set_ylabel("empirical CDF")
    ax.set_title("rescaled front vs limit law")
    ax.legend()
    return fig


def stefan_profile_figure(inputs):
    tab = read_table(inputs[0], required=("t", "xi", "u"))
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for t in np.unique(tab["t"]):
        sel = tab["t"] == t
        ax.plot(tab["xi"][sel], tab["u"][sel], label=f"t={t:g}")
    ax.set_xlabel("xi")
    ax.set_ylabel("u(t, xi)")
    ax.set_title("density profile ahead of the front")
    ax.legend()
    return fig


def stefan_compare_figure(inputs, kappa=None):
    """Subcritical checkpoint trajectory against the square-root law."""
    tab = read_table(inputs[0], required=("t", "r"))
    if kappa is None:
        raise ValueError("stefan-compare needs --kappa")
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.step(tab["t"], tab["r"], where="post", label="front")
    ts = np.linspace(0, tab["t"].max(), 300)
    ax.plot(ts, float(kappa) * np.sqrt(ts), "k--",
            label=f"{float(kappa):.4g} sqrt(t)")
    ax.set_xlabel("t")
    ax.set_ylabel("position")
    ax.set_title("subcritical front vs continuum law")
    ax.legend()
    return fig


def schematic_figure(inputs, max_events=400):
    """Event-level schematic: worldlines, front staircase, absorptions."""
    events = read_events(inputs[0], limit=int(max_events))
    fig, ax = plt.subplots(figsize=(7, 5))
    last_pos = {}
    for e in events:
        t, pid = e["t"], e["pid"]
        t0, x0 = last_pos.get(pid, (0.0, e["from"]))
        ax.plot([t0, t, t], [x0, x0, e["to"]], color="C0", lw=0.5, alpha=0.6)
        last_pos[pid] = (t, e["to"])
    ts = [0.0] + [e["t"] for e in events]
    rs = [0] + [e["r"] for e in events]
    ax.step(ts, rs, where="post", color="C3", lw=1.8, label="front")
    trig = [(e["t"], e["to"]) for e in events if e["type"] == "front"]
    if trig:
        ax.plot([t for t, _ in trig], [x for _, x in trig], "x", color="C3",
                ms=7, label="absorption")
    ax.set_xlabel("t")
    ax.set_ylabel("site")
    ax.set_title("walkers and the advancing front")
    ax.legend(loc="upper left")
    return fig
