"""Command-line frontend.

Subcommands: simulate, ensemble, limit-sample, stefan, experiment,
regime-check.  Tables are CSV with a schema comment line, event logs are
JSONL, summaries are JSON with the resolved configuration echoed for
reproducibility.  Output files are written atomically and never
overwritten without --force.  Exit codes: 0 success (explosions are
results, not failures), 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

import numpy as np

SCHEMA = "frontlab-1"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _atomic_write(path, text, force):
    if os.path.exists(path) and not force:
        raise FileExistsError(f"{path} exists; pass --force to overwrite")
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".frontlab-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(kind, header, rows):
    lines = [f"# schema={SCHEMA} kind={kind}", ",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isinf(v):
            return "+inf" if v > 0 else "-inf"
        return repr(v)
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


def _json_text(payload):
    payload = dict(payload)
    payload["schema"] = SCHEMA
    return json.dumps(payload, indent=2, sort_keys=True, default=_jsonable) + "\n"


def _jsonable(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(f"not serializable: {type(v)}")


def _parse_ic_spec(spec: str):
    """'family:key=val,key=val' -> (kind, params)."""
    if ":" in spec:
        kind, rest = spec.split(":", 1)
        params = {}
        for item in rest.split(","):
            if not item:
                continue
            key, val = item.split("=", 1)
            params[key.strip()] = val.strip()
    else:
        kind, params = spec, {}
    return kind.strip(), params


def _build_ic(spec: str, window: int, seed: int):
    from . import initcond

    kind, params = _parse_ic_spec(spec)
    if kind in ("geometric", "poisson", "bernoulli-mixture"):
        mean = float(params.get("mean", 1.0))
        return initcond.generate_iid(kind, mean, window, seed=seed)
    if kind == "sine":
        return initcond.generate_sine(float(params["eps"]),
                                      float(params["gamma"]), window)
    if kind == "csv":
        return initcond.InitialCondition.from_csv(params["path"])
    raise ValueError(f"unknown initial condition spec {spec!r}")


def _traj_for_mode(mode: str):
    from .simulate import TrajectorySpec

    if mode == "frictionless":
        return TrajectorySpec.frictionless()
    if mode == "mdla":
        return TrajectorySpec.mdla()
    if mode == "mdla-jumper":
        return TrajectorySpec.mdla(absorb="jumper")
    if mode == "pushed":
        return TrajectorySpec.pushed()
    raise ValueError(f"unknown mode {mode!r}")


def _parse_floats(text):
    return [float(x) for x in text.split(",") if x]


# -- subcommands --------------------------------------------------------------


def _cmd_simulate(args):
    from . import initcond, simulate

    window = args.window or initcond.suggest_window(
        args.horizon, 3.0 * args.horizon ** (2.0 / 3.0))
    ic = _build_ic(args.ic, window, args.ic_seed if args.ic_seed is not None else args.seed)
    cps = _parse_floats(args.checkpoints) if args.checkpoints else \
        list(np.linspace(args.horizon / 20.0, args.horizon, 20))
    mode = args.mode
    want_full = mode in ("frictionless", "mdla")
    res = simulate.run(ic, _traj_for_mode(mode), args.horizon, args.seed,
                       checkpoints=cps,
                       snapshots="full" if want_full else "light",
                       log_events=args.events is not None)
    rows = [(s.time, s.boundary, s.absorbed, s.fluctuation, s.noise,
             s.boundary_layer) for s in res.snapshots]
    _atomic_write(args.out,
                  _csv_text("checkpoints", ["t", "r", "N", "F", "M", "G"], rows),
                  args.force)
    if args.hit_out:
        if res.hitting is None:
            raise RuntimeError("no hitting-time path for this run")
        hit_rows = list(zip(res.hitting.breakpoints, res.hitting.values))
        _atomic_write(args.hit_out,
                      _csv_text("hitting", ["level", "time"], hit_rows), args.force)
    if args.events:
        lines = [json.dumps({"t": e.t, "type": e.type, "pid": e.pid,
                             "from": e.src, "to": e.dst, "k": e.k,
                             "r": e.r, "N": e.n}) for e in res.events]
        _atomic_write(args.events,
                      f'# schema={SCHEMA} kind=events\n' + "\n".join(lines) + "\n",
                      args.force)
    if res.exploded:
        print(f"explosion at t={res.explosion_time:.6g} (front window exit)")
    print(f"final front {res.final_front}, absorbed {res.final_absorbed}")
    return 0


def _cmd_ensemble(args):
    from . import experiments

    cfg = experiments.EnsembleConfig(
        n_runs=args.runs, horizon=args.horizon, window=args.window,
        master_seed=args.master_seed, mode=args.mode,
        ic_kind="sine" if args.ic.startswith("sine") else "iid",
        family=_parse_ic_spec(args.ic)[0],
        mean=float(_parse_ic_spec(args.ic)[1].get("mean", 1.0)),
        eps=float(_parse_ic_spec(args.ic)[1].get("eps", 0.0)),
        gamma=float(_parse_ic_spec(args.ic)[1].get("gamma", 0.0)),
        checkpoints=tuple(_parse_floats(args.checkpoints)) if args.checkpoints else (),
        stop_on_explosion=args.keep_explosions)
    res = experiments.run_ensemble(cfg)
    header = (["run", "resizes", "exploded", "explosion_time", "final_front"]
              + [f"r_at_{t:g}" for t in res.checkpoints])
    rows = []
    for i in range(cfg.n_runs):
        rows.append([i, int(res.resizes[i]), int(res.exploded[i]),
                     float(res.explosion_time[i]) if res.exploded[i] else math.nan,
                     int(res.final_front[i])]
                    + [int(v) for v in res.fronts[i]])
    _atomic_write(args.out, _csv_text("ensemble", header, rows), args.force)
    summary = {"config": {k: (list(v) if isinstance(v, tuple) else v)
                          for k, v in vars(cfg).items()},
               "master_seed": cfg.master_seed,
               "n_exploded": int(res.exploded.sum()),
               "median_final_front": float(np.median(
                   np.where(res.exploded, np.inf, res.final_front)))}
    if (cfg.n_runs >= 100 and len(res.checkpoints) >= 3
            and res.checkpoints[-1] / res.checkpoints[0] >= 99):
        fit = experiments.exponent_fit(res)
        summary["exponent"] = {"alpha": fit.alpha, "ci": [fit.ci_low, fit.ci_high]}
    if args.summary:
        _atomic_write(args.summary, _json_text(summary), args.force)
    print(json.dumps(summary, default=_jsonable))
    return 0


def _cmd_limit_sample(args):
    from . import limitlaw

    vals = limitlaw.sample_front_values(args.sigma, args.horizon, args.n,
                                        seed=args.seed, dxi=args.dxi)
    _atomic_write(args.out,
                  _csv_text("limit-samples", ["front_value"],
                            [(float(v),) for v in vals]), args.force)
    print(f"wrote {args.n} samples, median {np.median(vals):.6g}")
    return 0


def _cmd_stefan(args):
    from . import stefan

    if args.kappa_table:
        rhos = _parse_floats(args.kappa_table)
        rows = [(r, stefan.solve_kappa(r)) for r in rhos]
        _atomic_write(args.out, _csv_text("kappa", ["rho", "kappa"], rows),
                      args.force)
        print("\n".join(f"rho={r:g} kappa={k:.12g}" for r, k in rows))
        return 0
    sol = stefan.StefanSolution.solve(args.rho)
    print(f"kappa = {sol.kappa:.12g}")
    rows = []
    for t in _parse_floats(args.times):
        for xi, u in sol.profile_table(t, n=args.profile_points):
            rows.append((t, xi, u))
    if args.out:
        _atomic_write(args.out, _csv_text("stefan-profile", ["t", "xi", "u"], rows),
                      args.force)
    return 0


def _cmd_regime_check(args):
    from .experiments import RegimeSpec

    reg = RegimeSpec(eps=args.eps, a=args.a, gamma=args.gamma,
                     gamma_prime=args.gamma_prime)
    report = {"eps": args.eps, "a": args.a, "gamma": args.gamma,
              "gamma_prime": args.gamma_prime}
    if args.point:
        t0, x0, v = _parse_floats(args.point)
        fails = reg.sigma_failures(t0, int(x0), v)
        report["point"] = [t0, x0, v]
        report["in_sigma"] = not fails
        report["in_sigma_tilde"] = reg.in_sigma_tilde(t0, int(x0), v)
        report["failures"] = fails
    if args.txpoint:
        t, x = _parse_floats(args.txpoint)
        report["txpoint"] = [t, x]
        report["in_bulk_region"] = reg.in_bulk_region(t, int(x))
    print(json.dumps(report, indent=2))
    if args.out:
        _atomic_write(args.out, _json_text(report), args.force)
    return 0


def _load_toml(path):
    try:
        import tomllib
    except ImportError:
        import tomli as tomllib
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _cmd_experiment(args):
    from . import experiments, limitlaw

    cfg = _load_toml(args.config)
    kind = cfg.get("kind")
    out_dir = args.out_dir or cfg.get("out_dir", ".")
    os.makedirs(out_dir, exist_ok=True)
    master = int(cfg.get("master_seed", 0))
    summary = {"kind": kind, "config": cfg, "master_seed": master}

    if kind == "boundary-layer":
        reg = experiments.RegimeSpec(eps=cfg["eps"], a=cfg["a"],
                                     gamma=cfg["gamma"],
                                     gamma_prime=cfg["gamma_prime"])
        rep = experiments.boundary_layer_experiment(
            cfg.get("family", "geometric"), cfg.get("mean", 1.0),
            cfg["t0"], int(cfg["x0"]), cfg["v"], int(cfg["runs"]), reg,
            master_seed=master, include_plain=cfg.get("include_plain", False))
        summary["result"] = {k: getattr(rep, k) for k in
                             ("mean_upper", "se_upper", "mean_lower", "se_lower",
                              "target", "pathwise_ordered", "n_runs")}
    elif kind == "limit-compare":
        samples = limitlaw.sample_front_values(
            cfg["sigma"], cfg.get("limit_horizon", 1.0),
            int(cfg["limit_samples"]), seed=master)
        ens = experiments.run_ensemble(experiments.EnsembleConfig(
            n_runs=int(cfg["runs"]), horizon=cfg["horizon"],
            window=int(cfg["window"]), master_seed=master,
            family=cfg.get("family", "geometric"), mean=cfg.get("mean", 1.0)))
        final = np.where(ens.exploded, np.inf, ens.final_front.astype(float))
        test = experiments.limit_distribution_test(final, cfg["horizon"], samples)
        summary["result"] = {"ks": test.ks_statistic, "n_front": test.n_front,
                             "n_limit": test.n_limit}
    elif kind in ("exponent", "phase"):
        ens = experiments.run_ensemble(experiments.EnsembleConfig(
            n_runs=int(cfg["runs"]), horizon=cfg["horizon"],
            window=int(cfg["window"]), master_seed=master,
            mode=cfg.get("mode", "frictionless"),
            family=cfg.get("family", "geometric"), mean=cfg.get("mean", 1.0),
            checkpoints=tuple(cfg.get("checkpoints", ())),
            stop_on_explosion=bool(cfg.get("keep_explosions", False))))
        if kind == "exponent":
            fit = experiments.exponent_fit(ens, seed=master)
            summary["result"] = {"alpha": fit.alpha,
                                 "ci": [fit.ci_low, fit.ci_high],
                                 "n_runs": fit.n_runs}
        else:
            rep = experiments.phase_report(cfg.get("mean", 1.0), ens,
                                           eps=cfg.get("eps"))
            detail = {k: v for k, v in rep.detail.items() if k != "times"}
            summary["result"] = {"phase": rep.kind, **detail}
    elif kind == "ansatz":
        from . import initcond as ic_mod

        def builder(run):
            if cfg.get("ic_kind", "iid") == "sine":
                return ic_mod.generate_sine(cfg["eps"], cfg["gamma"],
                                            int(cfg["window"]))
            return ic_mod.generate_iid(
                cfg.get("family", "geometric"), cfg.get("mean", 1.0),
                int(cfg["window"]),
                seed=experiments.derive_seed(master, run, 0))
        rep = experiments.ansatz_check(builder, cfg["horizon"],
                                       int(cfg["runs"]), master,
                                       probe_t=cfg["probe_t"],
                                       probe_x=int(cfg["probe_x"]))
        summary["result"] = {k: getattr(rep, k) for k in
                             ("slope", "n_increments", "noise_mean",
                              "noise_target", "noise_se")}
    else:
        raise ValueError(f"unknown experiment kind {kind!r}")

    path = os.path.join(out_dir, f"{kind}.json")
    _atomic_write(path, _json_text(summary), args.force)
    print(json.dumps(summary["result"], default=_jsonable))
    return 0


# -- argument wiring ----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="frontlab",
                description="Monte Carlo laboratory for a randomly-driven front")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="single run with checkpoint table")
    s.add_argument("--config", default=None,
                   help="TOML file whose keys override same-named flags")
    s.add_argument("--ic", required=True,
                   help="e.g. geometric:mean=1, poisson:mean=0.5, "
                        "sine:eps=0.02,gamma=0.5, csv:path=ic.csv")
    s.add_argument("--mode", default="frictionless",
                   choices=["frictionless", "mdla", "mdla-jumper", "pushed"])
    s.add_argument("--horizon", type=float, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--ic-seed", type=int, default=None)
    s.add_argument("--window", type=int, default=None)
    s.add_argument("--checkpoints", default=None, help="comma-separated times")
    s.add_argument("--out", required=True)
    s.add_argument("--hit-out", default=None)
    s.add_argument("--events", default=None, help="JSONL event log path")
    s.add_argument("--force", action="store_true")
    s.set_defaults(func=_cmd_simulate)

    e = sub.add_parser("ensemble", help="independent runs, merged by index")
    e.add_argument("--config", default=None,
                   help="TOML file whose keys override same-named flags")
    e.add_argument("--ic", required=True)
    e.add_argument("--mode", default="frictionless",
                   choices=["frictionless", "mdla", "pushed"])
    e.add_argument("--horizon", type=float, required=True)
    e.add_argument("--runs", type=int, required=True)
    e.add_argument("--window", type=int, required=True)
    e.add_argument("--master-seed", type=int, required=True)
    e.add_argument("--checkpoints", default=None)
    e.add_argument("--keep-explosions", action="store_true",
                   help="record window exits instead of retrying wider")
    e.add_argument("--out", required=True)
    e.add_argument("--summary", default=None)
    e.add_argument("--force", action="store_true")
    e.set_defaults(func=_cmd_ensemble)

    l = sub.add_parser("limit-sample", help="sample the limiting front value")
    l.add_argument("--sigma", type=float, required=True)
    l.add_argument("--n", type=int, required=True)
    l.add_argument("--horizon", type=float, default=1.0)
    l.add_argument("--seed", type=int, required=True)
    l.add_argument("--dxi", type=float, default=2e-3)
    l.add_argument("--out", required=True)
    l.add_argument("--force", action="store_true")
    l.set_defaults(func=_cmd_limit_sample)

    st = sub.add_parser("stefan", help="subcritical reference solution")
    st.add_argument("--rho", type=float, default=0.5)
    st.add_argument("--times", default="0.5,1,4")
    st.add_argument("--profile-points", type=int, default=100)
    st.add_argument("--kappa-table", default=None,
                    help="comma-separated densities; writes a kappa table")
    st.add_argument("--out", default=None)
    st.add_argument("--force", action="store_true")
    st.set_defaults(func=_cmd_stefan)

    x = sub.add_parser("experiment", help="run a configured experiment")
    x.add_argument("--config", required=True, help="TOML config file")
    x.add_argument("--out-dir", default=None)
    x.add_argument("--force", action="store_true")
    x.set_defaults(func=_cmd_experiment)

    r = sub.add_parser("regime-check", help="admissible-region membership")
    r.add_argument("--eps", type=float, required=True)
    r.add_argument("--a", type=float, required=True)
    r.add_argument("--gamma", type=float, required=True)
    r.add_argument("--gamma-prime", type=float, required=True)
    r.add_argument("--point", default=None, help="t0,x0,v")
    r.add_argument("--txpoint", default=None, help="t,x")
    r.add_argument("--out", default=None)
    r.add_argument("--force", action="store_true")
    r.set_defaults(func=_cmd_regime_check)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, FileExistsError, FileNotFoundError) as exc:
        print(f"frontlab: error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"frontlab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
