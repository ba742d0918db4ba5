"""Command-line front end: ``radchemo --config run.cfg``.

Config files hold one ``key = value`` per line with ``#`` comments. Keys and
defaults are listed by ``--print-effective-config``. Exit status is 0 on
success, 1 when an invariant or check fails and 2 for configuration errors;
failures also leave ``failure.json`` in the output directory.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .config import ConfigError, RunConfig, load_config, sweep_member
from .diagnostics import check_record
from .evolve import InvariantViolation, StepControl, run
from .grid import integrate
from .model import InitialData, InvalidInitialData
from .stationary import ConvergenceError, alpha_of_mass, stationary_v
from .writers import write_diagnostics, write_json, write_profile

log = logging.getLogger("radchemo")


class CheckFailed(RuntimeError):
    pass


def _initial_data(cfg: RunConfig, grid) -> InitialData:
    u0 = cfg.u0.sample(grid)
    v0 = cfg.v0.sample(grid, default_constant=cfg.v_star)
    return InitialData(u0, v0)


def _run_evolve(cfg: RunConfig, out: Path) -> dict:
    grid, params = cfg.grid(), cfg.params()
    data = _initial_data(cfg, grid)
    ctl = StepControl(cfg.dt_max, cfg.cfl, cfg.t_end, cfg.output_every)
    (out / "profiles").mkdir(parents=True, exist_ok=True)
    mass0 = integrate(grid, data.u0)
    v_bound = max(float(data.v0.max()), cfg.v_star)
    records = []

    def on_output(state, rec):
        records.append(rec)
        write_profile(out / "profiles" / f"{state.t:.6f}.csv",
                      {"r": grid.cell_centers, "u": state.u, "v": state.v})
        bad = check_record(rec, mass0, v_bound, grid.volume)
        if bad:
            raise InvariantViolation("; ".join(bad), state.t)

    try:
        traj = run(grid, data, params, ctl, taxis=cfg.taxis, keep_states=False, callback=on_output)
    finally:
        write_diagnostics(out / "diagnostics.csv", records)
    return {"mode": "evolve", "steps": traj.steps, "t_final": traj.final.t, "outputs": len(records)}


def _stationary_payload(res, trace: bool) -> dict:
    payload = res.to_dict()
    if trace:
        payload["bisection_trace"] = [[a, m] for a, m in res.trace]
    return payload


def _run_stationary(cfg: RunConfig, out: Path) -> dict:
    grid = cfg.grid()
    if cfg.mode == "mass-invert":
        res = alpha_of_mass(grid, cfg.mass, cfg.v_star, picard_tol=cfg.tol)
    else:
        res = stationary_v(grid, cfg.alpha, cfg.v_star, tol=cfg.tol, max_iter=cfg.max_iter)
    out.mkdir(parents=True, exist_ok=True)
    payload = _stationary_payload(res, cfg.mode == "mass-invert")
    write_json(out / "stationary.json", payload)
    tab = res.profile_table()
    write_profile(out / "profile.csv", {"r": tab[:, 0], "v": tab[:, 1], "u": tab[:, 2], "v_r": tab[:, 3]})
    if not all(payload["invariants"].values()):
        raise CheckFailed(f"stationary invariants failed: {payload['invariants']}")
    return {"mode": cfg.mode, "alpha": res.alpha, "mass": res.mass, "iterations": res.iterations}


def _run_verify(cfg: RunConfig, out: Path, seed: int) -> dict:
    from .verify import run_campaign

    checks = run_campaign(seed=seed, M=cfg.verify_M, profiles=cfg.verify_profiles)
    out.mkdir(parents=True, exist_ok=True)
    report = {"seed": seed, "checks": [c.as_dict() for c in checks]}
    write_json(out / "report.json", report)
    lines = [f"{'pass' if c.passed else 'FAIL'}  {c.name:<22} margin={c.margin:+.3e}  {c.detail}" for c in checks]
    (out / "report.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    for line in lines:
        print(line)
    failed = [c.name for c in checks if not c.passed]
    if failed:
        raise CheckFailed(f"verify checks failed: {', '.join(failed)}")
    return {"mode": "verify", "checks": len(checks)}


def _sweep_worker(args):
    member, seed = args
    return member.out, run_mode(member, seed=seed)


def _run_sweep(cfg: RunConfig, out: Path, seed: int, jobs: int) -> dict:
    members = [sweep_member(cfg, v) for v in cfg.sweep_values]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_worker, [(m, seed) for m in members]))
    else:
        results = [_sweep_worker((m, seed)) for m in members]
    out.mkdir(parents=True, exist_ok=True)
    summary = {"sweep_key": cfg.sweep_key, "runs": [{"out": o, "status": s} for o, s in results]}
    write_json(out / "sweep.json", summary)
    if any(s != 0 for _, s in results):
        raise CheckFailed("some sweep members failed")
    return {"mode": "sweep", "runs": len(results)}


def run_mode(cfg: RunConfig, seed: int = 0, jobs: int = 1) -> int:
    """Execute one configuration and write its artifacts; returns the exit status."""
    out = Path(cfg.out)
    try:
        if cfg.mode == "evolve":
            info = _run_evolve(cfg, out)
        elif cfg.mode in ("stationary", "mass-invert"):
            info = _run_stationary(cfg, out)
        elif cfg.mode == "verify":
            info = _run_verify(cfg, out, seed)
        else:
            info = _run_sweep(cfg, out, seed, jobs)
    except (InvariantViolation, ConvergenceError, CheckFailed, InvalidInitialData) as exc:
        report = {"status": "failed", "mode": cfg.mode, "error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, InvariantViolation):
            report["t"] = exc.t
        out.mkdir(parents=True, exist_ok=True)
        write_json(out / "failure.json", report)
        print(json.dumps(report), file=sys.stderr)
        return 1
    log.info("%s", info)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="radchemo",
        description=__doc__.split("\n\n")[0],
        epilog="Configuration keys and defaults:\n" + RunConfig().effective(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("--config", help="path to a key = value run file")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for sweep mode")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized verify campaigns")
    p.add_argument("--print-effective-config", action="store_true",
                   help="print the configuration with all defaults filled in and exit")
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--version", action="version", version=f"radchemo {__version__}")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config) if args.config else None
    except (ConfigError, OSError) as exc:
        print(json.dumps({"status": "config-error", "message": str(exc)}), file=sys.stderr)
        return 2
    if args.print_effective_config:
        sys.stdout.write((cfg or RunConfig()).effective())
        return 0
    if cfg is None:
        print("radchemo: --config is required", file=sys.stderr)
        return 2
    if args.jobs < 1:
        print("radchemo: --jobs must be >= 1", file=sys.stderr)
        return 2
    return run_mode(cfg, seed=args.seed, jobs=args.jobs)


if __name__ == "__main__":
    sys.exit(main())
