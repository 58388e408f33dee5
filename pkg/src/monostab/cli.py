"""Command line harness.

    monostab run   --config <path>
    monostab check --suite <name> --seed <n> --out <dir>
    monostab mask  --geometry <path> --out <csv>

Exit codes: 0 success, 1 property violation, 2 configuration error,
3 solver failure. MONOSTAB_THREADS caps numeric thread pools (default 1);
it is applied before the numeric modules are imported, which is why the
heavy imports live inside the command handlers.
"""

import argparse
import os
import sys
import time


def _cap_threads():
    cap = os.environ.get("MONOSTAB_THREADS", "1")
    for var in (
        "OMP_NUM_THREADS",
        "OPENBLAS_NUM_THREADS",
        "MKL_NUM_THREADS",
        "NUMEXPR_NUM_THREADS",
    ):
        os.environ.setdefault(var, cap)


def _build_experiment(cfg):
    from .models import (
        build_fd2,
        build_heat,
        build_wave,
        fd2_initial_state,
        heat_initial_state,
        wave_initial_state,
    )
    from .system import ClosedLoopOperator

    if cfg.experiment == "fd2":
        sys_, eq, F = build_fd2(cfg.fd2)
        x0 = fd2_initial_state(cfg.fd2)
    elif cfg.experiment == "heat":
        sys_, eq, F = build_heat(cfg.heat)
        x0 = heat_initial_state(sys_.internals.grid, cfg.heat_x0_amplitude)
    else:
        sys_, eq, F = build_wave(cfg.wave_geometry, cfg.n)
        x0 = wave_initial_state(
            sys_.internals.grid, cfg.wave_geometry, cfg.wave_init_amplitude, cfg.wave_init_sigma
        )
    return ClosedLoopOperator(sys_, F, eq), x0


def _snapshot_writer(cl, out_dir):
    from .spaces import DenseVector, GridField, WaveState, grid_field_to_csv

    def write(t, x):
        tag = str(float(t))
        state_path = os.path.join(out_dir, f"snapshot_t{tag}.csv")
        if isinstance(x, DenseVector):
            with open(state_path, "w", newline="") as fh:
                fh.write("index,value\n")
                for k, v in enumerate(x.entries):
                    fh.write(f"{k},{v:.17g}\n")
            return
        field = x.displacement if isinstance(x, WaveState) else x
        grid_field_to_csv(field, state_path)
        control = cl.feedback_at(x)
        if isinstance(control, GridField):
            grid_field_to_csv(control, os.path.join(out_dir, f"snapshot_control_t{tag}.csv"))

    return write


def _cmd_run(args):
    from .config import load_config
    from .stepping import StepScheme, simulate

    cfg = load_config(args.config)
    os.makedirs(cfg.out_dir, exist_ok=True)
    started = time.perf_counter()
    cl, x0 = _build_experiment(cfg)
    scheme = StepScheme(
        cfg.scheme,
        cfg.dt,
        tol=cfg.solver_tol,
        max_iter=cfg.solver_max_iter,
        damping=cfg.solver_damping,
        corrections=cfg.solver_corrections,
    )
    traj, _ = simulate(
        scheme,
        cl,
        x0,
        cfg.horizon,
        cfg.sample_every,
        snapshot_times=cfg.snapshot_times,
        on_snapshot=_snapshot_writer(cl, cfg.out_dir),
    )
    traj.to_csv(os.path.join(cfg.out_dir, "trajectory.csv"))
    wall = time.perf_counter() - started
    with open(os.path.join(cfg.out_dir, "summary.csv"), "w", newline="") as fh:
        fh.write("final_dist_to_eq,min_feasibility_margin,wall_time_s,status\n")
        fh.write(
            f"{traj.dist_to_eq[-1]:.17g},{min(traj.feasibility_margin):.17g},"
            f"{wall:.3f},{traj.status}\n"
        )
    if traj.status != "ok":
        print(f"run truncated: {traj.error}", file=sys.stderr)
        return 3
    print(
        f"{cfg.experiment}: {len(traj.times)} samples to t={traj.times[-1]:g}, "
        f"final dist_to_eq={traj.dist_to_eq[-1]:.3e}, outputs in {cfg.out_dir}"
    )
    return 0


def _cmd_check(args):
    from .checks import run_suite, write_report

    rows = run_suite(args.suite, args.seed)
    os.makedirs(args.out, exist_ok=True)
    report = os.path.join(args.out, "report.csv")
    write_report(rows, report)
    failures = 0
    for r in rows:
        verdict = "PASS" if r.passed else "FAIL"
        print(f"{r.check}/{r.system}/{r.statistic}: {r.value:.6g} {verdict}")
        failures += 0 if r.passed else 1
    print(f"{len(rows)} checks, {failures} failures; report at {report}")
    return 0 if failures == 0 else 1


def _cmd_mask(args):
    from .config import load_geometry_config
    from .geometry import control_region_mask, dogbone_grid, mask_to_csv

    geom, n = load_geometry_config(args.geometry)
    grid = dogbone_grid(geom, n)
    control = control_region_mask(geom, grid)
    out_dir = os.path.dirname(os.path.abspath(args.out))
    os.makedirs(out_dir, exist_ok=True)
    mask_to_csv(grid, control, args.out)
    print(f"mask with {int(grid.interior.sum())} interior nodes written to {args.out}")
    return 0


def main(argv=None):
    _cap_threads()
    parser = argparse.ArgumentParser(
        prog="monostab",
        description="saturated output feedback experiments and property checks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one experiment from a config file")
    run_p.add_argument("--config", required=True, help="flat key = value config file")

    check_p = sub.add_parser("check", help="run seeded property suites")
    check_p.add_argument(
        "--suite",
        default="all",
        choices=["projection", "monotone", "resolvent", "lyapunov", "geometry", "coercivity", "all"],
    )
    check_p.add_argument("--seed", type=int, default=0)
    check_p.add_argument("--out", default="out")

    mask_p = sub.add_parser("mask", help="export the dogbone domain/control masks")
    mask_p.add_argument("--geometry", default=None, help="geometry config (defaults when omitted)")
    mask_p.add_argument("--out", required=True, help="destination CSV")

    args = parser.parse_args(argv)

    from .errors import ConfigError, ConvergenceError, GeometryError, UsageError

    handlers = {"run": _cmd_run, "check": _cmd_check, "mask": _cmd_mask}
    try:
        return handlers[args.command](args)
    except (ConfigError, GeometryError, UsageError, FileNotFoundError) as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return 2
    except ConvergenceError as err:
        print(f"solver failure: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
