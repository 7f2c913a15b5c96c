"""dodcut command line: mesh census, runs, sweeps, checks, decay experiment.

All outputs are CSV with stable headers; exit code 0 means every enabled
check passed.
"""

from __future__ import annotations

import argparse
import os
import sys as _sys

import numpy as np

from .config import parse_config
from .harness import DECAY_TOL, converge, decay_experiment, overshoot_excess
from .mesh import BOUNDARY
from .scheme import ProblemConfig, SimulationBlowup, run, time_step_size
from .stabilization import build_stabilization, quadratic_form_check, verify_weights


def _load_config(args) -> ProblemConfig:
    if args.config:
        return parse_config(args.config)
    return ProblemConfig()


def _outpath(args, name: str) -> str:
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def cmd_mesh(args) -> int:
    cfg = _load_config(args)
    mesh = cfg.build_mesh()
    stab = set(mesh.stabilized)
    cells_path = _outpath(args, "mesh_cells.csv")
    with open(cells_path, "w") as fh:
        fh.write("id,i,j,side,area,volume_fraction,stabilized\n")
        for c in mesh.cells:
            vf = c.area / (mesh.h * mesh.h)
            fh.write(f"{c.id},{c.i},{c.j},{c.side},{c.area:.12e},{vf:.12e},{int(c.id in stab)}\n")
    faces_path = _outpath(args, "mesh_faces.csv")
    with open(faces_path, "w") as fh:
        fh.write("id,kind,length,nx,ny,inner,outer\n")
        for f in mesh.faces:
            outer = "BOUNDARY" if f.outer == BOUNDARY else f.outer
            fh.write(f"{f.id},{f.kind},{f.length:.12e},{f.normal[0]:.12g},"
                     f"{f.normal[1]:.12g},{f.inner},{outer}\n")
    print(f"{mesh.n_cells} cells ({len(mesh.stabilized)} stabilized), "
          f"{len(mesh.faces)} faces -> {cells_path}, {faces_path}")
    return 0


def _write_report(report, args) -> None:
    rp = _outpath(args, "report.csv")
    with open(rp, "w") as fh:
        fh.write("step,t,l2_norm,w_min,w_max\n")
        for k in range(len(report.times)):
            fh.write(f"{k},{report.times[k]:.12g},{report.l2_series[k]:.12e},"
                     f"{report.w_min_series[k]:.12e},{report.w_max_series[k]:.12e}\n")
    sp = _outpath(args, "summary.csv")
    with open(sp, "w") as fh:
        fh.write("N,dt,steps,L1,Linf\n")
        fh.write(f"{report.n},{report.dt:.12g},{report.n_steps},"
                 f"{report.l1:.12e},{report.linf:.12e}\n")


def cmd_run(args) -> int:
    cfg = _load_config(args)
    try:
        report = run(cfg)
    except SimulationBlowup as exc:
        _write_report(exc.report, args)
        print(f"ABORT: {exc}", file=_sys.stderr)
        return 1
    _write_report(report, args)
    print(f"N={report.n} dt={report.dt:.6g} steps={report.n_steps} "
          f"L1={report.l1:.6e} Linf={report.linf:.6e} "
          f"overshoot={overshoot_excess(report):.3e}")
    return 0


def cmd_converge(args) -> int:
    cfg = _load_config(args)
    n_list = args.N if args.N else [20, 40, 80, 160]
    table = converge(cfg, n_list)
    path = _outpath(args, "convergence.csv")
    table.write_csv(path)
    for line in table.csv_lines():
        print(line)
    return 0


def cmd_check(args) -> int:
    cfg = _load_config(args)
    mesh = cfg.build_mesh()
    sys_ = cfg.system()
    dt = time_step_size(cfg)
    stab = build_stabilization(mesh, sys_, mode=cfg.eta_mode, dt=dt,
                               value=cfg.eta_value, verify=False)
    rows = verify_weights(mesh, sys_, stab)
    lines = ["cell_id,eq8_err,eq9_err,sym_err,min_eig,eta"]
    ok = True
    for d in rows:
        ok = ok and d.ok()
        lines.append(f"{d.cell},{d.eq8_err:.3e},{d.eq9_err:.3e},"
                     f"{d.sym_err:.3e},{d.min_eig:.3e},{d.eta:.6f}")
    trials = args.trials
    ray = quadratic_form_check(mesh, sys_, stab if cfg.stabilize else [],
                               trials=trials, seed=cfg.seed)
    ok = ok and ray >= -1e-10
    lines.append("")
    lines.append("trials,min_rayleigh")
    lines.append(f"{trials},{ray:.6e}")
    text = "\n".join(lines) + "\n"
    print(text, end="")
    if args.out:
        with open(_outpath(args, "check.csv"), "w") as fh:
            fh.write(text)
    return 0 if ok else 1


def cmd_decay(args) -> int:
    cfg = _load_config(args)
    try:
        rep = decay_experiment(cfg)
    except SimulationBlowup as exc:
        print(f"ABORT: {exc}", file=_sys.stderr)
        return 1
    rep.write_csv(_outpath(args, "decay.csv"))
    print(f"steps={rep.n_steps} max_step_increase={rep.max_step_increase:.6e}")
    return 0 if rep.monotone(DECAY_TOL) else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="dodcut",
        description="Upwind solver for linear hyperbolic systems on cut-cell meshes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key=value configuration file")
        p.add_argument("--out", default=".", help="output directory for CSV files")

    p_mesh = sub.add_parser("mesh", help="write the cell/face census")
    common(p_mesh)
    p_run = sub.add_parser("run", help="single simulation, report + summary CSV")
    common(p_run)
    p_conv = sub.add_parser("converge", help="refinement sweep")
    common(p_conv)
    p_conv.add_argument("--N", type=int, nargs="+", help="resolutions (default 20 40 80 160)")
    p_check = sub.add_parser("check", help="weight conditions and energy-form check")
    common(p_check)
    p_check.add_argument("--trials", type=int, default=1000)
    p_decay = sub.add_parser("decay", help="L2 norm decay experiment")
    common(p_decay)

    args = parser.parse_args(argv)
    handlers = {
        "mesh": cmd_mesh,
        "run": cmd_run,
        "converge": cmd_converge,
        "check": cmd_check,
        "decay": cmd_decay,
    }
    try:
        return handlers[args.command](args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
