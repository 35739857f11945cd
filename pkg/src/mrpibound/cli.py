"""Command-line front end.

Subcommands::

    mrpibound bound --gamma G --rw R (--n N | --epsilon EPS)
    mrpibound exp1 | exp2 | exp3 | exp4 [options]

Options resolve in order: command-line flag, then ``--config FILE`` (flat
``key = value`` lines, keys spelled like the flags with ``_``), then the
built-in default. Every experiment writes ``manifest.txt`` with the fully
resolved configuration next to its CSV and SVG outputs.

Exit codes: 0 success, 2 usage error, 3 invariant violation.
"""

import argparse
import math
import sys
import time
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__, svg
from .bound import n_min, tail_bound
from .exceptions import MrpiError, NotContractive
from .mrpi import error_curve, fit_decay_slope, random_normal_schur_matrix, random_schur_matrix
from .norms import (
    QuadraticNorm,
    diagonal_scaling_search,
    disturbance_radius,
    induced_norm,
    log_spaced_diagonal_grid,
    lyapunov_norm,
)
from .sets import Box, sample_unit_directions
from .tubempc import (
    Method,
    MpcConfig,
    design_tube,
    dlqr,
    double_integrator,
    feasible_set_report,
    simulate_closed_loop,
    trajectories_to_csv,
)

EXIT_USAGE = 2
EXIT_INVARIANT = 3

DIAGONAL_GRIDS = {
    "coarse": dict(exponents=(-2, -1, 0, 1, 2), base=3.0),
    "fine": dict(exponents=tuple(range(-4, 5)), base=2.0),
    "wide": dict(exponents=tuple(range(-4, 5)), base=3.0),
}


class UsageError(Exception):
    pass


class InvariantViolation(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    seed: int = 0
    dims: tuple = (6,)
    n_max: int = 30
    dir_count: int = 2000
    k_ref: int = 200
    epsilon: float = 1e-3
    exponent_convention: str = "N"
    norm_choice: str = "lyapunov"
    system: str = "random"
    w_half_width: float = 0.1
    steps: int = 50
    rollouts: int = 100
    horizon: int = 10
    output_dir: str = ""

    def manifest(self):
        lines = [f"version = {__version__}"]
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                value = ",".join(str(v) for v in value)
            lines.append(f"{f.name} = {value}")
        return "\n".join(lines) + "\n"


EXPERIMENT_DEFAULTS = {
    "exp1": dict(dims=(6,), n_max=30, w_half_width=0.1),
    "exp2": dict(dims=(6,), n_max=30, w_half_width=0.1),
    "exp3": dict(dims=(10, 15, 20), n_max=20, w_half_width=0.1),
    "exp4": dict(dims=(2,), n_max=0, w_half_width=0.05),
}


def read_config_file(path):
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def _coerce(name, raw):
    target = RunConfig.__dataclass_fields__[name].default
    try:
        if isinstance(target, tuple):
            if isinstance(raw, (list, tuple)):
                return tuple(int(v) for v in raw)
            return tuple(int(v) for v in str(raw).split(","))
        if isinstance(target, bool):
            return str(raw).lower() in ("1", "true", "yes")
        return type(target)(raw)
    except ValueError as exc:
        raise UsageError(f"invalid value for {name}: {raw!r}") from exc


def resolve_config(args):
    file_values = read_config_file(args.config) if getattr(args, "config", None) else {}
    # A manifest from an earlier run doubles as a config file.
    file_values.pop("version", None)
    recorded = file_values.pop("subcommand", args.command)
    if recorded != args.command:
        raise UsageError(f"config was written for {recorded!r}, not {args.command!r}")
    unknown = set(file_values) - set(RunConfig.__dataclass_fields__)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    base = dict(EXPERIMENT_DEFAULTS[args.command])
    base["output_dir"] = f"runs/{args.command}"
    for f in fields(RunConfig):
        if f.name == "subcommand":
            continue
        cli_value = getattr(args, f.name, None)
        if cli_value is not None:
            base[f.name] = _coerce(f.name, cli_value)
        elif f.name in file_values:
            base[f.name] = _coerce(f.name, file_values[f.name])
    cfg = RunConfig(subcommand=args.command, **base)
    if cfg.exponent_convention not in ("N", "N+1"):
        raise UsageError("exponent convention must be N or N+1")
    if cfg.dir_count < 1 or cfg.k_ref < 1 or cfg.epsilon <= 0:
        raise UsageError("dir_count and k_ref must be positive, epsilon > 0")
    _ = parse_norm_choice(cfg.norm_choice)
    return cfg


def parse_norm_choice(choice):
    if choice in ("euclidean", "lyapunov"):
        return choice, None
    if choice.startswith("lyapunov@"):
        try:
            rate = float(choice.split("@", 1)[1])
        except ValueError as exc:
            raise UsageError(f"bad Lyapunov rate in {choice!r}") from exc
        return "lyapunov", rate
    if choice.startswith("diag:"):
        grid_id = choice.split(":", 1)[1]
        if grid_id not in DIAGONAL_GRIDS:
            raise UsageError(f"unknown diagonal grid {grid_id!r}; choose from {sorted(DIAGONAL_GRIDS)}")
        return "diag", grid_id
    raise UsageError(f"unknown norm {choice!r}; use euclidean, lyapunov, lyapunov@<rate> or diag:<grid-id>")


def build_norm(A, choice, seed=0):
    kind, grid_id = parse_norm_choice(choice)
    dim = A.shape[0]
    if kind == "euclidean":
        return QuadraticNorm.euclidean(dim)
    if kind == "lyapunov":
        try:
            return lyapunov_norm(A, rate=grid_id).norm
        except (MrpiError, ValueError) as exc:
            raise UsageError(f"cannot build {choice}: {exc}") from exc
    grid = log_spaced_diagonal_grid(dim, seed=seed, **DIAGONAL_GRIDS[grid_id])
    return diagonal_scaling_search(A, grid).norm


def make_system(kind, dim, seed):
    if kind == "random":
        return random_schur_matrix(dim, seed)
    if kind == "normal":
        return random_normal_schur_matrix(dim, seed)
    raise UsageError(f"unknown system kind {kind!r}; use random or normal")


def _prepare_output(cfg):
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "manifest.txt").write_text(cfg.manifest())
    return out


def _decay_curve(cfg, dim, out, stem, title):
    A = make_system(cfg.system, dim, cfg.seed)
    norm = build_norm(A, cfg.norm_choice, cfg.seed)
    try:
        curve = error_curve(A, Box.symmetric(cfg.w_half_width, dim), norm, range(1, cfg.n_max + 1),
                            dir_count=cfg.dir_count, seed=cfg.seed, k_ref=cfg.k_ref,
                            exponent_convention=cfg.exponent_convention)
    except NotContractive as exc:
        raise UsageError(f"{exc}; pick another norm (e.g. --norm lyapunov)") from exc
    (out / f"{stem}.csv").write_text(curve.to_csv())
    bad = curve.violations()
    gamma = curve.rows[0].gamma
    (out / f"{stem}.svg").write_text(svg.line_plot(
        [("sampled d_H", curve.n, curve.d_num, False), ("bound", curve.n, curve.d_bound, True)],
        f"{title} (n={dim}, gamma={gamma:.4f}, {norm.label})", "N", "distance"))
    slope = None
    try:
        slope = fit_decay_slope(curve)
    except MrpiError:
        pass
    rho = curve.meta["rho"]
    print(f"[{stem}] dim={dim} norm={norm.label} gamma={gamma:.6f} rho={rho:.6f} "
          f"r_w={curve.rows[0].r_w:.6f} conservative_r_w={curve.conservative_radius} "
          f"rows={len(curve.rows)} violations={len(bad)}")
    if slope is not None:
        rel = abs(slope - math.log(gamma)) / abs(math.log(gamma)) if gamma > 0 else float("nan")
        verdict = "PASS" if rel <= 0.1 else "INFO"
        print(f"[{stem}] fitted slope={slope:.5f} ln(gamma)={math.log(gamma):.5f} ln(rho)={math.log(rho):.5f} "
              f"relative gap to ln(gamma)={rel:.3f} [{verdict}]")
    if bad:
        raise InvariantViolation(f"{len(bad)} rows exceed the truncation bound in {stem}")
    return curve


def cmd_bound(args):
    try:
        if args.n is None and args.epsilon is None:
            raise UsageError("give --n or --epsilon")
        if args.n is not None:
            if args.n < 0:
                raise UsageError("--n must be nonnegative")
            tail = tail_bound(args.rw, args.gamma, args.n)
            print(f"tail_bound = {tail!r}  (n={args.n}, gamma={args.gamma!r}, r_w={args.rw!r})")
        if args.epsilon is not None:
            n = n_min(args.epsilon, args.gamma, args.rw)
            print(f"N_min = {n}  (epsilon={args.epsilon!r}); tail_bound(N_min) = {tail_bound(args.rw, args.gamma, n)!r}")
            print(f"N recommended for MPC = {n + 1}")
    except (MrpiError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def cmd_exp1(cfg):
    out = _prepare_output(cfg)
    for dim in cfg.dims:
        _decay_curve(cfg, dim, out, f"exp1_dim{dim}", "Truncation error vs bound")


def cmd_exp3(cfg):
    out = _prepare_output(cfg)
    curves, total = [], 0.0
    for dim in cfg.dims:
        t0 = time.perf_counter()
        curves.append((dim, _decay_curve(cfg, dim, out, f"exp3_dim{dim}", "High-dimensional decay")))
        elapsed = time.perf_counter() - t0
        total += elapsed
        print(f"[exp3] dim={dim} runtime={elapsed:.2f}s")
    print(f"[exp3] total runtime={total:.2f}s")
    plotted = []
    for dim, curve in curves:
        plotted.append((f"n={dim} sampled", curve.n, curve.d_num, False))
        plotted.append((f"n={dim} bound", curve.n, curve.d_bound, True))
    (out / "exp3_all.svg").write_text(svg.line_plot(plotted, "Sampled error and bound by dimension", "N", "distance"))


def _norm_rows(label, A, w, norm, ns):
    gamma = induced_norm(A, norm)
    r_w = disturbance_radius(w, norm).value
    # ||x||_2 <= ||x||_P / sqrt(lambda_min(P)) converts a P-norm distance to Euclidean units.
    to_euclid = 1.0 / math.sqrt(np.linalg.eigvalsh(norm.p)[0])
    rows = []
    for n in ns:
        bound = tail_bound(r_w, gamma, n) if gamma < 1 else float("inf")
        rows.append((label, norm.label, n, gamma, r_w, bound, bound * to_euclid))
    return rows


def cmd_exp2(cfg):
    out = _prepare_output(cfg)
    dim = cfg.dims[0]
    A = make_system(cfg.system, dim, cfg.seed)
    w = Box.symmetric(cfg.w_half_width, dim)
    kind, grid_id = parse_norm_choice(cfg.norm_choice)
    grid_spec = DIAGONAL_GRIDS[grid_id or "coarse"]
    ns = list(range(1, cfg.n_max + 1))
    shift = 1 if cfg.exponent_convention == "N+1" else 0
    norms = [
        QuadraticNorm.euclidean(dim),
        diagonal_scaling_search(A, log_spaced_diagonal_grid(dim, seed=cfg.seed, **grid_spec)).norm,
        lyapunov_norm(A).norm,
    ]
    rows = []
    for norm in norms:
        rows += _norm_rows("random", A, w, norm, [n + shift for n in ns])

    # Demonstration system: a nilpotent block where diagonal shaping shrinks gamma from 0.9 to 0.1.
    demo = np.zeros((4, 4))
    demo[0, 1] = 0.9
    demo[2:, 2:] = 0.05 * np.eye(2)
    demo_w = Box.symmetric(1.0, 4)
    demo_norms = [QuadraticNorm.euclidean(4), QuadraticNorm.diagonal([1.0, 81.0, 1.0, 1.0]), lyapunov_norm(demo).norm]
    for norm in demo_norms:
        rows += _norm_rows("demo", demo, demo_w, norm, [n + shift for n in ns])

    lines = ["system,norm,n,gamma,r_w,bound,bound_euclidean_units"]
    lines += [f"{s},{nm},{n},{g!r},{r!r},{b!r},{be!r}" for s, nm, n, g, r, b, be in rows]
    (out / "exp2.csv").write_text("\n".join(lines) + "\n")

    curves = []
    for norm in norms:
        sel = [r for r in rows if r[0] == "random" and r[1] == norm.label]
        g, rw = sel[0][3], sel[0][4]
        print(f"[exp2] random norm={norm.label} gamma={g:.6f} r_w={rw:.6f} contractive={g < 1}")
        if g < 1:
            curves.append((f"{norm.label} (g={g:.3f})", ns, [r[5] for r in sel], False))
    (out / "exp2.svg").write_text(svg.line_plot(curves, f"Bound under different norms (n={dim})", "N", "bound (own norm)"))

    demo_at = {r[1]: r for r in rows if r[0] == "demo" and r[2] == 5 + shift}
    eu, dg = demo_at["euclidean"], demo_at["diag(1,81,1,1)"]
    ratio = eu[5] / dg[5]
    print(f"[exp2] demo gamma euclidean={eu[3]:.6f} diag(1,81,1,1)={dg[3]:.6f} "
          f"lyapunov={demo_at['lyapunov'][3]:.6f}")
    print(f"[exp2] demo bound ratio at N=5 (own norms) = {ratio:.4g} [{'PASS' if ratio >= 10 else 'FAIL'}]")
    lyap = [r for r in rows if r[0] == "random" and r[1] == "lyapunov"][0]
    eucl = [r for r in rows if r[0] == "random" and r[1] == "euclidean"][0]
    print(f"[exp2] lyapunov gamma {lyap[3]:.6f} <= euclidean gamma {eucl[3]:.6f} + 1e-8: "
          f"{'yes' if lyap[3] <= eucl[3] + 1e-8 else 'no'}")
    decreasing = all(
        all(a[5] > b[5] for a, b in zip(sel, sel[1:]))
        for sel in ([r for r in rows if r[:2] == key] for key in {r[:2] for r in rows})
        if sel[0][3] < 1
    )
    if not decreasing:
        raise InvariantViolation("a bound curve is not strictly decreasing")


def exp4_setup(cfg):
    plant = double_integrator()
    K = dlqr(plant, np.eye(2), np.eye(1))
    a_cl = plant.a + plant.b @ K
    x_box = Box.symmetric(2.0, 2)
    u_box = Box.symmetric(1.0, 1)
    w_box = Box.symmetric(cfg.w_half_width, 2)
    norm = build_norm(a_cl, cfg.norm_choice, cfg.seed)
    designs = {
        "baseline": design_tube(plant, K, x_box, u_box, w_box, norm, Method.BASELINE),
        "certified": design_tube(plant, K, x_box, u_box, w_box, norm, Method.CERTIFIED, epsilon=cfg.epsilon),
    }
    return plant, K, x_box, u_box, w_box, norm, designs


EXP4_X0 = np.array([1.5, -0.5])


def cmd_exp4(cfg):
    out = _prepare_output(cfg)
    try:
        plant, K, x_box, u_box, w_box, norm, designs = exp4_setup(cfg)
    except NotContractive as exc:
        raise UsageError(f"{exc}; pick another norm (e.g. --norm lyapunov)") from exc
    report = feasible_set_report(x_box, designs)
    (out / "exp4_feasible.csv").write_text(report.to_csv())
    cert = designs["certified"].cert
    print(f"[exp4] K={K.ravel().tolist()} norm={norm.label} certificate: {cert.to_text()}")
    for name, d in designs.items():
        print(f"[exp4] {name}: x_tight half-widths={d.x_tight.half_widths.tolist()} "
              f"u_tight half-width={d.u_tight.half_widths.tolist()} volume={d.x_tight.volume:.6f}")

    mpc = MpcConfig.default(plant, cfg.horizon)
    dirs = sample_unit_directions(2, cfg.dir_count, cfg.seed)
    failures = 0
    csv_parts = []
    traj_shapes = []
    colors = {"baseline": "#2ca02c", "certified": "#d62728"}
    for name, d in designs.items():
        logs = simulate_closed_loop(plant, d, mpc, w_box, EXP4_X0, cfg.steps, cfg.rollouts, cfg.seed,
                                    x_box, u_box, dirs)
        viol = sum(log.violations for log in logs)
        cont = sum(log.containment_failures for log in logs)
        failures += viol + cont
        print(f"[exp4] {name}: rollouts={len(logs)} steps={cfg.steps} violations={viol} "
              f"containment_failures={cont} max_error_norm={max(l.max_error_norm for l in logs):.6f}")
        body = trajectories_to_csv(logs).split("\n", 1)
        if not csv_parts:
            csv_parts.append("design," + body[0])
        csv_parts.extend(f"{name},{line}" for line in body[1].splitlines())
        traj_shapes.append((f"{name} nominal", logs[0].x_nom, colors[name], False, True))
        traj_shapes.append((f"{name} real", logs[0].x_real, colors[name], False, False))
        tube = svg.boundary_points(d.cross_section)
        for k in range(0, cfg.steps + 1, 5):
            traj_shapes.append(("", tube + logs[0].x_nom[k], colors[name], True, True))
    (out / "exp4_trajectories.csv").write_text("\n".join(csv_parts) + "\n")

    feas_shapes = [("X", svg.box_points(x_box), "#000000", True, False)]
    for name, d in designs.items():
        feas_shapes.append((f"X - Z ({name})", svg.box_points(d.x_tight), colors[name], True, False))
        feas_shapes.append((f"Z ({name})", svg.boundary_points(d.cross_section), colors[name], True, True))
    (out / "exp4_feasible.svg").write_text(svg.planar_plot(feas_shapes, "Tightened state constraints"))
    (out / "exp4_trajectories.svg").write_text(svg.planar_plot(traj_shapes, "Tube MPC trajectories (rollout 0)"))

    vb, vc = report.volumes["baseline"], report.volumes["certified"]
    print(f"[exp4] feasible volume baseline={vb:.6f} certified={vc:.6f} [{'PASS' if vc > vb else 'FAIL'}]")
    if failures or vc < vb:
        raise InvariantViolation("tube MPC comparison violated an invariant")


def build_parser():
    parser = argparse.ArgumentParser(prog="mrpibound", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="evaluate the truncation bound or the minimal horizon")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--rw", type=float, required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--epsilon", type=float)

    help_text = {
        "exp1": "truncation error vs bound on a seeded 6-D system",
        "exp2": "bound under Euclidean, diagonal and Lyapunov norms",
        "exp3": "error curves for n = 10, 15, 20",
        "exp4": "tube MPC: baseline vs certified tightening",
    }
    for name, text in help_text.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", help="flat key = value file")
        p.add_argument("--seed", type=int)
        p.add_argument("--dims", help="comma-separated dimensions")
        p.add_argument("--n-max", dest="n_max", type=int)
        p.add_argument("--dir-count", dest="dir_count", type=int)
        p.add_argument("--k-ref", dest="k_ref", type=int)
        p.add_argument("--epsilon", type=float)
        p.add_argument("--exponent-convention", dest="exponent_convention", choices=("N", "N+1"))
        p.add_argument("--norm", dest="norm_choice", help="euclidean | lyapunov | lyapunov@<rate> | diag:<grid-id>")
        p.add_argument("--system", choices=("random", "normal"))
        p.add_argument("--w-half-width", dest="w_half_width", type=float)
        p.add_argument("--steps", type=int)
        p.add_argument("--rollouts", type=int)
        p.add_argument("--horizon", type=int)
        p.add_argument("--output-dir", dest="output_dir")
    return parser


COMMANDS = {"exp1": cmd_exp1, "exp2": cmd_exp2, "exp3": cmd_exp3, "exp4": cmd_exp4}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "bound":
            cmd_bound(args)
        else:
            cfg = resolve_config(args)
            COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    return 0


if __name__ == "__main__":
    sys.exit(main())
