"""Command-line pipeline: states -> tomograms -> checks -> simulated data.

Exit codes: 0 success, 1 a checked inequality is violated, 2 input error
(including usage errors), 3 numerical error.  All file formats round-trip
between subcommands.  TOMO_THREADS caps kernel parallelism and
TOMO_DISABLE_NUMBA forces the pure-numpy kernels.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .errors import InputError, NumericalError
from .homodyne import (
    empirical_trifonov,
    estimate_moments,
    load_dataset_csv,
    sample,
    save_dataset_csv,
)
from .inequalities import heisenberg_lhs, trifonov_lhs, trifonov_sweep
from .purity import purity_classify
from .states import load_state, state_label, state_to_dict
from .tomography import (
    DEFAULT_N_PHASES,
    load_tomogram_csv,
    save_tomogram_csv,
    tomogram_grid,
    uniform_phases,
)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INPUT = 2
EXIT_NUMERICAL = 3


def _emit(payload: dict, out_path):
    text = json.dumps(payload)
    print(text)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")


def _grid_for_phases(state, thetas, n_x=None):
    """Small grid holding exactly the phases a check needs (plus partners)."""
    wanted = set()
    for theta in thetas:
        reduced = math.fmod(float(theta), math.pi)
        if reduced < 0:
            reduced += math.pi
        wanted.add(reduced)
        partner = math.fmod(reduced + math.pi / 2.0, math.pi)
        wanted.add(partner)
    return tomogram_grid(state, np.array(sorted(wanted)), n_x=n_x)


def _load_check_source(args, suffix, thetas):
    state_path = getattr(args, f"state{suffix}", None)
    tomo_path = getattr(args, f"tomogram{suffix}", None)
    if state_path and tomo_path:
        raise InputError(f"give either --state{suffix} or --tomogram{suffix}, not both")
    if state_path:
        return _grid_for_phases(load_state(state_path), thetas)
    if tomo_path:
        return load_tomogram_csv(tomo_path)
    raise InputError(f"missing --state{suffix} or --tomogram{suffix}")


def _parse_phase_list(text):
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise InputError(f"bad phase list {text!r}: {exc}") from exc
    if not values:
        raise InputError("phase list is empty")
    return values


def _parse_schedule(args):
    if args.schedule:
        entries = []
        for tok in args.schedule.split(","):
            tok = tok.strip()
            if not tok:
                continue
            try:
                theta_text, count_text = tok.split(":")
                entries.append((float(theta_text), int(count_text)))
            except ValueError as exc:
                raise InputError(
                    f"bad schedule entry {tok!r} (want theta:count): {exc}"
                ) from exc
        if not entries:
            raise InputError("schedule is empty")
        return entries
    if args.thetas is None or args.shots is None:
        raise InputError("give --schedule or both --thetas and --shots")
    return [(theta, int(args.shots)) for theta in _parse_phase_list(args.thetas)]


# --------------------------------------------------------------------------
# subcommand handlers
# --------------------------------------------------------------------------

def _cmd_state_validate(args):
    state = load_state(args.state)
    print(json.dumps({"valid": True, "label": state_label(state), "spec": state_to_dict(state)}))
    return EXIT_OK


def _cmd_tomogram(args):
    state = load_state(args.state)
    window = None
    if args.x_min is not None or args.x_max is not None:
        if args.x_min is None or args.x_max is None:
            raise InputError("give both --x-min and --x-max or neither")
        window = (args.x_min, args.x_max)
    grid = tomogram_grid(
        state,
        phases=args.phases if args.phases is not None else DEFAULT_N_PHASES,
        n_x=args.points,
        window=window,
    )
    save_tomogram_csv(grid, args.out)
    print(
        json.dumps(
            {
                "out": args.out,
                "n_phases": grid.n_phases,
                "n_x": grid.n_x,
                "x_min": grid.xs[0],
                "x_max": grid.xs[-1],
            }
        )
    )
    return EXIT_OK


def _cmd_check_heisenberg(args):
    grid = _load_check_source(args, "", [0.0])
    report = heisenberg_lhs(grid, tolerance=args.tolerance)
    _emit(report.to_dict(), args.out)
    return EXIT_OK if report.satisfied else EXIT_VIOLATION


def _cmd_check_trifonov(args):
    data1, data2 = getattr(args, "data1", None), getattr(args, "data2", None)
    if (data1 is None) != (data2 is None):
        raise InputError("--data1 and --data2 must be given together")
    if data1 is not None:
        for suffix in ("1", "2"):
            if getattr(args, f"state{suffix}", None) or getattr(args, f"tomogram{suffix}", None):
                raise InputError("--data sources cannot be mixed with states/tomograms")
        report = empirical_trifonov(
            load_dataset_csv(data1), load_dataset_csv(data2), args.theta
        )
    else:
        w1 = _load_check_source(args, "1", [args.theta])
        w2 = _load_check_source(args, "2", [args.theta])
        report = trifonov_lhs(w1, w2, args.theta, tolerance=args.tolerance)
    _emit(report.to_dict(), args.out)
    return EXIT_OK if report.satisfied else EXIT_VIOLATION


def _cmd_check_purity(args):
    if (args.state is None) == (args.tomogram is None):
        raise InputError("give exactly one of --state or --tomogram")
    src = load_state(args.state) if args.state else load_tomogram_csv(args.tomogram)
    report = purity_classify(src, tol=args.tol)
    _emit(report.to_dict(), args.out)
    return EXIT_OK


def _sweep_phases(args):
    """Sweep over --phases when given, else over a loaded grid's own phases."""
    if args.phases is not None:
        return uniform_phases(args.phases)
    for name in ("tomogram1", "tomogram2"):
        path = getattr(args, name, None)
        if path:
            return load_tomogram_csv(path).phases
    return uniform_phases(DEFAULT_N_PHASES)


def _cmd_sweep_trifonov(args):
    thetas = _sweep_phases(args)
    w1 = _load_check_source(args, "1", thetas)
    w2 = _load_check_source(args, "2", thetas)
    report = trifonov_sweep(w1, w2, thetas, tolerance=args.tolerance)
    _emit(report.to_dict(), args.out)
    return EXIT_OK if report.satisfied else EXIT_VIOLATION


def _cmd_simulate(args):
    state = load_state(args.state)
    schedule = _parse_schedule(args)
    dataset = sample(state, schedule, args.seed)
    save_dataset_csv(dataset, args.out)
    print(
        json.dumps(
            {
                "out": args.out,
                "records": dataset.n_records,
                "seed": dataset.seed,
                "state_label": dataset.state_label,
                "generator": dataset.generator,
            }
        )
    )
    return EXIT_OK


def _cmd_estimate(args):
    dataset = load_dataset_csv(args.data)
    est = estimate_moments(dataset, args.theta)
    _emit(
        {
            "phase": est.phase,
            "count": est.count,
            "mean": est.mean,
            "mean_stderr": est.mean_stderr,
            "variance": est.variance,
            "variance_stderr": est.variance_stderr,
        },
        args.out,
    )
    return EXIT_OK


def _cmd_plotdata_row(args):
    if (args.state is None) == (args.tomogram is None):
        raise InputError("give exactly one of --state or --tomogram")
    if args.state:
        grid = _grid_for_phases(load_state(args.state), [args.theta])
    else:
        grid = load_tomogram_csv(args.tomogram)
    row, mirrored = grid.row_at(args.theta)
    xs = -grid.xs[::-1] if mirrored else grid.xs
    row = row[::-1] if mirrored else row
    with open(args.out, "w") as fh:
        fh.write("x,w\n")
        for x, w in zip(xs, row):
            fh.write(f"{x:.17g},{w:.17g}\n")
    print(json.dumps({"out": args.out, "points": int(xs.size)}))
    return EXIT_OK


def _cmd_plotdata_sweep(args):
    thetas = _sweep_phases(args)
    w1 = _load_check_source(args, "1", thetas)
    w2 = _load_check_source(args, "2", thetas)
    with open(args.out, "w") as fh:
        fh.write("theta,lhs\n")
        for theta in thetas:
            rep = trifonov_lhs(w1, w2, float(theta))
            fh.write(f"{theta:.17g},{rep.lhs:.17g}\n")
    print(json.dumps({"out": args.out, "points": int(thetas.size)}))
    return EXIT_OK


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _add_pair_sources(parser, with_data=False):
    parser.add_argument("--state1", help="JSON state spec for the first source")
    parser.add_argument("--state2", help="JSON state spec for the second source")
    parser.add_argument("--tomogram1", help="tomogram CSV for the first source")
    parser.add_argument("--tomogram2", help="tomogram CSV for the second source")
    if with_data:
        parser.add_argument("--data1", help="homodyne dataset CSV for the first source")
        parser.add_argument("--data2", help="homodyne dataset CSV for the second source")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="optomo",
        description=(
            "Optical tomograms of single-mode photon states, uncertainty-"
            "relation checks, purity classification, and simulated homodyne "
            "detection."
        ),
    )
    parser.add_argument(
        "--config",
        help="JSON file of flag defaults (keys are flag names with underscores)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_state = sub.add_parser("state", help="state-spec utilities")
    state_sub = p_state.add_subparsers(dest="state_command", required=True)
    p_validate = state_sub.add_parser("validate", help="validate a JSON state spec")
    p_validate.add_argument("--state", required=True)
    p_validate.set_defaults(handler=_cmd_state_validate)

    p_tomo = sub.add_parser("tomogram", help="compute a tomogram grid to CSV")
    p_tomo.add_argument("--state", required=True)
    p_tomo.add_argument("--phases", type=int, help="phase count on [0, pi) (default 64)")
    p_tomo.add_argument("--points", type=int, help="X points per row (default 256+)")
    p_tomo.add_argument("--x-min", type=float, dest="x_min")
    p_tomo.add_argument("--x-max", type=float, dest="x_max")
    p_tomo.add_argument("--out", required=True)
    p_tomo.set_defaults(handler=_cmd_tomogram)

    p_check = sub.add_parser("check", help="run one inequality/purity check")
    check_sub = p_check.add_subparsers(dest="check_command", required=True)

    p_heis = check_sub.add_parser("heisenberg", help="Var(0)*Var(pi/2) >= 1/4")
    p_heis.add_argument("--state")
    p_heis.add_argument("--tomogram")
    p_heis.add_argument("--tolerance", type=float, default=1e-9)
    p_heis.add_argument("--out")
    p_heis.set_defaults(handler=_cmd_check_heisenberg)

    p_trif = check_sub.add_parser(
        "trifonov", help="two-state dispersion check at one phase"
    )
    _add_pair_sources(p_trif, with_data=True)
    p_trif.add_argument("--theta", type=float, required=True)
    p_trif.add_argument("--tolerance", type=float, default=1e-9)
    p_trif.add_argument("--out")
    p_trif.set_defaults(handler=_cmd_check_trifonov)

    p_pur = check_sub.add_parser("purity", help="pure/mixed classification")
    p_pur.add_argument("--state")
    p_pur.add_argument("--tomogram")
    p_pur.add_argument("--tol", type=float, default=1e-3)
    p_pur.add_argument("--out")
    p_pur.set_defaults(handler=_cmd_check_purity)

    p_sweep = sub.add_parser("sweep", help="sweep a check over phases")
    sweep_sub = p_sweep.add_subparsers(dest="sweep_command", required=True)
    p_sweep_t = sweep_sub.add_parser("trifonov", help="minimum over a phase sweep")
    _add_pair_sources(p_sweep_t)
    p_sweep_t.add_argument("--phases", type=int, help="sweep phase count (default 64)")
    p_sweep_t.add_argument("--tolerance", type=float, default=1e-9)
    p_sweep_t.add_argument("--out")
    p_sweep_t.set_defaults(handler=_cmd_sweep_trifonov)

    p_sim = sub.add_parser("simulate", help="sample homodyne data from a state")
    p_sim.add_argument("--state", required=True)
    p_sim.add_argument("--schedule", help="comma-separated theta:count entries")
    p_sim.add_argument("--thetas", help="comma-separated phases (with --shots)")
    p_sim.add_argument("--shots", type=int, help="samples per phase (with --thetas)")
    p_sim.add_argument("--seed", type=int, required=True)
    p_sim.add_argument("--out", required=True)
    p_sim.set_defaults(handler=_cmd_simulate)

    p_est = sub.add_parser("estimate", help="moment estimates from a dataset")
    p_est.add_argument("--data", required=True)
    p_est.add_argument("--theta", type=float, required=True)
    p_est.add_argument("--out")
    p_est.set_defaults(handler=_cmd_estimate)

    p_plot = sub.add_parser("plotdata", help="emit plot-ready two-column CSV")
    plot_sub = p_plot.add_subparsers(dest="plot_command", required=True)
    p_row = plot_sub.add_parser("row", help="one tomogram row as x,w")
    p_row.add_argument("--state")
    p_row.add_argument("--tomogram")
    p_row.add_argument("--theta", type=float, required=True)
    p_row.add_argument("--out", required=True)
    p_row.set_defaults(handler=_cmd_plotdata_row)
    p_sweep_plot = plot_sub.add_parser("sweep", help="phase sweep as theta,lhs")
    _add_pair_sources(p_sweep_plot)
    p_sweep_plot.add_argument("--phases", type=int)
    p_sweep_plot.add_argument("--out", required=True)
    p_sweep_plot.set_defaults(handler=_cmd_plotdata_sweep)

    return parser


def _apply_config(args):
    if not getattr(args, "config", None):
        return
    try:
        with open(args.config) as fh:
            config = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read config {args.config}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in config {args.config}: {exc}") from exc
    if not isinstance(config, dict):
        raise InputError("config must be a JSON object of flag defaults")
    for key, value in config.items():
        attr = key.replace("-", "_")
        if hasattr(args, attr) and getattr(args, attr) is None:
            setattr(args, attr, value)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        return args.handler(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
