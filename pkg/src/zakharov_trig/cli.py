"""Command-line entry point.

Subcommands: ``run`` (single trajectory -> run CSV), ``converge``
(convergence CSVs plus fitted slopes), ``soliton`` (profile snapshots at
requested times), ``conserve`` (conservation-deviation series) and
``selftest`` (the acceptance suite).  Exit codes: 0 success, 1 validation
error, 2 numerical divergence.

Options may come from a flat key=value config file (--config); explicit
flags override file values.  The output directory falls back to the
ZAK_OUT_DIR environment variable.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from .acceptance import run_all
from .harness import (
    ReferenceMismatchError,
    conservation_run,
    convergence_study,
    csv_export,
    fit_order,
    make_problem_data,
    read_table,
    snapshot_export,
)
from .integrators import DivergenceError, OracleStabilityError, run
from .model import SolitonParams
from .spectral import Field, TorusGrid

DEFAULT_TAUS = (4e-3, 2e-3, 1e-3, 5e-4)

_CONFIG_KEYS = {
    "scheme": str, "problem": str, "K": int, "L": float, "tau": float,
    "CFL": float, "T": float, "sample_every": int, "s_norm": float,
    "B": float, "C": float, "dealias": bool, "out_dir": str, "init": str,
}


class _Parser(argparse.ArgumentParser):
    # spec'd contract: usage message and exit code 1 on bad flags/config
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="zaktrig",
        description="Trigonometric time integrators for the 1-D Zakharov system.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, problem_default="soliton"):
        p.add_argument("--config", type=str, default=None,
                       help="flat key=value config file; flags override it")
        p.add_argument("--scheme", choices=["first", "second", "both"], default=None,
                       help="time integrator (default: first)")
        p.add_argument("--problem", choices=["soliton", "example1", "custom"],
                       default=None, help=f"initial data (default: {problem_default})")
        p.add_argument("--K", type=int, default=None,
                       help="collocation points, power of two (default: problem-specific)")
        p.add_argument("--L", type=float, default=None,
                       help="torus circumference (default: problem-specific)")
        p.add_argument("--T", type=float, default=None, help="final time")
        p.add_argument("--B", type=float, default=None, help="soliton width parameter (default: 0.5)")
        p.add_argument("--C", type=float, default=None, help="soliton speed parameter (default: 0.15)")
        p.add_argument("--dealias", action="store_true", default=None,
                       help="apply the 2/3 rule to products (default: off)")
        p.add_argument("--s-norm", dest="s_norm", type=float, default=None,
                       help="norm family index s (default: 0)")
        p.add_argument("--out-dir", dest="out_dir", type=str, default=None,
                       help="output directory (default: $ZAK_OUT_DIR or ./out)")
        p.add_argument("--init", type=str, default=None,
                       help="snapshot CSV with initial data (problem=custom)")
        return p

    p_run = common(sub.add_parser(
        "run", help="single trajectory, writes a run CSV"))
    p_run.add_argument("--tau", type=float, default=None, help="time step")
    p_run.add_argument("--CFL", dest="CFL", type=float, default=None,
                       help="step size as CFL = tau/dx^2 (exclusive with --tau)")
    p_run.add_argument("--sample-every", dest="sample_every", type=int, default=None,
                       help="record diagnostics every n-th step (default: 1)")

    p_conv = common(sub.add_parser(
        "converge", help="convergence study, writes one CSV per scheme"))
    p_conv.add_argument("--taus", type=float, nargs="+", default=None,
                        help=f"step sizes (default: {' '.join(str(t) for t in DEFAULT_TAUS)})")

    p_sol = common(sub.add_parser(
        "soliton", help="solitary-wave snapshots at requested times"))
    p_sol.add_argument("--times", type=float, nargs="+", default=None,
                       help="snapshot times (default: 0 10 20)")
    p_sol.add_argument("--tau", type=float, default=None, help="time step")
    p_sol.add_argument("--CFL", dest="CFL", type=float, default=None,
                       help="step size as CFL = tau/dx^2 (exclusive with --tau)")

    p_cons = common(sub.add_parser(
        "conserve", help="conservation-deviation time series, writes a run CSV"))
    p_cons.add_argument("--tau", type=float, default=None, help="time step")
    p_cons.add_argument("--CFL", dest="CFL", type=float, default=None,
                        help="step size as CFL = tau/dx^2 (default: 5)")
    p_cons.add_argument("--sample-every", dest="sample_every", type=int, default=None,
                        help="record diagnostics every n-th step (default: 1)")

    p_self = sub.add_parser(
        "selftest", help="run the acceptance suite and report pass/fail")
    p_self.add_argument("--criteria", type=int, nargs="+", default=None,
                        help="criterion numbers to run (default: all)")
    return parser


def _read_config(path: str) -> dict:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if not sep or key not in _CONFIG_KEYS:
            raise ValueError(f"{path}:{lineno}: bad config entry {raw!r}")
        typ = _CONFIG_KEYS[key]
        if typ is bool:
            if val.lower() not in ("true", "false", "1", "0"):
                raise ValueError(f"{path}:{lineno}: bad boolean {val!r}")
            values[key] = val.lower() in ("true", "1")
        else:
            values[key] = typ(val)
    return values


def _merged(args, key, default=None):
    val = getattr(args, key, None)
    if val is not None:
        return val
    config = getattr(args, "_config", {})
    if key in config:
        return config[key]
    return default


def _out_dir(args) -> Path:
    out = _merged(args, "out_dir") or os.environ.get("ZAK_OUT_DIR") or "out"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _problem_defaults(problem: str) -> tuple[int, float]:
    if problem == "example1":
        return 1024, 2.0 * np.pi
    return 512, 20.0 * np.pi


def _load_custom(path: str):
    params, header, cols = read_table(path)
    expected = ["x", "Re_E", "Im_E", "u", "uprime", "abs_E"]
    if header != expected:
        raise ValueError(f"{path}: expected snapshot schema {','.join(expected)}")
    x = cols["x"]
    length = float(params.get("L", x[-1] + (x[1] - x[0]) - x[0]))
    grid = TorusGrid(length, len(x))
    if not np.allclose(grid.x, x, rtol=0, atol=1e-9 * max(1.0, length)):
        raise ValueError(f"{path}: x column is not the uniform grid of L={length}")
    e0 = Field.from_physical(grid, cols["Re_E"] + 1j * cols["Im_E"])
    u0 = Field.from_physical(grid, cols["u"])
    u1 = Field.from_physical(grid, cols["uprime"])
    return grid, (e0, u0, u1)


def _resolve_setup(args, need_step: bool):
    """Common resolution: problem, grid, data, scheme list, step size."""
    problem = _merged(args, "problem", "soliton")
    soliton = SolitonParams(
        B=_merged(args, "B", 0.5), C=_merged(args, "C", 0.15)
    )
    if problem == "custom":
        init = _merged(args, "init")
        if not init:
            raise ValueError("problem=custom requires --init snapshot CSV")
        grid, data = _load_custom(init)
        meta = {"init": init}
    else:
        k_default, l_default = _problem_defaults(problem)
        grid = TorusGrid(_merged(args, "L", l_default), _merged(args, "K", k_default))
        data, meta = make_problem_data(problem, grid, soliton)

    scheme_opt = _merged(args, "scheme", "first")
    schemes = ["first", "second"] if scheme_opt == "both" else [scheme_opt]

    tau = None
    if need_step:
        tau_opt, cfl_opt = _merged(args, "tau"), _merged(args, "CFL")
        if (tau_opt is None) == (cfl_opt is None):
            raise ValueError("exactly one of --tau / --CFL must be set")
        tau = tau_opt if tau_opt is not None else cfl_opt * grid.dx**2
    return problem, soliton, grid, data, meta, schemes, tau


def _record_to_csv(record, path: Path) -> Path:
    csv_export(record, path)
    print(f"wrote {path}")
    return path


def _cmd_run(args) -> int:
    problem, soliton, grid, data, meta, schemes, tau = _resolve_setup(args, True)
    T = _merged(args, "T", 1.0)
    if T < 0:
        raise ValueError("T must be >= 0")
    out = _out_dir(args)
    sample_every = _merged(args, "sample_every", 1)
    dealias = bool(_merged(args, "dealias", False))
    for scheme in schemes:
        # T = 0 yields the single t=0 record
        result = run(scheme, data, tau, T, sample_every, dealias=dealias)
        base = result.samples[0].diag
        rows = [
            (s.t, s.diag.l2_E, s.diag.hamiltonian, s.diag.l2_E - base.l2_E,
             s.diag.hamiltonian - base.hamiltonian, s.diag.mean_u, s.diag.mean_uprime)
            for s in result.samples
        ]
        from .harness import RunRecord

        record = RunRecord(
            scheme=scheme, problem=problem, cfl=tau / grid.dx**2,
            params={"scheme": scheme, "problem": problem, "K": grid.modes,
                    "L": grid.length, "T": T, "tau": tau,
                    "sample_every": sample_every, "dealias": dealias, **meta},
            rows=rows,
        )
        _record_to_csv(record, out / f"run_{problem}_{scheme}.csv")
    return 0


def _cmd_converge(args) -> int:
    problem, soliton, grid, data, meta, schemes, _ = _resolve_setup(args, False)
    if problem == "custom":
        raise ValueError("converge supports problem=soliton or example1")
    T = _merged(args, "T", 1.0)
    s = _merged(args, "s_norm", 0.0)
    taus = args.taus if args.taus is not None else list(DEFAULT_TAUS)
    dealias = bool(_merged(args, "dealias", False))
    out = _out_dir(args)
    reference = None
    if problem == "example1":
        from .harness import build_example1_reference

        reference, _ = build_example1_reference(grid, T, min(taus) / 100,
                                                dealias=dealias)
    for scheme in schemes:
        record = convergence_study(
            scheme, problem, taus, grid.modes, grid.length, T, s,
            dealias=dealias, soliton_params=soliton, reference=reference,
        )
        fit = fit_order(record.tau_error_pairs())
        print(f"{problem} {scheme}: fitted slope {fit.slope:.3f} "
              f"(r^2 = {fit.r_squared:.4f})")
        _record_to_csv(record, out / f"converge_{problem}_{scheme}.csv")
    return 0


def _cmd_soliton(args) -> int:
    problem, soliton, grid, data, meta, schemes, tau = _resolve_setup(args, True)
    times = args.times if args.times is not None else [0.0, 10.0, 20.0]
    T = _merged(args, "T", max(times))
    out = _out_dir(args)
    dealias = bool(_merged(args, "dealias", False))
    for scheme in schemes:
        result = run(scheme, data, tau, T, sample_every=max(1, int(round(T / tau)) or 1),
                     dealias=dealias, snapshot_times=tuple(times))
        for t_snap, state in result.snapshots:
            path = out / f"soliton_{scheme}_t{t_snap:g}.csv"
            snapshot_export(state, path)
            print(f"wrote {path}")
    return 0


def _cmd_conserve(args) -> int:
    problem, soliton, grid, data, meta, schemes, _ = _resolve_setup(args, False)
    if problem == "custom":
        raise ValueError("conserve supports problem=soliton or example1")
    T = _merged(args, "T", 20.0)
    cfl = _merged(args, "CFL")
    tau_opt = _merged(args, "tau")
    if cfl is None and tau_opt is None:
        cfl = 5.0
    elif cfl is None:
        cfl = tau_opt / grid.dx**2
    sample_every = _merged(args, "sample_every", 1)
    dealias = bool(_merged(args, "dealias", False))
    out = _out_dir(args)
    for scheme in schemes:
        record = conservation_run(
            scheme, problem, cfl, grid.modes, grid.length, T,
            sample_every=sample_every, dealias=dealias, soliton_params=soliton,
        )
        _record_to_csv(record, out / f"conserve_{problem}_{scheme}.csv")
    return 0


def _cmd_selftest(args) -> int:
    results = run_all(args.criteria, stream=sys.stdout)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return 1 if failed else 0


_COMMANDS = {
    "run": _cmd_run,
    "converge": _cmd_converge,
    "soliton": _cmd_soliton,
    "conserve": _cmd_conserve,
    "selftest": _cmd_selftest,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if getattr(args, "config", None):
            args._config = _read_config(args.config)
        else:
            args._config = {}
        return _COMMANDS[args.command](args)
    except DivergenceError as exc:
        print(f"zaktrig: divergence: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, OracleStabilityError, ReferenceMismatchError) as exc:
        print(f"zaktrig: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
