"""Experiment harness: convergence studies, conservation runs, CSV export.

CSV format (UTF-8, comma separated, '.' decimal, 17 significant digits):
the first line is the magic ``# zakharov-trig v1``, the second a
``# params: key=value ...`` line embedding every parameter of the run,
then the header row and data rows.  Schemas:

    convergence:  tau,err_E,err_u,err_uprime,err_composite
    run:          t,l2_E,hamiltonian,dev_l2,dev_H,mean_u,mean_uprime
    snapshot:     x,Re_E,Im_E,u,uprime,abs_E

Exports are bitwise deterministic given identical inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from .integrators import (
    PropagatorSet,
    advance,
    integrate_rk4,
    rk4_stability_limit,
    run,
)
from .model import (
    Scheme,
    SolitonParams,
    ZakharovState,
    component_errors,
    composite_error,
    example1_data,
    init_state,
    soliton_exact,
)
from .spectral import Field, TorusGrid

MAGIC = "# zakharov-trig v1"
CONVERGENCE_HEADER = "tau,err_E,err_u,err_uprime,err_composite"
RUN_HEADER = "t,l2_E,hamiltonian,dev_l2,dev_H,mean_u,mean_uprime"
SNAPSHOT_HEADER = "x,Re_E,Im_E,u,uprime,abs_E"

#: errors at or below this are treated as rounding floor by fit_order
ERROR_FLOOR = 1e-14

#: required agreement of the two example1 references in the s=0 composite norm
REFERENCE_AGREEMENT_TOL = 1e-7


class ReferenceMismatchError(RuntimeError):
    """The two independent reference solutions disagree; study aborted."""


@dataclass(frozen=True)
class ConvergenceRecord:
    """(tau, error) table of one scheme on one problem at norm index s."""

    scheme: str
    problem: str
    s_index: float
    params: dict
    rows: list  # of (tau, err_E, err_u, err_uprime, err_composite)

    def tau_error_pairs(self) -> list:
        return [(r[0], r[4]) for r in self.rows]


@dataclass(frozen=True)
class RunRecord:
    """Diagnostics time series of a single run."""

    scheme: str
    problem: str
    cfl: float
    params: dict
    rows: list  # of (t, l2_E, H, dev_l2, dev_H, mean_u, mean_uprime)


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float
    excluded: list


def fit_order(rows, floor: float = ERROR_FLOOR) -> FitResult:
    """Least-squares line through (log tau, log error).

    Rows with error <= ``floor`` are excluded (rounding floor) and reported
    in the result; fewer than two usable rows is an error.
    """
    usable, excluded = [], []
    for tau, err in rows:
        if err > floor:
            usable.append((float(tau), float(err)))
        else:
            excluded.append((float(tau), float(err)))
    if len(usable) < 2:
        raise ValueError(
            f"need at least 2 rows above the error floor {floor:g}, "
            f"got {len(usable)}"
        )
    log_tau = np.log([r[0] for r in usable])
    log_err = np.log([r[1] for r in usable])
    slope, intercept = np.polyfit(log_tau, log_err, 1)
    fitted = slope * log_tau + intercept
    ss_res = float(np.sum((log_err - fitted) ** 2))
    ss_tot = float(np.sum((log_err - log_err.mean()) ** 2))
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res < 1e-28 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return FitResult(float(slope), float(intercept), r2, excluded)


def _steps_for(tau: float, T: float) -> int:
    n = int(round(T / tau))
    if n < 1 or abs(n * tau - T) > 1e-9 * max(1.0, abs(T)):
        raise ValueError(f"tau = {tau} does not divide T = {T}")
    return n


def make_problem_data(
    problem: str,
    grid: TorusGrid,
    soliton_params: SolitonParams = SolitonParams(),
):
    """Initial data triple plus self-description for ``problem``."""
    if problem == "soliton":
        triple = soliton_exact(soliton_params, grid, 0.0)
        meta = {"B": soliton_params.B, "C": soliton_params.C}
    elif problem == "example1":
        triple, scales = example1_data(grid, return_scales=True)
        meta = dict(scales)
    else:
        raise ValueError(f"unknown problem {problem!r}")
    return triple, meta


def build_example1_reference(
    grid: TorusGrid,
    T: float,
    tau_fine: float,
    agreement_tol: float = REFERENCE_AGREEMENT_TOL,
    dealias: bool = False,
):
    """Dual reference for the smooth benchmark: RK4 oracle cross-checked
    against a fine second-order run.

    The oracle runs at tau_fine capped by the stability bound; the
    cross-check runs the second-order scheme at tau_fine.  If the two
    disagree by more than ``agreement_tol`` in the s = 0 composite norm the
    study aborts.  Returns (reference triple, metadata).
    """
    data, _ = make_problem_data("example1", grid)
    tau_ref = min(tau_fine, rk4_stability_limit(grid))
    n_ref = max(1, int(math.ceil(T / tau_ref - 1e-12)))
    tau_ref = T / n_ref
    oracle = integrate_rk4(data, T, tau_ref, dealias=dealias)

    n_cross = max(1, int(round(T / tau_fine)))
    tau_cross = T / n_cross
    state = init_state(*data, Scheme.SECOND, tau_cross)
    P = PropagatorSet(grid, tau_cross, dealias=dealias)
    cross = advance(state, P, n_cross)

    agreement = composite_error(oracle, cross, 0.0)
    if agreement > agreement_tol:
        raise ReferenceMismatchError(
            f"RK4 oracle and fine second-order run disagree by {agreement:.3e} "
            f"(> {agreement_tol:g}) in the s=0 composite norm; study aborted"
        )
    meta = {
        "tau_ref": tau_ref,
        "tau_cross": tau_cross,
        "reference_agreement": agreement,
    }
    return oracle, meta


def convergence_study(
    scheme: Scheme | str,
    problem: str,
    tau_list,
    K: int,
    L: float,
    T: float,
    s: float = 0.0,
    *,
    dealias: bool = False,
    soliton_params: SolitonParams = SolitonParams(),
    reference=None,
    agreement_tol: float = REFERENCE_AGREEMENT_TOL,
    oracle_refine: int = 100,
) -> ConvergenceRecord:
    """Errors at t = T against the problem's reference for each tau.

    The solitary wave is measured against its exact solution; the smooth
    benchmark against the dual RK4/second-order reference at
    tau = min(tau_list)/oracle_refine (pass ``reference`` to reuse one
    across schemes).  Requires >= 4 distinct step sizes, each dividing T.
    """
    scheme = Scheme(scheme)
    taus = [float(t) for t in tau_list]
    if len(taus) < 4:
        raise ValueError(f"need at least 4 step sizes, got {len(taus)}")
    if len(set(taus)) != len(taus):
        raise ValueError("step sizes must be distinct")
    taus = sorted(taus, reverse=True)
    steps = {tau: _steps_for(tau, T) for tau in taus}
    if not T > 0.0:
        raise ValueError(f"T must be positive, got {T}")

    grid = TorusGrid(L, K)
    data, meta = make_problem_data(problem, grid, soliton_params)
    params = {
        "scheme": scheme.value, "problem": problem, "K": K, "L": L, "T": T,
        "s": s, "dealias": dealias, **meta,
    }

    if problem == "soliton":
        ref = soliton_exact(soliton_params, grid, T)
    elif reference is not None:
        ref = reference
    else:
        ref, ref_meta = build_example1_reference(
            grid, T, min(taus) / oracle_refine, agreement_tol, dealias
        )
        params.update(ref_meta)

    rows = []
    for tau in taus:
        state = init_state(*data, scheme, tau)
        P = PropagatorSet(grid, tau, dealias=dealias)
        final = advance(state, P, steps[tau])
        err_e, err_u, err_up = component_errors(final, ref, s)
        rows.append((tau, err_e, err_u, err_up, err_e + err_u + err_up))
    return ConvergenceRecord(
        scheme=scheme.value, problem=problem, s_index=s, params=params, rows=rows
    )


def conservation_run(
    scheme: Scheme | str,
    problem: str,
    CFL: float,
    K: int,
    L: float,
    T: float,
    *,
    sample_every: int = 1,
    dealias: bool = False,
    soliton_params: SolitonParams = SolitonParams(),
    linear_only: bool = False,
) -> RunRecord:
    """Time series of the conserved-quantity deviations at a given CFL.

    The nominal tau = CFL*dx^2 is rounded to the nearest exact divisor of T
    and the actual value is recorded in the output parameters.
    """
    scheme = Scheme(scheme)
    grid = TorusGrid(L, K)
    if not (CFL > 0.0 and T > 0.0):
        raise ValueError("CFL and T must be positive")
    tau_nominal = CFL * grid.dx**2
    nsteps = max(1, int(round(T / tau_nominal)))
    tau = T / nsteps
    data, meta = make_problem_data(problem, grid, soliton_params)
    result = run(
        scheme, data, tau, T, sample_every,
        dealias=dealias, linear_only=linear_only,
    )
    base = result.samples[0].diag
    rows = [
        (
            s.t, s.diag.l2_E, s.diag.hamiltonian,
            s.diag.l2_E - base.l2_E, s.diag.hamiltonian - base.hamiltonian,
            s.diag.mean_u, s.diag.mean_uprime,
        )
        for s in result.samples
    ]
    params = {
        "scheme": scheme.value, "problem": problem, "K": K, "L": L, "T": T,
        "CFL_requested": CFL, "CFL": tau / grid.dx**2, "tau": tau,
        "sample_every": sample_every, "dealias": dealias, **meta,
    }
    return RunRecord(
        scheme=scheme.value, problem=problem, cfl=tau / grid.dx**2,
        params=params, rows=rows,
    )


# ---------------------------------------------------------------------------
# CSV persistence

def _fmt(x: float) -> str:
    return format(float(x), ".16e")


def _params_line(params: dict) -> str:
    parts = []
    for key in sorted(params):
        val = params[key]
        if isinstance(val, bool):
            text = str(val).lower()
        elif isinstance(val, float):
            text = repr(val)
        else:
            text = str(val)
        if " " in text:
            raise ValueError(f"param value for {key!r} must not contain spaces")
        parts.append(f"{key}={text}")
    return "# params: " + " ".join(parts)


def _write_lines(path, lines) -> None:
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def csv_export(record, path) -> None:
    """Write a ConvergenceRecord or RunRecord to ``path``."""
    if isinstance(record, ConvergenceRecord):
        header = CONVERGENCE_HEADER
    elif isinstance(record, RunRecord):
        header = RUN_HEADER
    else:
        raise TypeError(f"cannot export {type(record).__name__}")
    lines = [MAGIC, _params_line(record.params), header]
    lines += [",".join(_fmt(v) for v in row) for row in record.rows]
    _write_lines(path, lines)


def snapshot_export(state: ZakharovState, path) -> None:
    """Write the physical-space profile of a state to ``path``."""
    grid = state.grid
    e_p, u_p, up_p = state.E.physical, state.u.physical, state.uprime.physical
    params = {
        "t": state.t, "n": state.n, "tau": state.tau,
        "scheme": state.scheme.value, "K": grid.modes, "L": grid.length,
    }
    lines = [MAGIC, _params_line(params), SNAPSHOT_HEADER]
    for j in range(grid.modes):
        lines.append(
            ",".join(
                _fmt(v)
                for v in (
                    grid.x[j], e_p[j].real, e_p[j].imag,
                    u_p[j].real, up_p[j].real, abs(e_p[j]),
                )
            )
        )
    _write_lines(path, lines)


def read_table(path):
    """Parse a harness CSV back into (params, header, columns).

    Returns the params as a str->str dict, the header as a list of column
    names and the columns as name -> float ndarray.
    """
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines or lines[0] != MAGIC:
        raise ValueError(f"{path}: missing magic line {MAGIC!r}")
    if len(lines) < 3 or not lines[1].startswith("# params: "):
        raise ValueError(f"{path}: missing params line")
    params = {}
    for item in lines[1][len("# params: "):].split():
        key, _, val = item.partition("=")
        params[key] = val
    header = lines[2].split(",")
    data = [
        [float(v) for v in line.split(",")] for line in lines[3:] if line
    ]
    arr = np.array(data, dtype=float).reshape(len(data), len(header))
    columns = {name: arr[:, i] for i, name in enumerate(header)}
    return params, header, columns
