"""Time steppers: first- and second-order trigonometric schemes and an RK4
method-of-lines oracle.

Both trigonometric schemes apply the exact linear propagators per mode
(free Schroedinger phase for F, the rotation cos/sin pair for (u, u')) and
filtered averages of the nonlinearity, so they carry no CFL-type step
restriction: with E = 0 the wave part is propagated exactly for any tau.
Nonlinear products are formed on the collocation points, derivatives in
spectral space.

A step is a pure state -> state function; runs are sequential by data
dependence but independent runs may execute concurrently.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field as dc_field
from functools import cached_property

import numpy as np

from . import symbols
from .model import Diagnostics, Scheme, ZakharovState, diagnostics, init_state
from .spectral import Field, TorusGrid, require_same_grid


class DivergenceError(RuntimeError):
    """A state component became non-finite; the run is aborted."""

    def __init__(self, field_name: str, step: int):
        super().__init__(
            f"non-finite values in {field_name} at step {step}; "
            f"the iteration diverged"
        )
        self.field_name = field_name
        self.step = step


class OracleStabilityError(ValueError):
    """RK4 reference step size violates the stability precondition."""

    def __init__(self, tau_ref: float, limit: float):
        super().__init__(
            f"RK4 reference step {tau_ref:.3e} exceeds the stability bound "
            f"0.5*dx^2 = {limit:.3e}; use tau_ref <= {limit:.3e}"
        )
        self.tau_ref = tau_ref
        self.limit = limit


@dataclass(frozen=True)
class PropagatorSet:
    """Per-mode multiplier arrays for a fixed step size tau.

    Zero-mode entries carry the analytic limits (free_flow -> 1,
    filter1 -> -1, filter2 -> -1j*tau/2, wave_cos -> 1,
    wave_sin_over_grad -> tau, grad_sin -> 0, one_minus_cos -> 0,
    wave_sinc -> 1, helmholtz_inv -> 1), supplied by the series branches of
    :mod:`symbols`.  ``dealias`` selects the 2/3-rule product policy used
    by the steppers built on this set.
    """

    grid: TorusGrid
    tau: float
    dealias: bool = False

    def __post_init__(self) -> None:
        if not self.tau > 0.0:
            raise ValueError(f"tau must be positive, got {self.tau}")

    @cached_property
    def free_flow(self) -> np.ndarray:
        return symbols.free_flow(self.grid.k, self.tau)

    @cached_property
    def filter1(self) -> np.ndarray:
        return symbols.exp_filter1(self.grid.k, self.tau)

    @cached_property
    def filter2(self) -> np.ndarray:
        return symbols.exp_filter2(self.grid.k, self.tau)

    @cached_property
    def wave_cos(self) -> np.ndarray:
        return symbols.wave_cos(self.grid.k, self.tau)

    @cached_property
    def wave_sin_over_grad(self) -> np.ndarray:
        return symbols.wave_sin_over_grad(self.grid.k, self.tau)

    @cached_property
    def grad_sin(self) -> np.ndarray:
        return symbols.wave_grad_sin(self.grid.k, self.tau)

    @cached_property
    def one_minus_cos(self) -> np.ndarray:
        return symbols.wave_one_minus_cos(self.grid.k, self.tau)

    @cached_property
    def wave_sinc(self) -> np.ndarray:
        return symbols.wave_sinc(self.grid.k, self.tau)

    @cached_property
    def helmholtz_inv(self) -> np.ndarray:
        return symbols.helmholtz_inverse(self.grid.k)

    @cached_property
    def lap(self) -> np.ndarray:
        return symbols.laplacian(self.grid.k)

    @cached_property
    def u_source_first(self) -> np.ndarray:
        # tau * |grad|^{-1} * (1-cos)/(tau|grad|) * Lap collapses per mode to
        # -(1 - cos(tau*kappa)), which is exactly 0 on the zero mode; the
        # combined form avoids an explicit |grad|^{-1}.
        return self.wave_cos - 1.0

    @cached_property
    def uprime_source_first(self) -> np.ndarray:
        # tau * sinc(tau|grad|) * Lap == -|kappa| sin(tau|kappa|) per mode
        return -self.grad_sin

    @cached_property
    def u_source_second(self) -> np.ndarray:
        # (tau/2) * sin(tau|grad|)/|grad| * Lap == -(tau/2)|kappa| sin(tau|kappa|)
        return -(0.5 * self.tau) * self.grad_sin

    def spec(self, values: np.ndarray) -> np.ndarray:
        """Physical -> spectral, applying the product dealias policy."""
        coeffs = self.grid.to_spectral_array(values)
        if self.dealias:
            coeffs = coeffs * self.grid.dealias_mask
        return coeffs

    def phys(self, coeffs: np.ndarray) -> np.ndarray:
        return self.grid.to_physical_array(coeffs)


def _check_state(state: ZakharovState, P: PropagatorSet, scheme: Scheme) -> None:
    if state.scheme is not scheme:
        raise ValueError(
            f"state was initialized for scheme {state.scheme.value!r}, "
            f"stepper expects {scheme.value!r}"
        )
    if state.tau != P.tau:
        raise ValueError(
            f"state tau {state.tau} does not match propagator tau {P.tau}"
        )
    if state.grid != P.grid:
        raise ValueError("state and propagators live on different grids")


def _check_finite(step: int, **named_arrays: np.ndarray) -> None:
    for name, arr in named_arrays.items():
        if not np.all(np.isfinite(arr)):
            raise DivergenceError(name, step)


def _quiet_overflow(fn):
    # divergence is detected by _check_finite; keep numpy warnings out of it
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        with np.errstate(over="ignore", invalid="ignore"):
            return fn(*args, **kwargs)

    return wrapper


@_quiet_overflow
def step_first_order(state: ZakharovState, P: PropagatorSet) -> ZakharovState:
    """One step of the first-order trigonometric scheme.

    Per-mode updates (hats denote coefficients, products on the grid):

        F^{n+1}  = e^{-1j tau k^2} F^n + 1j tau filter1 (u F + u' S_F)^
        u^{n+1}  = cos u^n + (sin/|k|) u'^n - (1 - cos(tau k)) (|E^n|^2)^
        u'^{n+1} = -|k| sin u^n + cos u'^n - |k| sin(tau k) (|E^n|^2)^
        S_F^{n+1} = S_F^n + tau F^{n+1}
        E^{n+1}  = (1 + k^2)^{-1} (1j F^{n+1} - ((u^{n+1} - 1) S_F^{n+1})^)
    """
    _check_state(state, P, Scheme.FIRST)
    grid, tau = state.grid, P.tau
    n_next = state.n + 1

    u_hat, up_hat, f_hat, sf_hat = (
        state.u.spectral, state.uprime.spectral, state.F.spectral,
        state.S_F.spectral,
    )
    drive = (
        state.u.physical * state.F.physical
        + state.uprime.physical * state.S_F.physical
    )
    f_new = P.free_flow * f_hat + (1j * tau) * P.filter1 * P.spec(drive)

    g_hat = P.spec(np.abs(state.E.physical) ** 2)
    u_new = P.wave_cos * u_hat + P.wave_sin_over_grad * up_hat + P.u_source_first * g_hat
    up_new = -P.grad_sin * u_hat + P.wave_cos * up_hat + P.uprime_source_first * g_hat

    sf_new = sf_hat + tau * f_new

    u_new_field = Field.from_spectral(grid, u_new)
    sf_new_field = Field.from_spectral(grid, sf_new)
    coupling = P.spec(u_new_field.physical * sf_new_field.physical) - sf_new
    e_new = P.helmholtz_inv * (1j * f_new - coupling)

    _check_finite(n_next, F=f_new, u=u_new, uprime=up_new, S_F=sf_new, E=e_new)
    return ZakharovState(
        E=Field.from_spectral(grid, e_new),
        u=u_new_field,
        uprime=Field.from_spectral(grid, up_new),
        F=Field.from_spectral(grid, f_new),
        S_F=sf_new_field,
        I_F=None,
        E0=state.E0,
        n=n_next,
        tau=state.tau,
        scheme=state.scheme,
    )


@_quiet_overflow
def step_second_order(state: ZakharovState, P: PropagatorSet) -> ZakharovState:
    """One step of the second-order trigonometric scheme.

    The evaluation order matters: E^{n+1} is reconstructed before u'^{n+1},
    whose trapezoidal source uses |E^{n+1}|^2, keeping the scheme fully
    explicit.
    """
    _check_state(state, P, Scheme.SECOND)
    grid, tau = state.grid, P.tau
    n_next = state.n + 1

    u_hat, up_hat, f_hat = state.u.spectral, state.uprime.spectral, state.F.spectral
    if_hat, sf_hat = state.I_F.spectral, state.S_F.spectral
    u_p, up_p, f_p = state.u.physical, state.uprime.physical, state.F.physical
    if_p, sf_p, e_p = state.I_F.physical, state.S_F.physical, state.E.physical
    e0_p = state.E0.physical

    g_hat = P.spec(np.abs(e_p) ** 2)
    lap_f_p = P.phys(P.lap * f_hat)
    lap_mix_p = P.phys(P.lap * (u_hat + g_hat))

    # (1) filtered F update: first-order drive plus its time derivative,
    #     substituted from the differential equations
    drive1 = u_p * f_p + up_p * if_p
    drive2 = (
        2.0 * up_p * f_p
        + 1j * u_p * (lap_f_p - u_p * f_p - up_p * if_p)
        + if_p * lap_mix_p
    )
    f_new = (
        P.free_flow * f_hat
        + (1j * tau) * P.filter1 * P.spec(drive1)
        + tau * P.filter2 * P.spec(drive2)
    )

    # (2) wave update of u with the trapezoidal half-weight source
    u_new = P.wave_cos * u_hat + P.wave_sin_over_grad * up_hat + P.u_source_second * g_hat

    # (3) running filtered integral of F
    accum_drive = u_p * f_p + up_p * (e0_p + sf_p)
    if_new = if_hat - tau * P.filter1 * f_hat + tau * P.filter2 * P.spec(accum_drive)

    # (4) elliptic reconstruction of E from (F, u, I_F)
    u_new_field = Field.from_spectral(grid, u_new)
    if_new_field = Field.from_spectral(grid, if_new)
    coupling = P.spec(u_new_field.physical * if_new_field.physical) - if_new
    e_new = P.helmholtz_inv * (1j * f_new - coupling)

    # (5) wave update of u' with the trapezoidal endpoint pair
    e_new_field = Field.from_spectral(grid, e_new)
    g_new_hat = P.spec(np.abs(e_new_field.physical) ** 2)
    up_new = (
        -P.grad_sin * u_hat
        + P.wave_cos * up_hat
        + (0.5 * tau) * (P.lap * g_new_hat + P.wave_cos * (P.lap * g_hat))
    )

    # (6) plain accumulator
    sf_new = sf_hat + tau * f_new

    _check_finite(
        n_next, F=f_new, u=u_new, uprime=up_new, I_F=if_new, S_F=sf_new, E=e_new
    )
    return ZakharovState(
        E=e_new_field,
        u=u_new_field,
        uprime=Field.from_spectral(grid, up_new),
        F=Field.from_spectral(grid, f_new),
        S_F=Field.from_spectral(grid, sf_new),
        I_F=if_new_field,
        E0=state.E0,
        n=n_next,
        tau=state.tau,
        scheme=state.scheme,
    )


@_quiet_overflow
def _step_linear_only(state: ZakharovState, P: PropagatorSet) -> ZakharovState:
    """Diagnostic stepper with every nonlinear coupling removed.

    E and F follow the free Schroedinger group (unitary per mode), (u, u')
    the exact wave rotation; used to sanity-check the conservation
    diagnostics against exactly unitary flow.
    """
    if state.tau != P.tau or state.grid != P.grid:
        raise ValueError("state does not match the propagator set")
    grid, tau = state.grid, P.tau
    u_hat, up_hat = state.u.spectral, state.uprime.spectral
    f_new = P.free_flow * state.F.spectral
    e_new = P.free_flow * state.E.spectral
    u_new = P.wave_cos * u_hat + P.wave_sin_over_grad * up_hat
    up_new = -P.grad_sin * u_hat + P.wave_cos * up_hat
    sf_new = state.S_F.spectral + tau * f_new
    _check_finite(state.n + 1, F=f_new, u=u_new, uprime=up_new, E=e_new)
    return ZakharovState(
        E=Field.from_spectral(grid, e_new),
        u=Field.from_spectral(grid, u_new),
        uprime=Field.from_spectral(grid, up_new),
        F=Field.from_spectral(grid, f_new),
        S_F=Field.from_spectral(grid, sf_new),
        I_F=state.I_F,
        E0=state.E0,
        n=state.n + 1,
        tau=state.tau,
        scheme=state.scheme,
    )


_STEPPERS = {
    Scheme.FIRST: step_first_order,
    Scheme.SECOND: step_second_order,
}


# ---------------------------------------------------------------------------
# RK4 method-of-lines oracle

def rk4_stability_limit(grid: TorusGrid) -> float:
    """Largest reference step the oracle accepts: 0.5*dx^2."""
    return 0.5 * grid.dx**2


def step_rk4_oracle(
    triple: tuple[Field, Field, Field],
    tau_ref: float,
    grid: TorusGrid | None = None,
    dealias: bool = False,
) -> tuple[Field, Field, Field]:
    """One classical RK4 step of the method-of-lines system

        dE/dt = 1j*Lap(E) - 1j*u*E,   du/dt = v,   dv/dt = Lap(u) + Lap(|E|^2)

    in spectral space.  Refuses step sizes above ``rk4_stability_limit``.
    """
    e, u, v = triple
    if grid is None:
        grid = e.grid
    require_same_grid(e, u, v)
    limit = rk4_stability_limit(grid)
    if tau_ref > limit:
        raise OracleStabilityError(tau_ref, limit)
    lap = symbols.laplacian(grid.k)
    mask = grid.dealias_mask if dealias else None
    y = (e.spectral, u.spectral, v.spectral)
    y_new = _rk4_step_arrays(y, tau_ref, grid, lap, mask)
    return (
        Field.from_spectral(grid, y_new[0]),
        Field.from_spectral(grid, y_new[1]),
        Field.from_spectral(grid, y_new[2]),
    )


def _rk4_rhs(y, grid: TorusGrid, lap: np.ndarray, mask: np.ndarray | None):
    e_hat, u_hat, v_hat = y
    e_p = grid.to_physical_array(e_hat)
    u_p = grid.to_physical_array(u_hat)
    ue_hat = grid.to_spectral_array(u_p * e_p)
    g_hat = grid.to_spectral_array(np.abs(e_p) ** 2)
    if mask is not None:
        ue_hat = ue_hat * mask
        g_hat = g_hat * mask
    de = 1j * lap * e_hat - 1j * ue_hat
    dv = lap * (u_hat + g_hat)
    return (de, v_hat, dv)


@_quiet_overflow
def _rk4_step_arrays(y, tau: float, grid: TorusGrid, lap, mask):
    k1 = _rk4_rhs(y, grid, lap, mask)
    k2 = _rk4_rhs(tuple(a + 0.5 * tau * b for a, b in zip(y, k1)), grid, lap, mask)
    k3 = _rk4_rhs(tuple(a + 0.5 * tau * b for a, b in zip(y, k2)), grid, lap, mask)
    k4 = _rk4_rhs(tuple(a + tau * b for a, b in zip(y, k3)), grid, lap, mask)
    return tuple(
        a + (tau / 6.0) * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
        for a, b1, b2, b3, b4 in zip(y, k1, k2, k3, k4)
    )


def integrate_rk4(
    data: tuple[Field, Field, Field],
    T: float,
    tau_ref: float,
    dealias: bool = False,
    check_every: int = 50,
) -> tuple[Field, Field, Field]:
    """Advance the oracle from t = 0 to t = T in steps of tau_ref.

    tau_ref must divide T within rounding; divergence is detected every
    ``check_every`` steps and reported with the failing step index.
    """
    e, u, v = data
    grid = require_same_grid(e, u, v)
    limit = rk4_stability_limit(grid)
    if tau_ref > limit:
        raise OracleStabilityError(tau_ref, limit)
    nsteps = int(round(T / tau_ref))
    if abs(nsteps * tau_ref - T) > 1e-9 * max(1.0, abs(T)):
        raise ValueError(f"tau_ref = {tau_ref} does not divide T = {T}")
    lap = symbols.laplacian(grid.k)
    mask = grid.dealias_mask if dealias else None
    y = (e.spectral, u.spectral, v.spectral)
    for n in range(nsteps):
        y = _rk4_step_arrays(y, tau_ref, grid, lap, mask)
        if (n + 1) % check_every == 0 and not np.all(np.isfinite(y[0])):
            raise DivergenceError("E", n + 1)
    _check_finite(nsteps, E=y[0], u=y[1], v=y[2])
    return (
        Field.from_spectral(grid, y[0]),
        Field.from_spectral(grid, y[1]),
        Field.from_spectral(grid, y[2]),
    )


# ---------------------------------------------------------------------------
# run driver

@dataclass(frozen=True)
class Sample:
    """One diagnostics record along a trajectory."""

    n: int
    t: float
    diag: Diagnostics


@dataclass(frozen=True)
class RunResult:
    """Trajectory summary: sampled diagnostics, snapshots, final state."""

    samples: list[Sample]
    final_state: ZakharovState
    snapshots: list[tuple[float, ZakharovState]] = dc_field(default_factory=list)


def advance(state: ZakharovState, P: PropagatorSet, nsteps: int) -> ZakharovState:
    """Apply ``nsteps`` scheme steps without sampling diagnostics."""
    stepper = _STEPPERS[state.scheme]
    for _ in range(nsteps):
        state = stepper(state, P)
    return state


def run(
    scheme: Scheme | str,
    data: tuple[Field, Field, Field],
    tau: float,
    T: float,
    sample_every: int = 1,
    *,
    dealias: bool = False,
    snapshot_times: tuple[float, ...] = (),
    linear_only: bool = False,
) -> RunResult:
    """Advance from t = 0 to t = T, recording diagnostics along the way.

    tau must divide T within rounding; diagnostics are recorded at t = 0,
    every ``sample_every``-th step and at the final step.  Deterministic
    given identical inputs.  Divergence errors propagate with the failing
    step index.
    """
    if sample_every < 1:
        raise ValueError(f"sample_every must be >= 1, got {sample_every}")
    if T < 0.0:
        raise ValueError(f"T must be >= 0, got {T}")
    nsteps = int(round(T / tau)) if T > 0.0 else 0
    if T > 0.0 and abs(nsteps * tau - T) > 1e-9 * max(1.0, abs(T)):
        raise ValueError(f"tau = {tau} does not divide T = {T}")

    e0, u0, u1 = data
    state = init_state(e0, u0, u1, scheme, tau)
    P = PropagatorSet(state.grid, tau, dealias=dealias)
    stepper = _step_linear_only if linear_only else _STEPPERS[state.scheme]

    snapshot_steps = {}
    for t_req in snapshot_times:
        n_req = int(round(t_req / tau)) if tau > 0 else 0
        if not 0 <= n_req <= nsteps:
            raise ValueError(f"snapshot time {t_req} outside [0, {T}]")
        snapshot_steps.setdefault(n_req, t_req)

    samples = [Sample(0, 0.0, diagnostics(state))]
    snapshots = []
    if 0 in snapshot_steps:
        snapshots.append((state.t, state))
    for n in range(1, nsteps + 1):
        state = stepper(state, P)
        if n % sample_every == 0 or n == nsteps:
            samples.append(Sample(n, state.t, diagnostics(state)))
        if n in snapshot_steps:
            snapshots.append((state.t, state))
    return RunResult(samples=samples, final_state=state, snapshots=snapshots)
