"""Problem definitions for the coupled Schroedinger/wave (Zakharov) system.

The continuous model on the torus is

    1j*dE/dt + Lap(E) = u*E,
    d2u/dt2 - Lap(u)  = Lap(|E|^2),

for a complex envelope E and a real density fluctuation u.  The time
steppers advance the first-order reformulation in (F, u, u', E) with
F = dE/dt, which trades the derivative-loss in Lap(|E|^2) for the elliptic
reconstruction

    (1 - Lap) E = 1j*F - (u - 1) * (E(0) + integral_0^t F).

This module provides the state tuple, initial-data constructors (a smooth
normalized benchmark and the explicit solitary wave), conserved-quantity
diagnostics and the composite error norm used for convergence studies.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import symbols
from .spectral import (
    Field,
    TorusGrid,
    mean_value,
    require_same_grid,
    sobolev_norm,
)

#: |mean(uprime)| above which energy conservation is not guaranteed
MEAN_ZERO_TOL = 1e-8


class DomainTooSmallError(ValueError):
    """Raised when the torus cannot hold the requested solitary wave."""


class Scheme(str, Enum):
    """Time integrator family a state was initialized for."""

    FIRST = "first"
    SECOND = "second"


@dataclass(frozen=True)
class SolitonParams:
    """Solitary-wave parameters: width/amplitude B > 0 and speed |C| < 1."""

    B: float = 0.5
    C: float = 0.15

    def __post_init__(self) -> None:
        if not self.B > 0.0:
            raise ValueError(f"B must be positive, got {self.B}")
        if not abs(self.C) < 1.0:
            raise ValueError(f"|C| must be < 1, got {self.C}")
        # amplitude sqrt(2*B^2*(1-C^2)) is then automatically well-defined

    @property
    def amplitude(self) -> float:
        return math.sqrt(2.0 * self.B**2 * (1.0 - self.C**2))


@dataclass(frozen=True)
class ZakharovState:
    """State tuple advanced by the time steppers.

    Fields
    ------
    E, u, uprime : Field
        Envelope, density fluctuation and its time derivative.  u and
        uprime are mathematically real; they are stored complex and stay
        real to rounding under both schemes.
    F : Field
        Time derivative of E.
    S_F : Field
        Running accumulator of tau-weighted F history.  Its content is
        scheme-dependent: the first-order scheme seeds it with
        E0 + tau*F0 (so it directly approximates E0 + integral F), the
        second-order scheme with tau*F0 (history only).
    I_F : Field or None
        The second-order scheme's filtered approximation of
        E0 + integral F; None for the first-order scheme.
    E0 : Field
        Retained initial envelope.
    n, tau : step counter and step size; the current time is t = n*tau
        (computed, never accumulated).
    """

    E: Field
    u: Field
    uprime: Field
    F: Field
    S_F: Field
    I_F: Field | None
    E0: Field
    n: int
    tau: float
    scheme: Scheme

    def __post_init__(self) -> None:
        fields = [self.E, self.u, self.uprime, self.F, self.S_F, self.E0]
        if self.I_F is not None:
            fields.append(self.I_F)
        require_same_grid(*fields)

    @property
    def grid(self) -> TorusGrid:
        return self.E.grid

    @property
    def t(self) -> float:
        return self.n * self.tau

    def triple(self) -> tuple[Field, Field, Field]:
        """The (E, u, uprime) components compared against references."""
        return (self.E, self.u, self.uprime)


def _as_triple(obj) -> tuple[Field, Field, Field]:
    if isinstance(obj, ZakharovState):
        return obj.triple()
    e, u, up = obj
    return (e, u, up)


def init_state(
    E0: Field, u0: Field, u1: Field, scheme: Scheme | str, tau: float
) -> ZakharovState:
    """Initialize a scheme state from initial data (E0, u0, u1).

    Sets F0 = 1j*(Lap(E0) - u0*E0) and the scheme-specific accumulator
    seeds: S_F0 = E0 + tau*F0 for the first-order scheme, and
    S_F0 = tau*F0 together with I_F0 = E0 for the second-order scheme.
    """
    grid = require_same_grid(E0, u0, u1)
    scheme = Scheme(scheme)
    if not tau > 0.0:
        raise ValueError(f"tau must be positive, got {tau}")
    lap_e = grid.to_physical_array(symbols.laplacian(grid.k) * E0.spectral)
    f0 = Field.from_physical(grid, 1j * (lap_e - u0.physical * E0.physical))
    if scheme is Scheme.FIRST:
        s_f = Field.from_spectral(grid, E0.spectral + tau * f0.spectral)
        i_f = None
    else:
        s_f = Field.from_spectral(grid, tau * f0.spectral)
        i_f = E0
    return ZakharovState(
        E=E0, u=u0, uprime=u1, F=f0, S_F=s_f, I_F=i_f, E0=E0,
        n=0, tau=float(tau), scheme=scheme,
    )


def example1_data(
    grid: TorusGrid, return_scales: bool = False
):
    """Smooth benchmark initial data on the 2*pi torus, normalized so that
    ||E0||_2 = ||u0||_1 = ||u1||_0 = 1 (each datum divided by its own norm).

    With ``return_scales=True`` also returns the three normalization
    divisors so runs are reinterpretable.
    """
    if abs(grid.length - 2.0 * np.pi) > 1e-12:
        raise ValueError(
            f"this benchmark is defined on length 2*pi, got {grid.length}"
        )
    x = grid.x
    e_raw = (
        np.sin(2 * x) * np.cos(4 * x) / (2.0 - np.cos(x) * np.sin(2 * x))
        + 1j * np.sin(2 * x) * np.cos(x)
    )
    u_raw = np.sin(x) * np.cos(2 * x) / (2.0 - np.sin(2 * x) ** 2)
    u1_raw = np.sin(x) / (2.0 - np.cos(2 * x) ** 2)

    e_field = Field.from_physical(grid, e_raw)
    u_field = Field.from_physical(grid, u_raw)
    u1_field = Field.from_physical(grid, u1_raw)
    scale_e = sobolev_norm(e_field, 2.0)
    scale_u = sobolev_norm(u_field, 1.0)
    scale_u1 = sobolev_norm(u1_field, 0.0)
    triple = (
        Field.from_physical(grid, e_raw / scale_e),
        Field.from_physical(grid, u_raw / scale_u),
        Field.from_physical(grid, u1_raw / scale_u1),
    )
    if return_scales:
        return triple, {"scale_E": scale_e, "scale_u": scale_u, "scale_u1": scale_u1}
    return triple


def soliton_exact(
    params: SolitonParams, grid: TorusGrid, t: float
) -> tuple[Field, Field, Field]:
    """Evaluate the explicit solitary-wave solution at time ``t``.

    E(t,x)  = sqrt(2 B^2 (1-C^2)) sech(B(x-Ct)) exp(1j(Cx/2 - (C^2/4 - B^2)t))
    u(t,x)  = -2 B^2 sech^2(B(x-Ct))
    u'(t,x) = -4 B^3 C sinh(B(x-Ct)) cosh^{-3}(B(x-Ct))

    Evaluated at the collocation points without periodic wrapping; the
    preconditions keep the exponential tails negligible at the boundary.
    """
    b, c = params.B, params.C
    half = 0.5 * grid.length
    if b * half < 15.0:
        raise DomainTooSmallError(
            f"need B*L/2 >= 15 to truncate the tails, got {b * half:.3f}; "
            f"increase L or B"
        )
    center = c * t
    margin = 5.0 / b
    if not (-half + margin < center < half - margin):
        raise DomainTooSmallError(
            f"soliton center C*t = {center:.3f} leaves the safe region "
            f"(+-{half - margin:.3f}) of the torus"
        )
    xi = grid.x - center
    sech = 1.0 / np.cosh(b * xi)
    phase = np.exp(1j * (0.5 * c * grid.x - (0.25 * c**2 - b**2) * t))
    e_vals = params.amplitude * sech * phase
    u_vals = -2.0 * b**2 * sech**2
    up_vals = -4.0 * b**3 * c * np.sinh(b * xi) * sech**3
    return (
        Field.from_physical(grid, e_vals),
        Field.from_physical(grid, u_vals),
        Field.from_physical(grid, up_vals),
    )


def hamiltonian(state, *, warn: bool = True) -> float:
    """Energy functional, computed spectrally:

        H = integral |grad E|^2 + u|E|^2 + 1/2 ||grad|^{-1} u'|^2 + 1/2 u^2 dx,

    where |grad|^{-1} zeroes the constant mode.  Conservation along the flow
    requires mean(uprime) = 0; outside that regime a warning is emitted and
    the value is still returned.  Accepts a state or an (E, u, uprime)
    triple.
    """
    e, u, up = _as_triple(state)
    grid = require_same_grid(e, u, up)
    length = grid.length
    k = grid.k
    grad_term = length * np.sum(k**2 * np.abs(e.spectral) ** 2)
    coupling = grid.dx * np.sum(u.physical * np.abs(e.physical) ** 2)
    inv_grad = symbols.abs_grad_pow(k, -1.0)
    wave_term = 0.5 * length * np.sum((inv_grad * np.abs(up.spectral)) ** 2)
    u_term = 0.5 * length * np.sum(np.abs(u.spectral) ** 2)
    total = grad_term + coupling + wave_term + u_term
    if abs(total.imag) > 1e-10:
        raise ValueError(
            f"imaginary residue {total.imag:.3e} in the energy exceeds 1e-10; "
            f"u has drifted off the real axis"
        )
    if warn and abs(mean_value(up)) > MEAN_ZERO_TOL:
        warnings.warn(
            f"mean(uprime) = {mean_value(up):.3e} is not zero; "
            f"the energy is not a conserved quantity for this data",
            stacklevel=2,
        )
    return float(total.real)


def l2_norm_E(state) -> float:
    """Collocation L2 norm of the envelope (the first conserved quantity)."""
    e, _, _ = _as_triple(state)
    return sobolev_norm(e, 0.0)


def component_errors(a, b, s: float) -> tuple[float, float, float]:
    """Per-component errors (||dE||_{s+2}, ||du||_{s+1}, ||duprime||_s)."""
    ea, ua, upa = _as_triple(a)
    eb, ub, upb = _as_triple(b)
    grid = require_same_grid(ea, ua, upa, eb, ub, upb)
    d_e = Field.from_spectral(grid, ea.spectral - eb.spectral)
    d_u = Field.from_spectral(grid, ua.spectral - ub.spectral)
    d_up = Field.from_spectral(grid, upa.spectral - upb.spectral)
    return (
        sobolev_norm(d_e, s + 2.0),
        sobolev_norm(d_u, s + 1.0),
        sobolev_norm(d_up, s),
    )


def composite_error(a, b, s: float) -> float:
    """Composite norm ||E_a-E_b||_{s+2} + ||u_a-u_b||_{s+1} + ||u'_a-u'_b||_s.

    s = 0 measures strong solutions (H2 x H1 x L2), s = -1 the energy space
    (H1 x L2 x H-1).
    """
    return sum(component_errors(a, b, s))


@dataclass(frozen=True)
class Diagnostics:
    """Scalar diagnostics sampled along a run; all values finite."""

    l2_E: float
    hamiltonian: float
    mean_u: float
    mean_uprime: float
    mean_zero_ok: bool


def diagnostics(state) -> Diagnostics:
    """Compute the conserved-quantity diagnostics of a state."""
    e, u, up = _as_triple(state)
    mean_up = mean_value(up)
    # non-finite states are reported by the steppers; keep their overflow
    # out of the diagnostics warning stream
    with np.errstate(over="ignore", invalid="ignore"):
        return Diagnostics(
            l2_E=l2_norm_E(state),
            hamiltonian=hamiltonian(state, warn=False),
            mean_u=float(mean_value(u).real),
            mean_uprime=float(mean_up.real),
            mean_zero_ok=bool(abs(mean_up) <= MEAN_ZERO_TOL),
        )
