"""Scalar Fourier-multiplier symbols m(kappa) used throughout the solver.

Every function is vectorized over arrays of physical wavenumbers kappa and
is finite at kappa = 0.  Symbols whose closed form is 0/0 there switch to a
4-term Taylor expansion once the relevant argument drops below
``SERIES_THRESHOLD``; the series both supplies the analytic limit on the
zero mode and avoids the catastrophic cancellation that would otherwise
pollute nearby modes (and with it the order-2 error constant).

Convention: the Laplacian symbol is -kappa**2, so the free Schroedinger
group exp(i*tau*Laplacian) acts as exp(-1j*tau*kappa**2) per mode.

Zero-mode values (tau is the step size where it appears):

==========================  =============
symbol                      value at k=0
==========================  =============
laplacian                   0
abs_grad_pow(s)             0 (any s)
sobolev_weight(s)           1 (any s)
free_flow                   1
helmholtz_inverse           1
wave_cos                    1
wave_sin_over_grad          tau
wave_grad_sin               0
wave_one_minus_cos          0
wave_sinc                   1
exp_filter1                 -1
exp_filter2                 -1j*tau/2
==========================  =============
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

#: arguments (tau*kappa**2 for the filters, tau*|kappa| for the wave
#: symbols) below this switch to the series branch
SERIES_THRESHOLD = 1e-4


def laplacian(kappa: np.ndarray) -> np.ndarray:
    """Symbol of the Laplacian: -kappa**2."""
    return -np.asarray(kappa, dtype=float) ** 2


def abs_grad_pow(kappa: np.ndarray, s: float) -> np.ndarray:
    """Symbol |kappa|**s with the zero mode set to 0 for every s.

    Killing the zero mode realizes |grad|**(-1) on mean-free data, which is
    the only place negative powers are needed.
    """
    ak = np.abs(np.asarray(kappa, dtype=float))
    zero = ak == 0.0
    ak_safe = np.where(zero, 1.0, ak)
    return np.where(zero, 0.0, ak_safe**s)


def sobolev_weight(kappa: np.ndarray, s: float) -> np.ndarray:
    """Symbol |kappa|**s with the zero mode set to 1 for every s.

    This is the weight of the inhomogeneous-style norm in which the mean
    enters unweighted, keeping negative-s norms finite.
    """
    ak = np.abs(np.asarray(kappa, dtype=float))
    zero = ak == 0.0
    ak_safe = np.where(zero, 1.0, ak)
    return np.where(zero, 1.0, ak_safe**s)


def free_flow(kappa: np.ndarray, tau: float) -> np.ndarray:
    """Free Schroedinger phase exp(-1j*tau*kappa**2); modulus one."""
    return np.exp(-1j * tau * np.asarray(kappa, dtype=float) ** 2)


def helmholtz_inverse(kappa: np.ndarray) -> np.ndarray:
    """Symbol of (1 - Laplacian)**(-1): 1/(1 + kappa**2)."""
    return 1.0 / (1.0 + np.asarray(kappa, dtype=float) ** 2)


def wave_cos(kappa: np.ndarray, tau: float) -> np.ndarray:
    """cos(tau*|kappa|)."""
    return np.cos(tau * np.abs(np.asarray(kappa, dtype=float)))


def wave_sin_over_grad(kappa: np.ndarray, tau: float) -> np.ndarray:
    """sin(tau*|kappa|)/|kappa|, limit tau at kappa = 0."""
    ak = np.abs(np.asarray(kappa, dtype=float))
    y = tau * ak
    small = np.abs(y) < SERIES_THRESHOLD
    ak_safe = np.where(small, 1.0, ak)
    direct = np.sin(y) / ak_safe
    series = tau * (1.0 - y**2 / 6.0 + y**4 / 120.0 - y**6 / 5040.0)
    return np.where(small, series, direct)


def wave_grad_sin(kappa: np.ndarray, tau: float) -> np.ndarray:
    """|kappa|*sin(tau*|kappa|); vanishes at kappa = 0."""
    ak = np.abs(np.asarray(kappa, dtype=float))
    return ak * np.sin(tau * ak)


def wave_one_minus_cos(kappa: np.ndarray, tau: float) -> np.ndarray:
    """(1 - cos(tau*|kappa|))/(tau*|kappa|), limit 0 at kappa = 0."""
    y = tau * np.abs(np.asarray(kappa, dtype=float))
    small = np.abs(y) < SERIES_THRESHOLD
    y_safe = np.where(small, 1.0, y)
    direct = (1.0 - np.cos(y)) / y_safe
    series = y / 2.0 - y**3 / 24.0 + y**5 / 720.0 - y**7 / 40320.0
    return np.where(small, series, direct)


def wave_sinc(kappa: np.ndarray, tau: float) -> np.ndarray:
    """sin(tau*|kappa|)/(tau*|kappa|), limit 1 at kappa = 0."""
    y = tau * np.abs(np.asarray(kappa, dtype=float))
    small = np.abs(y) < SERIES_THRESHOLD
    y_safe = np.where(small, 1.0, y)
    direct = np.sin(y) / y_safe
    series = 1.0 - y**2 / 6.0 + y**4 / 120.0 - y**6 / 5040.0
    return np.where(small, series, direct)


def exp_filter1(kappa: np.ndarray, tau: float) -> np.ndarray:
    """First exponential-integrator filter (1 - e^{i tau Lap})/(i tau Lap).

    Equals -1 at kappa = 0 and is bounded by 2 in modulus everywhere.
    """
    arg = tau * np.asarray(kappa, dtype=float) ** 2
    m = -1j * arg
    small = np.abs(arg) < SERIES_THRESHOLD
    m_safe = np.where(small, 1.0, m)
    direct = (1.0 - np.exp(m_safe)) / m_safe
    series = -(1.0 + m / 2.0 + m**2 / 6.0 + m**3 / 24.0)
    return np.where(small, series, direct)


def exp_filter2(kappa: np.ndarray, tau: float) -> np.ndarray:
    """Second filter Lap**(-1) * (1 + exp_filter1); limit -1j*tau/2 at 0.

    The product of this symbol with the Laplacian symbol is 1 + exp_filter1
    and therefore bounded by 3 in modulus.
    """
    lap = -np.asarray(kappa, dtype=float) ** 2
    arg = tau * np.asarray(kappa, dtype=float) ** 2
    m = 1j * tau * lap
    small = np.abs(arg) < SERIES_THRESHOLD
    m_safe = np.where(small, 1.0, m)
    f1 = (1.0 - np.exp(m_safe)) / m_safe
    lap_safe = np.where(small, 1.0, lap)
    direct = (1.0 + f1) / lap_safe
    series = (
        -0.5j * tau
        + (tau**2 / 6.0) * lap
        + (1j * tau**3 / 24.0) * lap**2
        - (tau**4 / 120.0) * lap**3
    )
    return np.where(small, series, direct)


class SymbolKind(Enum):
    """Enumerated multiplier symbols recognized by :class:`MultiplierSymbol`."""

    LAPLACIAN = "laplacian"
    ABS_GRAD = "abs_grad"
    SOBOLEV = "sobolev"
    FREE_FLOW = "free_flow"
    HELMHOLTZ_INVERSE = "helmholtz_inverse"
    WAVE_COS = "wave_cos"
    WAVE_SIN_OVER_GRAD = "wave_sin_over_grad"
    WAVE_GRAD_SIN = "wave_grad_sin"
    WAVE_ONE_MINUS_COS = "wave_one_minus_cos"
    WAVE_SINC = "wave_sinc"
    EXP_FILTER1 = "exp_filter1"
    EXP_FILTER2 = "exp_filter2"


_NEEDS_TAU = {
    SymbolKind.FREE_FLOW,
    SymbolKind.WAVE_COS,
    SymbolKind.WAVE_SIN_OVER_GRAD,
    SymbolKind.WAVE_GRAD_SIN,
    SymbolKind.WAVE_ONE_MINUS_COS,
    SymbolKind.WAVE_SINC,
    SymbolKind.EXP_FILTER1,
    SymbolKind.EXP_FILTER2,
}

_NEEDS_S = {SymbolKind.ABS_GRAD, SymbolKind.SOBOLEV}


@dataclass(frozen=True)
class MultiplierSymbol:
    """A scalar symbol m(kappa) given as an enumerated kind plus parameters.

    ``tau`` is required for the time-dependent symbols, ``s`` for the
    fractional powers.  Every kind has a finite, documented value at
    kappa = 0 (see the module docstring table).
    """

    kind: SymbolKind
    tau: float | None = None
    s: float | None = None

    def __post_init__(self) -> None:
        if self.kind in _NEEDS_TAU and self.tau is None:
            raise ValueError(f"symbol {self.kind.value} requires tau")
        if self.kind in _NEEDS_S and self.s is None:
            raise ValueError(f"symbol {self.kind.value} requires s")

    def evaluate(self, kappa: np.ndarray) -> np.ndarray:
        """Evaluate the symbol elementwise on an array of wavenumbers."""
        k = self.kind
        if k is SymbolKind.LAPLACIAN:
            return laplacian(kappa)
        if k is SymbolKind.ABS_GRAD:
            return abs_grad_pow(kappa, self.s)
        if k is SymbolKind.SOBOLEV:
            return sobolev_weight(kappa, self.s)
        if k is SymbolKind.FREE_FLOW:
            return free_flow(kappa, self.tau)
        if k is SymbolKind.HELMHOLTZ_INVERSE:
            return helmholtz_inverse(kappa)
        if k is SymbolKind.WAVE_COS:
            return wave_cos(kappa, self.tau)
        if k is SymbolKind.WAVE_SIN_OVER_GRAD:
            return wave_sin_over_grad(kappa, self.tau)
        if k is SymbolKind.WAVE_GRAD_SIN:
            return wave_grad_sin(kappa, self.tau)
        if k is SymbolKind.WAVE_ONE_MINUS_COS:
            return wave_one_minus_cos(kappa, self.tau)
        if k is SymbolKind.WAVE_SINC:
            return wave_sinc(kappa, self.tau)
        if k is SymbolKind.EXP_FILTER1:
            return exp_filter1(kappa, self.tau)
        if k is SymbolKind.EXP_FILTER2:
            return exp_filter2(kappa, self.tau)
        raise ValueError(f"unknown symbol kind {k!r}")
