import numpy as np
import pytest

from zakharov_trig import Field, TorusGrid


@pytest.fixture
def rng():
    return np.random.default_rng(20240814)


def band_limited_field(grid: TorusGrid, rng, *, real=False, scale=1.0, width=8):
    """Random field with modes |k| <= width; Hermitian if real=True."""
    coeffs = np.zeros(grid.modes, dtype=complex)
    lo = rng.standard_normal(2 * width + 1) + 1j * rng.standard_normal(2 * width + 1)
    coeffs[: width + 1] = lo[: width + 1]
    coeffs[-width:] = lo[width + 1:]
    if real:
        coeffs[0] = coeffs[0].real
        coeffs[-width:] = np.conj(coeffs[width:0:-1])
    return Field.from_spectral(grid, scale * coeffs)
