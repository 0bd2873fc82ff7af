import numpy as np
import pytest

from pvcurt.pvarray import CS6P_250P, extract_params


@pytest.fixture(scope="session")
def array_params():
    """CS6P-250P extracted once, 16 series x 153 parallel (Table-scale array)."""
    return extract_params(CS6P_250P, 16, 153)


@pytest.fixture(scope="session")
def module_params():
    """Single CS6P-250P module (identity topology)."""
    return extract_params(CS6P_250P, 1, 1)


def sweep_oracle(v_module, i_ph, i_0, a, r_s, r_sh, n_iter=200):
    """Independent solver for the implicit module equation.

    Vectorized bisection on i in [0, i_ph]; shares no code with the
    production Newton kernels.
    """
    v = np.asarray(v_module, dtype=float)
    lo = np.zeros_like(v)
    hi = np.full_like(v, i_ph)
    for _ in range(n_iter):
        mid = 0.5 * (lo + hi)
        x = v + mid * r_s
        f = i_ph - i_0 * (np.exp(x / a) - 1.0) - x / r_sh - mid
        lo = np.where(f > 0.0, mid, lo)
        hi = np.where(f > 0.0, hi, mid)
    return 0.5 * (lo + hi)
