"""Shared helpers: deterministic state samples and independent oracles."""

import numpy as np
import scipy.optimize

from xqcorr.closest import CaseId
from xqcorr.ensemble import PhaseMode, SamplerConfig, sample_x_states


def sample_states(seed, count, case=None, phase_mode=PhaseMode.FREE):
    cfg = SamplerConfig(seed=seed, count=count, case_filter=case,
                        phase_mode=phase_mode)
    return sample_x_states(cfg)


def f2_profile(x3, y3, t33, a3, b3):
    """Squared HS distance restricted to z-axis product states."""
    return 0.25 * ((x3 - a3) ** 2 + (y3 - b3) ** 2 + (t33 - a3 * b3) ** 2)


def grid_a3b3_oracle(x3, y3, t33, n=2001):
    """Brute-force global minimizer of f2_profile on [-1, 1]^2.

    Dense grid scan followed by simplex refinement; independent of the
    quintic-based solver it validates.
    """
    axis = np.linspace(-1.0, 1.0, n)
    a, b = np.meshgrid(axis, axis, indexing="ij")
    f = 0.25 * ((x3 - a) ** 2 + (y3 - b) ** 2 + (t33 - a * b) ** 2)
    i, j = np.unravel_index(np.argmin(f), f.shape)
    res = scipy.optimize.minimize(
        lambda v: f2_profile(x3, y3, t33, v[0], v[1]),
        np.array([axis[i], axis[j]]),
        method="Nelder-Mead",
        options={"xatol": 1e-12, "fatol": 1e-16, "maxfev": 2000},
    )
    return float(res.x[0]), float(res.x[1]), float(res.fun)


def quintic_roots_reference(x3, y3, t33):
    """Real stationary a3 values via numpy.roots (reference path)."""
    coeffs = [1.0, -x3, 2.0, y3 * t33 - 2.0 * x3,
              1.0 + y3 * y3 - t33 * t33, -(x3 + y3 * t33)]
    roots = np.roots(coeffs)
    return np.sort(roots[np.abs(roots.imag) < 1e-7].real)


def case_of(p):
    k1 = 4.0 * (p.rho14 + p.rho23) ** 2
    k3 = 2.0 * ((p.rho11 - p.rho33) ** 2 + (p.rho22 - p.rho44) ** 2)
    return CaseId.CASE1 if k1 <= k3 else CaseId.CASE2
