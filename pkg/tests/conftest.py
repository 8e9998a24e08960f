"""Shared helpers: seeded state draws and quadrature reference routes.

The quadrature helpers deliberately avoid the closed-form factor code so that
agreement between the two routes is evidence, not circularity.
"""

import numpy as np
from hypothesis import HealthCheck, settings
from scipy.integrate import quad

from schrodavg import ModeCoefficients, propagate

settings.register_profile(
    "numeric",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("numeric")


def power_law_state(basis, seed, p):
    """|c_k| = k^-p with uniform random phases (1-based position index)."""
    rng = np.random.default_rng(seed)
    k = np.arange(1, basis.mode_count + 1, dtype=float)
    return ModeCoefficients(k**-p * np.exp(2j * np.pi * rng.random(basis.mode_count)), basis)


def zeta_by_quadrature(r, T, lam):
    """Oscillatory-weight quadrature of integral_0^T exp((r - i lam) t) dt.

    Splits exp((r - i lam) t) = exp(at) (cos(bt) + i sin(bt)) with a = Re r,
    b = Im r - lam and lets QUADPACK's QAWO handle the oscillation.
    """
    r = complex(r)
    a = r.real
    b = r.imag - lam

    def f(t):
        return np.exp(a * t)

    re = quad(f, 0.0, T, weight="cos", wvar=b, epsabs=1e-300, epsrel=1e-11,
              limit=300, full_output=1)[0]
    im = quad(f, 0.0, T, weight="sin", wvar=b, epsabs=1e-300, epsrel=1e-11,
              limit=300, full_output=1)[0]
    return re + 1j * im


def averaged_mode_by_quadrature(xi, params, k):
    """Adaptive quadrature of exp(r t) times mode k of the evolving state."""

    def f_re(t):
        return (np.exp(params.r * t) * propagate(xi, t).values[k]).real

    def f_im(t):
        return (np.exp(params.r * t) * propagate(xi, t).values[k]).imag

    re = quad(f_re, 0.0, params.T, epsabs=1e-13, epsrel=1e-12, limit=3000, full_output=1)[0]
    im = quad(f_im, 0.0, params.T, epsabs=1e-13, epsrel=1e-12, limit=3000, full_output=1)[0]
    return re + 1j * im
