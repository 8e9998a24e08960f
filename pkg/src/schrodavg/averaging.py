"""The exponentially weighted time-average map and its per-mode factors.

Averaging a trajectory u(t) = sum_k alpha_k exp(-i lambda_k t) v_k against the
weight exp(r t) over [0, T] acts diagonally on coefficients: mode k picks up
the factor

    zeta_k = integral_0^T exp((r - i lambda_k) t) dt
           = (exp((r - i lambda_k) T) - 1) / (r - i lambda_k),

with the removable singularity at r = i lambda_k taking the value T.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidArgumentError
from .spectral import ModeCoefficients, SpectralBasis


@dataclass(frozen=True, eq=False)
class AveragingParams:
    """Weight exponent r (complex, 1/time) and horizon T (> 0, time)."""

    r: complex
    T: float

    def __post_init__(self):
        r = complex(self.r)
        T = float(self.T)
        if not (np.isfinite(r.real) and np.isfinite(r.imag)):
            raise InvalidArgumentError("r must be finite")
        if not (np.isfinite(T) and T > 0):
            raise InvalidArgumentError(f"T must be positive and finite, got {T}")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "T", T)


@dataclass(frozen=True, eq=False)
class ZetaFactors:
    """Per-mode averaging factors for one basis/params pair."""

    values: np.ndarray
    basis: SpectralBasis

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.shape != (self.basis.mode_count,):
            raise InvalidArgumentError("factor count must match basis mode count")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


def _cexpm1(z: np.ndarray) -> np.ndarray:
    """exp(z) - 1 for complex z without cancellation near z = 0.

    Splits into expm1(x)cos(y) - 2 sin^2(y/2) + i exp(x) sin(y); every term is
    individually small when |z| is, so the subtraction never loses digits.
    """
    x, y = np.real(z), np.imag(z)
    return np.expm1(x) * np.cos(y) - 2.0 * np.sin(0.5 * y) ** 2 + 1j * np.exp(x) * np.sin(y)


def _zeta_values(r: complex, T: float, lam) -> np.ndarray:
    s = r - 1j * np.asarray(lam, dtype=float)
    with np.errstate(invalid="ignore"):
        out = np.where(s == 0, complex(T), _cexpm1(s * T) / np.where(s == 0, 1.0, s))
    return out


def zeta_factor(r: complex, T: float, lam: float) -> complex:
    """The averaging factor (exp((r - i lam) T) - 1) / (r - i lam).

    Total on all finite inputs; returns exactly T at the removable
    singularity r = i lam.
    """
    params = AveragingParams(r, T)  # validates r, T
    return complex(_zeta_values(params.r, params.T, np.asarray([float(lam)]))[0])


def zeta_factors(basis: SpectralBasis, params: AveragingParams) -> ZetaFactors:
    """All per-mode factors for the basis eigenvalues."""
    return ZetaFactors(_zeta_values(params.r, params.T, basis.lambdas), basis)


def apply_time_average(xi: ModeCoefficients, params: AveragingParams) -> ModeCoefficients:
    """Image of the state under the averaging map: gamma_k = zeta_k alpha_k."""
    z = _zeta_values(params.r, params.T, xi.basis.lambdas)
    return ModeCoefficients(z * xi.values, xi.basis)


def forward_smoothing_constant(basis: SpectralBasis, params: AveragingParams) -> float:
    """Sharp constant C with ||average of xi||_{H2} <= C ||xi||_{H1}.

    C = max_k sqrt((lambda_k^2 + c_A) / (lambda_k + c_A)) |zeta_k|; a single
    mode at the maximizing k attains equality, so the bound is tight on the
    truncated basis.
    """
    lam = basis.lambdas
    z = np.abs(_zeta_values(params.r, params.T, lam))
    return float(np.max(np.sqrt((lam**2 + basis.c_A) / (lam + basis.c_A)) * z))


def zeta_to_csv(factors: ZetaFactors, path) -> None:
    """Rows k,lambda,zeta_re,zeta_im,abs_zeta with 17 significant digits."""
    lines = ["k,lambda,zeta_re,zeta_im,abs_zeta"]
    lam = factors.basis.lambdas
    for k, (lv, zv) in enumerate(zip(lam, factors.values), start=1):
        lines.append(
            f"{k},{lv:.17g},{zv.real:.17g},{zv.imag:.17g},{abs(zv):.17g}"
        )
    Path(path).write_text("\n".join(lines) + "\n")
