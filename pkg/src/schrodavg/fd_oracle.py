"""Crank-Nicolson cross-check on a uniform Dirichlet grid.

Evolves grid samples with the implicit-midpoint step on the 3-point Laplacian
and accumulates the exponentially weighted Simpson sum in time.  The module
shares only grid synthesis/projection with the rest of the package; agreement
with the coefficient-space pipeline is therefore an independent check, not a
tautology.

Accuracy note: the discrete eigenvalue (2/h^2)(1 - cos(k pi h)) undershoots
(k pi / L)^2 by about lambda_k (k pi h)^2 / 12, so high modes accrue phase
error proportional to lambda_k T.  Keep compared modes low (k <= 4) or size
the grid accordingly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, solve_banded

from .averaging import AveragingParams
from .errors import InvalidArgumentError, NumericError
from .spectral import (
    DIRICHLET,
    ModeCoefficients,
    project_from_grid,
    synthesize_on_grid,
    uniform_grid,
)


@dataclass(frozen=True, eq=False)
class FdConfig:
    """Grid parameters: M interior points (h = L/(M+1)) and time step dt."""

    interior_points: int
    dt: float
    L: float = 1.0

    def __post_init__(self):
        if int(self.interior_points) != self.interior_points or self.interior_points < 3:
            raise InvalidArgumentError("need at least 3 interior points")
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise InvalidArgumentError(f"dt must be positive, got {self.dt}")
        if not (np.isfinite(self.L) and self.L > 0):
            raise InvalidArgumentError(f"L must be positive, got {self.L}")
        object.__setattr__(self, "interior_points", int(self.interior_points))
        object.__setattr__(self, "dt", float(self.dt))
        object.__setattr__(self, "L", float(self.L))

    @property
    def h(self) -> float:
        return self.L / (self.interior_points + 1)


@dataclass(frozen=True, eq=False)
class GridState:
    """Interior samples; the boundary values are identically zero."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.ndim != 1 or v.size == 0:
            raise InvalidArgumentError("grid state must be a nonempty 1-d vector")
        if not np.all(np.isfinite(v.real) & np.isfinite(v.imag)):
            raise InvalidArgumentError("grid state must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


def _lhs_banded(M: int, c: complex) -> np.ndarray:
    # (I - i (dt/2) A_h) in solve_banded layout; A_h = tridiag(1, -2, 1)/h^2
    ab = np.empty((3, M), dtype=complex)
    ab[0, :] = -c
    ab[1, :] = 1.0 + 2.0 * c
    ab[2, :] = -c
    ab[0, 0] = 0.0
    ab[2, -1] = 0.0
    return ab


def _rhs_apply(values: np.ndarray, c: complex) -> np.ndarray:
    # (I + i (dt/2) A_h) u
    out = (1.0 - 2.0 * c) * values
    out[:-1] += c * values[1:]
    out[1:] += c * values[:-1]
    return out


def _solve(ab: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    try:
        out = solve_banded((1, 1), ab, rhs)
    except LinAlgError as exc:  # cannot happen for this matrix; guarded anyway
        raise NumericError(f"tridiagonal solve failed: {exc}") from exc
    if not np.all(np.isfinite(out.real) & np.isfinite(out.imag)):
        raise NumericError("tridiagonal solve produced non-finite values")
    return out


def cn_step(state: GridState, cfg: FdConfig) -> GridState:
    """One implicit-midpoint step of du/dt = i A_h u; unitary in discrete l2."""
    if state.values.size != cfg.interior_points:
        raise InvalidArgumentError(
            f"state length {state.values.size} != interior points {cfg.interior_points}"
        )
    c = 1j * cfg.dt / (2.0 * cfg.h**2)
    return GridState(_solve(_lhs_banded(cfg.interior_points, c), _rhs_apply(state.values, c)))


def _step_count(T: float, dt: float) -> int:
    n = int(round(T / dt))
    if n < 2 or abs(n * dt - T) > 1.0e-9 * max(T, 1.0):
        raise InvalidArgumentError(
            f"T/dt = {T / dt:.6g} must be an integer number of steps (>= 2)"
        )
    if n % 2 != 0:
        raise InvalidArgumentError(f"step count {n} must be even for Simpson pairing")
    return n


def oracle_time_average(
    xi_grid: GridState,
    params: AveragingParams,
    cfg: FdConfig,
    *,
    zero_operator: bool = False,
) -> GridState:
    """Simpson accumulation of exp(r t_n) u(t_n) while stepping 0 -> T.

    ``zero_operator`` freezes the state (A_h replaced by the zero operator), a
    hook that isolates the quadrature from the stepping in unit tests.
    """
    if xi_grid.values.size != cfg.interior_points:
        raise InvalidArgumentError(
            f"state length {xi_grid.values.size} != interior points {cfg.interior_points}"
        )
    if cfg.dt > params.T:
        raise InvalidArgumentError(f"dt = {cfg.dt} exceeds horizon T = {params.T}")
    steps = _step_count(params.T, cfg.dt)
    w = np.ones(steps + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    w *= cfg.dt / 3.0
    c = 1j * cfg.dt / (2.0 * cfg.h**2)
    ab = _lhs_banded(cfg.interior_points, c)
    u = xi_grid.values
    acc = w[0] * u.astype(complex)
    for n in range(1, steps + 1):
        if not zero_operator:
            u = _solve(ab, _rhs_apply(u, c))
        acc = acc + w[n] * np.exp(params.r * (n * cfg.dt)) * u
    return GridState(acc)


def oracle_mu_coeffs(
    xi: ModeCoefficients, params: AveragingParams, cfg: FdConfig
) -> ModeCoefficients:
    """Grid route to the averaged data: synthesize, step-and-accumulate, project.

    Requires a Dirichlet basis matching cfg.L with all modes resolved
    (N <= M/8).
    """
    basis = xi.basis
    if basis.kind != DIRICHLET:
        raise InvalidArgumentError("grid cross-check supports Dirichlet bases only")
    if abs(basis.domain_length - cfg.L) > 1.0e-12 * max(1.0, cfg.L):
        raise InvalidArgumentError(
            f"basis length {basis.domain_length} != grid length {cfg.L}"
        )
    if 8 * basis.mode_count > cfg.interior_points:
        raise InvalidArgumentError(
            f"{basis.mode_count} modes need at least {8 * basis.mode_count} interior "
            f"points, got {cfg.interior_points}"
        )
    full = uniform_grid(cfg.L, cfg.interior_points + 2)
    samples = synthesize_on_grid(xi, full)
    averaged = oracle_time_average(GridState(samples[1:-1]), params, cfg)
    padded = np.zeros(cfg.interior_points + 2, dtype=complex)
    padded[1:-1] = averaged.values
    return project_from_grid(padded, basis, full)
