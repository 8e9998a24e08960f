"""Eigenbases, coefficient vectors, Sobolev-scale norms, and grid transforms.

States live in coefficient space: a state is a complex vector expanded against
an orthonormal eigenbasis (v_k) of the spatial operator, with eigenvalues
lambda_k.  Norms of order s in {0, 1, 2} are weighted l2 norms on the
coefficients with weights 1, lambda_k + c_A, lambda_k**2 + c_A, so every
estimate in the package reduces to an inequality between weighted sums.

Two presets carry explicit eigenfunctions (Dirichlet interval, periodic
interval); custom bases take user-supplied eigenvalues and, optionally, a
callable producing eigenfunction samples for grid work.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.integrate import simpson

from .errors import InvalidArgumentError, UnsupportedOperationError

DIRICHLET = "dirichlet_interval"
PERIODIC = "periodic_interval"
CUSTOM = "custom"

_KINDS = (DIRICHLET, PERIODIC, CUSTOM)


def unit_floor_shift(lambdas) -> float:
    """Smallest nonnegative shift q such that min(lambdas) + q >= 1.

    Used both as the default norm shift c_A and as the spectral translation
    that normalizes eigenvalues before inversion.
    """
    return max(0.0, 1.0 - float(np.min(lambdas)))


@dataclass(frozen=True, eq=False)
class SpectralBasis:
    """Descriptor of an orthonormal eigenbasis.

    Attributes:
        kind: one of ``dirichlet_interval``, ``periodic_interval``, ``custom``.
        domain_length: length L of the spatial interval [0, L].
        lambdas: eigenvalues, nondecreasing, shape (N,).
        c_A: nonnegative norm shift; every lambda_k + c_A must be positive.
        labels: integer mode labels (Dirichlet wavenumbers 1..N, periodic
            frequencies 0, 1, -1, 2, -2, ...).  File formats index modes by
            1-based position, not by label.
        eigenfunctions: optional callable mapping points x of shape (M,) to a
            sample matrix of shape (M, N); only custom bases need it, and only
            for synthesis/projection.
    """

    kind: str
    domain_length: float
    lambdas: np.ndarray
    c_A: float
    labels: np.ndarray
    eigenfunctions: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InvalidArgumentError(f"unknown basis kind {self.kind!r}")
        L = float(self.domain_length)
        if not (np.isfinite(L) and L > 0):
            raise InvalidArgumentError("domain_length must be positive and finite")
        lam = np.array(self.lambdas, dtype=float)
        if lam.ndim != 1 or lam.size == 0:
            raise InvalidArgumentError("lambdas must be a nonempty 1-d vector")
        if not np.all(np.isfinite(lam)):
            raise InvalidArgumentError("lambdas must be finite")
        if np.any(np.diff(lam) < 0):
            raise InvalidArgumentError("lambdas must be nondecreasing")
        cA = float(self.c_A)
        if not (np.isfinite(cA) and cA >= 0):
            raise InvalidArgumentError("c_A must be nonnegative and finite")
        if lam[0] + cA <= 0:
            raise InvalidArgumentError(
                f"c_A={cA} leaves min(lambda)+c_A = {lam[0] + cA} <= 0; "
                "order-1 norm weights must be positive"
            )
        labels = np.array(self.labels, dtype=int)
        if labels.shape != lam.shape:
            raise InvalidArgumentError("labels must match lambdas in shape")
        lam.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "domain_length", L)
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "c_A", cA)
        object.__setattr__(self, "labels", labels)

    @property
    def mode_count(self) -> int:
        return int(self.lambdas.size)


def _check_L_N(L, N) -> None:
    if not (np.isfinite(L) and L > 0):
        raise InvalidArgumentError(f"L must be positive, got {L}")
    if int(N) != N or N < 1:
        raise InvalidArgumentError(f"mode count must be a positive integer, got {N}")


def make_dirichlet_basis(L: float, N: int, c_A: float | None = None) -> SpectralBasis:
    """Dirichlet Laplacian on [0, L]: lambda_k = (k pi / L)^2, k = 1..N.

    Eigenfunctions are v_k(x) = sqrt(2/L) sin(k pi x / L), orthonormal in L2.
    c_A=None applies the default policy ``unit_floor_shift``.
    """
    _check_L_N(L, N)
    k = np.arange(1, int(N) + 1)
    lam = (k * np.pi / L) ** 2
    if c_A is None:
        c_A = unit_floor_shift(lam)
    return SpectralBasis(DIRICHLET, float(L), lam, float(c_A), k)


def _periodic_labels(N: int) -> np.ndarray:
    out = np.zeros(N, dtype=int)
    for i in range(1, N):
        j = (i + 1) // 2
        out[i] = j if i % 2 == 1 else -j
    return out


def make_periodic_basis(L: float, N: int, c_A: float | None = None) -> SpectralBasis:
    """Periodic Laplacian on [0, L]: frequencies m = 0, 1, -1, 2, -2, ...

    lambda_m = (2 pi m / L)^2 and v_m(x) = exp(2 pi i m x / L) / sqrt(L).
    The frequency ordering keeps the eigenvalues nondecreasing.
    """
    _check_L_N(L, N)
    m = _periodic_labels(int(N))
    lam = (2.0 * np.pi * m / L) ** 2
    if c_A is None:
        c_A = unit_floor_shift(lam)
    return SpectralBasis(PERIODIC, float(L), lam, float(c_A), m)


def make_custom_basis(
    lambdas,
    domain_length: float = 1.0,
    c_A: float | None = None,
    eigenfunctions: Callable[[np.ndarray], np.ndarray] | None = None,
) -> SpectralBasis:
    """Basis from user-supplied eigenvalues (nondecreasing, finite).

    Without an ``eigenfunctions`` callable the basis supports every
    coefficient-space operation but not grid synthesis/projection.
    """
    lam = np.asarray(lambdas, dtype=float)
    if c_A is None:
        if lam.size == 0:
            raise InvalidArgumentError("lambdas must be nonempty")
        c_A = unit_floor_shift(lam)
    labels = np.arange(1, lam.size + 1)
    return SpectralBasis(CUSTOM, float(domain_length), lam, float(c_A), labels, eigenfunctions)


@dataclass(frozen=True, eq=False)
class ModeCoefficients:
    """Complex expansion coefficients attached to a basis."""

    values: np.ndarray
    basis: SpectralBasis

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.ndim != 1:
            raise InvalidArgumentError("coefficient vector must be 1-d")
        if v.size != self.basis.mode_count:
            raise InvalidArgumentError(
                f"coefficient length {v.size} != basis mode count {self.basis.mode_count}"
            )
        if not np.all(np.isfinite(v.real) & np.isfinite(v.imag)):
            raise InvalidArgumentError("coefficients must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True, eq=False)
class SpatialGrid:
    """Uniform partition of [0, L], endpoints included."""

    point_count: int
    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if int(self.point_count) != self.point_count or self.point_count < 3:
            raise InvalidArgumentError("grid needs at least 3 points")
        if pts.ndim != 1 or pts.size != self.point_count:
            raise InvalidArgumentError("points must match point_count")
        if not np.all(np.isfinite(pts)) or np.any(np.diff(pts) <= 0):
            raise InvalidArgumentError("points must be finite and strictly increasing")
        pts.setflags(write=False)
        object.__setattr__(self, "point_count", int(self.point_count))
        object.__setattr__(self, "points", pts)


def uniform_grid(L: float, M: int) -> SpatialGrid:
    """M equispaced points on [0, L] including both endpoints."""
    if not (np.isfinite(L) and L > 0):
        raise InvalidArgumentError(f"L must be positive, got {L}")
    if int(M) != M or M < 3:
        raise InvalidArgumentError(f"M must be an integer >= 3, got {M}")
    return SpatialGrid(int(M), np.linspace(0.0, float(L), int(M)))


def _norm_weights(basis: SpectralBasis, order: int) -> np.ndarray:
    if order not in (0, 1, 2) or isinstance(order, bool):
        raise InvalidArgumentError(f"norm order must be 0, 1 or 2, got {order!r}")
    if order == 0:
        return np.ones_like(basis.lambdas)
    if order == 1:
        w = basis.lambdas + basis.c_A
    else:
        w = basis.lambdas**2 + basis.c_A
    # construction guarantees lambda + c_A > 0; re-check to fail loudly on
    # hand-built bases that bypassed the factories
    if np.any(w <= 0):
        raise InvalidArgumentError(f"order-{order} weights are not all positive")
    return w


def sobolev_norm(c: ModeCoefficients, order: int) -> float:
    """Weighted l2 norm of order 0, 1 or 2 (weights 1, lam+c_A, lam^2+c_A)."""
    w = _norm_weights(c.basis, order)
    return float(np.sqrt(np.sum(w * (c.values.real**2 + c.values.imag**2))))


def _mode_matrix(basis: SpectralBasis, x: np.ndarray) -> np.ndarray:
    """Sample matrix V with V[j, k] = v_k(x_j)."""
    if basis.kind == DIRICHLET:
        L = basis.domain_length
        return np.sqrt(2.0 / L) * np.sin(np.outer(x, basis.labels) * (np.pi / L))
    if basis.kind == PERIODIC:
        L = basis.domain_length
        return np.exp(2j * np.pi * np.outer(x, basis.labels) / L) / np.sqrt(L)
    if basis.eigenfunctions is None:
        raise UnsupportedOperationError(
            "custom basis has no eigenfunction evaluator; grid operations unavailable"
        )
    V = np.asarray(basis.eigenfunctions(x))
    if V.shape != (x.size, basis.mode_count):
        raise InvalidArgumentError(
            f"eigenfunction samples have shape {V.shape}, expected {(x.size, basis.mode_count)}"
        )
    return V


def synthesize_on_grid(c: ModeCoefficients, grid: SpatialGrid) -> np.ndarray:
    """Pointwise values sum_k c_k v_k(x_j) on the grid."""
    V = _mode_matrix(c.basis, grid.points)
    return V @ c.values


def project_from_grid(samples, basis: SpectralBasis, grid: SpatialGrid) -> ModeCoefficients:
    """Coefficients c_k ~= integral samples(x) conj(v_k(x)) dx, Simpson rule.

    The grid must resolve the highest retained mode; M >= 8N is a sound
    default for the presets.
    """
    y = np.asarray(samples)
    if y.ndim != 1 or y.size != grid.point_count:
        raise InvalidArgumentError(
            f"sample length {y.size} != grid point count {grid.point_count}"
        )
    V = _mode_matrix(basis, grid.points)
    vals = simpson(y[:, None] * np.conj(V), x=grid.points, axis=0)
    return ModeCoefficients(vals, basis)


# --- JSON schema: {"kind", "L", "N", "cA", "coeffs": [[re, im], ...]} -------
# Custom bases additionally persist "lambdas"; eigenfunction callables do not
# round-trip through JSON.


def coefficients_to_json(c: ModeCoefficients) -> dict:
    b = c.basis
    obj = {
        "kind": b.kind,
        "L": b.domain_length,
        "N": b.mode_count,
        "cA": b.c_A,
        "coeffs": [[float(v.real), float(v.imag)] for v in c.values],
    }
    if b.kind == CUSTOM:
        obj["lambdas"] = [float(x) for x in b.lambdas]
    return obj


def basis_from_json(obj: dict) -> SpectralBasis:
    try:
        kind = obj["kind"]
        L = float(obj["L"])
        N = int(obj["N"])
        cA = float(obj["cA"]) if obj.get("cA") is not None else None
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidArgumentError(f"malformed basis object: {exc}") from exc
    if kind == DIRICHLET:
        return make_dirichlet_basis(L, N, cA)
    if kind == PERIODIC:
        return make_periodic_basis(L, N, cA)
    if kind == CUSTOM:
        if "lambdas" not in obj:
            raise InvalidArgumentError("custom basis JSON requires 'lambdas'")
        lam = np.asarray(obj["lambdas"], dtype=float)
        if lam.size != N:
            raise InvalidArgumentError(f"lambdas length {lam.size} != N = {N}")
        return make_custom_basis(lam, L, cA)
    raise InvalidArgumentError(f"unknown basis kind {kind!r}")


def coefficients_from_json(obj: dict) -> ModeCoefficients:
    basis = basis_from_json(obj)
    raw = obj.get("coeffs")
    if raw is None:
        raise InvalidArgumentError("missing 'coeffs'")
    try:
        vals = np.array([complex(re, im) for re, im in raw])
    except (TypeError, ValueError) as exc:
        raise InvalidArgumentError(f"malformed 'coeffs': {exc}") from exc
    return ModeCoefficients(vals, basis)


def save_coefficients(path, c: ModeCoefficients) -> None:
    Path(path).write_text(json.dumps(coefficients_to_json(c), indent=2) + "\n")


def load_coefficients(path) -> ModeCoefficients:
    return coefficients_from_json(json.loads(Path(path).read_text()))
