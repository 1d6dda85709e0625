"""Uncertainty-parameterized kernels over a finite grid.

The decision domain is a finite, ordered set of points. Every uncertain
parameter ``delta`` induces its own kernel through a map ``delta -> lengthscale``;
the default map is the affine one ``0.05 + 0.01 * delta``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ContractViolation, InvalidSpecError

TOL_PSD = 1e-8

SUPPORTED_FAMILIES = ("squared_exponential",)


@dataclass(frozen=True, eq=False)
class Grid:
    """Finite decision domain; a point is identified by its index.

    Args:
        points: array of shape ``(m,)`` or ``(m, d)``.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ContractViolation("grid must contain at least one point")
        if pts.shape[0] > 1:
            diffs = pts[:, None, :] - pts[None, :, :]
            dist = np.abs(diffs).sum(-1)
            np.fill_diagonal(dist, np.inf)
            if np.any(dist == 0.0):
                raise ContractViolation("grid points must be pairwise distinct")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def arange(cls, start: float, stop: float, step: float) -> "Grid":
        """Inclusive range ``start, start + step, ..., stop``."""
        if step <= 0:
            raise ContractViolation("grid step must be positive")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        if n < 1:
            raise ContractViolation("empty grid range")
        # start + k*step rather than cumulative sums keeps 0.01-grids exact to 1 ulp
        return cls(start + step * np.arange(n))

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def check_index(self, index: int) -> int:
        if not 0 <= int(index) < len(self):
            raise ContractViolation(f"grid index {index} out of range [0, {len(self)})")
        return int(index)


@dataclass(frozen=True)
class AffineLengthscale:
    """The ``delta -> base + slope * delta`` map."""

    base: float = 0.05
    slope: float = 0.01

    def __call__(self, delta: float) -> float:
        return self.base + self.slope * delta


@dataclass(frozen=True)
class KernelSpec:
    family: str = "squared_exponential"
    delta: float = 0.0
    lengthscale_map: Callable[[float], float] = field(default_factory=AffineLengthscale)

    @property
    def lengthscale(self) -> float:
        ell = float(self.lengthscale_map(self.delta))
        if not np.isfinite(ell) or ell <= 0:
            raise InvalidSpecError(f"lengthscale must be positive, got {ell} for delta={self.delta}")
        return ell

    def with_delta(self, delta: float) -> "KernelSpec":
        return KernelSpec(self.family, float(delta), self.lengthscale_map)

    def validate(self) -> "KernelSpec":
        if self.family not in SUPPORTED_FAMILIES:
            raise InvalidSpecError(f"unsupported kernel family {self.family!r}")
        self.lengthscale
        return self


def _sqdist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.atleast_2d(a)
    b = np.atleast_2d(b)
    return ((a[:, None, :] - b[None, :, :]) ** 2).sum(-1)


def kernel_eval(spec: KernelSpec, x1, x2) -> float:
    """``k(x1, x2) = exp(-|x1 - x2|^2 / lengthscale^2)``."""
    spec.validate()
    x1 = np.atleast_1d(np.asarray(x1, dtype=float))
    x2 = np.atleast_1d(np.asarray(x2, dtype=float))
    d2 = float(((x1 - x2) ** 2).sum())
    return float(np.exp(-d2 / spec.lengthscale**2))


def kernel_matrix(spec: KernelSpec, grid: Grid) -> np.ndarray:
    spec.validate()
    K = np.exp(-_sqdist(grid.points, grid.points) / spec.lengthscale**2)
    # exact symmetry and unit diagonal regardless of rounding in the distance sum
    K = 0.5 * (K + K.T)
    np.fill_diagonal(K, 1.0)
    return K


@dataclass(frozen=True, eq=False)
class KernelSpectrum:
    eigenvalues: np.ndarray

    def __len__(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def total(self) -> float:
        return float(self.eigenvalues.sum())


def spectrum(matrix: np.ndarray, tol_psd: float = TOL_PSD) -> KernelSpectrum:
    """Descending eigenvalues of a symmetric PSD matrix, tiny negatives clamped to 0.

    Raises:
        ContractViolation: if the matrix is not symmetric, or an eigenvalue is
            below ``-tol_psd``.
    """
    A = np.asarray(matrix, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ContractViolation("spectrum needs a square matrix")
    scale = max(1.0, float(np.abs(A).max(initial=0.0)))
    if not np.allclose(A, A.T, rtol=0.0, atol=1e-12 * scale):
        raise ContractViolation("spectrum needs a symmetric matrix")
    eig = np.linalg.eigvalsh(0.5 * (A + A.T))[::-1].copy()
    if eig.size and eig[-1] < -tol_psd:
        raise ContractViolation(f"matrix is not PSD: min eigenvalue {eig[-1]:.3e}")
    eig[eig < 0] = 0.0
    trace = float(np.trace(A))
    if abs(eig.sum() - trace) > tol_psd * max(1, A.shape[0]) + 1e-9 * abs(trace):
        raise ContractViolation("eigenvalue sum does not reproduce the trace")
    eig.setflags(write=False)
    return KernelSpectrum(eig)
