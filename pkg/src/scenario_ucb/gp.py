"""Exact Gaussian-process posterior on a finite grid.

One :class:`GpState` holds the posterior of a single scenario. Conditioning
is exact: the Cholesky factor ``L`` of ``K_T + rho^2 I`` is grown by one row
per observation and, together with it, the projected cross-covariance
``V = L^{-1} K(A_T, X)`` and whitened targets ``w = L^{-1} y_T``. The grid
posterior then reads

    mu_T    = V^T w
    sigma_T = sqrt(diag K(X, X) - colsum(V * V))

Every ``REFACTOR_EVERY`` updates the factor is rebuilt from scratch so that
rounding in the incremental path cannot accumulate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import ContractViolation, NumericalError
from .kernel import Grid, KernelSpec, kernel_matrix

REFACTOR_EVERY = 64
SOLVE_JITTER = 1e-10


@dataclass(frozen=True)
class Observation:
    x_index: int
    y: float
    t: int = 0


class GpState:
    """Posterior of one zero-mean GP over ``grid`` with Gaussian noise ``noise_var``.

    The posterior mean and standard deviation over the whole grid are cached
    after every update and exposed as read-only arrays.
    """

    def __init__(self, kernel: KernelSpec, grid: Grid, noise_var: float, *, prior_cov=None):
        if not noise_var > 0:
            raise ContractViolation(f"noise variance must be positive, got {noise_var}")
        self.kernel = kernel
        self.grid = grid
        self.noise_var = float(noise_var)
        self.K = kernel_matrix(kernel, grid) if prior_cov is None else np.asarray(prior_cov, dtype=float)
        self.data: list[Observation] = []
        self._jitter = 0.0
        self._since_refactor = 0
        m = len(grid)
        self._cap = 0
        self._L = np.zeros((0, 0))
        self._V = np.zeros((0, m))
        self._w = np.zeros(0)
        self._mean = np.zeros(m)
        self._var = np.diag(self.K).copy()
        self._sigma = np.sqrt(self._var)

    # -- read access ---------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.data)

    @property
    def posterior_mean(self) -> np.ndarray:
        out = self._mean.view()
        out.flags.writeable = False
        return out

    @property
    def posterior_sigma(self) -> np.ndarray:
        out = self._sigma.view()
        out.flags.writeable = False
        return out

    def predict(self, x_index: int) -> tuple[float, float]:
        i = self.grid.check_index(x_index)
        return float(self._mean[i]), float(self._sigma[i])

    def ucb(self, beta: float) -> np.ndarray:
        if beta < 0:
            raise ContractViolation(f"beta must be non-negative, got {beta}")
        return self._mean + np.sqrt(beta) * self._sigma

    def copy(self) -> "GpState":
        new = GpState.__new__(GpState)
        new.__dict__.update(self.__dict__)
        new.data = list(self.data)
        for name in ("_L", "_V", "_w", "_mean", "_var", "_sigma"):
            setattr(new, name, getattr(self, name).copy())
        return new

    # -- conditioning --------------------------------------------------------

    def _grow(self, n: int) -> None:
        if n <= self._cap:
            return
        cap = max(16, 2 * self._cap, n)
        L = np.zeros((cap, cap))
        V = np.zeros((cap, self.K.shape[0]))
        w = np.zeros(cap)
        k = self._cap
        L[:k, :k] = self._L
        V[:k] = self._V
        w[:k] = self._w
        self._L, self._V, self._w, self._cap = L, V, w, cap

    def _refactor(self) -> None:
        idx = np.array([o.x_index for o in self.data], dtype=int)
        y = np.array([o.y for o in self.data])
        n = idx.size
        A = self.K[np.ix_(idx, idx)] + self.noise_var * np.eye(n)
        try:
            L = np.linalg.cholesky(A + self._jitter * np.eye(n))
        except np.linalg.LinAlgError:
            if self._jitter:
                raise NumericalError("K_T + rho^2 I is not positive definite", condition=np.linalg.cond(A))
            self._jitter = SOLVE_JITTER
            try:
                L = np.linalg.cholesky(A + self._jitter * np.eye(n))
            except np.linalg.LinAlgError:
                raise NumericalError(
                    "K_T + rho^2 I is not positive definite after jitter", condition=np.linalg.cond(A)
                ) from None
        self._grow(n)
        V = solve_triangular(L, self.K[idx], lower=True)
        w = solve_triangular(L, y, lower=True)
        self._L[:n, :n] = L
        self._V[:n] = V
        self._w[:n] = w
        self._mean = V.T @ w
        var = np.diag(self.K) - np.einsum("ij,ij->j", V, V)
        # monotone in the number of observations even across a rebuild
        self._var = np.minimum(np.maximum(var, 0.0), self._var)
        self._sigma = np.sqrt(self._var)
        self._since_refactor = 0

    def update(self, obs: Observation) -> "GpState":
        """Condition on one more observation in place and return ``self``."""
        x = self.grid.check_index(obs.x_index)
        n = self.n
        self.data.append(Observation(x, float(obs.y), obs.t))
        if self._since_refactor + 1 >= REFACTOR_EVERY:
            self._refactor()
            return self
        self._grow(n + 1)
        idx = [o.x_index for o in self.data[:n]]
        kx = self.K[idx, x]
        if n:
            ell = solve_triangular(self._L[:n, :n], kx, lower=True)
        else:
            ell = np.zeros(0)
        d2 = self.K[x, x] + self.noise_var + self._jitter - ell @ ell
        if not d2 > 0 or not np.isfinite(d2):
            self._refactor()
            return self
        d = np.sqrt(d2)
        v = (self.K[x] - ell @ self._V[:n]) / d
        wn = (obs.y - ell @ self._w[:n]) / d
        self._L[n, :n] = ell
        self._L[n, n] = d
        self._V[n] = v
        self._w[n] = wn
        self._mean = self._mean + v * wn
        self._var = np.maximum(self._var - v * v, 0.0)
        self._sigma = np.sqrt(self._var)
        self._since_refactor += 1
        return self


def gp_update(state: GpState, obs: Observation) -> GpState:
    """Condition ``state`` on ``obs``; the state is modified in place and returned."""
    return state.update(obs)


def gp_predict(state: GpState, x_index: int) -> tuple[float, float]:
    return state.predict(x_index)


def gp_ucb_value(state: GpState, x_index: int, beta: float) -> float:
    """``mu(x) + sqrt(beta) * sigma(x)``."""
    if beta < 0:
        raise ContractViolation(f"beta must be non-negative, got {beta}")
    mu, sigma = state.predict(x_index)
    return mu + np.sqrt(beta) * sigma


def batch_posterior(K: np.ndarray, x_idx, y, noise_var: float) -> tuple[np.ndarray, np.ndarray]:
    """Posterior mean and sigma over the grid by a single dense solve.

    Independent of :class:`GpState`; used as a reference for the incremental path.
    """
    x_idx = np.asarray(x_idx, dtype=int)
    y = np.asarray(y, dtype=float)
    if x_idx.size == 0:
        return np.zeros(K.shape[0]), np.sqrt(np.diag(K))
    A = K[np.ix_(x_idx, x_idx)] + noise_var * np.eye(x_idx.size)
    kT = K[x_idx]  # (T, m): column j is k_T(x_j)
    mean = kT.T @ np.linalg.solve(A, y)
    var = np.diag(K) - np.einsum("ij,ij->j", kT, np.linalg.solve(A, kT))
    return mean, np.sqrt(np.maximum(var, 0.0))
