# physics_modules/dynamics.py
"""Linearized Langevin dynamics of (x1, p1, x2, p2, X, Y) and its steady state.

The drift matrix is written in the frame rotating with the trap frequencies,
so omega_j only enters through the noise rates and the couplings.
"""
import warnings
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
import scipy.linalg
from scipy.integrate import solve_ivp

from ..exceptions import ConditioningWarning, InstabilityError, NumericalIntegrityError
from .noise import NoiseBudget
from .parameters import DerivedQuantities

QUADRATURES = ("x1", "p1", "x2", "p2", "X", "Y")

LYAPUNOV_RESIDUAL_TOL = 1e-10
CONDITION_WARN = 1e12
STABILITY_MARGIN = 1e-9
PHYSICALITY_TOL = 1e-9

# rounding floor multiplier for checks on matrices with a wide dynamic range
_FLOOR = 64.0 * np.finfo(float).eps


def _frozen(array) -> np.ndarray:
    out = np.array(array, dtype=float)
    out.setflags(write=False)
    return out


def symplectic_form(n_modes: int) -> np.ndarray:
    """Omega = direct sum of [[0, 1], [-1, 0]] over n_modes (x, p) pairs."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


@dataclass(frozen=True)
class LinearModel:
    drift: np.ndarray
    diffusion: np.ndarray
    ordering: Tuple[str, ...] = QUADRATURES
    rate_scale: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "drift", _frozen(self.drift))
        object.__setattr__(self, "diffusion", _frozen(self.diffusion))
        if self.rate_scale is None:
            object.__setattr__(self, "rate_scale", float(np.max(np.abs(np.diag(self.drift)))))

    @property
    def dimension(self) -> int:
        return self.drift.shape[0]


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    abscissa: float
    eigenvalues: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class CovarianceMatrix:
    matrix: np.ndarray
    residual: float = 0.0
    condition: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix))

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2

    def physicality_tolerance(self) -> float:
        return PHYSICALITY_TOL * max(1.0, float(np.linalg.norm(self.matrix, 2)))

    def uncertainty_min_eigenvalue(self) -> float:
        """Smallest eigenvalue of V + i Omega / 2 (>= 0 for a physical state)."""
        hermitian = self.matrix + 0.5j * symplectic_form(self.n_modes)
        return float(np.linalg.eigvalsh(hermitian)[0])

    def is_physical(self) -> bool:
        tol = self.physicality_tolerance()
        if not np.allclose(self.matrix, self.matrix.T, rtol=1e-12, atol=0.0):
            return False
        if np.linalg.eigvalsh(self.matrix)[0] < -tol:
            return False
        return self.uncertainty_min_eigenvalue() >= -tol


def build_model(dq: DerivedQuantities, budgets: Tuple[NoiseBudget, NoiseBudget], csl_on: bool) -> LinearModel:
    g1, g2 = dq.G1, dq.G2
    half_gamma = dq.gamma / 2.0
    k = dq.kappa_eff
    delta = dq.config.detuning

    A = np.zeros((6, 6))
    A[0, 0] = A[1, 1] = A[2, 2] = A[3, 3] = -half_gamma
    A[0, 5] = -g1
    A[1, 4] = -g1
    A[2, 5] = g2
    A[3, 4] = -g2
    A[4, 1], A[4, 3], A[4, 4], A[4, 5] = -g1, g2, -k, delta
    A[5, 0], A[5, 2], A[5, 4], A[5, 5] = -g1, -g2, -delta, -k

    s1 = budgets[0].total(csl_on)
    s2 = budgets[1].total(csl_on)
    D = np.diag([s1 / 2.0, s1 / 2.0, s2 / 2.0, s2 / 2.0, k, k])
    return LinearModel(drift=A, diffusion=D, rate_scale=max(k, dq.gamma))


def is_stable(model: LinearModel) -> StabilityReport:
    try:
        eigenvalues = np.linalg.eigvals(model.drift)
    except np.linalg.LinAlgError as e:
        raise NumericalIntegrityError(f"eigenvalues of the drift matrix did not converge: {e}") from e
    if not np.all(np.isfinite(eigenvalues)):
        raise NumericalIntegrityError("drift matrix has non-finite eigenvalues")
    abscissa = float(np.max(eigenvalues.real))
    return StabilityReport(stable=abscissa < 0.0, abscissa=abscissa, eigenvalues=eigenvalues)


def _lyapunov_operator(A: np.ndarray) -> np.ndarray:
    # row-major vec: vec(A V + V A^T) = (A (x) I + I (x) A) vec(V)
    eye = np.eye(A.shape[0])
    return np.kron(A, eye) + np.kron(eye, A)


def _residual(A: np.ndarray, V: np.ndarray, D: np.ndarray) -> np.ndarray:
    return A @ V + V @ A.T + D


def residual_bound(A: np.ndarray, V: np.ndarray, D: np.ndarray) -> float:
    """Accepted Frobenius residual: 1e-10 ||D|| plus the rounding floor of A V."""
    norm_a = np.linalg.norm(A)
    norm_v = np.linalg.norm(V)
    norm_d = np.linalg.norm(D)
    return LYAPUNOV_RESIDUAL_TOL * norm_d + _FLOOR * (2.0 * norm_a * norm_v + norm_d)


def solve_lyapunov(model: LinearModel, require_physical: bool = True) -> CovarianceMatrix:
    """Solve A V + V A^T = -D by Kronecker vectorization with one refinement step."""
    report = is_stable(model)
    margin = STABILITY_MARGIN * model.rate_scale
    if report.abscissa >= -margin:
        raise InstabilityError(
            f"no steady state: spectral abscissa {report.abscissa:.6g} s^-1 "
            f"is not below -{margin:.3g} s^-1"
        )

    A, D = model.drift, model.diffusion
    n = model.dimension
    K = _lyapunov_operator(A)
    condition = float(np.linalg.cond(K))
    if condition > CONDITION_WARN:
        warnings.warn(f"Lyapunov operator condition number {condition:.3g}", ConditioningWarning, stacklevel=2)

    lu = scipy.linalg.lu_factor(K)
    V = scipy.linalg.lu_solve(lu, -D.ravel()).reshape(n, n)
    V = V + scipy.linalg.lu_solve(lu, -_residual(A, V, D).ravel()).reshape(n, n)
    V = 0.5 * (V + V.T)

    R = _residual(A, V, D)
    norm_r = float(np.linalg.norm(R))
    if norm_r > residual_bound(A, V, D):
        raise NumericalIntegrityError(f"Lyapunov residual {norm_r:.3g} exceeds its bound")
    norm_d = float(np.linalg.norm(D))
    cov = CovarianceMatrix(matrix=V, residual=norm_r / norm_d if norm_d > 0 else 0.0, condition=condition)
    if require_physical and not cov.is_physical():
        raise NumericalIntegrityError(
            "steady-state covariance violates the uncertainty relation "
            f"(min eig of V + i Omega/2 = {cov.uncertainty_min_eigenvalue():.3g})"
        )
    return cov


def integrate_lyapunov(model: LinearModel, tol: float = 1e-12, rtol: float = 1e-10,
                       max_horizons: int = 8) -> np.ndarray:
    """Independent check of solve_lyapunov: integrate dV/dt = A V + V A^T + D
    from V(0) = I/2 until the time derivative vanishes."""
    report = is_stable(model)
    if not report.stable:
        raise InstabilityError(f"cannot integrate to a steady state, abscissa {report.abscissa:.6g}")

    A, D = model.drift, model.diffusion
    n = model.dimension
    K = _lyapunov_operator(A)
    d = D.ravel()
    horizon = 40.0 / abs(report.abscissa)
    v = (0.5 * np.eye(n)).ravel()
    norm_a = np.linalg.norm(A)
    norm_d = np.linalg.norm(D)

    for _ in range(max_horizons):
        sol = solve_ivp(lambda t, y: K @ y + d, (0.0, horizon), v, method="Radau",
                        jac=K, rtol=rtol, atol=1e-12)
        if not sol.success:
            raise NumericalIntegrityError(f"integration oracle failed: {sol.message}")
        v = sol.y[:, -1]
        V = v.reshape(n, n)
        derivative = float(np.linalg.norm(_residual(A, V, D)))
        if derivative <= max(tol * norm_d, rtol * 2.0 * norm_a * np.linalg.norm(V)):
            return 0.5 * (V + V.T)
    raise NumericalIntegrityError("integration oracle did not reach a steady state")
