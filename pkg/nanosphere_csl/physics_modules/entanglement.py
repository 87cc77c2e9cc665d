# physics_modules/entanglement.py
"""Logarithmic negativity of the two mechanical modes.

Vacuum variance is 1/2, so a state is entangled iff the smallest symplectic
eigenvalue of the partially transposed covariance is below 1/2.
"""
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..exceptions import NumericalIntegrityError
from .dynamics import CovarianceMatrix, PHYSICALITY_TOL, symplectic_form

PATH_AGREEMENT_TOL = 1e-9

# P = diag(1, 1, 1, -1) flips the momentum of the second sphere
_TRANSPOSE_SIGNS = np.array([1.0, 1.0, 1.0, -1.0])
_TRANSPOSE_MASK = np.outer(_TRANSPOSE_SIGNS, _TRANSPOSE_SIGNS)
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class MechanicalState:
    matrix: np.ndarray

    def __post_init__(self):
        vm = np.array(self.matrix, dtype=float)
        if vm.shape != (4, 4):
            raise ValueError(f"mechanical covariance must be 4x4, got {vm.shape}")
        vm.setflags(write=False)
        object.__setattr__(self, "matrix", vm)

    @property
    def A(self) -> np.ndarray:
        return self.matrix[:2, :2]

    @property
    def B(self) -> np.ndarray:
        return self.matrix[2:, 2:]

    @property
    def C(self) -> np.ndarray:
        return self.matrix[:2, 2:]

    def is_physical(self) -> bool:
        return CovarianceMatrix(self.matrix).is_physical()


def mechanical_block(V: CovarianceMatrix) -> MechanicalState:
    matrix = V.matrix if isinstance(V, CovarianceMatrix) else np.asarray(V)
    return MechanicalState(matrix[:4, :4])


def partial_transpose(state: MechanicalState) -> MechanicalState:
    # elementwise sign flips are exact, so applying this twice is the identity
    return MechanicalState(state.matrix * _TRANSPOSE_MASK)


def symplectic_eigenvalues(matrix: np.ndarray) -> np.ndarray:
    """Moduli of the eigenvalues of i Omega V, one per mode, ascending.

    Computed from the real matrix Omega V whose eigenvalues come in pairs
    +/- i nu.
    """
    matrix = np.asarray(matrix, dtype=float)
    n_modes = matrix.shape[0] // 2
    try:
        eigenvalues = np.linalg.eigvals(symplectic_form(n_modes) @ matrix)
    except np.linalg.LinAlgError as e:
        raise NumericalIntegrityError(f"symplectic eigenvalues did not converge: {e}") from e
    scale = max(1.0, float(np.linalg.norm(matrix, 2)))
    if np.max(np.abs(eigenvalues.real)) > PHYSICALITY_TOL * scale:
        raise NumericalIntegrityError(
            f"Omega V has eigenvalues off the imaginary axis (max real part "
            f"{np.max(np.abs(eigenvalues.real)):.3g})"
        )
    moduli = np.sort(np.abs(eigenvalues))
    return moduli[::2]


# The dark-mode variance puts ||V|| near 1e7 while nu stays O(1), so det V
# cancels by ~14 digits in floating point; Fraction keeps it exact.
def _exact(matrix: np.ndarray):
    return [[Fraction(float(x)) for x in row] for row in matrix]


def _det2(m) -> Fraction:
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def _det4(m) -> Fraction:
    # Laplace expansion over pairs of 2x2 minors from the top two rows
    total = Fraction(0)
    pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    for a, b in pairs:
        rest = [c for c in range(4) if c not in (a, b)]
        top = m[0][a] * m[1][b] - m[0][b] * m[1][a]
        bottom = m[2][rest[0]] * m[3][rest[1]] - m[2][rest[1]] * m[3][rest[0]]
        sign = (-1) ** (a + b + 1)
        total += sign * top * bottom
    return total


def two_mode_nu_minus(matrix: np.ndarray) -> float:
    """Closed form nu^2 = (Delta - sqrt(Delta^2 - 4 det V)) / 2, Delta = det A + det B + 2 det C.

    Delta and det V are evaluated exactly on the float entries;
    the smaller root is taken as 2 det V / (Delta + sqrt(disc)).
    """
    m = _exact(matrix)
    det_a = _det2([row[:2] for row in m[:2]])
    det_b = _det2([row[2:] for row in m[2:]])
    det_c = _det2([row[2:] for row in m[:2]])
    delta = det_a + det_b + 2 * det_c
    det_v = _det4(m)
    disc = delta * delta - 4 * det_v
    if disc < 0:
        if float(disc) < -_EPS * float(delta) ** 2:
            raise NumericalIntegrityError("two-mode discriminant is negative")
        disc = Fraction(0)
    denominator = float(delta) + np.sqrt(float(disc))
    if not denominator > 0 or det_v <= 0:
        raise NumericalIntegrityError("covariance is not positive definite")
    return float(np.sqrt(2.0 * float(det_v) / denominator))


def symplectic_eigen_min(state: MechanicalState) -> float:
    """Smallest symplectic eigenvalue of the state as given.

    Pass partial_transpose(state) for the entanglement criterion. The generic
    eigen path and the two-mode closed form must agree.
    """
    nu_closed = two_mode_nu_minus(state.matrix)
    nu_eigen = float(symplectic_eigenvalues(state.matrix)[0])
    norm = float(np.linalg.norm(state.matrix, 2))
    # eigvals of Omega V carry an absolute error of order eps ||V||; the second
    # term widens the relative bound only when ||V|| is large, as for the dark mode
    tolerance = PATH_AGREEMENT_TOL * nu_closed + 1e3 * _EPS * norm
    if abs(nu_closed - nu_eigen) > tolerance:
        raise NumericalIntegrityError(
            f"symplectic eigenvalue paths disagree: closed form {nu_closed:.12g}, "
            f"eigenvalues {nu_eigen:.12g}"
        )
    return nu_closed


def log_negativity(state: MechanicalState) -> float:
    nu = symplectic_eigen_min(partial_transpose(state))
    if nu >= 0.5:
        return 0.0
    return float(-np.log(2.0 * nu))
