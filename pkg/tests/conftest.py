import numpy as np
import pytest

from nanosphere_csl.physics_modules import SystemConfig, derive


def two_mode_squeezed(r: float) -> np.ndarray:
    c, s = np.cosh(2 * r), np.sinh(2 * r)
    z = np.diag([1.0, -1.0])
    return 0.5 * np.block([[c * np.eye(2), s * z], [s * z, c * np.eye(2)]])


def local_symplectic(theta: float, squeeze: float) -> np.ndarray:
    rotation = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    return rotation @ np.diag([np.exp(squeeze), np.exp(-squeeze)])


def random_two_mode_symplectic(rng) -> np.ndarray:
    s1 = local_symplectic(rng.uniform(0, 2 * np.pi), rng.uniform(-0.5, 0.5))
    s2 = local_symplectic(rng.uniform(0, 2 * np.pi), rng.uniform(-0.5, 0.5))
    local = np.block([[s1, np.zeros((2, 2))], [np.zeros((2, 2)), s2]])
    r = rng.uniform(0, 1.0)
    z = np.diag([1.0, -1.0])
    squeezer = np.block([[np.cosh(r) * np.eye(2), np.sinh(r) * z], [np.sinh(r) * z, np.cosh(r) * np.eye(2)]])
    phi = rng.uniform(0, np.pi)
    splitter = np.block([[np.cos(phi) * np.eye(2), np.sin(phi) * np.eye(2)],
                         [-np.sin(phi) * np.eye(2), np.cos(phi) * np.eye(2)]])
    return local @ squeezer @ splitter


def random_physical_state(rng):
    """(V, nus): V = S diag(nu1, nu1, nu2, nu2) S^T with nu_i >= 1/2."""
    nus = 0.5 + rng.exponential(1.0, size=2)
    S = random_two_mode_symplectic(rng)
    V = S @ np.diag([nus[0], nus[0], nus[1], nus[1]]) @ S.T
    return 0.5 * (V + V.T), nus


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


@pytest.fixture
def fig2_config():
    return SystemConfig()


@pytest.fixture
def fig2_dq(fig2_config):
    return derive(fig2_config, 1.0e4)
