"""
Single-subsystem operators in the |0> = |g>, |1> = |e> basis
"""
import numpy as np
from config.settings import SIGMA_CONVENTIONS, SIGMA_DOUBLED, SIGMA_LADDER
from src.utils.errors import ConfigError

IDENTITY = np.eye(2, dtype=complex)

# a = |g><e|, a^dagger = |e><g|
LOWERING = np.array([[0, 1], [0, 0]], dtype=complex)
RAISING = LOWERING.conj().T
NUMBER = RAISING @ LOWERING

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def check_convention(convention: str) -> str:
    if convention not in SIGMA_CONVENTIONS:
        raise ConfigError(
            f"Unknown sigma convention '{convention}', expected one of {SIGMA_CONVENTIONS}"
        )
    return convention


def sigma_plus(convention: str = SIGMA_DOUBLED) -> np.ndarray:
    """
    Qubit raising operator

    Args:
        convention: "doubled" gives sigma_x + i sigma_y = 2|e><g| (spin basis, |e> the
            +1 eigenvector of sigma_z); "ladder" gives |e><g|

    Returns:
        2x2 matrix
    """
    check_convention(convention)
    return 2.0 * RAISING if convention == SIGMA_DOUBLED else RAISING.copy()


def sigma_minus(convention: str = SIGMA_DOUBLED) -> np.ndarray:
    """Hermitian conjugate of sigma_plus under the same convention"""
    return sigma_plus(convention).conj().T


def ladder_scale(convention: str) -> float:
    """Magnitude of <e|sigma_plus|g> for a convention"""
    check_convention(convention)
    return 2.0 if convention == SIGMA_DOUBLED else 1.0


__all__ = [
    "IDENTITY", "LOWERING", "RAISING", "NUMBER", "PAULI_X", "PAULI_Y", "PAULI_Z",
    "SIGMA_DOUBLED", "SIGMA_LADDER", "check_convention", "sigma_plus", "sigma_minus",
    "ladder_scale",
]
