"""
Constructions of cNOT from the other two-qubit gates plus single-qubit rotations
"""
import logging
from typing import Callable, Dict
import numpy as np
from src.gates.library import gate_deviation, rotation, standard_gate
from src.qcore.linalg import kron
from src.utils.errors import ConfigError

logger = logging.getLogger(__name__)

I2 = np.eye(2, dtype=complex)


def _g(name: str) -> np.ndarray:
    return standard_gate(name).matrix


def _r(axis: str, angle: float) -> np.ndarray:
    return rotation(axis, angle).matrix


def _from_cy() -> np.ndarray:
    return kron(I2, _r("z", -np.pi / 2)) @ _g("cY") @ kron(I2, _r("z", np.pi / 2))


def _from_cz() -> np.ndarray:
    return kron(I2, _r("y", np.pi / 2)) @ _g("cZ") @ kron(I2, _r("y", -np.pi / 2))


def _from_sswap() -> np.ndarray:
    sswap = _g("sSWAP")
    return (kron(I2, _r("y", -np.pi / 2)) @ sswap @ kron(_g("Z"), I2) @ sswap
            @ kron(_r("z", -np.pi / 2), _r("z", -np.pi / 2)) @ kron(I2, _r("y", np.pi / 2)))


def _from_siswap() -> np.ndarray:
    siswap = _g("siSWAP")
    xx = kron(_g("X"), _g("X"))
    return (xx @ kron(_r("y", -np.pi / 2), I2) @ kron(_r("x", np.pi / 2), _r("x", -np.pi / 2))
            @ siswap @ kron(_r("x", np.pi), I2) @ siswap
            @ kron(_r("y", np.pi / 2), I2) @ kron(_g("Z"), I2) @ xx * np.exp(1j * np.pi / 4))


IDENTITIES: Dict[str, Callable[[], np.ndarray]] = {
    "cy": _from_cy,
    "cz": _from_cz,
    "sswap": _from_sswap,
    "siswap": _from_siswap,
}


def identity_names() -> list:
    return list(IDENTITIES)


def compose_identity(id_name: str) -> np.ndarray:
    key = str(id_name).lower()
    if key not in IDENTITIES:
        raise ConfigError(f"Unknown identity '{id_name}', expected one of {identity_names()}")
    return IDENTITIES[key]()


def verify_identity(id_name: str) -> float:
    """
    Build cNOT from the named gate and report how far it is from the exact cNOT

    Args:
        id_name: One of cy, cz, sswap, siswap

    Returns:
        Max elementwise deviation from cNOT after removing global phase
    """
    deviation = gate_deviation(standard_gate("cNOT").matrix, compose_identity(id_name))
    logger.debug(f"cNOT from {id_name}: deviation {deviation:.3e}")
    return deviation


__all__ = ["IDENTITIES", "identity_names", "compose_identity", "verify_identity"]
