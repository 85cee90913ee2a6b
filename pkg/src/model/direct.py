"""
Small closed models: two directly coupled driven qubits, and one qubit on a one-site network
"""
import logging
from dataclasses import asdict, dataclass
from typing import Dict, Optional
import numpy as np
from config.settings import SIGMA_LADDER, UNITARY_TOL
from src.model.network import drive_matrix
from src.model.operators import LOWERING, NUMBER, RAISING
from src.model.protocol import CouplingMatrix, coupling_hamiltonian
from src.qcore.linalg import embed, kron, propagator, unitary_deviation
from src.qcore.states import HermitianOperator, RegisterLayout
from src.utils.errors import DimensionError, ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DirectTwoQubitSpec:
    """Parameters of two hopping-coupled driven qubits; tau = E2 t / hbar"""
    E1: float
    E2: float
    P1: complex
    P2: complex
    J: float
    tau: float

    def __post_init__(self):
        if self.E2 == 0:
            raise ValidationError("E2 is the energy unit and must be non-zero")
        object.__setattr__(self, "P1", complex(self.P1))
        object.__setattr__(self, "P2", complex(self.P2))

    def to_dict(self) -> Dict:
        data = asdict(self)
        for name in ("P1", "P2"):
            data[name] = {"re": self.__dict__[name].real, "im": self.__dict__[name].imag}
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> "DirectTwoQubitSpec":
        def _c(v):
            return complex(v["re"], v["im"]) if isinstance(v, dict) else complex(v)
        return cls(float(data["E1"]), float(data.get("E2", 1.0)), _c(data["P1"]),
                   _c(data["P2"]), float(data["J"]), float(data["tau"]))


def direct_two_qubit_hamiltonian(spec: DirectTwoQubitSpec) -> HermitianOperator:
    """
    H / E2 = sum_j (E_j n_j + P_j a_j^dag + P_j* a_j) / E2 + J (a1 a2^dag + a2 a1^dag) / E2
    """
    h = np.zeros((4, 4), dtype=complex)
    for j, (energy, drive) in enumerate(((spec.E1, spec.P1), (spec.E2, spec.P2))):
        h += embed(energy * NUMBER + drive_matrix(drive), [j], 2)
    hop = kron(LOWERING, RAISING)
    h += spec.J * (hop + hop.conj().T)
    return HermitianOperator(h / spec.E2)


def direct_two_qubit_unitary(spec: DirectTwoQubitSpec) -> np.ndarray:
    """
    exp(-i H tau) of the direct two-qubit model in units of E2

    Args:
        spec: Model parameters

    Returns:
        4x4 unitary matrix
    """
    u = propagator(direct_two_qubit_hamiltonian(spec), spec.tau)
    deviation = unitary_deviation(u)
    if deviation > UNITARY_TOL:
        raise ValidationError(f"Propagator deviates from unitary by {deviation:.3e}")
    return u


def one_site_hamiltonian(E1: float, P: complex, J11: complex,
                         layout: Optional[RegisterLayout] = None,
                         convention: str = SIGMA_LADDER) -> HermitianOperator:
    """
    One qubit coupled to a one-site network

    H = E1 a^dag a + P a^dag + P* a + J11* sigma+ a + J11 a^dag sigma-

    Args:
        E1: Site energy
        P: Site drive
        J11: Qubit-site tunnelling amplitude
        layout: Must be 1 qubit + 1 site (default)
        convention: sigma-plus convention; conventional ladder operators by default

    Returns:
        4x4 HermitianOperator
    """
    layout = layout or RegisterLayout(1, 1)
    if (layout.n_qubits, layout.n_sites) != (1, 1):
        raise DimensionError(f"One-site model needs 1 qubit + 1 site, got {layout}")
    site = embed(E1 * NUMBER + drive_matrix(P), [layout.site(0)], layout)
    coupling = coupling_hamiltonian(CouplingMatrix([[J11]]), layout, convention)
    return HermitianOperator(site + coupling.matrix)


__all__ = [
    "DirectTwoQubitSpec", "direct_two_qubit_hamiltonian", "direct_two_qubit_unitary",
    "one_site_hamiltonian",
]
