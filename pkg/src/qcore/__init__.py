from src.qcore.states import DensityMatrix, HermitianOperator, QuantumState, RegisterLayout
from src.qcore.linalg import (
    embed, evolve, fidelity_pure_vs_mixed, haar_random_state, haar_random_states,
    kron, partial_trace, purity, uhlmann_fidelity,
)

__all__ = [
    "DensityMatrix", "HermitianOperator", "QuantumState", "RegisterLayout",
    "embed", "evolve", "fidelity_pure_vs_mixed", "haar_random_state",
    "haar_random_states", "kron", "partial_trace", "purity", "uhlmann_fidelity",
]
