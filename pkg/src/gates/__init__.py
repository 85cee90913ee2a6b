from src.gates.library import (
    GateMatrix, grover_diffusion, grover_oracle, rotation, standard_gate,
)
from src.gates.circuits import CircuitDescription, PlacedGate, compose_circuit, load_builtin_circuit
from src.gates.channels import ChannelTarget, amplitude_damping_output
from src.gates.identities import verify_identity
