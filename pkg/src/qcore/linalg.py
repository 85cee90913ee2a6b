"""
Dense linear algebra on registers of two-level systems.

Conventions: hbar = 1, subsystem 0 is the leftmost (most significant) tensor
factor, and every operation is a pure function of its inputs.
"""
import logging
from typing import Sequence, Union
import numpy as np
from scipy import linalg
from config.settings import FIDELITY_TOL, IMAG_TOL, PSD_TOL
from src.qcore.states import (
    DensityMatrix, HermitianOperator, QuantumState, RegisterLayout
)
from src.utils.errors import DimensionError, ValidationError

logger = logging.getLogger(__name__)

Seed = Union[int, np.random.Generator, None]


def as_matrix(op) -> np.ndarray:
    """Plain complex array from an ndarray or any operator value type"""
    return np.asarray(getattr(op, "matrix", op), dtype=complex)


def kron(a, b, *rest) -> np.ndarray:
    """
    Kronecker product of square operators, left to right

    Args:
        a: Leftmost factor
        b: Next factor
        *rest: Further factors

    Returns:
        Operator whose dimension is the product of the input dimensions
    """
    result = None
    for factor in (a, b) + rest:
        matrix = as_matrix(factor)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionError(f"kron operands must be square, got {matrix.shape}")
        result = matrix if result is None else np.kron(result, matrix)
    return result


def _subsystems(layout: Union[RegisterLayout, int]) -> int:
    if isinstance(layout, RegisterLayout):
        return layout.n_subsystems
    return int(layout)


def _check_targets(targets: Sequence[int], n: int) -> list:
    targets = [int(t) for t in targets]
    if len(set(targets)) != len(targets):
        raise DimensionError(f"Duplicate target indices: {targets}")
    for t in targets:
        if not 0 <= t < n:
            raise DimensionError(f"Target index {t} outside a {n}-subsystem register")
    return targets


def embed(op, targets: Sequence[int], layout: Union[RegisterLayout, int]) -> np.ndarray:
    """
    Place an operator on the given subsystems, identity elsewhere

    Args:
        op: Operator on len(targets) subsystems; its factor order follows targets
        targets: Register indices the operator acts on
        layout: Register layout or plain subsystem count

    Returns:
        Full-register operator
    """
    n = _subsystems(layout)
    targets = _check_targets(targets, n)
    matrix = as_matrix(op)
    k = len(targets)
    if matrix.shape != (2 ** k, 2 ** k):
        raise DimensionError(
            f"Operator of shape {matrix.shape} cannot act on {k} subsystem(s)"
        )

    rest = [i for i in range(n) if i not in targets]
    full = np.kron(matrix, np.eye(2 ** len(rest), dtype=complex))
    if targets + rest == list(range(n)):
        return full

    # axes of `full` follow the order targets + rest; move them back to register order
    inverse = list(np.argsort(targets + rest))
    tensor = full.reshape([2] * (2 * n))
    tensor = tensor.transpose(inverse + [n + p for p in inverse])
    return tensor.reshape(2 ** n, 2 ** n)


def _hermitian(h) -> HermitianOperator:
    if isinstance(h, HermitianOperator):
        return h
    return HermitianOperator(as_matrix(h))


def propagator(h, t: float) -> np.ndarray:
    """exp(-i h t) from the cached eigensystem of h"""
    h = _hermitian(h)
    energies, vectors = h.eigensystem
    return (vectors * np.exp(-1j * energies * t)) @ vectors.conj().T


def evolve(h, t: float, psi: QuantumState) -> QuantumState:
    """
    Evolve a state under a time-independent Hamiltonian

    Args:
        h: Hermitian generator (HermitianOperator or array)
        t: Time in units of hbar / energy unit
        psi: Initial state

    Returns:
        exp(-i h t) psi
    """
    h = _hermitian(h)
    if h.dim != psi.dim:
        raise DimensionError(f"Hamiltonian dimension {h.dim} != state dimension {psi.dim}")

    energies, vectors = h.eigensystem
    coefficients = vectors.conj().T @ psi.amplitudes
    evolved = vectors @ (np.exp(-1j * energies * t) * coefficients)
    return QuantumState(evolved)


def reduced_from_vector(vector: np.ndarray, keep: Sequence[int], n: int) -> np.ndarray:
    """Reduced density matrix of a pure vector; unvalidated fast path"""
    rest = [i for i in range(n) if i not in keep]
    tensor = vector.reshape([2] * n).transpose(list(keep) + rest)
    block = tensor.reshape(2 ** len(keep), 2 ** len(rest))
    return block @ block.conj().T


def partial_trace(state: Union[QuantumState, DensityMatrix],
                  keep: Sequence[int],
                  layout: Union[RegisterLayout, int, None] = None) -> DensityMatrix:
    """
    Trace out every subsystem not in keep

    Args:
        state: Pure state or density matrix over the full register
        keep: Subsystems to keep, in the order they appear in the result
        layout: Register layout (inferred from the state dimension when omitted)

    Returns:
        Reduced density matrix
    """
    n = state.n if layout is None else _subsystems(layout)
    if state.n != n:
        raise DimensionError(f"State has {state.n} subsystems, layout has {n}")
    keep = _check_targets(keep, n)

    if isinstance(state, QuantumState):
        return DensityMatrix(reduced_from_vector(state.amplitudes, keep, n))

    rest = [i for i in range(n) if i not in keep]
    k, r = len(keep), len(rest)
    tensor = state.matrix.reshape([2] * (2 * n))
    tensor = tensor.transpose(keep + rest + [n + i for i in keep] + [n + i for i in rest])
    tensor = tensor.reshape(2 ** k, 2 ** r, 2 ** k, 2 ** r)
    return DensityMatrix(np.einsum("arbr->ab", tensor))


def clip_fidelity(raw: float) -> float:
    """
    Clip a fidelity to [0, 1] after checking it is only numerically outside

    Raises:
        ValidationError: If raw lies further than FIDELITY_TOL outside [0, 1]
    """
    if raw < -FIDELITY_TOL or raw > 1.0 + FIDELITY_TOL:
        raise ValidationError(f"Fidelity {raw!r} outside [0, 1]")
    return float(min(max(raw, 0.0), 1.0))


def fidelity_pure_vs_mixed(ideal: QuantumState, actual: DensityMatrix) -> float:
    """<ideal| actual |ideal>"""
    if ideal.dim != actual.dim:
        raise DimensionError(f"Dimensions differ: {ideal.dim} vs {actual.dim}")
    value = np.vdot(ideal.amplitudes, actual.matrix @ ideal.amplitudes)
    if abs(value.imag) > IMAG_TOL:
        raise ValidationError(f"Fidelity has imaginary part {value.imag:.3e}")
    return clip_fidelity(value.real)


def _psd_sqrt(matrix: np.ndarray) -> np.ndarray:
    values, vectors = linalg.eigh(matrix)
    return (vectors * np.sqrt(np.clip(values, 0.0, None))) @ vectors.conj().T


def uhlmann_fidelity(a, b) -> float:
    """
    Uhlmann fidelity (Tr sqrt(sqrt(a) b sqrt(a)))^2 between two density matrices

    Args:
        a: First density matrix (DensityMatrix or array)
        b: Second density matrix (DensityMatrix or array)

    Returns:
        Fidelity in [0, 1]; equals <psi|b|psi> when a = |psi><psi|
    """
    a = a if isinstance(a, DensityMatrix) else DensityMatrix(as_matrix(a))
    b = b if isinstance(b, DensityMatrix) else DensityMatrix(as_matrix(b))
    if a.dim != b.dim:
        raise DimensionError(f"Dimensions differ: {a.dim} vs {b.dim}")
    return uhlmann_fidelity_unchecked(a.matrix, b.matrix)


def uhlmann_fidelity_unchecked(a: np.ndarray, b: np.ndarray) -> float:
    """Uhlmann fidelity on raw arrays already known to be density matrices"""
    root = _psd_sqrt(a)
    inner = linalg.eigvalsh(root @ b @ root)
    if inner[0] < -PSD_TOL:
        raise ValidationError(f"sqrt(a) b sqrt(a) has negative eigenvalue {inner[0]:.3e}")
    return clip_fidelity(float(np.sum(np.sqrt(np.clip(inner, 0.0, None))) ** 2))


def purity(rho: DensityMatrix) -> float:
    """Tr(rho^2)"""
    matrix = as_matrix(rho)
    return float(np.einsum("ij,ji->", matrix, matrix).real)


def _generator(rng: Seed) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def haar_random_vectors(n: int, count: int, rng: Seed = None) -> np.ndarray:
    """
    Haar-random state vectors as rows of a (count, 2**n) array

    Args:
        n: Number of two-level subsystems
        count: Number of states
        rng: Seeded generator or integer seed

    Returns:
        Array of normalized amplitude rows
    """
    if n < 1:
        raise DimensionError(f"Need at least one subsystem, got {n}")
    rng = _generator(rng)
    dim = 2 ** n
    vectors = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    return vectors / np.linalg.norm(vectors, axis=1, keepdims=True)


def haar_random_state(n: int, rng: Seed = None) -> QuantumState:
    """Single Haar-random state on n subsystems, reproducible from the seed"""
    return QuantumState(haar_random_vectors(n, 1, rng)[0])


def haar_random_states(n: int, count: int, rng: Seed = None) -> list:
    return [QuantumState(row) for row in haar_random_vectors(n, count, rng)]


def unitary_deviation(u: np.ndarray) -> float:
    """max |U^dagger U - I|"""
    u = as_matrix(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def phase_aligned_deviation(a: np.ndarray, b: np.ndarray) -> float:
    """
    Max elementwise deviation between a and b after removing the best global phase

    The phase maximizing |Tr(a^dagger b)| is applied to b before comparing.
    """
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"Shapes differ: {a.shape} vs {b.shape}")
    overlap = np.vdot(a, b)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.max(np.abs(a - b / phase)))
