"""
Random network of driven two-level sites
"""
import json
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Sequence, Tuple, Union
import numpy as np
from src.model.operators import LOWERING, NUMBER, RAISING
from src.qcore.linalg import embed, kron
from src.qcore.states import HermitianOperator, RegisterLayout
from src.utils.errors import ConfigError, DimensionError, ValidationError

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]

# tolerance on the uniform-draw bounds, for values that went through JSON
BOUND_SLACK = 1e-12

# site energies drawn from U[-E0/2, E0/2], or all pinned to E0
ENERGY_UNIFORM = "uniform"
ENERGY_FIXED = "fixed"
ENERGY_MODES = (ENERGY_UNIFORM, ENERGY_FIXED)


def chain_adjacency(n_sites: int) -> Tuple[Edge, ...]:
    """Open 1-D chain: (0,1), (1,2), ..., no periodic edge"""
    return tuple((l, l + 1) for l in range(n_sites - 1))


def random_adjacency(n_sites: int, edge_probability: float,
                     seed: Optional[int] = None) -> Tuple[Edge, ...]:
    """
    Erdos-Renyi edge list over the sites

    Args:
        n_sites: Number of sites
        edge_probability: Independent probability of each pair being connected
        seed: RNG seed

    Returns:
        Sorted edge list with l < l'
    """
    if not 0.0 <= edge_probability <= 1.0:
        raise ValidationError(f"Edge probability {edge_probability} outside [0, 1]")
    rng = np.random.default_rng(seed)
    return tuple(
        (l, m) for l in range(n_sites) for m in range(l + 1, n_sites)
        if rng.random() < edge_probability
    )


def _complex(value) -> complex:
    if isinstance(value, dict):
        return complex(float(value["re"]), float(value["im"]))
    return complex(value)


def _complex_record(value: complex) -> Dict:
    return {"re": float(np.real(value)), "im": float(np.imag(value))}


@dataclass(frozen=True)
class NetworkSpec:
    """
    Drawn network: site energies, hoppings on adjacency edges, and the drive

    `perturbation` widens the allowed parameter range for networks produced by
    perturb_network (each draw may move by at most that amount). With the fixed
    energy mode every E_l equals E0, as for the one-site network whose onsite
    energy is the reference unit.
    """
    n_sites: int
    energies: Tuple[float, ...]
    hoppings: Tuple[float, ...]
    adjacency: Tuple[Edge, ...]
    drive: complex = 0j
    E0: float = 0.0
    K0: float = 0.0
    seed: Optional[int] = None
    site_drives: Optional[Tuple[complex, ...]] = None
    perturbation: float = 0.0
    energy_mode: str = ENERGY_UNIFORM

    def __post_init__(self):
        object.__setattr__(self, "energies", tuple(float(e) for e in self.energies))
        object.__setattr__(self, "hoppings", tuple(float(k) for k in self.hoppings))
        object.__setattr__(self, "adjacency", tuple((int(a), int(b)) for a, b in self.adjacency))
        object.__setattr__(self, "drive", complex(self.drive))
        if self.site_drives is not None:
            object.__setattr__(self, "site_drives", tuple(complex(p) for p in self.site_drives))
        self._validate()

    def _validate(self):
        if self.n_sites < 1:
            raise DimensionError(f"Network needs at least one site, got {self.n_sites}")
        if self.E0 < 0 or self.K0 < 0 or self.perturbation < 0:
            raise ValidationError("E0, K0 and perturbation must be non-negative")
        if len(self.energies) != self.n_sites:
            raise DimensionError(f"{len(self.energies)} energies for {self.n_sites} sites")
        if len(self.hoppings) != len(self.adjacency):
            raise DimensionError(
                f"{len(self.hoppings)} hoppings for {len(self.adjacency)} edges"
            )
        check_adjacency(self.adjacency, self.n_sites)
        if self.site_drives is not None and len(self.site_drives) != self.n_sites:
            raise DimensionError(f"{len(self.site_drives)} site drives for {self.n_sites} sites")

        if self.energy_mode not in ENERGY_MODES:
            raise ConfigError(f"Unknown energy mode '{self.energy_mode}', expected one of {ENERGY_MODES}")

        k_bound = self.K0 / 2 + self.perturbation + BOUND_SLACK
        if self.energy_mode == ENERGY_FIXED:
            slack = self.perturbation + BOUND_SLACK
            if any(abs(e - self.E0) > slack for e in self.energies):
                raise ValidationError(f"Site energy differs from E0={self.E0:g} by more than {slack:g}")
        else:
            e_bound = self.E0 / 2 + self.perturbation + BOUND_SLACK
            if any(abs(e) > e_bound for e in self.energies):
                raise ValidationError(f"Site energy outside [-{e_bound:g}, {e_bound:g}]")
        if any(abs(k) > k_bound for k in self.hoppings):
            raise ValidationError(f"Hopping outside [-{k_bound:g}, {k_bound:g}]")

    @property
    def drives(self) -> Tuple[complex, ...]:
        """Per-site drive P_l (uniform P unless site drives are set)"""
        return self.site_drives if self.site_drives is not None else (self.drive,) * self.n_sites

    def with_drive(self, drive: complex) -> "NetworkSpec":
        return replace(self, drive=complex(drive), site_drives=None)

    def with_site_drives(self, drives: Sequence[complex]) -> "NetworkSpec":
        return replace(self, site_drives=tuple(complex(p) for p in drives))

    def to_dict(self) -> Dict:
        data = {
            "n_sites": self.n_sites,
            "seed": self.seed,
            "E0": self.E0,
            "K0": self.K0,
            "P": _complex_record(self.drive),
            "adjacency": [list(edge) for edge in self.adjacency],
            "energies": list(self.energies),
            "hoppings": list(self.hoppings),
            "perturbation": self.perturbation,
            "energy_mode": self.energy_mode,
        }
        if self.site_drives is not None:
            data["site_drives"] = [_complex_record(p) for p in self.site_drives]
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> "NetworkSpec":
        try:
            site_drives = data.get("site_drives")
            return cls(
                n_sites=int(data["n_sites"]),
                energies=data["energies"],
                hoppings=data["hoppings"],
                adjacency=[tuple(edge) for edge in data["adjacency"]],
                drive=_complex(data.get("P", 0.0)),
                E0=float(data.get("E0", 0.0)),
                K0=float(data.get("K0", 0.0)),
                seed=data.get("seed"),
                site_drives=None if site_drives is None else [_complex(p) for p in site_drives],
                perturbation=float(data.get("perturbation", 0.0)),
                energy_mode=data.get("energy_mode", ENERGY_UNIFORM),
            )
        except KeyError as e:
            raise ConfigError(f"Network document missing field {e}") from e

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "NetworkSpec":
        return cls.from_dict(json.loads(text))


def check_adjacency(adjacency: Sequence[Edge], n_sites: int):
    """
    Raises:
        DimensionError: If an edge references a missing site, is a self-loop or repeats
    """
    seen = set()
    for a, b in adjacency:
        if not (0 <= a < n_sites and 0 <= b < n_sites):
            raise DimensionError(f"Edge ({a}, {b}) references a site outside 0..{n_sites - 1}")
        if a == b:
            raise DimensionError(f"Self-loop on site {a}")
        key = (min(a, b), max(a, b))
        if key in seen:
            raise DimensionError(f"Duplicate edge {key}")
        seen.add(key)


def draw_network(n_sites: int,
                 E0: float,
                 K0: float,
                 adjacency: Optional[Sequence[Edge]] = None,
                 P: complex = 0j,
                 seed: Optional[int] = None,
                 energy_mode: str = ENERGY_UNIFORM) -> NetworkSpec:
    """
    Draw site energies and hoppings uniformly at random

    Args:
        n_sites: Number of network sites
        E0: Energy scale; E_l ~ U[-E0/2, E0/2], or E_l = E0 in the fixed mode
        K0: Hopping scale; K_ll' ~ U[-K0/2, K0/2] per edge
        adjacency: Edge list (open chain when omitted)
        P: Uniform complex drive
        seed: RNG seed
        energy_mode: "uniform" or "fixed"

    Returns:
        NetworkSpec
    """
    if n_sites < 1:
        raise DimensionError(f"Network needs at least one site, got {n_sites}")
    if E0 < 0 or K0 < 0:
        raise ValidationError(f"E0 and K0 must be non-negative, got {E0}, {K0}")

    adjacency = chain_adjacency(n_sites) if adjacency is None else tuple(adjacency)
    check_adjacency(adjacency, n_sites)

    if energy_mode not in ENERGY_MODES:
        raise ConfigError(f"Unknown energy mode '{energy_mode}', expected one of {ENERGY_MODES}")

    rng = np.random.default_rng(seed)
    if energy_mode == ENERGY_FIXED:
        energies = np.full(n_sites, float(E0))
    elif E0 > 0:
        energies = rng.uniform(-E0 / 2, E0 / 2, size=n_sites)
    else:
        energies = np.zeros(n_sites)
    hoppings = (rng.uniform(-K0 / 2, K0 / 2, size=len(adjacency))
                if K0 > 0 else np.zeros(len(adjacency)))

    logger.debug(f"Drew {n_sites}-site network with {len(adjacency)} edges (seed={seed})")
    return NetworkSpec(
        n_sites=n_sites,
        energies=tuple(energies),
        hoppings=tuple(hoppings),
        adjacency=adjacency,
        drive=P,
        E0=float(E0),
        K0=float(K0),
        seed=seed,
        energy_mode=energy_mode,
    )


def perturb_network(spec: NetworkSpec, delta: float,
                    rng: Union[np.random.Generator, int, None] = None) -> NetworkSpec:
    """
    E_l -> E_l + delta r_l and K_ll' -> K_ll' + delta r_ll' with r uniform on [-1, 1]

    Args:
        spec: Baseline network
        delta: Perturbation strength (same units as E0, K0)
        rng: Generator or seed

    Returns:
        Perturbed copy of spec
    """
    if delta < 0:
        raise ValidationError(f"Perturbation strength must be non-negative, got {delta}")
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    r_energy = rng.uniform(-1.0, 1.0, size=spec.n_sites)
    r_hopping = rng.uniform(-1.0, 1.0, size=len(spec.hoppings))
    return replace(
        spec,
        energies=tuple(np.asarray(spec.energies) + delta * r_energy),
        hoppings=tuple(np.asarray(spec.hoppings) + delta * r_hopping),
        perturbation=spec.perturbation + delta,
    )


def drive_matrix(P: complex) -> np.ndarray:
    """P a^dagger + P* a on one site"""
    return P * RAISING + np.conj(P) * LOWERING


def network_hamiltonian(spec: NetworkSpec,
                        layout: Optional[RegisterLayout] = None) -> HermitianOperator:
    """
    Network Hamiltonian embedded in the full register (identity on qubits)

    H_R = sum_l E_l n_l + sum_edges K (a_l^dag a_l' + h.c.) + sum_l (P_l a_l^dag + P_l* a_l)

    Args:
        spec: Network parameters
        layout: Register layout; a sites-only layout when omitted

    Returns:
        HermitianOperator of dimension layout.dim
    """
    layout = layout or RegisterLayout(0, spec.n_sites)
    if layout.n_sites != spec.n_sites:
        raise DimensionError(
            f"Layout has {layout.n_sites} sites, network has {spec.n_sites}"
        )

    h = np.zeros((layout.dim, layout.dim), dtype=complex)
    for l, (energy, drive) in enumerate(zip(spec.energies, spec.drives)):
        local = energy * NUMBER + drive_matrix(drive)
        if np.any(local):
            h += embed(local, [layout.site(l)], layout)

    hop = kron(RAISING, LOWERING)
    hop = hop + hop.conj().T
    for (a, b), k in zip(spec.adjacency, spec.hoppings):
        if k != 0.0:
            h += k * embed(hop, [layout.site(a), layout.site(b)], layout)

    return HermitianOperator(h)


__all__ = [
    "NetworkSpec", "chain_adjacency", "random_adjacency", "check_adjacency",
    "draw_network", "perturb_network", "drive_matrix", "network_hamiltonian",
]
