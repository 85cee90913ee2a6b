"""
Seeded random streams.

Every run draws all of its randomness from one integer seed. Independent
consumers (network draw, training states, test states, GA breeding, network
perturbation) get their own generator derived from a stable label, so adding
or reordering consumers never shifts another stream.
"""
import logging
import zlib
from typing import Dict, Optional
import numpy as np

logger = logging.getLogger(__name__)


def resolve_seed(seed: Optional[int] = None) -> int:
    """
    Return the given seed, or draw one from OS entropy

    Args:
        seed: Requested seed or None

    Returns:
        Non-negative 32-bit seed
    """
    if seed is not None:
        return int(seed)

    drawn = int(np.random.SeedSequence().entropy % (2 ** 32))
    logger.info(f"No seed given, drew {drawn} from entropy")
    return drawn


def label_key(label: str) -> int:
    return zlib.crc32(label.encode("utf-8"))


class SeedStreams:
    """Named, independent generators derived from one run seed"""

    def __init__(self, seed: int):
        self.seed = int(seed)
        self.used: Dict[str, int] = {}

    def generator(self, label: str) -> np.random.Generator:
        """
        Generator for a labelled stream; the same label always restarts the same stream

        Args:
            label: Stream label, e.g. "training" or "test"

        Returns:
            numpy Generator
        """
        key = label_key(label)
        self.used[label] = key
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=(key,))
        return np.random.default_rng(sequence)

    def child_seed(self, label: str) -> int:
        """Integer seed for consumers that take a plain seed (e.g. draw_network)"""
        return int(self.generator(label).integers(0, 2 ** 32))

    def provenance(self) -> Dict:
        return {"seed": self.seed, "streams": sorted(self.used)}
