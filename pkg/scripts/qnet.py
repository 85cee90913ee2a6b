"""
Command-line entry point for the quantum network toolkit

    python scripts/qnet.py verify --identities
    python scripts/qnet.py experiment fig2-cnot --seed 7
    python scripts/qnet.py train configs/identity.json --seed 1
"""
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.cli.main import main


if __name__ == "__main__":
    sys.exit(main())
