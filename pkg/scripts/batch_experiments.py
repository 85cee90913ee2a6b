"""
Script to run a list of named experiments into one output directory
"""
import argparse
import logging
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

import pandas as pd
from src.cli.main import RunManifest, output_dir
from src.experiments.config import ExperimentConfig
from src.experiments.orchestrator import ExperimentOrchestrator
from src.utils.errors import ConfigError
from src.utils.files import write_csv
from src.utils.rng import resolve_seed

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


def run_batch(names, seed=None, out=None, overrides=()):
    """
    Run every named experiment with one seed

    Args:
        names: Experiment names
        seed: Shared run seed (drawn once when omitted)
        out: Output directory
        overrides: key=value overrides applied to every experiment

    Returns:
        DataFrame with one row per experiment: experiment, status, passed, error
    """
    seed = resolve_seed(seed)
    out_dir = output_dir(out)
    rows = []
    for i, name in enumerate(names, 1):
        logger.info(f"Step {i}/{len(names)}: {name}")
        manifest = RunManifest("batch", seed, str(out_dir)).to_dict()
        try:
            cfg = ExperimentConfig.resolve(name, overrides=overrides)
            cfg.seed = seed
            outcome = ExperimentOrchestrator(out_dir, manifest).run(cfg)
            rows.append({"experiment": name, "status": outcome.status,
                         "passed": outcome.passed, "error": outcome.error or ""})
        except ConfigError as e:
            logger.error(f"Skipping {name}: {e}")
            rows.append({"experiment": name, "status": "failed", "passed": False, "error": str(e)})

    summary = pd.DataFrame(rows, columns=["experiment", "status", "passed", "error"])
    write_csv(out_dir / f"batch-{seed}.csv", summary)
    return summary


def main():
    parser = argparse.ArgumentParser(description='Run several named experiments')
    parser.add_argument('names', nargs='+', help='Experiment names')
    parser.add_argument('--seed', type=int, default=None, help='Shared run seed')
    parser.add_argument('--out', default=None, help='Output directory')
    parser.add_argument('--set', dest='overrides', action='append', default=[],
                        help='key=value override applied to every experiment')

    args = parser.parse_args()

    try:
        summary = run_batch(args.names, args.seed, args.out, args.overrides)
        print(summary.to_string(index=False))
        if bool((summary["status"] == "completed").all() and summary["passed"].all()):
            logger.info("All experiments passed")
            sys.exit(0)
        logger.error("Some experiments failed or missed their threshold")
        sys.exit(1)

    except Exception as e:
        logger.error(f"Error: {e}")
        sys.exit(1)


if __name__ == "__main__":
    main()
