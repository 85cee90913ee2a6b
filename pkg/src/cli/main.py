"""
Command-line entry point: train targets, evaluate saved models, verify the
gate identities and the direct-model table, and run named experiments
"""
import argparse
import logging
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional, Sequence
from config.presets import EXPERIMENT_PRESETS, KIND_GATE
from config.settings import (
    DEFAULT_THRESHOLDS, HISTOGRAM_BINS, SUPP_TABLE_STATES, TEST_SET_SIZE, TOOLKIT_VERSION,
    default_output_dir,
)
from src.experiments.base_experiment import BaseExperiment
from src.experiments.config import ExperimentConfig, read_config_document
from src.experiments.orchestrator import ExperimentOrchestrator
from src.experiments.reports import (
    FidelityReport, embedded_manifest, evaluate_protocol, report_stem, write_report,
)
from src.experiments.supp_table import verify_supp_table
from src.gates.identities import identity_names, verify_identity
from src.model.protocol import get_protocol
from src.trainer.persistence import TrainedModel, load_model, save_history, save_model
from src.utils.errors import ConfigError
from src.utils.files import write_json
from src.utils.logger import setup_logging
from src.utils.rng import SeedStreams, resolve_seed

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_BELOW_THRESHOLD = 3


@dataclass
class RunManifest:
    """Where an output came from; embedded in every report and written beside it"""
    command: str
    seed: int
    out_dir: str
    config_path: Optional[str] = None
    version: str = TOOLKIT_VERSION
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    def to_dict(self) -> Dict:
        return asdict(self)


def output_dir(out: Optional[str]) -> Path:
    return Path(out) if out else default_output_dir()


def _usage_error(message: str) -> int:
    logger.error(message)
    print(f"error: {message}", file=sys.stderr)
    return EXIT_USAGE


def load_train_config(path: str) -> ExperimentConfig:
    """
    Training config: an experiment document where experiment and kind may be omitted

    Raises:
        ConfigError: If the file is missing or malformed
    """
    document = read_config_document(path)
    if "preset" in document:
        return ExperimentConfig.resolve(path=path)
    document.setdefault("experiment", Path(path).stem)
    document.setdefault("kind", KIND_GATE)
    return ExperimentConfig.from_dict(document)


def cmd_train(args: argparse.Namespace) -> int:
    """Train the configured target and persist the model and its fitness history"""
    try:
        cfg = load_train_config(args.config)
    except ConfigError as e:
        return _usage_error(str(e))

    seed = resolve_seed(args.seed if args.seed is not None else cfg.seed)
    cfg.seed = seed
    out_dir = output_dir(args.out)
    manifest = RunManifest("train", seed, str(out_dir), str(args.config)).to_dict()
    stem = report_stem(cfg.experiment, seed)

    try:
        target = cfg.channel_target()
        experiment = BaseExperiment(cfg, SeedStreams(seed), args.progress)
        logger.info("Step 1/2: Drawing network...")
        network = experiment.draw_network()
        logger.info("Step 2/2: Training...")
        result = experiment.train(target, network)
    except ConfigError as e:
        return _usage_error(str(e))
    except Exception as e:
        logger.error(f"Training failed: {e}")
        return EXIT_CHECK_FAILED

    model = TrainedModel.from_result(result, {"experiment": cfg.experiment,
                                              "manifest": embedded_manifest(manifest)})
    save_model(model, out_dir / f"{stem}.model.json")
    save_history(result.history_frame(), out_dir / f"{stem}-history.csv")
    write_json(out_dir / f"{stem}.manifest.json", manifest)

    threshold = cfg.acceptance_threshold()
    print(f"{cfg.experiment}: training fidelity {result.fitness:.6f}"
          + (f" (threshold {threshold})" if threshold is not None else ""))
    if threshold is not None and result.fitness < threshold:
        logger.warning(f"Training fidelity {result.fitness:.6f} below threshold {threshold}")
        return EXIT_BELOW_THRESHOLD
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    """Score a saved model on fresh Haar-random states"""
    try:
        model = load_model(args.model)
    except ConfigError as e:
        return _usage_error(str(e))

    seed = resolve_seed(args.seed)
    out_dir = output_dir(args.out)
    manifest = RunManifest("eval", seed, str(out_dir), str(args.model)).to_dict()
    streams = SeedStreams(seed)

    try:
        values = evaluate_protocol(get_protocol(model.params), model.target, args.states,
                                   streams.generator("test"), show_progress=args.progress)
    except Exception as e:
        logger.error(f"Evaluation failed: {e}")
        return EXIT_CHECK_FAILED

    name = f"eval-{Path(args.model).stem}"
    report = FidelityReport(
        experiment=name,
        values=values,
        n_bins=HISTOGRAM_BINS,
        provenance={"model": str(args.model), "target": model.target.to_dict(),
                    "training_fitness": model.fitness, "seeds": streams.provenance()},
    )
    write_report(report, out_dir, report_stem(name, seed), manifest)
    print(f"{model.target.label}: mean fidelity {report.mean:.6f} over {values.size} state(s)")
    return EXIT_OK


def verify_identities(tolerance: float = DEFAULT_THRESHOLDS["identity"]) -> List[str]:
    """Print every identity's deviation; return the names that fail"""
    failures = []
    for name in identity_names():
        try:
            deviation = verify_identity(name)
            ok = deviation < tolerance
            print(f"identity {name}: deviation {deviation:.3e} {'ok' if ok else 'FAIL'}")
        except Exception as e:
            ok = False
            print(f"identity {name}: error {e} FAIL")
        if not ok:
            failures.append(name)
    return failures


def verify_table(n_states: int, show_progress: Optional[bool] = None) -> List[str]:
    """Print every direct-model row's average fidelity; return the gates that fail"""
    table = verify_supp_table(n_states, show_progress=show_progress)
    for row in table.itertuples(index=False):
        detail = f"error {row.error}" if row.error else f"fidelity {row.fidelity:.6f}"
        print(f"table {row.gate}: {detail} {'ok' if row.passed else 'FAIL'}")
    return [str(gate) for gate, ok in zip(table["gate"], table["passed"]) if not ok]


def cmd_verify(args: argparse.Namespace) -> int:
    """Exit 0 when every requested check passes, 1 otherwise"""
    run_all = not (args.table or args.identities)
    failures = []
    if args.identities or run_all:
        failures += verify_identities()
    if args.table or run_all:
        if args.states < 1:
            return _usage_error("--states must be positive")
        failures += verify_table(args.states, args.progress)

    if failures:
        print(f"FAILED: {', '.join(failures)}")
        return EXIT_CHECK_FAILED
    print("All checks passed")
    return EXIT_OK


def parse_deltas(text: str) -> List[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError as e:
        raise ConfigError(f"--deltas must be a comma-separated list of numbers: {e}") from e


def cmd_experiment(args: argparse.Namespace) -> int:
    """Run a named experiment; exit 3 when it misses its acceptance threshold"""
    if args.name not in EXPERIMENT_PRESETS:
        return _usage_error(f"Unknown experiment '{args.name}', expected one of "
                            f"{sorted(EXPERIMENT_PRESETS)}")
    try:
        cfg = ExperimentConfig.resolve(args.name, args.config, args.overrides)
        if args.deltas is not None:
            cfg.deltas = parse_deltas(args.deltas)
        if args.seed is not None:
            cfg.seed = args.seed
        cfg.validate()
    except ConfigError as e:
        return _usage_error(str(e))

    cfg.seed = resolve_seed(cfg.seed)
    out_dir = output_dir(args.out)
    manifest = RunManifest("experiment", cfg.seed, str(out_dir),
                           str(args.config) if args.config else None).to_dict()
    orchestrator = ExperimentOrchestrator(out_dir, manifest, args.progress)
    try:
        outcome = orchestrator.run(cfg)
    except ConfigError as e:
        return _usage_error(str(e))

    for path in outcome.files:
        print(f"wrote {path}")
    if outcome.status == "failed":
        print(f"{cfg.experiment}: failed: {outcome.error}")
        return EXIT_CHECK_FAILED
    print(f"{cfg.experiment}: {'passed' if outcome.passed else 'below threshold'}")
    return EXIT_OK if outcome.passed else EXIT_BELOW_THRESHOLD


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qnet",
        description="Train quantum networks to induce gates, circuits and channels on qubits",
    )
    parser.add_argument('--log-level', default=None, help='Log level (LOG_LEVEL by default)')
    parser.add_argument('--log-file', default=None, help='Optional log file')
    parser.add_argument('--no-progress', dest='progress', action='store_const', const=False,
                        default=None, help='Disable progress bars')
    sub = parser.add_subparsers(dest='command', required=True)

    train = sub.add_parser('train', help='Train a target from a JSON config')
    train.add_argument('config', help='Config document')
    train.add_argument('--seed', type=int, default=None, help='Run seed (drawn when omitted)')
    train.add_argument('--out', default=None, help='Output directory (QN_OUT_DIR by default)')
    train.set_defaults(handler=cmd_train)

    evaluate = sub.add_parser('eval', help='Evaluate a trained model on fresh random states')
    evaluate.add_argument('model', help='Trained-model JSON')
    evaluate.add_argument('--states', type=int, default=TEST_SET_SIZE, help='Number of test states')
    evaluate.add_argument('--seed', type=int, default=None, help='Seed of the test states')
    evaluate.add_argument('--out', default=None, help='Output directory')
    evaluate.set_defaults(handler=cmd_eval)

    verify = sub.add_parser('verify', help='Check the cNOT identities and the direct-model table')
    verify.add_argument('--table', action='store_true', help='Verify the direct-model table')
    verify.add_argument('--identities', action='store_true', help='Verify the cNOT identities')
    verify.add_argument('--states', type=int, default=SUPP_TABLE_STATES,
                        help='Test states per table row')
    verify.set_defaults(handler=cmd_verify)

    experiment = sub.add_parser('experiment', help='Run a named experiment')
    experiment.add_argument('name', help=f"One of {', '.join(sorted(EXPERIMENT_PRESETS))}")
    experiment.add_argument('overrides', nargs='*', help='key=value config overrides')
    experiment.add_argument('--config', default=None, help='Config document layered on the preset')
    experiment.add_argument('--deltas', default=None, help='Comma-separated perturbation strengths')
    experiment.add_argument('--seed', type=int, default=None, help='Run seed (drawn when omitted)')
    experiment.add_argument('--out', default=None, help='Output directory')
    experiment.set_defaults(handler=cmd_experiment)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    setup_logging(args.log_level, args.log_file)
    try:
        return args.handler(args)
    except KeyboardInterrupt:
        logger.info("Interrupted")
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
