import argparse
import json
import logging

from core.experiments import run_experiment
from schemas.run_config import ExperimentRun
from services import storage

logger = logging.getLogger(__name__)

def run(args: argparse.Namespace) -> int:
    """Violation-probability sweep over (M, delta)"""
    run_config = ExperimentRun(spec_path=args.spec, out_dir=args.out)
    spec = storage.load_experiment_spec(run_config.spec_path)
    report = run_experiment(spec, args.workers)
    for path in storage.save_experiment(report, run_config.out_dir):
        logger.info(f"Wrote {path}")
    print(json.dumps(json.loads(report.trends.json())))
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser('experiment', help="Sample-complexity sweep from a spec file")
    parser.add_argument('--spec', required=True, help="Experiment spec JSON")
    parser.add_argument('--out', required=True, help="Output directory")
    parser.set_defaults(handler=run)
