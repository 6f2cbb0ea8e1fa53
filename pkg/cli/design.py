import argparse
import json
import logging

from cli.solve import add_solver_flags, solve_and_write, solver_kwargs
from core.kde import bandwidth, fit
from schemas.run_config import DesignRun
from services import storage

logger = logging.getLogger(__name__)

def run(args: argparse.Namespace) -> int:
    """Fit from samples, then design at kappa_bar - delta on the estimate"""
    run_config = DesignRun(samples_path=args.samples, **solver_kwargs(args))
    batch = storage.load_samples(run_config.samples_path)
    report = bandwidth(batch)
    model = fit(batch)
    storage.save_mixture(model, run_config.out_dir / 'model.json')
    storage.save_bandwidth(report, run_config.out_dir / 'bandwidth.json')

    summary = solve_and_write(model, run_config.solver_config(), run_config.theta_init, run_config.out_dir)
    summary['sample_size'] = batch.size
    print(json.dumps(summary))
    if not summary['converged']:
        logger.warning("Solver did not converge on the fitted model")
        return 2
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser('design', help="Data-driven design: fit then solve")
    parser.add_argument('--samples', required=True, help="CSV, one row per sample, no header")
    add_solver_flags(parser, delta_required=True)
    parser.set_defaults(handler=run)
