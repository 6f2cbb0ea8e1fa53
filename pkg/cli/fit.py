import argparse
import json
import logging

from core.kde import bandwidth, fit
from schemas.run_config import FitRun
from services import storage

logger = logging.getLogger(__name__)

def run(args: argparse.Namespace) -> int:
    """Kernel density estimate from a sample CSV"""
    run_config = FitRun(samples_path=args.samples, out_dir=args.out)
    batch = storage.load_samples(run_config.samples_path)
    report = bandwidth(batch)
    model = fit(batch)

    storage.save_mixture(model, run_config.out_dir / 'model.json')
    storage.save_bandwidth(report, run_config.out_dir / 'bandwidth.json')
    print(json.dumps({
        'sample_size': batch.size,
        'dim': batch.dim,
        'per_axis_h': list(report.per_axis_h),
    }))
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser('fit', help="Fit a Gaussian-kernel density estimate")
    parser.add_argument('--samples', required=True, help="CSV, one row per sample, no header")
    parser.add_argument('--out', required=True, help="Output directory")
    parser.set_defaults(handler=run)
