import argparse
import json
import logging

from core.simulator import simulate
from models.simulation import ChannelSpec
from schemas.run_config import SimulateRun
from services import storage

logger = logging.getLogger(__name__)

def run(args: argparse.Namespace) -> int:
    """Finite-n Monte Carlo at one or more sensor counts"""
    run_config = SimulateRun(
        model_path=args.model,
        policy_path=args.policy,
        n_list=args.n,
        kappa_bar=args.kappa,
        trials=args.trials,
        seed=args.seed,
        out_dir=args.out,
        format=args.format,
    )
    model = storage.load_mixture(run_config.model_path)
    policy_file = storage.load_policy(run_config.policy_path)
    policy = policy_file.to_policy()
    kappa_bar = policy_file.kappa_bar if run_config.kappa_bar is None else run_config.kappa_bar

    reports = [
        simulate(model, policy, ChannelSpec.from_kappa(n, kappa_bar), run_config.trials, run_config.seed, args.workers)
        for n in run_config.n_list
    ]
    fmt = run_config.format.value
    path = storage.save_simulation(reports, run_config.out_dir / f'simulation.{fmt}', fmt)
    logger.info(f"Wrote {path}")
    print(json.dumps([
        {'n': r.n, 'nmse_mean': r.nmse_mean, 'collision_freq': r.collision_freq} for r in reports
    ]))
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser('simulate', help="Monte Carlo of n sensors on a collision channel")
    parser.add_argument('--model', required=True, help="Mixture model JSON")
    parser.add_argument('--policy', required=True, help="Policy JSON")
    parser.add_argument('--n', type=int, action='append', required=True, help="Number of sensors (repeatable)")
    parser.add_argument('--kappa', type=float, default=None, help="Defaults to the policy's kappa_bar")
    parser.add_argument('--trials', type=int, required=True)
    parser.add_argument('--seed', type=int, required=True)
    parser.add_argument('--out', required=True, help="Output directory")
    parser.add_argument('--format', choices=['csv', 'json'], default='csv')
    parser.set_defaults(handler=run)
