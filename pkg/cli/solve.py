import argparse
import json
import logging
from pathlib import Path
from typing import Any, Dict

from cli.routes import parse_vector
from core.solver import multi_start_solve, objective, transmit_prob
from models.mixture import GaussianMixture
from models.policy import Policy, SolveTrace, SolverConfig, UpdateRule
from schemas.files import PolicyFile
from schemas.run_config import SolveRun
from services import storage

logger = logging.getLogger(__name__)

def add_solver_flags(parser: argparse.ArgumentParser, delta_required: bool = False) -> None:
    """Flags shared by solve and design"""
    parser.add_argument('--kappa', type=float, required=True, help="Asymptotic capacity kappa_bar")
    parser.add_argument('--delta', type=float, required=delta_required, default=0.0, help="Capacity back-off")
    parser.add_argument('--theta-init', type=parse_vector, action='append', default=[],
                        help="Initial theta (repeat for several starts)")
    parser.add_argument('--rule', choices=[r.value for r in UpdateRule], default=UpdateRule.CCP.value)
    parser.add_argument('--theta-tol', type=float, default=None)
    parser.add_argument('--lambda-tol', type=float, default=None)
    parser.add_argument('--max-inner', type=int, default=None)
    parser.add_argument('--max-outer', type=int, default=None)
    parser.add_argument('--out', required=True, help="Output directory")


def solver_kwargs(args: argparse.Namespace) -> Dict[str, Any]:
    return {
        'kappa_bar': args.kappa,
        'delta': args.delta,
        'theta_init': args.theta_init,
        'rule': args.rule,
        'theta_tol': args.theta_tol,
        'lambda_tol': args.lambda_tol,
        'max_inner': args.max_inner,
        'max_outer': args.max_outer,
        'out_dir': args.out,
    }


def solve_and_write(model: GaussianMixture, config: SolverConfig, theta_init, out_dir: Path) -> Dict[str, Any]:
    """Solve, write policy.json and trace.csv, return the printed summary"""
    policy, trace = multi_start_solve(model, config, theta_init)
    storage.save_policy(PolicyFile.from_policy(policy, config), out_dir / 'policy.json')
    storage.save_trace(trace, out_dir / 'trace.csv')
    return summarize(model, policy, trace, config)


def summarize(model: GaussianMixture, policy: Policy, trace: SolveTrace, config: SolverConfig) -> Dict[str, Any]:
    return {
        'theta': list(policy.theta),
        'lambda': policy.lambda_,
        'objective': objective(model, policy, config.kappa_bar),
        'transmit_prob': transmit_prob(model, policy),
        'kappa_bar': config.kappa_bar,
        'delta': config.delta,
        'update_rule': config.update_rule.value,
        'converged': trace.converged and trace.inner_converged,
        'outer_iterations': trace.outer_iterations,
    }


def run(args: argparse.Namespace) -> int:
    """Known-model policy design"""
    run_config = SolveRun(model_path=args.model, **solver_kwargs(args))
    model = storage.load_mixture(run_config.model_path)
    summary = solve_and_write(model, run_config.solver_config(), run_config.theta_init, run_config.out_dir)
    print(json.dumps(summary))
    if not summary['converged']:
        logger.warning("Solver did not converge; outputs hold the last iterate")
        return 2
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser('solve', help="Design a policy for a known mixture model")
    parser.add_argument('--model', required=True, help="Mixture model JSON")
    add_solver_flags(parser)
    parser.set_defaults(handler=run)
