"""Data-driven design study: fit from random batches, design at kappa_bar - delta, score under the truth."""
import logging
from typing import Dict, List, NamedTuple, Optional, Sequence

import numpy as np

from core.config import get_settings
from core.density import sample
from core.errors import BracketExpansionError, DegenerateSampleError
from core.kde import fit
from core.solver import alternating_solve, objective, transmit_prob
from models.base import round_trip_float
from models.experiment import CellRecord, ExperimentReport, ExperimentSpec, TrendSummary
from models.mixture import GaussianMixture
from models.sample import SampleBatch
from models.policy import SolverConfig
from utils.parallel import ordered_map

logger = logging.getLogger(__name__)


class BatchTask(NamedTuple):
    true_model: GaussianMixture
    kappa_bar: float
    delta: float
    delta_index: int
    M: int
    batch_index: int
    seed: int
    theta_tol: float
    lambda_tol: float


class BatchOutcome(NamedTuple):
    failed: bool
    reason: str = ""
    true_transmit_prob: float = float('nan')
    true_nmse: float = float('nan')
    design_residual: float = 0.0
    converged: bool = True


def batch_generator(seed: int, M: int, delta_index: int, batch_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, M, delta_index, batch_index]))


def run_batch(task: BatchTask) -> BatchOutcome:
    """One draw-fit-design-evaluate pass"""
    rng = batch_generator(task.seed, task.M, task.delta_index, task.batch_index)
    draws = sample(task.true_model, task.M, rng)
    try:
        estimate = fit(SampleBatch(samples=draws, source=f"batch {task.batch_index} of cell M={task.M}"))
    except DegenerateSampleError as e:
        logger.warning(f"Batch {task.batch_index} (M={task.M}, delta={task.delta}) skipped: {e.detail}")
        return BatchOutcome(failed=True, reason=e.detail)

    config = SolverConfig(
        kappa_bar=task.kappa_bar,
        delta=task.delta,
        theta_tol=task.theta_tol,
        lambda_tol=task.lambda_tol,
        record_inner=False,
    )
    try:
        policy, trace = alternating_solve(estimate, config)
    except BracketExpansionError as e:
        logger.warning(f"Batch {task.batch_index} (M={task.M}, delta={task.delta}) skipped: {e.detail}")
        return BatchOutcome(failed=True, reason=e.detail)
    return BatchOutcome(
        failed=False,
        true_transmit_prob=transmit_prob(task.true_model, policy),
        true_nmse=objective(task.true_model, policy, task.kappa_bar),
        design_residual=abs(transmit_prob(estimate, policy) - config.design_kappa),
        converged=trace.converged,
    )


def theory_rate(delta: float, M: int, dim: int) -> float:
    """Unnormalized 1 / (delta M^(2/(d+4))) reference curve"""
    return 1.0 / (delta * M ** (2.0 / (dim + 4)))


def _cell_tasks(
    true_model: GaussianMixture,
    kappa_bar: float,
    delta: float,
    delta_index: int,
    M: int,
    batches: int,
    seed: int,
    theta_tol: float,
    lambda_tol: float,
) -> List[BatchTask]:
    return [
        BatchTask(true_model, kappa_bar, delta, delta_index, M, b, seed, theta_tol, lambda_tol)
        for b in range(batches)
    ]


def _aggregate(
    outcomes: Sequence[BatchOutcome],
    kappa_bar: float,
    delta: float,
    delta_index: int,
    M: int,
    dim: int,
) -> CellRecord:
    done = [o for o in outcomes if not o.failed]
    annotations = []
    failures = len(outcomes) - len(done)
    if failures:
        reasons = sorted({o.reason for o in outcomes if o.failed})
        annotations.append(f"{failures} of {len(outcomes)} batches failed: {'; '.join(reasons)}")

    probs = np.array([o.true_transmit_prob for o in done])
    nmse = np.array([o.true_nmse for o in done])
    nonconverged = sum(1 for o in done if not o.converged)
    if nonconverged:
        annotations.append(f"{nonconverged} designs did not converge")

    if done:
        violation = float(np.mean(probs > kappa_bar))
        violation_stderr = float(np.sqrt(violation * (1.0 - violation) / len(done)))
        nmse_mean = float(nmse.mean())
        nmse_std = float(nmse.std(ddof=1)) if len(done) > 1 else 0.0
        max_residual = max(o.design_residual for o in done)
    else:
        annotations.append("no batch completed")
        violation, violation_stderr = 0.0, 0.0
        nmse_mean, nmse_std, max_residual = float('nan'), float('nan'), float('nan')

    return CellRecord(
        M=M,
        delta=delta,
        delta_index=delta_index,
        batches=len(outcomes),
        completed=len(done),
        failed=failures,
        violation_freq=violation,
        violation_stderr=violation_stderr,
        nmse_mean=nmse_mean,
        nmse_std=nmse_std,
        theory_rate=theory_rate(delta, M, dim),
        max_design_residual=max_residual,
        nonconverged=nonconverged,
        true_transmit_probs=probs.tolist(),
        true_nmse=nmse.tolist(),
        annotations=annotations,
    )


def run_cell(
    true_model: GaussianMixture,
    kappa_bar: float,
    delta: float,
    M: int,
    B: int,
    seed: int,
    delta_index: int = 0,
    theta_tol: Optional[float] = None,
    lambda_tol: Optional[float] = None,
    workers: Optional[int] = None,
) -> CellRecord:
    """Violation frequency and true NMSE over B random batches of size M"""
    settings = get_settings()
    tasks = _cell_tasks(
        true_model, kappa_bar, delta, delta_index, M, B, seed,
        theta_tol or settings.THETA_TOL, lambda_tol or settings.LAMBDA_TOL,
    )
    outcomes = ordered_map(run_batch, tasks, workers)
    return _aggregate(outcomes, kappa_bar, delta, delta_index, M, true_model.dim)


def _nonincreasing(cells: List[CellRecord]) -> bool:
    for prev, nxt in zip(cells, cells[1:]):
        slack = max(prev.violation_stderr, nxt.violation_stderr)
        if nxt.violation_freq > prev.violation_freq + slack:
            return False
    return True


def summarize_trends(cells: Sequence[CellRecord]) -> TrendSummary:
    """Monotonicity of violation_freq in M (per delta) and in delta (per M)"""
    by_delta: Dict[float, List[CellRecord]] = {}
    by_M: Dict[int, List[CellRecord]] = {}
    for cell in cells:
        by_delta.setdefault(cell.delta, []).append(cell)
        by_M.setdefault(cell.M, []).append(cell)

    return TrendSummary(
        nonincreasing_in_M={
            round_trip_float(delta): _nonincreasing(sorted(group, key=lambda c: c.M))
            for delta, group in sorted(by_delta.items())
        },
        nonincreasing_in_delta={
            str(M): _nonincreasing(sorted(group, key=lambda c: c.delta))
            for M, group in sorted(by_M.items())
        },
    )


def run_experiment(spec: ExperimentSpec, workers: Optional[int] = None) -> ExperimentReport:
    """Every (M, delta) cell of the grid, batches dispatched together"""
    grid = [(M, delta_index, delta) for M in spec.M_list for delta_index, delta in enumerate(spec.delta_list)]
    tasks = []
    for M, delta_index, delta in grid:
        tasks.extend(
            _cell_tasks(
                spec.true_model, spec.kappa_bar, delta, delta_index, M, spec.batches_per_cell,
                spec.seed, spec.theta_tol, spec.lambda_tol,
            )
        )

    logger.info(f"Running {len(grid)} cells x {spec.batches_per_cell} batches")
    try:
        outcomes = ordered_map(run_batch, tasks, workers)
    except Exception as e:
        logger.error(f"Experiment failed: {str(e)}")
        raise

    cells = []
    per_cell = spec.batches_per_cell
    for i, (M, delta_index, delta) in enumerate(grid):
        chunk = outcomes[i * per_cell:(i + 1) * per_cell]
        cell = _aggregate(chunk, spec.kappa_bar, delta, delta_index, M, spec.true_model.dim)
        for note in cell.annotations:
            logger.warning(f"Cell M={M} delta={delta}: {note}")
        cells.append(cell)

    return ExperimentReport(
        kappa_bar=spec.kappa_bar,
        seed=spec.seed,
        batches_per_cell=per_cell,
        dim=spec.true_model.dim,
        cells=cells,
        trends=summarize_trends(cells),
    )
