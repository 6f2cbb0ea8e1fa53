import os

import numpy as np
import pytest
from pydantic import ValidationError

from core import experiments
from core.errors import BracketExpansionError, DegenerateSampleError
from core.experiments import run_cell, run_experiment, summarize_trends, theory_rate
from core.solver import alternating_solve, objective
from models.experiment import CellRecord, ExperimentSpec
from models.mixture import GaussianMixture
from models.policy import SolverConfig


def _cell(M, delta, freq, stderr=0.0):
    return CellRecord(
        M=M, delta=delta, delta_index=0, batches=10, completed=10,
        violation_freq=freq, violation_stderr=stderr, nmse_mean=0.3, nmse_std=0.01,
        theory_rate=theory_rate(delta, M, 1), max_design_residual=0.0,
    )


def test_theory_rate():
    assert theory_rate(0.1, 10_000, 1) == pytest.approx(1 / (0.1 * 10_000 ** 0.4))
    assert theory_rate(0.01, 100, 2) == pytest.approx(1 / (0.01 * 100 ** (1 / 3)))


def test_large_backoff_never_violates(reference_mixture):
    cell = run_cell(reference_mixture, 0.5, 0.4, M=2_000, B=3, seed=1, theta_tol=1e-7)
    assert cell.completed == 3
    assert cell.violation_freq == 0.0
    assert cell.max_design_residual <= 1e-9
    assert len(cell.true_transmit_probs) == 3
    assert all(p <= 0.5 for p in cell.true_transmit_probs)


def test_single_batch_cell_is_deterministic(reference_mixture):
    first = run_cell(reference_mixture, 0.5, 0.05, M=500, B=1, seed=8, theta_tol=1e-7)
    again = run_cell(reference_mixture, 0.5, 0.05, M=500, B=1, seed=8, theta_tol=1e-7)
    assert first.json() == again.json()
    assert first.nmse_std == 0.0


def test_degenerate_batches_are_counted(monkeypatch, reference_mixture):
    def degenerate(batch):
        raise DegenerateSampleError(0)

    monkeypatch.setattr(experiments, 'fit', degenerate)
    cell = run_cell(reference_mixture, 0.5, 0.1, M=50, B=4, seed=2)
    assert cell.failed == 4
    assert cell.completed == 0
    assert any("degenerate sample axis 0" in note for note in cell.annotations)
    assert any("no batch completed" in note for note in cell.annotations)


def test_bracket_failures_are_counted(monkeypatch, reference_mixture):
    def unreachable(model, config, theta_init=None):
        raise BracketExpansionError("no threshold reaches ball mass 0.5 after 200 doublings")

    monkeypatch.setattr(experiments, 'alternating_solve', unreachable)
    cell = run_cell(reference_mixture, 0.5, 0.1, M=50, B=3, seed=2)
    assert cell.failed == 3
    assert cell.completed == 0
    assert any("no threshold reaches ball mass" in note for note in cell.annotations)


def test_data_driven_design_cannot_beat_true_optimum():
    truth = GaussianMixture.standard_normal(1)
    optimum, _ = alternating_solve(truth, SolverConfig(kappa_bar=0.5))
    best = objective(truth, optimum, 0.5)
    cell = run_cell(truth, 0.5, 0.01, M=1_000, B=4, seed=5, theta_tol=1e-7)
    assert all(value >= best - 1e-3 for value in cell.true_nmse)


def test_summarize_trends():
    cells = [
        _cell(100, 0.01, 0.6, 0.05),
        _cell(1_000, 0.01, 0.3, 0.05),
        _cell(100, 0.1, 0.2, 0.04),
        _cell(1_000, 0.1, 0.4, 0.05),
    ]
    trends = summarize_trends(cells)
    assert trends.nonincreasing_in_M == {"0.01": True, "0.1": False}
    assert trends.nonincreasing_in_delta == {"100": True, "1000": False}


def test_run_experiment_grid(reference_mixture):
    spec = ExperimentSpec(
        true_model=reference_mixture, kappa_bar=0.5, delta_list=[0.05, 0.2], M_list=[100, 400],
        batches_per_cell=2, seed=3, theta_tol=1e-7,
    )
    report = run_experiment(spec)
    assert [(c.M, c.delta) for c in report.cells] == [(100, 0.05), (100, 0.2), (400, 0.05), (400, 0.2)]
    assert report.cell(400, 0.2).delta_index == 1
    assert set(report.trends.nonincreasing_in_M) == {"0.05", "0.2"}
    assert report.dim == 1

    # batches depend only on (seed, M, delta index, batch index)
    alone = run_cell(reference_mixture, 0.5, 0.2, M=400, B=2, seed=3, delta_index=1, theta_tol=1e-7)
    assert alone.true_transmit_probs == report.cell(400, 0.2).true_transmit_probs


def test_experiment_spec_validation(reference_mixture):
    with pytest.raises(ValidationError):
        ExperimentSpec(true_model=reference_mixture, kappa_bar=0.5, delta_list=[], M_list=[100], seed=0)
    with pytest.raises(ValidationError):
        ExperimentSpec(true_model=reference_mixture, kappa_bar=0.5, delta_list=[0.6], M_list=[100], seed=0)
    with pytest.raises(ValidationError):
        ExperimentSpec(true_model=reference_mixture, kappa_bar=0.5, delta_list=[0.1], M_list=[1], seed=0)


@pytest.mark.slow
def test_violation_frequency_trends(reference_mixture):
    workers = os.cpu_count() or 1
    deltas = (1e-3, 1e-2, 1e-1)
    cells = {}

    def cell(M, delta):
        if (M, delta) not in cells:
            cells[M, delta] = run_cell(reference_mixture, 0.5, delta, M=M, B=50, seed=2024,
                                       delta_index=deltas.index(delta), theta_tol=1e-7, workers=workers)
        return cells[M, delta]

    along_M = [cell(M, 1e-2) for M in (1_000, 10_000, 100_000)]
    along_delta = [cell(10_000, delta) for delta in deltas]

    assert summarize_trends(along_M).nonincreasing_in_M["0.01"]
    assert summarize_trends(along_delta).nonincreasing_in_delta["10000"]
    assert cell(100_000, 1e-1).violation_freq == 0.0
    assert len(cells) == 6
    assert np.all([c.max_design_residual <= 1e-9 for c in cells.values()])
