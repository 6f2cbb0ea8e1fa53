"""Reading and writing model, sample, policy and report files."""
import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
from pydantic import ValidationError

from core.errors import InputFileError, InvalidSpecError
from models.base import round_trip_float
from models.experiment import ExperimentReport, ExperimentSpec
from models.mixture import GaussianMixture
from models.policy import SolveTrace
from models.sample import BandwidthReport, SampleBatch
from models.simulation import SimulationReport
from schemas.files import ExperimentSpecFile, MixtureFile, PolicyFile

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

SIMULATION_COLUMNS = [
    'n', 'capacity', 'trials', 'nmse_mean', 'nmse_half_width',
    'collision_freq', 'collision_stderr', 'empirical_transmit_rate',
]
EXPERIMENT_COLUMNS = [
    'M', 'delta', 'violation_freq', 'violation_stderr', 'nmse_mean', 'nmse_std',
    'theory_rate', 'completed', 'failed',
]


def _cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return round_trip_float(value)
    return str(value)


def read_json(path: PathLike) -> Dict[str, Any]:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        logger.error(f"Error reading {path}: {str(e)}")
        raise InputFileError(f"cannot read JSON file {path}: {e}")


def write_json(payload: Union[Dict[str, Any], str], path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2)
    path.write_text(text + "\n", encoding='utf-8')
    return path


def write_csv(header: Sequence[str], rows: Sequence[Sequence[Any]], path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        if header:
            writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def load_mixture(path: PathLike) -> GaussianMixture:
    payload = read_json(path)
    try:
        return MixtureFile.parse_obj(payload).to_model()
    except ValidationError as e:
        logger.error(f"Invalid model file {path}: {str(e)}")
        raise InputFileError(f"invalid model file {path}: {e}")


def save_mixture(model: GaussianMixture, path: PathLike) -> Path:
    return write_json(MixtureFile.from_model(model).json(indent=2), path)


def load_samples(path: PathLike, seed: Optional[int] = None) -> SampleBatch:
    """CSV, one row per sample, no header"""
    try:
        samples = np.loadtxt(path, delimiter=',', ndmin=2, dtype=float)
    except (OSError, ValueError) as e:
        logger.error(f"Error reading samples from {path}: {str(e)}")
        raise InputFileError(f"cannot read sample file {path}: {e}")
    try:
        return SampleBatch(samples=samples, seed=seed, source=str(path))
    except ValidationError as e:
        raise InputFileError(f"invalid sample file {path}: {e}")


def save_samples(samples: np.ndarray, path: PathLike) -> Path:
    return write_csv([], np.atleast_2d(samples).tolist(), path)


def load_policy(path: PathLike) -> PolicyFile:
    payload = read_json(path)
    try:
        return PolicyFile.parse_obj(payload)
    except ValidationError as e:
        logger.error(f"Invalid policy file {path}: {str(e)}")
        raise InputFileError(f"invalid policy file {path}: {e}")


def save_policy(policy_file: PolicyFile, path: PathLike) -> Path:
    return write_json(policy_file.json(by_alias=True, indent=2), path)


def save_bandwidth(report: BandwidthReport, path: PathLike) -> Path:
    return write_json(report.json(indent=2), path)


def save_trace(trace: SolveTrace, path: PathLike) -> Path:
    """Outer records as CSV: iteration, theta_0..theta_{d-1}, lambda, objective, residual"""
    dim = len(trace.records[0].theta) if trace.records else 0
    header = ['iteration'] + [f'theta_{j}' for j in range(dim)] + [
        'lambda', 'objective', 'constraint_residual', 'inner_iterations',
    ]
    rows = [
        [r.iteration, *r.theta, r.lambda_, r.objective, r.constraint_residual, r.inner_iterations]
        for r in trace.records
    ]
    return write_csv(header, rows, path)


def save_simulation(reports: List[SimulationReport], path: PathLike, fmt: str = 'csv') -> Path:
    if fmt == 'json':
        return write_json({'reports': [json.loads(r.json()) for r in reports]}, path)
    rows = [[getattr(r, column) for column in SIMULATION_COLUMNS] for r in reports]
    return write_csv(SIMULATION_COLUMNS, rows, path)


def load_experiment_spec(path: PathLike) -> ExperimentSpec:
    payload = read_json(path)
    try:
        return ExperimentSpecFile.parse_obj(payload).to_spec()
    except ValidationError as e:
        logger.error(f"Invalid experiment spec {path}: {str(e)}")
        raise InvalidSpecError(f"invalid experiment spec {path}: {e}")


def save_experiment(report: ExperimentReport, out_dir: PathLike) -> List[Path]:
    out_dir = Path(out_dir)
    rows = [[getattr(cell, column) for column in EXPERIMENT_COLUMNS] for cell in report.cells]
    return [
        write_csv(EXPERIMENT_COLUMNS, rows, out_dir / 'experiment.csv'),
        write_json(report.json(indent=2), out_dir / 'experiment.json'),
    ]
