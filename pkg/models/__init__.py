"""
Models package for mean-field remote estimation.
Contains all Pydantic models used throughout the application.
"""

from .mixture import GaussianComponent, GaussianMixture, Ball
from .sample import SampleBatch, BandwidthReport
from .policy import Policy, SolverConfig, UpdateRule, InnerTrace, OuterRecord, SolveTrace
from .simulation import ChannelSpec, SimulationReport, CollisionPoint, capacity_for
from .experiment import ExperimentSpec, CellRecord, TrendSummary, ExperimentReport

__all__ = [
    'GaussianComponent', 'GaussianMixture', 'Ball',
    'SampleBatch', 'BandwidthReport',
    'Policy', 'SolverConfig', 'UpdateRule', 'InnerTrace', 'OuterRecord', 'SolveTrace',
    'ChannelSpec', 'SimulationReport', 'CollisionPoint', 'capacity_for',
    'ExperimentSpec', 'CellRecord', 'TrendSummary', 'ExperimentReport',
]
