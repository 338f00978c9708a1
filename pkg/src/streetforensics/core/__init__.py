from .pipeline import DetectionPipeline, report_path
from .experiments import EXPERIMENTS, ExperimentOutcome, ExperimentRunner, Scale, reproduce_experiment
from .factory import PipelineFactory

__all__ = [
    "DetectionPipeline",
    "report_path",
    "EXPERIMENTS",
    "ExperimentOutcome",
    "ExperimentRunner",
    "Scale",
    "reproduce_experiment",
    "PipelineFactory",
]
