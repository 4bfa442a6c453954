"""Headless level state machines for the rehabilitation games."""

from .fork import ForkConfig, ForkInput, ForkState, fork_step
from .grasp import GraspConfig, GraspState, grasp_step
from .progress import ProgressRecord, append_record, progress_report

__all__ = [
    "ForkConfig",
    "ForkInput",
    "ForkState",
    "fork_step",
    "GraspConfig",
    "GraspState",
    "grasp_step",
    "ProgressRecord",
    "append_record",
    "progress_report",
]
