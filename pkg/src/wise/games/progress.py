"""Append-only progress log shared by both games.

One CSV file at desk scale stands in for the clinician-facing database:
each finished or checkpointed activity appends a row, so record counts
only grow and a therapist can diff sessions over time.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional, Union

from .fork import ForkState
from .grasp import GraspState

PROGRESS_HEADER = ("timestamp_ms,game,level,completions,elapsed_ms,"
                   "peak_grasp_n,peak_poke_n,peak_cut_n,score,outcome")


@dataclass(frozen=True)
class ProgressRecord:
    timestamp_ms: int
    game: str
    level: int
    completions: int
    elapsed_ms: float
    peak_grasp_n: float
    peak_poke_n: float
    peak_cut_n: float
    score: int
    outcome: str

    def render(self) -> str:
        return (f"{self.timestamp_ms},{self.game},{self.level},{self.completions},"
                f"{self.elapsed_ms:.0f},{self.peak_grasp_n:.3f},{self.peak_poke_n:.3f},"
                f"{self.peak_cut_n:.3f},{self.score},{self.outcome}")


def record_from_state(state: Union[ForkState, GraspState], timestamp_ms: int) -> ProgressRecord:
    if isinstance(state, ForkState):
        return ProgressRecord(
            timestamp_ms, "fork", state.level, state.total_completions,
            state.timer_ms, state.peak_grasp_n, state.peak_poke_n,
            state.peak_cut_n, state.score,
            "DONE" if state.done else "RUNNING")
    return ProgressRecord(
        timestamp_ms, "grasp", state.level, state.stars, state.timer_ms,
        state.peak_grasp_n, 0.0, 0.0, state.stars, state.outcome)


def append_record(path: str, record: ProgressRecord) -> None:
    """Append one row, creating the file with its header when missing."""
    fresh = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", encoding="ascii") as fp:
        if fresh:
            fp.write(PROGRESS_HEADER + "\n")
        fp.write(record.render() + "\n")


def progress_report(state: Union[ForkState, GraspState], path: str,
                    timestamp_ms: Optional[int] = None) -> ProgressRecord:
    """Persist the state's progress; the game state itself is untouched."""
    if timestamp_ms is None:
        import time
        timestamp_ms = int(time.time() * 1000)
    record = record_from_state(state, timestamp_ms)
    append_record(path, record)
    return record
