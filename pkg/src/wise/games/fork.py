"""Level state machine for the instrumented-fork eating game.

Each repetition walks one fixed sequence: grasp the fork hard enough to
open the ring, lift and rotate the forearm past the level's angle while
holding the grasp, then poke the pad to drop the apple. Level 3 appends a
knife stage: grasp the knife at full calibrated force, then cut on the
pad. Grasp thresholds scale with the calibrated force of the unaffected
hand: 50% at level 1, 75% at level 2, 100% at level 3. Rotation must reach
90 degrees at level 1 and 135 degrees afterwards. Three repetitions clear
level 1, six clear level 2, and nine finish the level 3 activity.

Steps are deterministic: given (state, input, dt) the successor state and
emitted events are fixed, with at most one phase transition per tick.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import List, Tuple

GRASP_FRACTION = {1: 0.50, 2: 0.75, 3: 1.00}
ROTATION_THRESHOLD_DEG = {1: 90.0, 2: 135.0, 3: 135.0}
ADVANCE_AT = {1: 3, 2: 6, 3: 9}

PHASES = ("AWAIT_GRASP", "AWAIT_LIFT_ROTATE", "AWAIT_POKE",
          "AWAIT_KNIFE_GRASP", "AWAIT_CUT", "DONE_ONE")


@dataclass(frozen=True)
class ForkConfig:
    """Thresholds not fixed by the level rules."""

    poke_fraction: float = 0.5   # of calibrated force
    cut_fraction: float = 0.5
    score_per_completion: int = 100


@dataclass(frozen=True)
class ForkInput:
    grasp_n: float = 0.0
    rotation_deg: float = 0.0
    poke_n: float = 0.0
    knife_grasp_n: float = 0.0
    cut_n: float = 0.0
    pointing: bool = True  # fork oriented at the pad

    def valid(self) -> bool:
        values = (self.grasp_n, self.rotation_deg, self.poke_n,
                  self.knife_grasp_n, self.cut_n)
        return all(math.isfinite(v) for v in values) and \
            all(v >= 0 for v in (self.grasp_n, self.poke_n, self.knife_grasp_n, self.cut_n))


@dataclass(frozen=True)
class ForkState:
    calib_force_n: float
    level: int = 1
    phase: str = "AWAIT_GRASP"
    completions_in_level: int = 0
    total_completions: int = 0
    timer_ms: float = 0.0
    score: int = 0
    done: bool = False
    peak_grasp_n: float = 0.0
    peak_poke_n: float = 0.0
    peak_cut_n: float = 0.0

    def __post_init__(self) -> None:
        if not self.calib_force_n > 0:
            raise ValueError("calibrated force must be positive")

    def grasp_threshold(self) -> float:
        return GRASP_FRACTION[self.level] * self.calib_force_n

    def rotation_threshold(self) -> float:
        return ROTATION_THRESHOLD_DEG[self.level]


def fork_step(state: ForkState, inp: ForkInput, dt_ms: float,
              config: ForkConfig = ForkConfig()) -> Tuple[ForkState, List[str]]:
    """Advance one tick; returns the new state and the events fired."""
    if not inp.valid():
        return state, []  # rejected tick: no time, no transitions
    if state.done:
        return state, []

    events: List[str] = []
    changes = {
        "timer_ms": state.timer_ms + dt_ms,
        "peak_grasp_n": max(state.peak_grasp_n, inp.grasp_n, inp.knife_grasp_n),
        "peak_poke_n": max(state.peak_poke_n, inp.poke_n),
        "peak_cut_n": max(state.peak_cut_n, inp.cut_n),
    }
    phase = state.phase
    grasp_ok = inp.grasp_n >= state.grasp_threshold()

    if phase == "DONE_ONE":
        changes["phase"] = "AWAIT_GRASP"
    elif phase == "AWAIT_GRASP":
        if grasp_ok:
            events.append("RING_OPEN")
            changes["phase"] = "AWAIT_LIFT_ROTATE"
    elif phase == "AWAIT_LIFT_ROTATE":
        if grasp_ok and inp.pointing and inp.rotation_deg >= state.rotation_threshold():
            events.append("RING_ROTATE")
            changes["phase"] = "AWAIT_POKE"
    elif phase == "AWAIT_POKE":
        if inp.poke_n >= config.poke_fraction * state.calib_force_n:
            events.append("APPLE_DROP")
            if state.level < 3:
                _complete(state, changes, events, config)
            else:
                changes["phase"] = "AWAIT_KNIFE_GRASP"
    elif phase == "AWAIT_KNIFE_GRASP":
        if inp.knife_grasp_n >= state.calib_force_n:  # level 3 bar shows 100%
            events.append("KNIFE_GRASP")
            changes["phase"] = "AWAIT_CUT"
    elif phase == "AWAIT_CUT":
        if inp.cut_n >= config.cut_fraction * state.calib_force_n:
            events.append("CUT_DONE")
            _complete(state, changes, events, config)

    return replace(state, **changes), events


def _complete(state: ForkState, changes: dict, events: List[str], config: ForkConfig) -> None:
    count = state.completions_in_level + 1
    events.append("COMPLETE")
    changes["total_completions"] = state.total_completions + 1
    changes["score"] = state.score + config.score_per_completion * state.level
    changes["phase"] = "DONE_ONE"
    if count >= ADVANCE_AT[state.level]:
        if state.level < 3:
            events.append("LEVEL_UP")
            changes["level"] = state.level + 1
            changes["completions_in_level"] = 0
        else:
            events.append("ACTIVITY_DONE")
            changes["done"] = True
            changes["completions_in_level"] = count
    else:
        changes["completions_in_level"] = count
