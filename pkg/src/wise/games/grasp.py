"""Runner state machine for the astronaut grasp-and-lift game.

The astronaut runs along a one-dimensional track of space-rock platforms
separated by gaps, with a continuous ground layer underneath. A rising
edge on the lift force launches a jump whose apex height is proportional
to the force; the jump's horizontal reach follows from ballistic airtime
at the current running speed. Missing a platform drops the player to the
ground, where warp holes (reached by a jump landing inside one) transport
back to the rocks. Levels change the pressure: level 2 adds lethal ground
holes, raises speed by 50%, and widens gaps; level 3 additionally explodes
the astronaut whenever grasp force exceeds the limit and raises speed by
100%. Winning requires reaching the rocket on the rocks; win and fail are
absorbing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

SPEED_MULTIPLIER = {1: 1.0, 2: 1.5, 3: 2.0}
GAP_SCALE = {1: 1.0, 2: 1.25, 3: 1.5}

LAYER_ROCKS = "ROCKS"
LAYER_GROUND = "GROUND"

OUTCOME_RUNNING = "RUNNING"
OUTCOME_WIN = "WIN"
OUTCOME_FAIL = "FAIL"


@dataclass(frozen=True)
class GraspConfig:
    """Track geometry and jump scaling; defaults give a winnable course."""

    base_speed: float = 5.0          # track units per second at level 1
    jump_height_per_n: float = 0.5   # apex height per newton of lift
    gravity: float = 10.0
    lift_edge_n: float = 0.5         # rising-edge detection threshold
    platform_len: float = 12.0
    base_gap: float = 4.0
    n_platforms: int = 8
    warp_period: float = 18.0        # ground warp hole spacing
    warp_width: float = 2.0
    hole_period: float = 18.0        # lethal ground holes (levels 2 and 3)
    hole_width: float = 1.5
    hole_offset: float = 15.0


@dataclass(frozen=True)
class GraspState:
    grasp_limit_n: float
    level: int = 1
    x: float = 0.0
    layer: str = LAYER_ROCKS
    outcome: str = OUTCOME_RUNNING
    stars: int = 0
    airborne: bool = False
    land_x: float = 0.0
    prev_lift_n: float = 0.0
    last_apex: float = 0.0
    timer_ms: float = 0.0
    peak_grasp_n: float = 0.0

    def __post_init__(self) -> None:
        if not self.grasp_limit_n > 0:
            raise ValueError("grasp limit must be positive")
        if self.level not in SPEED_MULTIPLIER:
            raise ValueError("level must be 1, 2, or 3")

    @property
    def run_speed_multiplier(self) -> float:
        return SPEED_MULTIPLIER[self.level]

    @property
    def holes_enabled(self) -> bool:
        return self.level >= 2

    @property
    def explode_on_overgrasp(self) -> bool:
        return self.level == 3


class GraspTrack:
    """Level-dependent track geometry queries."""

    def __init__(self, level: int, config: GraspConfig):
        self.config = config
        self.gap = config.base_gap * GAP_SCALE[level]
        self.period = config.platform_len + self.gap
        self.rocket_x = (config.n_platforms - 1) * self.period + config.platform_len / 2

    def on_platform(self, x: float) -> bool:
        if x >= self.rocket_x:
            return True
        return (x % self.period) < self.config.platform_len

    def star_index(self, x: float) -> Optional[int]:
        """Which star sits at x on the rocks, if any (one per platform middle)."""
        i = int(x // self.period)
        star_x = i * self.period + self.config.platform_len / 2
        if 1 <= i < self.config.n_platforms and abs(x - star_x) < 1e-9:
            return i
        return None

    def in_warp(self, x: float) -> bool:
        return (x % self.config.warp_period) < self.config.warp_width

    def in_hole(self, x: float) -> bool:
        return ((x - self.config.hole_offset) % self.config.hole_period) < self.config.hole_width


def grasp_step(state: GraspState, grasp_n: float, lift_n: float, dt_ms: float,
               config: GraspConfig = GraspConfig()) -> Tuple[GraspState, List[str]]:
    """Advance one tick; returns the new state and the events fired."""
    if not (math.isfinite(grasp_n) and math.isfinite(lift_n)) or grasp_n < 0 or lift_n < 0:
        return state, []
    if state.outcome != OUTCOME_RUNNING:
        return state, []

    events: List[str] = []
    track = GraspTrack(state.level, config)
    speed = config.base_speed * state.run_speed_multiplier

    if state.explode_on_overgrasp and grasp_n > state.grasp_limit_n:
        events.append("EXPLODE")
        return replace(state, outcome=OUTCOME_FAIL, timer_ms=state.timer_ms + dt_ms,
                       peak_grasp_n=max(state.peak_grasp_n, grasp_n),
                       prev_lift_n=lift_n), events

    airborne = state.airborne
    land_x = state.land_x
    apex = state.last_apex
    rising = state.prev_lift_n < config.lift_edge_n <= lift_n
    if rising and not airborne:
        apex = config.jump_height_per_n * lift_n
        airtime = 2.0 * math.sqrt(2.0 * apex / config.gravity)
        airborne = True
        land_x = state.x + speed * airtime
        events.append("JUMP")

    x = state.x + speed * dt_ms / 1000.0
    layer = state.layer
    outcome = OUTCOME_RUNNING
    stars = state.stars

    if airborne and x >= land_x:
        airborne = False
        if layer == LAYER_ROCKS:
            if not track.on_platform(x):
                layer = LAYER_GROUND
                events.append("LAND_GROUND")
            else:
                events.append("LAND_ROCKS")
        else:
            if track.in_warp(x):
                layer = LAYER_ROCKS
                events.append("WARP")
                if not track.on_platform(x):
                    # warp drops the player at the next platform edge
                    x = (int(x // track.period) + 1) * track.period
            else:
                events.append("LAND_GROUND")

    if not airborne:
        if layer == LAYER_ROCKS and not track.on_platform(x):
            layer = LAYER_GROUND
            events.append("FALL")
        if layer == LAYER_GROUND and state.holes_enabled and track.in_hole(x):
            events.append("HOLE_FALL")
            outcome = OUTCOME_FAIL

    if outcome == OUTCOME_RUNNING and layer == LAYER_ROCKS:
        # collect any star crossed during this tick
        i = int(x // track.period)
        star_x = i * track.period + config.platform_len / 2
        if 1 <= i < config.n_platforms and state.x < star_x <= x:
            stars += 1
            events.append("STAR")
        if x >= track.rocket_x:
            outcome = OUTCOME_WIN
            events.append("WIN")

    return replace(
        state, x=x, layer=layer, outcome=outcome, stars=stars,
        airborne=airborne, land_x=land_x, last_apex=apex,
        prev_lift_n=lift_n, timer_ms=state.timer_ms + dt_ms,
        peak_grasp_n=max(state.peak_grasp_n, grasp_n),
    ), events
