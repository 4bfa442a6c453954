"""Operator profile: subject alias, correction offsets, calibrated forces.

Stored as JSON. Correction offsets default to identity per segment and are
applied on ingestion (see retarget.correct). Configuration overrides are a
flat key/value map consulted by the command-line workflows; command-line
flags override profile values, which override built-in defaults.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, Optional, TextIO

from .frames import SegmentId
from .quat import DomainError, UnitQuat


@dataclass
class Profile:
    alias: str = "anonymous"
    offsets: Dict[SegmentId, UnitQuat] = field(default_factory=dict)
    calib_force_n: Dict[str, float] = field(default_factory=dict)  # "left"/"right"
    config: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for hand, force in self.calib_force_n.items():
            if force < 0:
                raise DomainError(f"calibrated force for {hand} must be >= 0")

    def force_for(self, hand: str, default: float = 10.0) -> float:
        return self.calib_force_n.get(hand, default)


def save_profile(profile: Profile, fp: TextIO) -> None:
    doc = {
        "alias": profile.alias,
        "offsets": {seg.value: list(q.as_tuple()) for seg, q in profile.offsets.items()},
        "calib_force_n": profile.calib_force_n,
        "config": profile.config,
    }
    json.dump(doc, fp, indent=2)
    fp.write("\n")


def load_profile(fp: TextIO) -> Profile:
    doc = json.load(fp)
    offsets = {}
    for name, comps in doc.get("offsets", {}).items():
        if len(comps) != 4:
            raise DomainError(f"offset for {name} needs 4 components")
        offsets[SegmentId(name)] = UnitQuat(*comps)
    return Profile(
        alias=doc.get("alias", "anonymous"),
        offsets=offsets,
        calib_force_n={k: float(v) for k, v in doc.get("calib_force_n", {}).items()},
        config=doc.get("config", {}),
    )


def load_profile_path(path: Optional[str]) -> Profile:
    if not path:
        return Profile()
    with open(path, "r", encoding="utf-8") as fp:
        return load_profile(fp)
