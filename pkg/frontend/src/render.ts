// Pure render model: everything the DOM layer paints, derived only from
// (TopicStore, ViewState, clock). Keeping this side-effect free is what
// makes event-log replay reproducible.

import { ANGLE_CHANNELS, SEGMENTS, type Segment } from "./protocol.js";
import { poseAvatar, project, type Projected } from "./avatar.js";
import type { TopicStore, ViewState } from "./state.js";

export const POSE_STALE_MS = 500;

export type BarFill = "empty" | "partial" | "full";

export interface CalibBar {
  segment: Segment;
  sensor: "gyro" | "accel" | "mag";
  level: number;
  fraction: number;
  fill: BarFill; // grey at 0, partial grey/green at 1-2, full green at 3
}

export interface RenderModel {
  screen: ViewState["screen"];
  camera: ViewState["camera"];
  banner: string | null;
  calib: {
    bars: CalibBar[];
    ready: boolean;
    nextStep: string;
  } | null;
  mount: {
    left: { cue: string; ieRotation: string; carrying: string };
    right: { cue: string; ieRotation: string; carrying: string };
  } | null;
  patient: { segments: Projected[]; stale: boolean } | null;
  instructor: { segments: Projected[] } | null;
  anglePanels: { left: [string, string][]; right: [string, string][] } | null;
  playback: {
    positionMs: number;
    durationMs: number;
    state: string;
    rate: number;
    seekFraction: number;
  } | null;
  game: { label: string; score: number } | null;
  selectedExercise: string | null;
}

export function barFill(level: number): BarFill {
  if (level <= 0) return "empty";
  return level >= 3 ? "full" : "partial";
}

function fmt(value: number): string {
  return value.toFixed(1);
}

const PANEL_LABELS: Record<string, string> = {
  shoulder_plane: "Shoulder plane",
  shoulder_elevation: "Shoulder elevation",
  shoulder_rotation: "Shoulder int-ext",
  elbow_flexion: "Elbow flexion",
  carrying: "Carrying",
  pronation: "Pronation",
};

export function renderModel(store: TopicStore, view: ViewState, nowMs: number): RenderModel {
  const model: RenderModel = {
    screen: view.screen,
    camera: view.camera,
    banner: null,
    calib: null,
    mount: null,
    patient: null,
    instructor: null,
    anglePanels: null,
    playback: null,
    game: null,
    selectedExercise: view.selectedExercise,
  };

  if (store.calib) {
    const bars: CalibBar[] = [];
    for (const segment of SEGMENTS) {
      const levels = store.calib.levels[segment];
      for (const sensor of ["gyro", "accel", "mag"] as const) {
        const level = levels[sensor];
        bars.push({ segment, sensor, level, fraction: level / 3, fill: barFill(level) });
      }
    }
    model.calib = { bars, ready: store.calib.ready, nextStep: store.calib.nextStep };
  }

  if (store.mount) {
    const side = (s: { cue: string; ieRotation: number; carrying: number }) => ({
      cue: s.cue, ieRotation: fmt(s.ieRotation), carrying: fmt(s.carrying),
    });
    model.mount = { left: side(store.mount.left), right: side(store.mount.right) };
  }

  if (store.patientPose) {
    const stale = store.patientPoseAtMs === null ||
      nowMs - store.patientPoseAtMs > POSE_STALE_MS;
    model.patient = {
      segments: project(poseAvatar(store.patientPose.quats), view.camera),
      stale,
    };
  }
  if (store.instructorPose) {
    model.instructor = {
      segments: project(poseAvatar(store.instructorPose.quats), view.camera),
    };
  }

  if (store.angles && view.anglePanelsVisible) {
    const left: [string, string][] = [];
    const right: [string, string][] = [];
    for (const channel of ANGLE_CHANNELS) {
      const label = PANEL_LABELS[channel.slice(2)];
      const entry: [string, string] = [label, fmt(store.angles.angles[channel])];
      (channel.startsWith("l_") ? left : right).push(entry);
    }
    model.anglePanels = { left, right };
  }

  if (store.playback) {
    const { positionMs, durationMs, state, rate } = store.playback;
    model.playback = {
      positionMs, durationMs, state, rate,
      seekFraction: durationMs > 0 ? positionMs / durationMs : 0,
    };
  }

  if (store.game) {
    model.game = {
      label: `${store.game.game} L${store.game.level} ${store.game.phase} ` +
        `(${store.game.completions} done)`,
      score: store.game.score,
    };
  }

  return model;
}
