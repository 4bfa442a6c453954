// Pure state: the last event per topic plus the local view settings.
// The rendered UI is a function of (TopicStore, ViewState, clock) only,
// so replaying an event log reproduces identical snapshots.

import type {
  AnglesEvent, BridgeEvent, CalibEvent, GameEvent, MountEvent,
  PlaybackEvent, PoseEvent,
} from "./protocol.js";

export interface TopicStore {
  calib: CalibEvent | null;
  mount: MountEvent | null;
  patientPose: PoseEvent | null;
  instructorPose: PoseEvent | null;
  angles: AnglesEvent | null;
  playback: PlaybackEvent | null;
  game: GameEvent | null;
  /** wall-clock receive time of the last patient pose, for staleness */
  patientPoseAtMs: number | null;
}

export function emptyStore(): TopicStore {
  return {
    calib: null, mount: null, patientPose: null, instructorPose: null,
    angles: null, playback: null, game: null, patientPoseAtMs: null,
  };
}

export function applyEvent(store: TopicStore, event: BridgeEvent, nowMs: number): TopicStore {
  switch (event.topic) {
    case "CALIB": return { ...store, calib: event };
    case "MOUNT": return { ...store, mount: event };
    case "POSE":
      return event.role === "PATIENT"
        ? { ...store, patientPose: event, patientPoseAtMs: nowMs }
        : { ...store, instructorPose: event };
    case "ANGLES": return { ...store, angles: event };
    case "PLAYBACK": return { ...store, playback: event };
    case "GAME": return { ...store, game: event };
  }
}

export const SCREENS = ["CALIB", "MOUNT", "PATIENT", "PLAYBACK", "AUTHOR"] as const;
export type Screen = (typeof SCREENS)[number];

export const CAMERAS = ["FRONT", "BACK", "LEFT", "RIGHT"] as const;
export type Camera = (typeof CAMERAS)[number];

export interface ViewState {
  screen: Screen;
  camera: Camera;
  anglePanelsVisible: boolean;
  selectedExercise: string | null;
}

export function initialView(): ViewState {
  return { screen: "CALIB", camera: "FRONT", anglePanelsVisible: true, selectedExercise: null };
}

export type ViewAction =
  | { kind: "SET_SCREEN"; screen: Screen }
  | { kind: "SET_CAMERA"; camera: Camera }
  | { kind: "TOGGLE_PANELS" }
  | { kind: "SELECT_EXERCISE"; name: string };

export function applyViewAction(view: ViewState, action: ViewAction): ViewState {
  switch (action.kind) {
    case "SET_SCREEN": return { ...view, screen: action.screen };
    case "SET_CAMERA": return { ...view, camera: action.camera };
    case "TOGGLE_PANELS": return { ...view, anglePanelsVisible: !view.anglePanelsVisible };
    case "SELECT_EXERCISE": return { ...view, selectedExercise: action.name };
  }
}
