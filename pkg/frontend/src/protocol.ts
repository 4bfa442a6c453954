// Bridge wire protocol: `EVT <topic> <payload-CSV>` in, `CMD <verb> <args>` out.

export const SEGMENTS = ["B", "LA", "RA", "LF", "RF"] as const;
export type Segment = (typeof SEGMENTS)[number];

export const ANGLE_CHANNELS = [
  "l_shoulder_plane", "l_shoulder_elevation", "l_shoulder_rotation",
  "l_elbow_flexion", "l_carrying", "l_pronation",
  "r_shoulder_plane", "r_shoulder_elevation", "r_shoulder_rotation",
  "r_elbow_flexion", "r_carrying", "r_pronation",
] as const;

export type Quat = { w: number; x: number; y: number; z: number };

export interface CalibEvent {
  topic: "CALIB";
  tMs: number;
  levels: Record<Segment, { gyro: number; accel: number; mag: number }>;
  ready: boolean;
  nextStep: string;
}

export interface MountSide {
  ieRotation: number;
  carrying: number;
  cue: string;
}

export interface MountEvent {
  topic: "MOUNT";
  tMs: number;
  left: MountSide;
  right: MountSide;
}

export interface PoseEvent {
  topic: "POSE";
  tMs: number;
  role: "PATIENT" | "INSTRUCTOR";
  quats: Record<Segment, Quat>;
}

export interface AnglesEvent {
  topic: "ANGLES";
  tMs: number;
  angles: Record<string, number>;
  flags: number;
}

export interface PlaybackEvent {
  topic: "PLAYBACK";
  positionMs: number;
  durationMs: number;
  state: "PLAYING" | "PAUSED";
  rate: number;
}

export interface GameEvent {
  topic: "GAME";
  tMs: number;
  game: string;
  level: number;
  phase: string;
  completions: number;
  score: number;
  events: string[];
}

export type BridgeEvent =
  | CalibEvent | MountEvent | PoseEvent | AnglesEvent | PlaybackEvent | GameEvent;

export class ProtocolError extends Error {}

function num(field: string, name: string): number {
  const value = Number(field);
  if (!Number.isFinite(value)) throw new ProtocolError(`bad number in ${name}: ${field}`);
  return value;
}

function parseCalib(fields: string[]): CalibEvent {
  if (fields.length !== 18) throw new ProtocolError(`CALIB expects 18 fields, got ${fields.length}`);
  const levels = {} as CalibEvent["levels"];
  SEGMENTS.forEach((seg, i) => {
    levels[seg] = {
      gyro: num(fields[1 + i * 3], "gyro"),
      accel: num(fields[2 + i * 3], "accel"),
      mag: num(fields[3 + i * 3], "mag"),
    };
  });
  return {
    topic: "CALIB",
    tMs: num(fields[0], "t"),
    levels,
    ready: fields[16] === "1",
    nextStep: fields[17],
  };
}

function parseMount(fields: string[]): MountEvent {
  if (fields.length !== 7) throw new ProtocolError(`MOUNT expects 7 fields, got ${fields.length}`);
  const side = (o: number): MountSide => ({
    ieRotation: num(fields[o], "ie"),
    carrying: num(fields[o + 1], "carrying"),
    cue: fields[o + 2],
  });
  return { topic: "MOUNT", tMs: num(fields[0], "t"), left: side(1), right: side(4) };
}

function parsePose(fields: string[]): PoseEvent {
  if (fields.length !== 22) throw new ProtocolError(`POSE expects 22 fields, got ${fields.length}`);
  const role = fields[1];
  if (role !== "PATIENT" && role !== "INSTRUCTOR") throw new ProtocolError(`bad role ${role}`);
  const quats = {} as PoseEvent["quats"];
  SEGMENTS.forEach((seg, i) => {
    const o = 2 + i * 4;
    quats[seg] = {
      w: num(fields[o], "qw"), x: num(fields[o + 1], "qx"),
      y: num(fields[o + 2], "qy"), z: num(fields[o + 3], "qz"),
    };
  });
  return { topic: "POSE", tMs: num(fields[0], "t"), role, quats };
}

function parseAngles(fields: string[]): AnglesEvent {
  if (fields.length !== 14) throw new ProtocolError(`ANGLES expects 14 fields, got ${fields.length}`);
  const angles: Record<string, number> = {};
  ANGLE_CHANNELS.forEach((ch, i) => { angles[ch] = num(fields[1 + i], ch); });
  return { topic: "ANGLES", tMs: num(fields[0], "t"), angles, flags: num(fields[13], "flags") };
}

function parsePlayback(fields: string[]): PlaybackEvent {
  if (fields.length !== 4) throw new ProtocolError(`PLAYBACK expects 4 fields, got ${fields.length}`);
  const state = fields[2];
  if (state !== "PLAYING" && state !== "PAUSED") throw new ProtocolError(`bad state ${state}`);
  return {
    topic: "PLAYBACK",
    positionMs: num(fields[0], "position"),
    durationMs: num(fields[1], "duration"),
    state,
    rate: num(fields[3], "rate"),
  };
}

function parseGame(fields: string[]): GameEvent {
  if (fields.length < 6) throw new ProtocolError(`GAME expects >= 6 fields, got ${fields.length}`);
  return {
    topic: "GAME",
    tMs: num(fields[0], "t"),
    game: fields[1],
    level: num(fields[2], "level"),
    phase: fields[3],
    completions: num(fields[4], "completions"),
    score: num(fields[5], "score"),
    events: fields.length > 6 && fields[6] ? fields[6].split(";") : [],
  };
}

/** Parse one bridge line; returns null for non-EVT lines (OK/ERR acks). */
export function parseEventLine(line: string): BridgeEvent | null {
  const trimmed = line.trim();
  if (!trimmed.startsWith("EVT ")) return null;
  const [, topic, payload = ""] = trimmed.split(" ", 3);
  const rest = trimmed.slice(4 + topic.length + 1);
  const fields = (rest || payload).split(",");
  switch (topic) {
    case "CALIB": return parseCalib(fields);
    case "MOUNT": return parseMount(fields);
    case "POSE": return parsePose(fields);
    case "ANGLES": return parseAngles(fields);
    case "PLAYBACK": return parsePlayback(fields);
    case "GAME": return parseGame(fields);
    default: throw new ProtocolError(`unknown topic ${topic}`);
  }
}

export type CommandVerb =
  | "PLAY" | "PAUSE" | "SEEK" | "VIEW" | "SELECT_EXERCISE"
  | "CAPTURE_KEYPOINT" | "SET_INTERVAL" | "SAVE_EXERCISE";

export function commandLine(verb: CommandVerb, args = ""): string {
  return args ? `CMD ${verb} ${args}` : `CMD ${verb}`;
}
