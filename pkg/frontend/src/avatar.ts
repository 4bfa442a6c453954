// Minimal capsule humanoid: five posed segments (spine, both upper arms,
// both forearms) drawn as thick line segments. Bone rotations are exactly
// the streamed left-handed quaternions applied through the rig hierarchy;
// the UI never computes any kinematics of its own.

import type { Camera } from "./state.js";
import type { Quat, Segment } from "./protocol.js";

export interface Vec3 {
  x: number;
  y: number;
  z: number;
}

export const IDENTITY: Quat = { w: 1, x: 0, y: 0, z: 0 };

export function quatMul(p: Quat, q: Quat): Quat {
  return {
    w: p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
    x: p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
    y: p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
    z: p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
  };
}

export function rotate(q: Quat, v: Vec3): Vec3 {
  const tx = 2 * (q.y * v.z - q.z * v.y);
  const ty = 2 * (q.z * v.x - q.x * v.z);
  const tz = 2 * (q.x * v.y - q.y * v.x);
  return {
    x: v.x + q.w * tx + (q.y * tz - q.z * ty),
    y: v.y + q.w * ty + (q.z * tx - q.x * tz),
    z: v.z + q.w * tz + (q.x * ty - q.y * tx),
  };
}

interface Bone {
  segment: Segment;
  parent: Segment | null;
  /** attachment point on the parent, in the parent's rest frame */
  offset: Vec3;
  /** rest-pose direction and length of the bone */
  restDir: Vec3;
  length: number;
}

// T-pose rig, y up: spine rises from the hips, arms stretch sideways.
const RIG: Bone[] = [
  { segment: "B", parent: null, offset: { x: 0, y: 0, z: 0 }, restDir: { x: 0, y: 1, z: 0 }, length: 0.55 },
  { segment: "LA", parent: "B", offset: { x: -0.22, y: 0.5, z: 0 }, restDir: { x: -1, y: 0, z: 0 }, length: 0.3 },
  { segment: "RA", parent: "B", offset: { x: 0.22, y: 0.5, z: 0 }, restDir: { x: 1, y: 0, z: 0 }, length: 0.3 },
  { segment: "LF", parent: "LA", offset: { x: -0.3, y: 0, z: 0 }, restDir: { x: -1, y: 0, z: 0 }, length: 0.28 },
  { segment: "RF", parent: "RA", offset: { x: 0.3, y: 0, z: 0 }, restDir: { x: 1, y: 0, z: 0 }, length: 0.28 },
];

export interface AvatarSegment {
  segment: Segment;
  from: Vec3;
  to: Vec3;
}

/** Pose the rig: world rotation of each bone is the hierarchy composition
 * of the streamed per-bone quaternions. */
export function poseAvatar(quats: Record<Segment, Quat>): AvatarSegment[] {
  const world: Partial<Record<Segment, { rot: Quat; origin: Vec3 }>> = {};
  const out: AvatarSegment[] = [];
  for (const bone of RIG) {
    const local = quats[bone.segment] ?? IDENTITY;
    let rot = local;
    let origin = { x: 0, y: 0.1, z: 0 };
    if (bone.parent) {
      const parent = world[bone.parent]!;
      rot = quatMul(parent.rot, local);
      const attach = rotate(parent.rot, bone.offset);
      origin = {
        x: parent.origin.x + attach.x,
        y: parent.origin.y + attach.y,
        z: parent.origin.z + attach.z,
      };
    }
    const dir = rotate(rot, bone.restDir);
    const to = {
      x: origin.x + dir.x * bone.length,
      y: origin.y + dir.y * bone.length,
      z: origin.z + dir.z * bone.length,
    };
    world[bone.segment] = { rot, origin };
    out.push({ segment: bone.segment, from: origin, to });
  }
  return out;
}

export interface Projected {
  segment: Segment;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

/** Orthographic projection for the four fixed camera views. */
export function project(segments: AvatarSegment[], camera: Camera): Projected[] {
  const map = (v: Vec3): [number, number] => {
    switch (camera) {
      case "FRONT": return [v.x, v.y];
      case "BACK": return [-v.x, v.y];
      case "LEFT": return [v.z, v.y];
      case "RIGHT": return [-v.z, v.y];
    }
  };
  return segments.map((s) => {
    const [x1, y1] = map(s.from);
    const [x2, y2] = map(s.to);
    return { segment: s.segment, x1, y1, x2, y2 };
  });
}
