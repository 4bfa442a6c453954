import { describe, expect, it } from "vitest";

import {
  ANGLE_CHANNELS, commandLine, parseEventLine, ProtocolError, SEGMENTS,
} from "../src/protocol.js";

const CALIB_LINE = "EVT CALIB 100," +
  "3,3,3,3,3,3,3,3,3,3,3,3,3,3,3,1,DONE";
const MOUNT_LINE = "EVT MOUNT 100,4.5000,12.0000,ALIGNED,-7.2000,11.0000,ROTATE_FORWARD";
const POSE_LINE = "EVT POSE 100,PATIENT," + Array(20).fill("0.000000")
  .map((v, i) => (i % 4 === 0 ? "1.000000" : v)).join(",");
const ANGLES_LINE = "EVT ANGLES 100," +
  "1.0,2.0,3.0,4.0,5.0,6.0,7.0,8.0,9.0,10.0,11.0,12.0,5";
const PLAYBACK_LINE = "EVT PLAYBACK 1500,6000,PLAYING,1";
const GAME_LINE = "EVT GAME 100,fork,2,AWAIT_POKE,4,400,RING_OPEN;RING_ROTATE";

describe("event parsing", () => {
  it("parses CALIB with 15 levels", () => {
    const ev = parseEventLine(CALIB_LINE);
    if (ev?.topic !== "CALIB") throw new Error("wrong topic");
    expect(ev.ready).toBe(true);
    expect(ev.nextStep).toBe("DONE");
    for (const seg of SEGMENTS) {
      expect(ev.levels[seg]).toEqual({ gyro: 3, accel: 3, mag: 3 });
    }
  });

  it("parses MOUNT sides", () => {
    const ev = parseEventLine(MOUNT_LINE);
    if (ev?.topic !== "MOUNT") throw new Error("wrong topic");
    expect(ev.left.cue).toBe("ALIGNED");
    expect(ev.right.ieRotation).toBeCloseTo(-7.2);
  });

  it("parses POSE quaternions per segment", () => {
    const ev = parseEventLine(POSE_LINE);
    if (ev?.topic !== "POSE") throw new Error("wrong topic");
    expect(ev.role).toBe("PATIENT");
    expect(ev.quats.LA).toEqual({ w: 1, x: 0, y: 0, z: 0 });
  });

  it("parses ANGLES into named channels", () => {
    const ev = parseEventLine(ANGLES_LINE);
    if (ev?.topic !== "ANGLES") throw new Error("wrong topic");
    expect(ev.angles["l_shoulder_plane"]).toBe(1);
    expect(ev.angles["r_pronation"]).toBe(12);
    expect(ev.flags).toBe(5);
    expect(Object.keys(ev.angles)).toHaveLength(ANGLE_CHANNELS.length);
  });

  it("parses PLAYBACK and GAME", () => {
    const pb = parseEventLine(PLAYBACK_LINE);
    if (pb?.topic !== "PLAYBACK") throw new Error("wrong topic");
    expect(pb.state).toBe("PLAYING");
    const game = parseEventLine(GAME_LINE);
    if (game?.topic !== "GAME") throw new Error("wrong topic");
    expect(game.events).toEqual(["RING_OPEN", "RING_ROTATE"]);
  });

  it("ignores acknowledgement lines", () => {
    expect(parseEventLine("OK SEEK")).toBeNull();
    expect(parseEventLine("ERR CONTROL busy")).toBeNull();
  });

  it("rejects malformed payloads", () => {
    expect(() => parseEventLine("EVT CALIB 1,2,3")).toThrow(ProtocolError);
    expect(() => parseEventLine("EVT WHAT 1")).toThrow(ProtocolError);
    expect(() => parseEventLine("EVT ANGLES 1,x,,,,,,,,,,,,")).toThrow(ProtocolError);
  });

  it("serializes commands", () => {
    expect(commandLine("SEEK", "1500")).toBe("CMD SEEK 1500");
    expect(commandLine("PLAY")).toBe("CMD PLAY");
  });
});
