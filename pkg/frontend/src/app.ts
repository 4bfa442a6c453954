// Browser shell: WebSocket client with auto-reconnect, DOM painting of the
// render model, and user actions mapped to bridge commands. All state
// transitions go through the pure reducers; this file only paints.

import { commandLine, parseEventLine, ProtocolError } from "./protocol.js";
import {
  applyEvent, applyViewAction, CAMERAS, emptyStore, initialView, SCREENS,
  type Screen, type TopicStore, type ViewState,
} from "./state.js";
import { renderModel, type RenderModel } from "./render.js";

const RECONNECT_BASE_MS = 500;
const RECONNECT_MAX_MS = 10_000;

class BridgeClient {
  private ws: WebSocket | null = null;
  private attempts = 0;
  private carry = "";

  constructor(
    private url: string,
    private onLine: (line: string) => void,
    private onStatus: (connected: boolean) => void,
  ) {
    this.connect();
  }

  private connect(): void {
    this.ws = new WebSocket(this.url);
    this.ws.onopen = () => {
      this.attempts = 0;
      this.onStatus(true);
    };
    this.ws.onmessage = (msg) => {
      this.carry += String(msg.data);
      let idx;
      while ((idx = this.carry.indexOf("\n")) >= 0) {
        const line = this.carry.slice(0, idx);
        this.carry = this.carry.slice(idx + 1);
        if (line.trim()) this.onLine(line);
      }
    };
    this.ws.onclose = () => {
      this.onStatus(false);
      const backoff = Math.min(RECONNECT_BASE_MS * 2 ** this.attempts, RECONNECT_MAX_MS);
      this.attempts += 1;
      setTimeout(() => this.connect(), backoff);
    };
    this.ws.onerror = () => this.ws?.close();
  }

  send(line: string): void {
    if (this.ws && this.ws.readyState === WebSocket.OPEN) {
      this.ws.send(line + "\n");
    }
  }
}

class App {
  private store: TopicStore = emptyStore();
  private view: ViewState = initialView();
  private connected = false;
  private client: BridgeClient;

  constructor(private root: HTMLElement, url: string) {
    this.client = new BridgeClient(
      url,
      (line) => this.onLine(line),
      (connected) => {
        this.connected = connected;
        this.paint();
      },
    );
    this.buildChrome();
    setInterval(() => this.paint(), 100); // staleness re-evaluation
  }

  private onLine(line: string): void {
    try {
      const event = parseEventLine(line);
      if (event) {
        this.store = applyEvent(this.store, event, performance.now());
        this.paint();
      }
    } catch (err) {
      if (!(err instanceof ProtocolError)) throw err;
      console.warn("dropped malformed bridge line", line, err);
    }
  }

  private act(action: Parameters<typeof applyViewAction>[1]): void {
    this.view = applyViewAction(this.view, action);
    this.paint();
  }

  private buildChrome(): void {
    const nav = el("nav", {});
    for (const screen of SCREENS) {
      const button = el("button", { textContent: screen, id: `nav-${screen}` });
      button.onclick = () => this.act({ kind: "SET_SCREEN", screen: screen as Screen });
      nav.appendChild(button);
    }
    const cameras = el("select", { id: "camera" }) as HTMLSelectElement;
    for (const cam of CAMERAS) {
      cameras.appendChild(el("option", { textContent: cam, value: cam }) as HTMLOptionElement);
    }
    cameras.onchange = () => {
      this.act({ kind: "SET_CAMERA", camera: cameras.value as ViewState["camera"] });
      this.client.send(commandLine("VIEW", cameras.value));
    };
    const info = el("button", { textContent: "i", id: "info-toggle", title: "toggle angle panels" });
    info.onclick = () => this.act({ kind: "TOGGLE_PANELS" });
    nav.appendChild(cameras);
    nav.appendChild(info);
    this.root.appendChild(el("div", { id: "banner" }));
    this.root.appendChild(nav);
    this.root.appendChild(el("main", { id: "screen" }));
  }

  private paint(): void {
    const model = renderModel(this.store, this.view, performance.now());
    const banner = this.root.querySelector("#banner") as HTMLElement;
    banner.textContent = this.connected ? "" : "bridge disconnected, reconnecting...";
    banner.className = this.connected ? "hidden" : "visible";
    const main = this.root.querySelector("#screen") as HTMLElement;
    main.replaceChildren(this.paintScreen(model));
  }

  private paintScreen(model: RenderModel): HTMLElement {
    switch (model.screen) {
      case "CALIB": return this.paintCalib(model);
      case "MOUNT": return this.paintMount(model);
      case "PATIENT": return this.paintPatient(model);
      case "PLAYBACK": return this.paintPlayback(model);
      case "AUTHOR": return this.paintAuthor(model);
    }
  }

  private paintCalib(model: RenderModel): HTMLElement {
    const box = el("section", { className: "calib" });
    if (!model.calib) return withMessage(box, "waiting for calibration data");
    const table = el("div", { className: "bars" });
    for (const bar of model.calib.bars) {
      const row = el("div", { className: "bar-row" });
      row.appendChild(el("span", { textContent: `${bar.segment} ${bar.sensor}` }));
      const track = el("div", { className: "bar-track" });
      const fill = el("div", { className: `bar-fill ${bar.fill}` });
      fill.style.width = `${bar.fraction * 100}%`;
      track.appendChild(fill);
      row.appendChild(track);
      table.appendChild(row);
    }
    box.appendChild(table);
    box.appendChild(el("p", {
      textContent: model.calib.ready ? "all sensors calibrated" : `next: ${model.calib.nextStep}`,
    }));
    return box;
  }

  private paintMount(model: RenderModel): HTMLElement {
    const box = el("section", { className: "mount" });
    if (!model.mount) return withMessage(box, "waiting for mounting data");
    for (const [label, side] of [["left", model.mount.left], ["right", model.mount.right]] as const) {
      const card = el("div", { className: "mount-side" });
      card.appendChild(el("h3", { textContent: `${label} arm` }));
      const arrow = side.cue === "ALIGNED" ? "ok" :
        side.cue === "ROTATE_FORWARD" ? "arrow-forward" : "arrow-backward";
      card.appendChild(el("div", { className: `cue ${arrow}`, textContent: side.cue }));
      card.appendChild(el("p", { textContent: `int-ext ${side.ieRotation} deg, carrying ${side.carrying} deg` }));
      box.appendChild(card);
    }
    return box;
  }

  private paintAvatars(model: RenderModel, withInstructor: boolean): HTMLElement {
    const wrap = el("div", { className: "avatars" });
    const draw = (segments: NonNullable<RenderModel["patient"]>["segments"],
                  cls: string, label: string) => {
      const canvas = el("canvas", { className: cls }) as HTMLCanvasElement;
      canvas.width = 320;
      canvas.height = 360;
      const ctx = canvas.getContext("2d")!;
      ctx.lineWidth = 14;
      ctx.lineCap = "round";
      ctx.strokeStyle = cls.includes("instructor") ? "#c78df0" : "#5aa0e0";
      for (const seg of segments) {
        ctx.beginPath();
        ctx.moveTo(160 + seg.x1 * 180, 330 - seg.y1 * 260);
        ctx.lineTo(160 + seg.x2 * 180, 330 - seg.y2 * 260);
        ctx.stroke();
      }
      const cell = el("figure", {});
      cell.appendChild(canvas);
      cell.appendChild(el("figcaption", { textContent: label }));
      return cell;
    };
    if (withInstructor && model.instructor) {
      wrap.appendChild(draw(model.instructor.segments, "avatar instructor", "instructor"));
    }
    if (model.patient) {
      const cls = model.patient.stale ? "avatar patient stale" : "avatar patient";
      wrap.appendChild(draw(model.patient.segments, cls,
        model.patient.stale ? "patient (stale)" : "patient"));
    }
    return wrap;
  }

  private paintPanels(model: RenderModel): HTMLElement {
    const panels = el("div", { className: "panels" });
    if (!model.anglePanels) return panels;
    for (const [label, rows] of [["left", model.anglePanels.left],
                                 ["right", model.anglePanels.right]] as const) {
      const panel = el("div", { className: `panel ${label}` });
      panel.appendChild(el("h4", { textContent: label }));
      for (const [name, value] of rows) {
        panel.appendChild(el("div", { textContent: `${name}: ${value} deg` }));
      }
      panels.appendChild(panel);
    }
    return panels;
  }

  private paintPatient(model: RenderModel): HTMLElement {
    const box = el("section", { className: "patient" });
    box.appendChild(this.paintAvatars(model, true));
    box.appendChild(this.paintPanels(model));
    return box;
  }

  private paintPlayback(model: RenderModel): HTMLElement {
    const box = el("section", { className: "playback" });
    box.appendChild(this.paintAvatars(model, false));
    const controls = el("div", { className: "controls" });
    const play = el("button", { textContent: "play" });
    play.onclick = () => this.client.send(commandLine("PLAY"));
    const pause = el("button", { textContent: "pause" });
    pause.onclick = () => this.client.send(commandLine("PAUSE"));
    controls.appendChild(play);
    controls.appendChild(pause);
    const seek = el("input", { type: "range", min: "0", max: "1000", id: "seek" }) as HTMLInputElement;
    if (model.playback) {
      seek.value = String(Math.round(model.playback.seekFraction * 1000));
      controls.appendChild(el("span", {
        textContent: `${model.playback.positionMs} / ${model.playback.durationMs} ms (${model.playback.state})`,
      }));
    }
    seek.onchange = () => {
      if (!model.playback) return;
      const toMs = Math.round((Number(seek.value) / 1000) * model.playback.durationMs);
      this.client.send(commandLine("SEEK", String(toMs)));
    };
    controls.appendChild(seek);
    box.appendChild(controls);
    box.appendChild(this.paintPanels(model));
    return box;
  }

  private paintAuthor(model: RenderModel): HTMLElement {
    const box = el("section", { className: "author" });
    box.appendChild(this.paintAvatars(model, false));
    const controls = el("div", { className: "controls" });
    const capture = el("button", { textContent: "capture keypoint" });
    capture.onclick = () => this.client.send(commandLine("CAPTURE_KEYPOINT"));
    const save = el("button", { textContent: "save exercise" });
    save.onclick = () => this.client.send(commandLine("SAVE_EXERCISE"));
    const name = el("input", { type: "text", placeholder: "exercise name", id: "exercise-name" }) as HTMLInputElement;
    name.onchange = () => {
      this.act({ kind: "SELECT_EXERCISE", name: name.value });
      this.client.send(commandLine("SELECT_EXERCISE", name.value));
    };
    controls.appendChild(capture);
    controls.appendChild(save);
    controls.appendChild(name);
    box.appendChild(controls);
    return box;
  }
}

function el(tag: string, props: Record<string, string>): HTMLElement {
  const node = document.createElement(tag);
  Object.assign(node, props);
  return node;
}

function withMessage(box: HTMLElement, text: string): HTMLElement {
  box.appendChild(el("p", { className: "placeholder", textContent: text }));
  return box;
}

export function start(): void {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");
  const params = new URLSearchParams(location.search);
  const url = params.get("bridge") ?? `ws://${location.hostname || "127.0.0.1"}:8787`;
  new App(root, url);
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  start();
}
