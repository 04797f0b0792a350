// Console bootstrap: wire the stream into the reducer, paint on each
// message batch, and map form submissions onto gateway control calls.

import { GatewayClient } from "./client.js";
import { initialState, reduce, setConnected, ViewState } from "./state.js";
import { drawLanes, timelineCells } from "./render.js";
import { StreamMessage } from "./types.js";

const baseUrl = `http://${location.host}`;
const client = new GatewayClient(baseUrl);
let view: ViewState = initialState;

const canvas = document.getElementById("lanes") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;

function el<T extends HTMLElement>(id: string): T {
  return document.getElementById(id) as T;
}

function paint(): void {
  el<HTMLSpanElement>("conn").textContent = view.connected ? "connected" : "disconnected";
  el<HTMLSpanElement>("conn").className = view.connected ? "ok" : "bad";
  const session = view.session;
  el<HTMLSpanElement>("session-state").textContent = session ? session.state : "-";
  el<HTMLSpanElement>("persona-name").textContent = session?.persona ?? "-";
  el<HTMLSpanElement>("song-name").textContent = session?.current_song ?? "-";
  el<HTMLSpanElement>("clock-t").textContent = session ? session.t.toFixed(1) + "s" : "-";

  drawLanes(ctx, view.lanes, canvas.width, canvas.height);

  const timeline = el<HTMLDivElement>("timeline");
  timeline.innerHTML = "";
  for (const cell of timelineCells(view.segments)) {
    const node = document.createElement("span");
    node.className = `seg ${cell.cssClass}`;
    node.textContent = `${cell.segment}:${cell.state}`;
    timeline.appendChild(node);
  }

  const m = view.metrics;
  el<HTMLSpanElement>("m-overlap").textContent = m ? m.overlap_rate.toFixed(2) : "-";
  el<HTMLSpanElement>("m-drops").textContent = m ? String(m.drops) : "-";
  el<HTMLSpanElement>("m-dup").textContent = m ? m.duplicate_rate.toFixed(2) : "-";
  el<HTMLSpanElement>("m-fx").textContent = m ? String(m.fx_admitted) : "-";
  el<HTMLSpanElement>("m-gaps").textContent = String(view.gapsDropped);

  const ticker = el<HTMLUListElement>("ticker");
  ticker.innerHTML = "";
  for (const entry of view.ticker.slice(-30).reverse()) {
    const node = document.createElement("li");
    const e = entry.event;
    node.textContent = `[${e.kind}] ${e.user}: ${e.content}${entry.reaction ? ` (${entry.reaction})` : ""}`;
    ticker.appendChild(node);
  }

  const log = el<HTMLUListElement>("speech-log");
  log.innerHTML = "";
  for (const item of view.speech.slice(-20).reverse()) {
    const node = document.createElement("li");
    node.textContent = `${item.t.toFixed(1)}s [${item.source}] ${item.text}`;
    log.appendChild(node);
  }
}

function apply(message: StreamMessage): void {
  view = reduce(view, message);
  if (message.type === "state_sync" && view.personas.length) {
    const selector = el<HTMLSelectElement>("persona-select");
    if (!selector.options.length) {
      for (const name of view.personas) {
        const option = document.createElement("option");
        option.value = name;
        option.textContent = name;
        selector.appendChild(option);
      }
    }
  }
  paint();
}

function toast(text: string): void {
  const box = el<HTMLDivElement>("toast");
  box.textContent = text;
  box.classList.add("show");
  setTimeout(() => box.classList.remove("show"), 2500);
}

async function guard(action: () => Promise<unknown>): Promise<void> {
  try {
    await action();
  } catch (error: any) {
    toast(error?.message ?? String(error));
    paint(); // revert any optimistic UI
  }
}

function wireControls(): void {
  el<HTMLButtonElement>("btn-start").onclick = () =>
    guard(() =>
      client.startSession({
        profile: { duration: 3600, dmk_rate: 4.0, storm_probability: 0.15, seed: 42 },
        playlist: [
          { song_name: "夜航", duration: 190 },
          { song_name: "群星备份", duration: 205 },
          { song_name: "白噪温柔", duration: 180 },
        ],
        clock: "simulated",
        speed: 1.0,
      }),
    );
  el<HTMLButtonElement>("btn-stop").onclick = () => guard(() => client.stopSession());

  el<HTMLFormElement>("form-danmaku").onsubmit = (event) => {
    event.preventDefault();
    const input = el<HTMLInputElement>("danmaku-text");
    const text = input.value.trim();
    if (!text) return;
    guard(() => client.injectEvent({ kind: "danmaku", content: text, user: "操作员" }));
    input.value = "";
  };

  el<HTMLFormElement>("form-storm").onsubmit = (event) => {
    event.preventDefault();
    const count = Number(el<HTMLInputElement>("storm-count").value) || 50;
    guard(() => client.giftStorm(count));
  };

  const urgentInput = el<HTMLInputElement>("urgent-text");
  const urgentButton = el<HTMLButtonElement>("btn-urgent");
  urgentInput.oninput = () => {
    urgentButton.disabled = urgentInput.value.trim() === "";
  };
  el<HTMLFormElement>("form-urgent").onsubmit = (event) => {
    event.preventDefault();
    const text = urgentInput.value.trim();
    if (!text) return;
    guard(() => client.insertUrgent(text));
    urgentInput.value = "";
    urgentButton.disabled = true;
  };

  el<HTMLButtonElement>("btn-swap").onclick = () => {
    const selector = el<HTMLSelectElement>("persona-select");
    if (selector.value) guard(() => client.swapPersona(selector.value));
  };
}

wireControls();
client.connectStream(apply, (connected) => {
  view = setConnected(view, connected);
  paint();
});
