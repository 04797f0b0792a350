// Round-trip against a real gateway: storms, swaps, reconnect reconstruction.
// Spawns the Python engine+gateway as a subprocess on a test port.

import { ChildProcess, spawn } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import WebSocket from "ws";

import { GatewayClient } from "../src/client.js";
import { initialState, reduce, ViewState } from "../src/state.js";
import { StreamMessage } from "../src/types.js";

const PORT = 8471;
const BASE = `http://127.0.0.1:${PORT}`;
let gateway: ChildProcess;

function launchGateway(): ChildProcess {
  const code = [
    "import uvicorn",
    "from lanecast.gateway import create_app",
    `uvicorn.run(create_app(), host='127.0.0.1', port=${PORT}, log_level='warning')`,
  ].join("\n");
  return spawn("python3", ["-c", code], { stdio: ["ignore", "inherit", "inherit"] });
}

async function waitForReady(timeoutMs = 20000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/session`);
      if (response.status === 200) return;
    } catch {
      // not listening yet
    }
    await new Promise((r) => setTimeout(r, 150));
  }
  throw new Error("gateway did not become ready");
}

function wsFactory(url: string) {
  return new WebSocket(url) as any;
}

class StreamHarness {
  view: ViewState = initialState;
  messages: StreamMessage[] = [];
  client: GatewayClient;

  constructor() {
    this.client = new GatewayClient(BASE, { wsFactory, reconnectDelayMs: 200 });
  }

  connect(): void {
    this.client.connectStream((message) => {
      this.messages.push(message);
      this.view = reduce(this.view, message);
    });
  }

  disconnect(): void {
    this.client.disconnectStream();
  }

  async waitFor(predicate: () => boolean, timeoutMs = 8000, what = "condition"): Promise<void> {
    const deadline = Date.now() + timeoutMs;
    while (Date.now() < deadline) {
      if (predicate()) return;
      await new Promise((r) => setTimeout(r, 25));
    }
    throw new Error(`timed out waiting for ${what}`);
  }
}

beforeAll(async () => {
  gateway = launchGateway();
  await waitForReady();
}, 30000);

afterAll(() => {
  gateway?.kill();
});

describe("console round-trip against a local engine", () => {
  const harness = new StreamHarness();

  it("starts a session and syncs state", async () => {
    await harness.client.startSession({
      playlist: [{ song_name: "夜航", duration: 200 }, { song_name: "群星备份", duration: 200 }],
      clock: "simulated",
      speed: 10,
    });
    harness.connect();
    await harness.waitFor(() => harness.view.session?.state === "Running", 8000, "running session");
    expect(harness.view.personas).toContain("suwanli");
  }, 20000);

  it("a 50-gift storm produces 50 ticker entries", async () => {
    const before = harness.view.ticker.filter((e) => e.event.kind === "gift").length;
    const result = await harness.client.giftStorm(50);
    expect(result.accepted).toBe(50);
    await harness.waitFor(
      () => harness.view.ticker.filter((e) => e.event.kind === "gift").length >= before + 50,
      10000,
      "50 gift ticker entries",
    );
    const gifts = harness.view.ticker.filter((e) => e.event.kind === "gift");
    expect(gifts.length).toBe(before + 50);
  }, 30000);

  it("persona swap is confirmed by a stream delta within 500 ms", async () => {
    const t0 = Date.now();
    await harness.client.swapPersona("suwanli");
    await harness.waitFor(
      () => harness.view.session?.persona === "苏晚璃",
      500,
      "persona delta",
    );
    expect(Date.now() - t0).toBeLessThan(500);
  }, 20000);

  it("urgent speech appears in the interaction log", async () => {
    await harness.client.insertUrgent("操作员插播一条");
    await harness.waitFor(
      () => harness.view.speech.some((s) => s.source === "urgent"),
      8000,
      "urgent speech entry",
    );
  }, 20000);

  it("disconnect/reconnect reconstructs lanes and timeline from the stream alone", async () => {
    await harness.client.injectEvent({ kind: "danmaku", content: "重连前的弹幕", user: "u1" });
    await harness.waitFor(
      () => harness.view.ticker.some((e) => e.event.content === "重连前的弹幕"),
      8000,
      "danmaku on ticker",
    );
    harness.disconnect();

    const fresh = new StreamHarness();
    fresh.connect();
    await fresh.waitFor(() => fresh.view.session !== null, 8000, "resync");
    expect(fresh.view.session?.state).toBe("Running");
    expect(fresh.view.session?.persona).toBe("苏晚璃");
    expect(fresh.view.lanes).not.toBeNull();
    expect(fresh.view.segments.length).toBeGreaterThan(0);
    expect(fresh.view.ticker.some((e) => e.event.content === "重连前的弹幕")).toBe(true);
    fresh.disconnect();
    await harness.client.stopSession();
  }, 30000);
});
