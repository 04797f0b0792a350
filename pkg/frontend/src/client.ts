// Gateway client: one control request per user action, plus the stream
// connection. Fetch and WebSocket implementations are injectable so tests
// and Node environments can supply their own.

import { LiveEventWire, StreamMessage } from "./types.js";

export type FetchLike = (url: string, init?: any) => Promise<{ status: number; json(): Promise<any> }>;

export interface WebSocketLike {
  onmessage: ((event: { data: any }) => void) | null;
  onclose: (() => void) | null;
  onopen: (() => void) | null;
  close(): void;
}

export type WsFactory = (url: string) => WebSocketLike;

export interface ClientOptions {
  fetchImpl?: FetchLike;
  wsFactory?: WsFactory;
  reconnectDelayMs?: number;
}

export class GatewayError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

export class GatewayClient {
  private fetchImpl: FetchLike;
  private wsFactory: WsFactory;
  private reconnectDelayMs: number;
  private socket: WebSocketLike | null = null;
  private wantStream = false;

  constructor(public baseUrl: string, options: ClientOptions = {}) {
    this.fetchImpl = options.fetchImpl ?? ((url, init) => fetch(url, init));
    this.wsFactory =
      options.wsFactory ?? ((url) => new (globalThis as any).WebSocket(url) as WebSocketLike);
    this.reconnectDelayMs = options.reconnectDelayMs ?? 1000;
  }

  private async post(path: string, body: unknown): Promise<any> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    const payload = await response.json();
    if (response.status >= 400) {
      throw new GatewayError(response.status, payload.detail ?? "request failed");
    }
    return payload;
  }

  startSession(body: {
    profile?: Record<string, unknown> | null;
    playlist?: { song_name: string; duration: number; lyrics_lrc?: string }[];
    clock?: string;
    speed?: number;
  }): Promise<any> {
    return this.post("/session/start", body);
  }

  stopSession(): Promise<any> {
    return this.post("/session/stop", {});
  }

  injectEvent(event: Partial<LiveEventWire>): Promise<{ accepted: boolean }> {
    return this.post("/event", event);
  }

  async giftStorm(
    count: number,
    giftName = "玫瑰",
    delayMs = 0,
  ): Promise<{ sent: number; accepted: number }> {
    let accepted = 0;
    for (let i = 0; i < count; i++) {
      const result = await this.injectEvent({
        kind: "gift",
        content: giftName,
        user: `console-${i}`,
        count: 1,
      });
      if (result.accepted) accepted += 1;
      if (delayMs > 0) await new Promise((resolve) => setTimeout(resolve, delayMs));
    }
    return { sent: count, accepted };
  }

  swapPersona(name: string): Promise<{ ok: boolean; persona: string }> {
    return this.post("/persona/swap", { name });
  }

  insertUrgent(text: string): Promise<{ ok: boolean }> {
    return this.post("/speech/urgent", { text });
  }

  async report(): Promise<any> {
    const response = await this.fetchImpl(`${this.baseUrl}/report`);
    return response.json();
  }

  wsUrl(): string {
    return this.baseUrl.replace(/^http/, "ws") + "/ws";
  }

  connectStream(
    onMessage: (message: StreamMessage) => void,
    onStatus?: (connected: boolean) => void,
  ): void {
    this.wantStream = true;
    const open = () => {
      if (!this.wantStream) return;
      const socket = this.wsFactory(this.wsUrl());
      this.socket = socket;
      socket.onopen = () => onStatus?.(true);
      socket.onmessage = (event) => onMessage(JSON.parse(String(event.data)));
      socket.onclose = () => {
        onStatus?.(false);
        if (this.wantStream) setTimeout(open, this.reconnectDelayMs);
      };
    };
    open();
  }

  disconnectStream(): void {
    this.wantStream = false;
    this.socket?.close();
    this.socket = null;
  }
}
